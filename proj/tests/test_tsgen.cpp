#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>
#include <vector>

#include "blockmax/error.hpp"
#include "blockmax/evd.hpp"
#include "blockmax/tsgen.hpp"
#include "blockmax/ustat.hpp"
#include "test_support.hpp"

using namespace blockmax;
using testing_support::kKs1Percent;
using testing_support::ks_distance;

namespace {

double cauchy_cdf(double x, double scale) { return 0.5 + std::atan(x / scale) / std::numbers::pi; }

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

double quantile(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  return x[static_cast<std::size_t>(q * (x.size() - 1))];
}

}  // namespace

TEST_CASE("derive_seed and RngStream") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  std::unordered_set<Seed> seen;
  seen.reserve(1'000'000);
  for (std::uint64_t i = 0; i < 1'000'000; ++i) seen.insert(derive_seed(42, i, i % 3));
  CHECK(seen.size() == 1'000'000);

  // Chi-square on the low 8 bits, 255 degrees of freedom, 1% critical value 310.46.
  std::vector<double> bins(256, 0.0);
  const std::size_t n = 256'000;
  for (std::uint64_t i = 0; i < n; ++i) bins[derive_seed(7, i, 0) & 0xff] += 1.0;
  double chi2 = 0.0;
  for (double b : bins) chi2 += (b - 1000.0) * (b - 1000.0) / 1000.0;
  CHECK(chi2 < 310.46);

  // First uniform of each derived stream, 100 bins, 1% critical value 134.64.
  std::vector<double> ub(100, 0.0);
  for (std::uint64_t i = 0; i < 100'000; ++i) {
    RngStream s(derive_seed(9, i, 1));
    ub[static_cast<std::size_t>(s.uniform() * 100)] += 1.0;
  }
  double chi2u = 0.0;
  for (double b : ub) chi2u += (b - 1000.0) * (b - 1000.0) / 1000.0;
  CHECK(chi2u < 134.64);

  RngStream a(5, 1), b(5, 1), c(5, 2);
  bool differs = false;
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs = differs || x != c.next_u64();
  }
  CHECK(differs);
}

TEST_CASE("gen_armax") {
  RngStream rng(1);
  const auto z = gen_armax(1000, 0.0, rng);
  CHECK(z.size() == 1000);
  CHECK(ks_distance(z, frechet_cdf) < kKs1Percent / std::sqrt(1000.0));

  // Stationarity: across replications the first and last values are Fréchet(1).
  const std::size_t reps = 4000, len = 200;
  std::vector<double> first(reps), last(reps), maxima(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    RngStream local(derive_seed(11, i, 0));
    const auto y = gen_armax(len, 0.5, local);
    first[i] = y.front();
    last[i] = y.back();
    maxima[i] = *std::max_element(y.begin(), y.begin() + 90);
  }
  const double crit = kKs1Percent / std::sqrt(static_cast<double>(reps));
  CHECK(ks_distance(first, frechet_cdf) < crit);
  CHECK(ks_distance(last, frechet_cdf) < crit);
  CHECK(testing_support::ks_two_sample(first, last) < kKs1Percent * std::sqrt(2.0 / reps));
  // P(M_90 <= x) = exp(-(1 + (1 - alpha) 89) / x).
  const double c = 1.0 + 0.5 * 89.0;
  CHECK(ks_distance(maxima, [c](double x) { return x > 0 ? std::exp(-c / x) : 0.0; }) < crit);

  // Disjoint subsampling of one long path.
  RngStream long_rng(12);
  const auto path = gen_armax(100'000, 0.5, long_rng);
  std::vector<double> thin;
  for (std::size_t i = 0; i < path.size(); i += 50) thin.push_back(path[i]);
  CHECK(ks_distance(thin, frechet_cdf) < 1.95 / std::sqrt(static_cast<double>(thin.size())));
}

TEST_CASE("gen_car") {
  const double phi = 0.5;
  const double scale = 1.0 / (1.0 - phi);
  const std::size_t reps = 4000;
  std::vector<double> first(reps), last(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    RngStream local(derive_seed(21, i, 0));
    const auto y = gen_car(150, phi, local);
    first[i] = y.front();
    last[i] = y.back();
  }
  const double crit = kKs1Percent / std::sqrt(static_cast<double>(reps));
  CHECK(ks_distance(first, [&](double x) { return cauchy_cdf(x, scale); }) < crit);
  CHECK(ks_distance(last, [&](double x) { return cauchy_cdf(x, scale); }) < crit);
  CHECK(testing_support::ks_two_sample(first, last) < kKs1Percent * std::sqrt(2.0 / reps));

  RngStream rng(22);
  const auto y = gen_car(100'000, phi, rng);
  // Quartile s.e. of Cauchy(0, s) at n = 1e5 is about 0.005 s, so 0.03 s is generous for a phi = 0.5 path.
  CHECK(std::fabs(quantile(y, 0.75) - scale) < 0.03 * scale);
  CHECK(std::fabs(quantile(y, 0.25) + scale) < 0.03 * scale);

  RngStream a(3), b(3);
  CHECK(gen_car(500, 0.7, a) == gen_car(500, 0.7, b));
  RngStream i0(4);
  const auto iid = gen_car(20'000, 0.0, i0);
  CHECK(ks_distance(iid, [](double x) { return cauchy_cdf(x, 1.0); }) < kKs1Percent / std::sqrt(20'000.0));
}

TEST_CASE("transform_margins") {
  const std::vector<double> med{-1.0 / std::log(0.5)};
  CHECK(transform_margins(med, MarginSource::frechet1(), 0.0)[0] == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  const std::vector<double> zero{0.0};
  CHECK(transform_margins(zero, MarginSource::cauchy_scale(2.0), 0.3)[0] ==
        doctest::Approx((std::pow(2.0, 0.3) - 1.0) / 0.3).epsilon(1e-13));
  CHECK(transform_margins(med, MarginSource::frechet1(), Marginal::frechet1())[0] ==
        doctest::Approx(med[0]).epsilon(1e-13));
  CHECK(transform_margins(med, MarginSource::frechet1(), Marginal::native())[0] == med[0]);

  RngStream rng(31);
  const auto y = gen_armax(5000, 0.3, rng);
  for (double g : {-0.3, 0.0, 0.4}) {
    const auto x = transform_margins(y, MarginSource::frechet1(), g);
    std::vector<std::size_t> ry(y.size()), rx(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) ry[i] = rx[i] = i;
    std::sort(ry.begin(), ry.end(), [&](auto a, auto b) { return y[a] < y[b]; });
    std::sort(rx.begin(), rx.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    CHECK(rx == ry);
  }

  // PIT of an i.i.d. sample.
  std::vector<double> f(100'000);
  for (double& v : f) v = rng.frechet();
  for (double g : {-0.2, 0.0, 0.3}) {
    const auto x = transform_margins(f, MarginSource::frechet1(), g);
    CHECK(ks_distance(x, [g](double v) { return gpd_cdf(v, g); }) < kKs1Percent / std::sqrt(100'000.0));
  }
  std::vector<double> c(100'000);
  for (double& v : c) v = 3.0 * rng.cauchy();
  const auto xc = transform_margins(c, MarginSource::cauchy_scale(3.0), 0.1);
  CHECK(ks_distance(xc, [](double v) { return gpd_cdf(v, 0.1); }) < kKs1Percent / std::sqrt(100'000.0));

  // Far upper tail keeps relative precision.
  const std::vector<double> huge{1e12};
  CHECK(transform_margins(huge, MarginSource::frechet1(), 0.0)[0] == doctest::Approx(12.0 * std::log(10.0)).epsilon(1e-10));
}

TEST_CASE("monotone transforms preserve Kendall's tau exactly") {
  RngStream rng(41);
  const auto m = gen_bivariate(3000, Temporal::armax, 0.4, InnovationCopula::gumbel_hougaard(2.0), rng);
  Matrix t(m.rows(), 2);
  const auto c0 = transform_margins(m.column_values(0), MarginSource::frechet1(), 0.2);
  const auto c1 = transform_margins(m.column_values(1), MarginSource::frechet1(), -0.3);
  t.set_column(0, c0);
  t.set_column(1, c1);
  CHECK(kendall_tau(m) == kendall_tau(t));
}

TEST_CASE("gen_bivariate") {
  const std::size_t n = 100'000;
  RngStream rng(51);
  const auto ind = gen_bivariate(n, Temporal::iid, 0.0, InnovationCopula::independence(), rng);
  const double se = std::sqrt(2.0 * (2.0 * n + 5.0) / (9.0 * n * (n - 1.0)));
  CHECK(std::fabs(kendall_tau(ind)) < 4.0 * se);

  const auto gum = gen_bivariate(n, Temporal::iid, 0.0, InnovationCopula::from_tau(InnovationCopula::Family::gumbel_hougaard, 0.6), rng);
  CHECK(std::fabs(kendall_tau(gum) - 0.6) < 0.01);
  CHECK(ks_distance(gum.column_values(0), frechet_cdf) < kKs1Percent / std::sqrt(static_cast<double>(n)));

  // Stationary start pair: first rows across replications follow the margins.
  std::vector<double> a0, b0;
  for (std::size_t i = 0; i < 3000; ++i) {
    RngStream local(derive_seed(52, i, 0));
    const auto m = gen_bivariate(20, Temporal::car, 0.5, InnovationCopula::gaussian(0.5), local);
    a0.push_back(m(0, 0));
    b0.push_back(m(19, 1));
  }
  const double crit = kKs1Percent / std::sqrt(3000.0);
  CHECK(ks_distance(a0, [](double x) { return cauchy_cdf(x, 2.0); }) < crit);
  CHECK(ks_distance(b0, [](double x) { return cauchy_cdf(x, 2.0); }) < crit);

  RngStream x(53), y(53);
  CHECK(gen_bivariate(200, Temporal::armax, 0.5, InnovationCopula::student_t(0.3), x) ==
        gen_bivariate(200, Temporal::armax, 0.5, InnovationCopula::student_t(0.3), y));
}

TEST_CASE("gen_piecewise") {
  ModelSpec base;
  base.temporal = Temporal::armax;
  base.param = 0.8;
  base.marginal = Marginal::gpd(0.0);
  const std::size_t reps = 10'000;
  std::vector<double> b9(reps), b10(reps), b8(reps), p8(reps), p9(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    RngStream local(derive_seed(61, i, 0));
    const auto m = gen_piecewise(25, 10, base, local);
    REQUIRE(m.rows() == 25);
    b8[i] = m(8, 0);
    b9[i] = m(9, 0);
    b10[i] = m(10, 0);
    RngStream other(derive_seed(61, i, 1));
    const auto s = generate(base, 10, other);
    p8[i] = s(8, 0);
    p9[i] = s(9, 0);
  }
  CHECK(std::fabs(pearson(b9, b10)) < 4.0 / std::sqrt(static_cast<double>(reps)));
  CHECK(std::fabs(pearson(b8, b9) - pearson(p8, p9)) < 0.06);
  CHECK(pearson(b8, b9) > 0.5);

  ModelSpec pw = base;
  pw.piecewise = 10;
  RngStream a(62), b(62);
  CHECK(generate(pw, 25, a) == gen_piecewise(25, 10, base, b));
  RngStream c(63);
  CHECK_THROWS_AS(gen_piecewise(5, 10, base, c), Error);
}

TEST_CASE("generate and validate") {
  ModelSpec s;
  s.temporal = Temporal::car;
  s.param = 0.5;
  s.marginal = Marginal::gpd(0.1);
  RngStream a(71), b(71), c(72);
  const auto x = generate(s, 300, a);
  CHECK(x.cols() == 1);
  CHECK(x == generate(s, 300, b));
  CHECK(x != generate(s, 300, c));
  for (double v : x.data()) CHECK(v >= 0.0);

  ModelSpec bi;
  bi.temporal = Temporal::car;
  bi.param = 0.5;
  bi.dim = 2;
  bi.copula = InnovationCopula::gumbel_hougaard(2.5);
  RngStream d(73);
  CHECK(generate(bi, 100, d).cols() == 2);

  ModelSpec bad = s;
  bad.param = 1.0;
  CHECK_THROWS_AS(validate(bad), Error);
  bad.param = -0.1;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = s;
  bad.dim = 3;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = s;
  bad.piecewise = 0;
  CHECK_THROWS_AS(validate(bad), Error);
  CHECK_NOTHROW(validate(bi));
}
