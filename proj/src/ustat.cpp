#include "blockmax/ustat.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "blockmax/error.hpp"
#include "summation.hpp"

namespace blockmax {

namespace {

using detail::CompensatedSum;

double sgn(double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); }

std::span<const double> scalar_locscale_a(std::span<const double> a) {
  require(a.size() == 1 && a[0] > 0.0, Errc::invalid_argument, "location-scale: scale must be a positive scalar");
  return a;
}

double binomial(std::size_t n, std::size_t p) {
  if (p > n) return 0.0;
  double out = 1.0;
  for (std::size_t t = 1; t <= p; ++t) out *= static_cast<double>(n - p + t) / static_cast<double>(t);
  return std::round(out);
}

std::uint64_t binomial_u64(std::size_t n, std::size_t p) {
  const double c = binomial(n, p);
  if (c >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(c);
}

void check_sample(const Matrix& sample, const Kernel& k) {
  require(sample.cols() == k.dim(), Errc::dimension_mismatch, "u_statistic: sample dimension differs from kernel");
  require(sample.rows() >= static_cast<std::size_t>(k.order()), Errc::invalid_argument,
          "u_statistic: fewer observations than the kernel order");
  for (double v : sample.data()) require(std::isfinite(v), Errc::domain_error, "u_statistic: non-finite value");
}

double enumerate_average(const Matrix& sample, const Kernel& k) {
  const std::size_t n = sample.rows();
  const auto p = static_cast<std::size_t>(k.order());
  CompensatedSum sum;
  if (p == 2) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto xi = sample.row(i);
      for (std::size_t j = i + 1; j < n; ++j) sum += k.pair(xi, sample.row(j));
    }
    return sum.value() / binomial(n, 2);
  }
  std::vector<std::size_t> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::span<const double>> args(p);
  double count = 0.0;
  while (true) {
    for (std::size_t t = 0; t < p; ++t) args[t] = sample.row(idx[t]);
    sum += k(args);
    count += 1.0;
    std::size_t t = p;
    while (t > 0 && idx[t - 1] == n - p + t - 1) --t;
    if (t == 0) break;
    ++idx[t - 1];
    for (std::size_t u = t; u < p; ++u) idx[u] = idx[u - 1] + 1;
  }
  return sum.value() / count;
}

double variance_fast(std::span<const double> x) {
  CompensatedSum s;
  for (double v : x) s += v;
  const double mean = s.value() / static_cast<double>(x.size());
  CompensatedSum ss;
  CompensatedSum sd;
  for (double v : x) {
    ss += (v - mean) * (v - mean);
    sd += v - mean;
  }
  const double n = static_cast<double>(x.size());
  return (ss.value() - sd.value() * sd.value() / n) / (n - 1.0);
}

double gini_fast(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  CompensatedSum s;
  for (std::size_t i = 0; i < x.size(); ++i) s += (2.0 * static_cast<double>(i + 1) - n - 1.0) * x[i];
  return s.value() / (n * (n - 1.0));
}

std::uint64_t merge_count(std::vector<double>& v, std::vector<double>& buf) {
  std::uint64_t inversions = 0;
  const std::size_t n = v.size();
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo;
      std::size_t j = mid;
      std::size_t out = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          inversions += mid - i;
          buf[out++] = v[j++];
        } else {
          buf[out++] = v[i++];
        }
      }
      while (i < mid) buf[out++] = v[i++];
      while (j < hi) buf[out++] = v[j++];
    }
    std::swap(v, buf);
  }
  return inversions;
}

template <class Eq>
std::uint64_t tied_pairs(std::size_t n, Eq equal) {
  std::uint64_t total = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && equal(i - 1, i)) {
      ++run;
    } else {
      total += static_cast<std::uint64_t>(run) * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

std::uint64_t concordant_pairs(const Matrix& sample) {
  const std::size_t n = sample.rows();
  std::vector<std::pair<double, double>> xy(n);
  for (std::size_t i = 0; i < n; ++i) xy[i] = {sample(i, 0), sample(i, 1)};
  std::sort(xy.begin(), xy.end());

  const auto n1 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return xy[a].first == xy[b].first; });
  const auto n3 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return xy[a] == xy[b]; });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = xy[i].second;
  std::vector<double> buf(n);
  const auto discordant = merge_count(ys, buf);
  const auto n2 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });

  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  return n0 - n1 - n2 + n3 - discordant;
}

UStatResult make_result(double value, const Kernel& k, std::string mode, std::size_t n, std::uint64_t count) {
  return UStatResult{value, k.name(), std::move(mode), n, count};
}

UStatResult u_statistic_impl(const Matrix& sample, const Kernel& k, std::string mode) {
  check_sample(sample, k);
  const std::size_t n = sample.rows();
  const auto count = binomial_u64(n, static_cast<std::size_t>(k.order()));
  const auto data = sample.data();
  double value = 0.0;
  switch (k.kind()) {
    case Kernel::Kind::mean: {
      CompensatedSum s;
      for (double v : data) s += v;
      value = s.value() / static_cast<double>(n);
      break;
    }
    case Kernel::Kind::variance:
      value = variance_fast(data);
      break;
    case Kernel::Kind::gini:
      value = gini_fast({data.begin(), data.end()});
      break;
    case Kernel::Kind::pwm:
      value = pwm_orderstat(data, k.order() - 1);
      break;
    case Kernel::Kind::kendall:
      value = static_cast<double>(concordant_pairs(sample)) / binomial(n, 2);
      break;
    case Kernel::Kind::spearman:
    case Kernel::Kind::custom:
      require(binomial(n, static_cast<std::size_t>(k.order())) <= kEnumerationGuard, Errc::guard_tripped,
              "u_statistic: too many tuples for naive enumeration");
      value = enumerate_average(sample, k);
      break;
  }
  return make_result(value, k, std::move(mode), n, count);
}

UStatResult bias_reduced_impl(const Matrix& z, std::size_t r, BlockMode mode, const Kernel& k) {
  require(mode == BlockMode::sliding, Errc::invalid_argument, "bias_reduced_sliding: sample must be in sliding mode");
  require(k.order() == 2, Errc::invalid_argument, "bias_reduced_sliding: kernel must have order 2");
  check_sample(z, k);
  const std::size_t n = z.rows();
  require(n > r, Errc::invalid_argument, "bias_reduced_sliding: no pair of blocks is r apart");
  const std::size_t left = n - r;
  const double pairs = binomial(left + 1, 2);

  CompensatedSum sum;
  if (k.kind() == Kernel::Kind::variance) {
    // sum_{i <= j - r} (x_i - x_j)^2 / 2 from running sums of the centred values
    CompensatedSum m;
    for (double v : z.data()) m += v;
    const double mean = m.value() / static_cast<double>(n);
    CompensatedSum s1;
    CompensatedSum s2;
    for (std::size_t j = r; j < n; ++j) {
      const double xi = z(j - r, 0) - mean;
      s1 += xi;
      s2 += xi * xi;
      const double xj = z(j, 0) - mean;
      const double cnt = static_cast<double>(j - r + 1);
      sum += 0.5 * (s2.value() - 2.0 * xj * s1.value() + cnt * xj * xj);
    }
  } else {
    require(pairs <= kEnumerationGuard, Errc::guard_tripped, "bias_reduced_sliding: too many pairs to enumerate");
    for (std::size_t i = 0; i < left; ++i) {
      const auto xi = z.row(i);
      for (std::size_t j = i + r; j < n; ++j) sum += k.pair(xi, z.row(j));
    }
  }
  return make_result(sum.value() / pairs, k, "bias_reduced_sliding", n, static_cast<std::uint64_t>(pairs));
}

}  // namespace

Kernel Kernel::mean() {
  Kernel k(Kind::mean, "mean", 1, 1);
  k.locscale_ = LocScale{[](auto a, auto) { return scalar_locscale_a(a)[0]; },
                         [](auto a, auto b) { return b[0] / scalar_locscale_a(a)[0]; }};
  return k;
}

Kernel Kernel::variance() {
  Kernel k(Kind::variance, "variance", 2, 1);
  k.locscale_ = LocScale{[](auto a, auto) { return scalar_locscale_a(a)[0] * a[0]; }, [](auto, auto) { return 0.0; }};
  return k;
}

Kernel Kernel::gini() {
  Kernel k(Kind::gini, "gini", 2, 1);
  k.locscale_ = LocScale{[](auto a, auto) { return scalar_locscale_a(a)[0]; }, [](auto, auto) { return 0.0; }};
  return k;
}

Kernel Kernel::pwm(int order) {
  require(order >= 1, Errc::invalid_argument, "pwm kernel: degree must be >= 1");
  Kernel k(Kind::pwm, "pwm" + std::to_string(order), order, 1);
  const double kk = order;
  k.locscale_ = LocScale{[](auto a, auto) { return scalar_locscale_a(a)[0]; },
                         [kk](auto a, auto b) { return b[0] / (kk * scalar_locscale_a(a)[0]); }};
  return k;
}

Kernel Kernel::kendall() {
  Kernel k(Kind::kendall, "kendall", 2, 2);
  k.locscale_ = LocScale{[](auto, auto) { return 1.0; }, [](auto, auto) { return 0.0; }};
  return k;
}

Kernel Kernel::spearman() {
  Kernel k(Kind::spearman, "spearman", 3, 2);
  k.locscale_ = LocScale{[](auto, auto) { return 1.0; }, [](auto, auto) { return 0.0; }};
  return k;
}

Kernel Kernel::custom(std::string name, int order, std::size_t dim, Fn fn, std::optional<LocScale> locscale) {
  require(order >= 1 && dim >= 1, Errc::invalid_argument, "custom kernel: order and dimension must be >= 1");
  require(static_cast<bool>(fn), Errc::invalid_argument, "custom kernel: empty function");
  Kernel k(Kind::custom, std::move(name), order, dim);
  k.fn_ = std::move(fn);
  k.locscale_ = std::move(locscale);
  return k;
}

double Kernel::pair(std::span<const double> x, std::span<const double> y) const {
  switch (kind_) {
    case Kind::variance:
      return 0.5 * (x[0] - y[0]) * (x[0] - y[0]);
    case Kind::gini:
      return 0.5 * std::fabs(x[0] - y[0]);
    case Kind::pwm:
      if (order_ == 2) return 0.5 * std::max(x[0], y[0]);
      break;
    case Kind::kendall:
      return (x[0] - y[0]) * (x[1] - y[1]) > 0.0 ? 1.0 : 0.0;
    default:
      break;
  }
  const std::array<std::span<const double>, 2> args{x, y};
  return (*this)(args);
}

double Kernel::operator()(Args args) const {
  require(args.size() == static_cast<std::size_t>(order_), Errc::invalid_argument, "kernel: wrong number of arguments");
  for (const auto& a : args) require(a.size() == dim_, Errc::dimension_mismatch, "kernel: argument dimension mismatch");
  switch (kind_) {
    case Kind::mean:
      return args[0][0];
    case Kind::variance:
    case Kind::gini:
    case Kind::kendall:
      return pair(args[0], args[1]);
    case Kind::pwm: {
      double m = args[0][0];
      for (const auto& a : args) m = std::max(m, a[0]);
      return m / static_cast<double>(order_);
    }
    case Kind::spearman: {
      static constexpr std::array<std::array<int, 3>, 6> perms{
          {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
      double s = 0.0;
      for (const auto& p : perms) s += sgn(args[p[0]][0] - args[p[1]][0]) * sgn(args[p[0]][1] - args[p[2]][1]);
      return 0.5 * s;
    }
    case Kind::custom:
      return fn_(args);
  }
  return 0.0;
}

double kernel_eval(const Kernel& k, Kernel::Args args) { return k(args); }

UStatResult u_statistic(const Matrix& sample, const Kernel& k) { return u_statistic_impl(sample, k, "plain"); }

UStatResult u_statistic(const BlockMaxSample& sample, const Kernel& k) {
  return u_statistic_impl(sample.maxima, k, to_string(sample.mode));
}

UStatResult u_statistic(const StandardizedSample& sample, const Kernel& k) {
  return u_statistic_impl(sample.z, k, to_string(sample.mode));
}

UStatResult u_statistic_enumerate(const Matrix& sample, const Kernel& k) {
  check_sample(sample, k);
  const auto p = static_cast<std::size_t>(k.order());
  require(binomial(sample.rows(), p) <= kEnumerationGuard, Errc::guard_tripped,
          "u_statistic: too many tuples for naive enumeration");
  return make_result(enumerate_average(sample, k), k, "plain", sample.rows(), binomial_u64(sample.rows(), p));
}

double kendall_tau(const Matrix& sample) {
  require(sample.cols() == 2, Errc::dimension_mismatch, "kendall_tau: sample must have two columns");
  require(sample.rows() >= 2, Errc::invalid_argument, "kendall_tau: need at least two observations");
  for (double v : sample.data()) require(std::isfinite(v), Errc::domain_error, "kendall_tau: non-finite value");
  const double n = static_cast<double>(sample.rows());
  return 2.0 * static_cast<double>(concordant_pairs(sample)) / (n * (n - 1.0) / 2.0) - 1.0;
}

double kendall_tau_bruteforce(const Matrix& sample) {
  const auto u = u_statistic_enumerate(sample, Kernel::kendall());
  return 2.0 * u.value - 1.0;
}

double pwm_orderstat(std::span<const double> sample, int k) {
  require(k >= 0, Errc::invalid_argument, "pwm_orderstat: k must be >= 0");
  const std::size_t n = sample.size();
  require(n > static_cast<std::size_t>(k), Errc::invalid_argument, "pwm_orderstat: need more than k observations");
  std::vector<double> x(sample.begin(), sample.end());
  for (double v : x) require(std::isfinite(v), Errc::domain_error, "pwm_orderstat: non-finite value");
  std::sort(x.begin(), x.end());
  CompensatedSum s;
  for (std::size_t i = static_cast<std::size_t>(k); i < n; ++i) {
    double w = 1.0;
    for (int t = 1; t <= k; ++t) w *= static_cast<double>(i + 1 - t) / static_cast<double>(n - t);
    s += w * x[i];
  }
  return s.value() / static_cast<double>(n);
}

UStatResult bias_reduced_sliding(const BlockMaxSample& sample, const Kernel& k) {
  return bias_reduced_impl(sample.maxima, sample.r, sample.mode, k);
}

UStatResult bias_reduced_sliding(const StandardizedSample& sample, const Kernel& k) {
  return bias_reduced_impl(sample.z, sample.r, sample.mode, k);
}

bool locscale_check(const Kernel& k, std::span<const double> a, std::span<const double> b, std::size_t trials,
                    RngStream& rng) {
  if (!k.locscale()) return false;
  const std::size_t d = k.dim();
  const auto p = static_cast<std::size_t>(k.order());
  require(a.size() == d && b.size() == d, Errc::dimension_mismatch, "locscale_check: a and b must have kernel dimension");
  const double f = k.locscale()->f(a, b);
  const double ell = k.locscale()->ell(a, b);
  std::vector<std::vector<double>> raw(p, std::vector<double>(d));
  std::vector<std::vector<double>> scaled(p, std::vector<double>(d));
  std::vector<std::span<const double>> raw_args(p);
  std::vector<std::span<const double>> scaled_args(p);
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        raw[i][j] = b[j] + a[j] * 2.0 * rng.normal();
        scaled[i][j] = (raw[i][j] - b[j]) / a[j];
      }
      raw_args[i] = raw[i];
      scaled_args[i] = scaled[i];
    }
    const double lhs = k(scaled_args);
    const double h_over_f = k(raw_args) / f;
    const double rhs = h_over_f - ell;
    const double scale = std::max({std::fabs(lhs), std::fabs(h_over_f), std::fabs(ell), 1e-300});
    if (!(std::fabs(lhs - rhs) <= 1e-10 * scale)) return false;
  }
  return true;
}

}  // namespace blockmax
