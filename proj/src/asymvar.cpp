#include "blockmax/asymvar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "blockmax/csv.hpp"
#include "blockmax/error.hpp"
#include "blockmax/evd.hpp"
#include "parallel.hpp"
#include "summation.hpp"
#include "wide.hpp"

namespace blockmax {

namespace {

using detail::CompensatedSum;
using detail::Wide;

// alpha_beta(w) - 1 for w in (0, 1/2], free of cancellation for small w.
Wide alpha_minus_one(const Wide& beta, const Wide& w) {
  const Wide c = beta + 1;
  if (w < Wide(0.01)) {
    // 1 - (1-w)^c = sum_{n>=1} (-1)^{n+1} C(c, n) w^n, divided by c w, minus 1.
    Wide term = -(c - 1) / 2 * w;
    Wide sum = term;
    for (int n = 2; n < 400; ++n) {
      term *= -w * (c - n) / (n + 1);
      sum += term;
      if (abs(term) <= abs(sum) * Wide(1e-52)) break;
    }
    return sum;
  }
  const Wide l = boost::multiprecision::log1p(-w);
  const Wide e = c == 0 ? Wide(-l) : Wide(-boost::multiprecision::expm1(c * l) / c);
  return (e - w) / w;
}

Wide i_jk_wide(int j, int k, const Wide& gamma, Wide* error) {
  thread_local boost::math::quadrature::tanh_sinh<Wide> integrator(12);
  const Wide beta = (j + k) * gamma;
  const Wide ej = -j * gamma - 1;
  const Wide ek = -k * gamma - 1;
  auto integrand = [&](const Wide& w) -> Wide {
    // The integrand is O(w^{-j gamma}) at 0; below this the power terms overflow.
    if (w < Wide(1e-200)) return Wide(0);
    const Wide om = 1 - w;
    return alpha_minus_one(beta, w) * (pow(w, ej) * pow(om, ek) + pow(w, ek) * pow(om, ej));
  };
  Wide err = 0;
  Wide value = integrator.integrate(integrand, Wide(0), Wide(0.5), Wide(1e-40), &err);
  if (error != nullptr) *error = err;
  return value;
}

void check_variance_gamma(double gamma) {
  require(std::isfinite(gamma), Errc::domain_error, "asymptotic variance: gamma must be finite");
  require(gamma < 0.25, Errc::domain_error, "asymptotic variance: gamma must be < 1/4");
}

Wide sb_gumbel_constant() {
  const Wide z3 = detail::wide_zeta3();
  const Wide pi2 = detail::wide_pi() * detail::wide_pi();
  const Wide l2 = detail::wide_ln2();
  return 2 * z3 - 48 - 8 * pi2 / 3 + Wide(32) / 3 * l2 * l2 * l2 - 48 * l2 * l2 + 96 * l2 + Wide(16) / 3 * pi2 * l2;
}

double frechet_to_gev(double y, double gamma) {
  const double ly = std::log(y);
  return std::fabs(gamma) < kGammaZeroTol ? ly : std::expm1(gamma * ly) / gamma;
}

struct MeanVar {
  double mean;
  double var;
};

MeanVar mean_var(std::span<const double> x) {
  CompensatedSum s;
  for (double v : x) s += v;
  const double m = s.value() / static_cast<double>(x.size());
  CompensatedSum ss;
  for (double v : x) ss += (v - m) * (v - m);
  const double denom = x.size() > 1 ? static_cast<double>(x.size() - 1) : 1.0;
  return {m, ss.value() / denom};
}

// Shared tail of the two Monte Carlo integrators. `db` holds values of the
// projection at draws from the margin law; strata[s] holds paired values at
// draws from the overlap law with xi at the s-th midpoint.
struct ProjectionDraws {
  std::vector<std::vector<double>> db_chunks;
  std::vector<std::vector<double>> sb_first;
  std::vector<std::vector<double>> sb_second;
};

struct MomentSummary {
  double var_db;
  double se_var_db;
  double mean_cov_sb;
  double se_mean_cov_sb;
};

MomentSummary summarize_draws(const ProjectionDraws& d) {
  CompensatedSum pooled;
  std::size_t count = 0;
  for (const auto& c : d.db_chunks) {
    for (double v : c) pooled += v;
    count += c.size();
  }
  for (std::size_t s = 0; s < d.sb_first.size(); ++s) {
    for (double v : d.sb_first[s]) pooled += v;
    for (double v : d.sb_second[s]) pooled += v;
    count += 2 * d.sb_first[s].size();
  }
  const double center = pooled.value() / static_cast<double>(count);

  std::vector<double> sq;
  for (const auto& c : d.db_chunks) {
    for (double v : c) sq.push_back((v - center) * (v - center));
  }
  const auto db = mean_var(sq);
  const double n_db = static_cast<double>(sq.size());

  CompensatedSum cov_sum;
  double se2 = 0.0;
  const double strata = static_cast<double>(d.sb_first.size());
  std::vector<double> prod;
  for (std::size_t s = 0; s < d.sb_first.size(); ++s) {
    prod.resize(d.sb_first[s].size());
    for (std::size_t i = 0; i < prod.size(); ++i) {
      prod[i] = (d.sb_first[s][i] - center) * (d.sb_second[s][i] - center);
    }
    const auto mv = mean_var(prod);
    cov_sum += mv.mean;
    se2 += mv.var / static_cast<double>(prod.size());
  }
  return {db.mean, std::sqrt(db.var / n_db), cov_sum.value() / strata, std::sqrt(se2) / strata};
}

double stratum_midpoint(std::size_t s) { return (static_cast<double>(s) + 0.5) / static_cast<double>(kXiStrata); }

std::size_t chunk_size(std::size_t total, std::size_t chunk) {
  const std::size_t base = total / kXiStrata;
  return base + (chunk < total % kXiStrata ? 1 : 0);
}

}  // namespace

const char* to_string(AsymVarMethod m) {
  switch (m) {
    case AsymVarMethod::closed_form:
      return "closed_form";
    case AsymVarMethod::quadrature:
      return "quadrature";
    case AsymVarMethod::monte_carlo:
      return "monte_carlo";
  }
  return "unknown";
}

H1Closure h1_variance_kernel(double gamma) {
  const double m1 = gev_moment(1, gamma);
  const double m2 = gev_moment(2, gamma);
  const double theta = gev_variance_tau2(gamma);
  return {"variance", {gamma},
          [=](std::span<const double> z) { return 0.5 * z[0] * z[0] - m1 * z[0] + 0.5 * m2 - theta; }};
}

double alpha_beta(double beta, double w) {
  require(std::isfinite(beta), Errc::domain_error, "alpha_beta: beta must be finite");
  require(w > 0.0 && w < 1.0, Errc::domain_error, "alpha_beta: w must lie in (0, 1)");
  const double l = std::log1p(-w);
  if (beta == -1.0) return -l / w;
  return -std::expm1((beta + 1.0) * l) / (w * (beta + 1.0));
}

double i_jk(int j, int k, double gamma, double* abs_error) {
  require((j == 1 || j == 2) && (k == 1 || k == 2), Errc::invalid_argument, "i_jk: j and k must be 1 or 2");
  require(std::isfinite(gamma), Errc::domain_error, "i_jk: gamma must be finite");
  require(gamma != 0.0, Errc::domain_error, "i_jk: gamma = 0 is handled by the Gumbel closed form");
  require((j + k) * gamma < 1.0, Errc::domain_error, "i_jk: (j + k) gamma must be < 1");
  Wide err;
  const Wide v = i_jk_wide(std::min(j, k), std::max(j, k), Wide(gamma), &err);
  if (abs_error != nullptr) *abs_error = static_cast<double>(err);
  return static_cast<double>(v);
}

double sigma2_db_variance_kernel(double gamma) {
  check_variance_gamma(gamma);
  if (std::fabs(gamma) < kGammaZeroTol) {
    const Wide pi = detail::wide_pi();
    return static_cast<double>(Wide(11) * pi * pi * pi * pi / 90);
  }
  const Wide g(gamma);
  const Wide g1 = detail::gamma_g(1, g);
  const Wide g2 = detail::gamma_g(2, g);
  const Wide g3 = detail::gamma_g(3, g);
  const Wide g4 = detail::gamma_g(4, g);
  const Wide num = g4 - 4 * g1 * g3 - g2 * g2 + 8 * g1 * g1 * g2 - 4 * g1 * g1 * g1 * g1;
  return static_cast<double>(num / (g * g * g * g));
}

double sigma2_sb_variance_kernel(double gamma, double* abs_error) {
  check_variance_gamma(gamma);
  if (std::fabs(gamma) < kGammaZeroTol) {
    if (abs_error != nullptr) *abs_error = 0.0;
    return static_cast<double>(sb_gumbel_constant());
  }
  const Wide g(gamma);
  const Wide g1 = detail::gamma_g(1, g);
  const Wide g2 = detail::gamma_g(2, g);
  const Wide g3 = detail::gamma_g(3, g);
  const Wide g4 = detail::gamma_g(4, g);
  std::array<Wide, 3> err;
  const Wide i11 = i_jk_wide(1, 1, g, &err[0]);
  const Wide i12 = i_jk_wide(1, 2, g, &err[1]);
  const Wide i22 = i_jk_wide(2, 2, g, &err[2]);
  Wide value;
  Wide bound;
  if (gamma > 0) {
    const Wide c = 2 / (3 * g * g * g);
    value = c * (-3 * g4 * i22 + 8 * g1 * g3 * i12 - 6 * g1 * g1 * g2 * i11);
    bound = abs(c) * (3 * g4 * err[2] + 8 * g1 * g3 * err[1] + 6 * g1 * g1 * g2 * err[0]);
  } else {
    using detail::wide_tgamma;
    const Wide c = 8 / (g * g);
    const Wide t4 = wide_tgamma(-4 * g);
    const Wide t3 = wide_tgamma(-3 * g);
    const Wide t2 = wide_tgamma(-2 * g);
    value = c * (t4 * i22 - 2 * g1 * t3 * i12 + g1 * g1 * t2 * i11);
    bound = c * (t4 * err[2] + 2 * g1 * t3 * err[1] + g1 * g1 * t2 * err[0]);
  }
  if (abs_error != nullptr) *abs_error = static_cast<double>(bound);
  return static_cast<double>(value);
}

AsymVarResult asymvar_variance_kernel(double gamma) {
  AsymVarResult out;
  double err = 0.0;
  out.sigma2_db = sigma2_db_variance_kernel(gamma);
  out.sigma2_sb = sigma2_sb_variance_kernel(gamma, &err);
  out.method = std::fabs(gamma) < kGammaZeroTol ? AsymVarMethod::closed_form : AsymVarMethod::quadrature;
  out.error_estimate = err;
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t steps) {
  require(steps >= 1, Errc::invalid_argument, "linear_grid: steps must be >= 1");
  require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, Errc::invalid_argument,
          "linear_grid: need finite lo <= hi");
  if (steps == 1) return {lo};
  std::vector<double> out(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  out.back() = hi;
  return out;
}

std::vector<RatioPoint> ratio_curve(std::span<const double> gamma_grid) {
  require(!gamma_grid.empty(), Errc::invalid_argument, "ratio_curve: empty grid");
  for (double g : gamma_grid) check_variance_gamma(g);
  std::vector<RatioPoint> out(gamma_grid.size());
  detail::parallel_for(gamma_grid.size(), [&](std::size_t i) {
    const double g = gamma_grid[i];
    const double db = sigma2_db_variance_kernel(g);
    const double sb = sigma2_sb_variance_kernel(g);
    out[i] = {g, db, sb, db / sb};
  });
  return out;
}

void write_ratio_csv(std::ostream& os, std::span<const RatioPoint> points) {
  os << "gamma,sigma2_db,sigma2_sb,ratio\n";
  for (const auto& p : points) {
    os << format_double(p.gamma) << ',' << format_double(p.sigma2_db) << ',' << format_double(p.sigma2_sb) << ','
       << format_double(p.ratio) << '\n';
  }
}

AsymVarResult sigma2_kendall(const Stdf& L, std::size_t n_mc, RngStream& rng) {
  require(L.dim() == 2, Errc::dimension_mismatch, "sigma2_kendall: copula must be bivariate");
  require(n_mc >= 2 * kXiStrata, Errc::invalid_argument, "sigma2_kendall: too few Monte Carlo draws");
  const Seed master = rng.next_u64();

  // g(u) = C(u) + survival C(u) = 1 - u1 - u2 + 2 C(u)
  auto g_of_frechet = [&L](double y1, double y2) {
    const std::array<double, 2> x{1.0 / y1, 1.0 / y2};
    const double c = std::exp(-L(x));
    return 1.0 - std::exp(-x[0]) - std::exp(-x[1]) + 2.0 * c;
  };

  ProjectionDraws draws;
  draws.db_chunks.resize(kXiStrata);
  draws.sb_first.resize(kXiStrata);
  draws.sb_second.resize(kXiStrata);
  detail::parallel_for(2 * kXiStrata, [&](std::size_t task) {
    RngStream local(derive_seed(master, task, 0));
    if (task < kXiStrata) {
      const std::size_t n = chunk_size(n_mc, task);
      auto& out = draws.db_chunks[task];
      out.resize(n);
      std::array<double, 2> y;
      for (std::size_t i = 0; i < n; ++i) {
        L.sample_frechet(local, y);
        out[i] = g_of_frechet(y[0], y[1]);
      }
      return;
    }
    const std::size_t s = task - kXiStrata;
    const std::size_t n = chunk_size(n_mc, s);
    const auto [z1, z2] = sample_gxi_frechet(L, stratum_midpoint(s), n, local);
    auto& a = draws.sb_first[s];
    auto& b = draws.sb_second[s];
    a.resize(n);
    b.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = g_of_frechet(z1(i, 0), z1(i, 1));
      b[i] = g_of_frechet(z2(i, 0), z2(i, 1));
    }
  });

  const auto m = summarize_draws(draws);
  AsymVarResult out;
  out.method = AsymVarMethod::monte_carlo;
  out.sigma2_db = 16.0 * m.var_db;
  out.sigma2_sb = 32.0 * m.mean_cov_sb;
  out.se_db = 16.0 * m.se_var_db;
  out.se_sb = 32.0 * m.se_mean_cov_sb;
  out.error_estimate = std::hypot(out.se_db, out.se_sb);
  return out;
}

AsymVarResult sigma2_mc(const Kernel& k, std::span<const double> marginal_gamma, const Stdf& L, std::size_t n_outer,
                        std::size_t n_inner, RngStream& rng) {
  require(k.order() == 2, Errc::invalid_argument, "sigma2_mc: kernel must have order 2");
  const std::size_t d = L.dim();
  require(k.dim() == d && marginal_gamma.size() == d, Errc::dimension_mismatch,
          "sigma2_mc: kernel, stdf and margins must share one dimension");
  require(n_outer >= 2 * kXiStrata, Errc::invalid_argument, "sigma2_mc: n_outer too small");
  require(n_inner >= 2, Errc::invalid_argument, "sigma2_mc: n_inner must be >= 2");
  const std::vector<double> gammas(marginal_gamma.begin(), marginal_gamma.end());
  const Seed master = rng.next_u64();

  auto to_gev = [&gammas, d](std::span<double> y) {
    for (std::size_t j = 0; j < d; ++j) y[j] = frechet_to_gev(y[j], gammas[j]);
  };
  // Inner average of h(z, Z) over fresh draws, with its sample variance.
  auto inner = [&](std::span<const double> z, RngStream& local, std::vector<double>& scratch, double& var) {
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < n_inner; ++i) {
      L.sample_frechet(local, scratch);
      to_gev(scratch);
      const double h = k.pair(z, scratch);
      const double delta = h - mean;
      mean += delta / static_cast<double>(i + 1);
      m2 += delta * (h - mean);
    }
    var = m2 / static_cast<double>(n_inner - 1);
    return mean;
  };

  ProjectionDraws draws;
  draws.db_chunks.resize(kXiStrata);
  draws.sb_first.resize(kXiStrata);
  draws.sb_second.resize(kXiStrata);
  std::vector<double> inner_var(kXiStrata, 0.0);

  detail::parallel_for(2 * kXiStrata, [&](std::size_t task) {
    RngStream local(derive_seed(master, task, 0));
    std::vector<double> z(d);
    std::vector<double> scratch(d);
    double var = 0.0;
    if (task < kXiStrata) {
      const std::size_t n = chunk_size(n_outer, task);
      auto& out = draws.db_chunks[task];
      out.resize(n);
      CompensatedSum vs;
      for (std::size_t i = 0; i < n; ++i) {
        L.sample_frechet(local, z);
        to_gev(z);
        out[i] = inner(z, local, scratch, var);
        vs += var;
      }
      inner_var[task] = vs.value();
      return;
    }
    const std::size_t s = task - kXiStrata;
    const std::size_t n = chunk_size(n_outer, s);
    const XiDependence dep{L, stratum_midpoint(s), gammas};
    const auto [z1, z2] = sample_gxi(dep, n, local);
    auto& a = draws.sb_first[s];
    auto& b = draws.sb_second[s];
    a.resize(n);
    b.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = inner(z1.row(i), local, scratch, var);
      b[i] = inner(z2.row(i), local, scratch, var);
    }
  });

  CompensatedSum vs;
  for (double v : inner_var) vs += v;
  const double mean_inner_var = vs.value() / static_cast<double>(n_outer);

  const auto m = summarize_draws(draws);
  AsymVarResult out;
  out.method = AsymVarMethod::monte_carlo;
  out.sigma2_db = std::max(0.0, 4.0 * (m.var_db - mean_inner_var / static_cast<double>(n_inner)));
  out.sigma2_sb = 8.0 * m.mean_cov_sb;
  out.se_db = 4.0 * m.se_var_db;
  out.se_sb = 8.0 * m.se_mean_cov_sb;
  out.error_estimate = std::hypot(out.se_db, out.se_sb);
  return out;
}

}  // namespace blockmax
