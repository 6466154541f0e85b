#include "blockmax/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/students_t.hpp>

#include "blockmax/error.hpp"
#include "blockmax/evd.hpp"

namespace blockmax {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_nonneg(std::span<const double> x) {
  for (double v : x) {
    require(!(v < 0.0) && !std::isnan(v), Errc::domain_error,
            "stable tail dependence function arguments must be >= 0");
  }
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Keeps draws strictly inside (0, 1) so downstream -1/log(u) stays finite.
double clamp_open(double u) { return std::clamp(u, 0x1.0p-1000, 1.0 - 0x1.0p-53); }

double frechet_to_gev(double y, double gamma) {
  const double ly = std::log(y);
  if (std::abs(gamma) < kGammaZeroTol) return ly;
  return std::expm1(gamma * ly) / gamma;
}

}  // namespace

// --- Stdf -------------------------------------------------------------------

Stdf Stdf::independence(std::size_t dim) {
  require(dim >= 1, Errc::invalid_argument, "Stdf: dim must be >= 1");
  return Stdf(Family::independence, dim, 1.0);
}

Stdf Stdf::comonotone(std::size_t dim) {
  require(dim >= 1, Errc::invalid_argument, "Stdf: dim must be >= 1");
  return Stdf(Family::comonotone, dim, kInf);
}

Stdf Stdf::logistic(double theta, std::size_t dim) {
  require(dim >= 1, Errc::invalid_argument, "Stdf: dim must be >= 1");
  require(theta >= 1.0 && std::isfinite(theta), Errc::invalid_argument,
          "Stdf: logistic theta must be finite and >= 1");
  return Stdf(Family::logistic, dim, theta);
}

Stdf Stdf::pickands_table(std::vector<double> values) {
  require(values.size() >= 2, Errc::invalid_argument, "Stdf: Pickands table needs >= 2 points");
  const auto k = values.size() - 1;
  constexpr double tol = 1e-12;
  require(std::abs(values.front() - 1.0) < tol && std::abs(values.back() - 1.0) < tol,
          Errc::invalid_argument, "Stdf: Pickands table must satisfy A(0) = A(1) = 1");
  for (std::size_t i = 0; i <= k; ++i) {
    const double w = static_cast<double>(i) / static_cast<double>(k);
    require(values[i] >= std::max(w, 1.0 - w) - tol && values[i] <= 1.0 + tol, Errc::invalid_argument,
            "Stdf: Pickands table violates max(w, 1-w) <= A(w) <= 1");
    if (i > 0 && i < k) {
      require(values[i - 1] - 2.0 * values[i] + values[i + 1] >= -tol, Errc::invalid_argument,
              "Stdf: Pickands table must be convex");
    }
  }
  Stdf s(Family::pickands_table, 2, 1.0);
  s.table_ = std::move(values);
  return s;
}

double Stdf::pickands(double w) const {
  require(dim_ == 2, Errc::unsupported, "Stdf::pickands is only defined for d = 2");
  w = std::clamp(w, 0.0, 1.0);
  switch (family_) {
    case Family::independence: return 1.0;
    case Family::comonotone: return std::max(w, 1.0 - w);
    case Family::logistic: {
      const double m = std::max(w, 1.0 - w);
      return m * std::pow(std::pow(w / m, theta_) + std::pow((1.0 - w) / m, theta_), 1.0 / theta_);
    }
    case Family::pickands_table: {
      const double pos = w * static_cast<double>(table_.size() - 1);
      const auto i = std::min(static_cast<std::size_t>(pos), table_.size() - 2);
      const double frac = pos - static_cast<double>(i);
      return table_[i] + frac * (table_[i + 1] - table_[i]);
    }
  }
  return 1.0;
}

double Stdf::pickands_slope(double w) const {
  require(dim_ == 2, Errc::unsupported, "Stdf::pickands_slope is only defined for d = 2");
  w = std::clamp(w, 0.0, 1.0);
  switch (family_) {
    case Family::independence: return 0.0;
    case Family::comonotone: return w < 0.5 ? -1.0 : 1.0;
    case Family::logistic: {
      if (w <= 0.0) return -1.0;
      if (w >= 1.0) return 1.0;
      const double a = std::pow(w, theta_) + std::pow(1.0 - w, theta_);
      return std::pow(a, 1.0 / theta_ - 1.0) *
             (std::pow(w, theta_ - 1.0) - std::pow(1.0 - w, theta_ - 1.0));
    }
    case Family::pickands_table: {
      const auto k = table_.size() - 1;
      const auto i = std::min(static_cast<std::size_t>(w * static_cast<double>(k)), k - 1);
      return (table_[i + 1] - table_[i]) * static_cast<double>(k);
    }
  }
  return 0.0;
}

double Stdf::operator()(std::span<const double> x) const {
  require(x.size() == dim_, Errc::dimension_mismatch, "Stdf: argument dimension mismatch");
  check_nonneg(x);
  switch (family_) {
    case Family::independence: {
      double s = 0.0;
      for (double v : x) s += v;
      return s;
    }
    case Family::comonotone: return *std::max_element(x.begin(), x.end());
    case Family::logistic: {
      const double m = *std::max_element(x.begin(), x.end());
      if (m == 0.0 || std::isinf(m)) return m;
      double s = 0.0;
      for (double v : x) s += std::pow(v / m, theta_);
      return m * std::pow(s, 1.0 / theta_);
    }
    case Family::pickands_table: {
      const double s = x[0] + x[1];
      if (s == 0.0 || std::isinf(s)) return s;
      return s * pickands(x[1] / s);
    }
  }
  return 0.0;
}

void Stdf::sample_frechet(RngStream& rng, std::span<double> out) const {
  require(out.size() == dim_, Errc::dimension_mismatch, "Stdf::sample_frechet: output size mismatch");
  switch (family_) {
    case Family::independence:
      for (double& v : out) v = rng.frechet();
      return;
    case Family::comonotone: {
      const double w = rng.frechet();
      std::fill(out.begin(), out.end(), w);
      return;
    }
    case Family::logistic: {
      if (theta_ == 1.0) {
        for (double& v : out) v = rng.frechet();
        return;
      }
      // Marshall-Olkin frailty: given V, coordinates are independent with
      // P(Y <= y | V) = exp(-V y^-theta).
      const double alpha = 1.0 / theta_;
      const double v = positive_stable(alpha, rng);
      for (double& y : out) y = std::pow(v / rng.exponential(), alpha);
      return;
    }
    case Family::pickands_table: {
      // Conditional inversion on the copula scale: dC/du (u, .) is a cdf in v.
      const double u = rng.uniform();
      const double p = rng.uniform();
      const double x = -std::log(u);
      auto cond = [&](double v) {
        const double y = -std::log(v);
        const double s = x + y;
        const double w = y / s;
        const double dldx = pickands(w) - w * pickands_slope(w);
        return std::exp(-s * pickands(w)) / u * dldx;
      };
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= 0.0 || cond(mid) < p) lo = mid;
        else hi = mid;
      }
      const double v = std::clamp(0.5 * (lo + hi), 1e-300, 1.0 - 1e-16);
      out[0] = -1.0 / std::log(u);
      out[1] = -1.0 / std::log(v);
      return;
    }
  }
}

double ev_copula_cdf(const Stdf& L, std::span<const double> u) {
  require(u.size() == L.dim(), Errc::dimension_mismatch, "ev_copula_cdf: dimension mismatch");
  std::vector<double> x(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    require(u[j] >= 0.0 && u[j] <= 1.0, Errc::domain_error, "ev_copula_cdf: u must lie in [0, 1]");
    if (u[j] == 0.0) return 0.0;
    x[j] = -std::log(u[j]);
  }
  return std::exp(-L(x));
}

// --- overlap family ---------------------------------------------------------

double lxi_eval(const XiDependence& dep, std::span<const double> x, std::span<const double> y) {
  const auto d = dep.base.dim();
  require(x.size() == d && y.size() == d, Errc::dimension_mismatch, "lxi_eval: dimension mismatch");
  require(dep.xi >= 0.0, Errc::invalid_argument, "lxi_eval: xi must be >= 0");
  const double s = std::min(dep.xi, 1.0);
  double out = 0.0;
  if (s > 0.0) out += s * (dep.base(x) + dep.base(y));
  if (s < 1.0) {
    std::vector<double> m(d);
    for (std::size_t j = 0; j < d; ++j) m[j] = std::max(x[j], y[j]);
    out += (1.0 - s) * dep.base(m);
  }
  return out;
}

double cxi_eval(const XiDependence& dep, std::span<const double> u, std::span<const double> v) {
  const auto d = dep.base.dim();
  require(u.size() == d && v.size() == d, Errc::dimension_mismatch, "cxi_eval: dimension mismatch");
  std::vector<double> x(d), y(d);
  for (std::size_t j = 0; j < d; ++j) {
    require(u[j] >= 0.0 && u[j] <= 1.0 && v[j] >= 0.0 && v[j] <= 1.0, Errc::domain_error,
            "cxi_eval: arguments must lie in [0, 1]");
    if (u[j] == 0.0 || v[j] == 0.0) return 0.0;
    x[j] = -std::log(u[j]);
    y[j] = -std::log(v[j]);
  }
  return std::exp(-lxi_eval(dep, x, y));
}

double gxi_cdf(const XiDependence& dep, std::span<const double> x, std::span<const double> y) {
  const auto d = dep.base.dim();
  require(dep.marginal_gamma.size() == d, Errc::dimension_mismatch,
          "gxi_cdf: need one marginal shape per dimension");
  require(x.size() == d && y.size() == d, Errc::dimension_mismatch, "gxi_cdf: dimension mismatch");
  std::vector<double> u(d), v(d);
  for (std::size_t j = 0; j < d; ++j) {
    const GevParams p{0.0, 1.0, dep.marginal_gamma[j]};
    u[j] = gev_cdf(x[j], p);
    v[j] = gev_cdf(y[j], p);
  }
  return cxi_eval(dep, u, v);
}

std::pair<Matrix, Matrix> sample_gxi_frechet(const Stdf& L, double xi, std::size_t n, RngStream& rng) {
  require(xi >= 0.0, Errc::invalid_argument, "sample_gxi: xi must be >= 0");
  const auto d = L.dim();
  Matrix z1(n, d), z2(n, d);
  std::vector<double> c(d);
  for (std::size_t i = 0; i < n; ++i) {
    auto r1 = z1.row(i);
    auto r2 = z2.row(i);
    L.sample_frechet(rng, r1);
    L.sample_frechet(rng, r2);
    if (xi >= 1.0) continue;
    // Three independent factors with masses xi, xi and 1 - xi on the Fréchet scale.
    L.sample_frechet(rng, c);
    for (std::size_t j = 0; j < d; ++j) {
      r1[j] = std::max(xi * r1[j], (1.0 - xi) * c[j]);
      r2[j] = std::max(xi * r2[j], (1.0 - xi) * c[j]);
    }
  }
  return {std::move(z1), std::move(z2)};
}

std::pair<Matrix, Matrix> sample_gxi(const XiDependence& dep, std::size_t n, RngStream& rng) {
  const auto d = dep.base.dim();
  require(dep.marginal_gamma.size() == d, Errc::dimension_mismatch,
          "sample_gxi: need one marginal shape per dimension");
  auto [z1, z2] = sample_gxi_frechet(dep.base, dep.xi, n, rng);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      z1(i, j) = frechet_to_gev(z1(i, j), dep.marginal_gamma[j]);
      z2(i, j) = frechet_to_gev(z2(i, j), dep.marginal_gamma[j]);
    }
  }
  return {std::move(z1), std::move(z2)};
}

// --- innovation copulas -----------------------------------------------------

double positive_stable(double alpha, RngStream& rng) {
  require(alpha > 0.0 && alpha <= 1.0, Errc::invalid_argument, "positive_stable: alpha must lie in (0, 1]");
  if (alpha == 1.0) return 1.0;
  // Chambers-Mallows-Stuck / Kanter representation.
  const double u = std::numbers::pi * rng.uniform();
  const double e = rng.exponential();
  return std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha) *
         std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
}

double copula_param_from_tau(InnovationCopula::Family family, double tau) {
  require(tau >= 0.0 && tau < 1.0, Errc::domain_error, "copula_param_from_tau: tau must lie in [0, 1)");
  switch (family) {
    case InnovationCopula::Family::gaussian:
    case InnovationCopula::Family::student_t: return std::sin(std::numbers::pi * tau / 2.0);
    case InnovationCopula::Family::gumbel_hougaard: return 1.0 / (1.0 - tau);
    case InnovationCopula::Family::independence: break;
  }
  fail(Errc::invalid_argument, "copula_param_from_tau: independence copula has no parameter");
}

InnovationCopula InnovationCopula::from_tau(Family family, double tau) {
  if (family == Family::independence) return independence();
  return InnovationCopula{family, copula_param_from_tau(family, tau), 4};
}

double tail_dep_upper(InnovationCopula::Family family, double tau) {
  require(tau >= 0.0 && tau < 1.0, Errc::domain_error, "tail_dep_upper: tau must lie in [0, 1)");
  switch (family) {
    case InnovationCopula::Family::independence:
    case InnovationCopula::Family::gaussian: return 0.0;
    case InnovationCopula::Family::gumbel_hougaard: return 2.0 - std::pow(2.0, 1.0 - tau);
    case InnovationCopula::Family::student_t: {
      // t_4 copula: 2 t_5(-sqrt(5 (1 - rho) / (1 + rho))).
      const double rho = std::sin(std::numbers::pi * tau / 2.0);
      const boost::math::students_t_distribution<double> t5(5.0);
      return 2.0 * boost::math::cdf(t5, -std::sqrt(5.0 * (1.0 - rho) / (1.0 + rho)));
    }
  }
  fail(Errc::unsupported, "tail_dep_upper: unsupported family");
}

std::pair<double, double> copula_draw(const InnovationCopula& c, RngStream& rng) {
  using F = InnovationCopula::Family;
  switch (c.family) {
    case F::independence: {
      const double u1 = rng.uniform();
      return {u1, rng.uniform()};
    }
    case F::gaussian: {
      const double z1 = rng.normal();
      const double z2 = c.param * z1 + std::sqrt(1.0 - c.param * c.param) * rng.normal();
      return {clamp_open(normal_cdf(z1)), clamp_open(normal_cdf(z2))};
    }
    case F::student_t: {
      const double z1 = rng.normal();
      const double z2 = c.param * z1 + std::sqrt(1.0 - c.param * c.param) * rng.normal();
      double chi2 = 0.0;
      for (int k = 0; k < c.dof; ++k) {
        const double g = rng.normal();
        chi2 += g * g;
      }
      const double scale = std::sqrt(chi2 / c.dof);
      const boost::math::students_t_distribution<double> t(static_cast<double>(c.dof));
      return {clamp_open(boost::math::cdf(t, z1 / scale)), clamp_open(boost::math::cdf(t, z2 / scale))};
    }
    case F::gumbel_hougaard: {
      const double alpha = 1.0 / c.param;
      const double v = positive_stable(alpha, rng);
      const double u1 = std::exp(-std::pow(rng.exponential() / v, alpha));
      const double u2 = std::exp(-std::pow(rng.exponential() / v, alpha));
      return {clamp_open(u1), clamp_open(u2)};
    }
  }
  fail(Errc::unsupported, "copula_draw: unsupported family");
}

Matrix copula_sample(const InnovationCopula& c, std::size_t n, RngStream& rng) {
  using F = InnovationCopula::Family;
  if (c.family == F::gaussian || c.family == F::student_t) {
    require(c.param > -1.0 && c.param < 1.0, Errc::invalid_argument, "copula_sample: rho must lie in (-1, 1)");
  }
  if (c.family == F::student_t) require(c.dof >= 1, Errc::invalid_argument, "copula_sample: dof must be >= 1");
  if (c.family == F::gumbel_hougaard) {
    require(c.param >= 1.0, Errc::invalid_argument, "copula_sample: Gumbel-Hougaard theta must be >= 1");
  }
  Matrix out(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [u1, u2] = copula_draw(c, rng);
    out(i, 0) = u1;
    out(i, 1) = u2;
  }
  return out;
}

}  // namespace blockmax
