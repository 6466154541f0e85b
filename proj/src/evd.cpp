#include "blockmax/evd.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "blockmax/error.hpp"
#include "wide.hpp"

namespace blockmax {
namespace {

using detail::Wide;

void check_probability(double q) {
  require(q > 0.0 && q < 1.0, Errc::domain_error, "probability must lie in the open interval (0, 1)");
}

bool is_zero_shape(double gamma) { return std::abs(gamma) < kGammaZeroTol; }

Wide gumbel_moment(int j) {
  const Wide e = detail::wide_euler();
  const Wide pi2 = detail::wide_pi() * detail::wide_pi();
  const Wide z3 = detail::wide_zeta3();
  switch (j) {
    case 1: return e;
    case 2: return pi2 / 6 + e * e;
    case 3: return e * e * e + e * pi2 / 2 + 2 * z3;
    default: return e * e * e * e + e * e * pi2 + 8 * e * z3 + 3 * pi2 * pi2 / 20;
  }
}

}  // namespace

double gev_cdf(double x, const GevParams& p) {
  require(std::isfinite(x), Errc::domain_error, "gev_cdf: x must be finite");
  require(p.sigma > 0.0, Errc::invalid_argument, "gev_cdf: sigma must be positive");
  const double z = (x - p.mu) / p.sigma;
  if (is_zero_shape(p.gamma)) return std::exp(-std::exp(-z));
  const double t = 1.0 + p.gamma * z;
  if (t <= 0.0) return p.gamma > 0.0 ? 0.0 : 1.0;
  return std::exp(-std::exp(-std::log1p(p.gamma * z) / p.gamma));
}

double gev_quantile(double q, const GevParams& p) {
  check_probability(q);
  require(p.sigma > 0.0, Errc::invalid_argument, "gev_quantile: sigma must be positive");
  const double y = -std::log(q);
  if (is_zero_shape(p.gamma)) return p.mu - p.sigma * std::log(y);
  return p.mu + p.sigma * std::expm1(-p.gamma * std::log(y)) / p.gamma;
}

double gpd_cdf(double x, double gamma) {
  require(!std::isnan(x), Errc::domain_error, "gpd_cdf: x is NaN");
  if (x <= 0.0) return 0.0;
  if (is_zero_shape(gamma)) return -std::expm1(-x);
  if (gamma < 0.0 && x >= -1.0 / gamma) return 1.0;
  return -std::expm1(-std::log1p(gamma * x) / gamma);
}

double gpd_quantile_upper(double exceedance, double gamma) {
  require(exceedance > 0.0 && exceedance <= 1.0, Errc::domain_error,
          "gpd_quantile_upper: exceedance must lie in (0, 1]");
  const double l = std::log(exceedance);
  if (is_zero_shape(gamma)) return -l;
  return std::expm1(-gamma * l) / gamma;
}

double gpd_quantile(double q, double gamma) {
  check_probability(q);
  const double l = std::log1p(-q);
  if (is_zero_shape(gamma)) return -l;
  return std::expm1(-gamma * l) / gamma;
}

double frechet_cdf(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double frechet_quantile(double q) {
  check_probability(q);
  return -1.0 / std::log(q);
}

double gev_moment(int j, double gamma) {
  require(j >= 1 && j <= 4, Errc::invalid_argument, "gev_moment: order must be 1..4");
  require(j * gamma < 1.0, Errc::domain_error, "gev_moment: moment is not finite for j * gamma >= 1");
  if (is_zero_shape(gamma)) return static_cast<double>(gumbel_moment(j));
  // E[((S^-g - 1)/g)^j] with S ~ Exp(1) and E[S^-ig] = g_i.
  const Wide g(gamma);
  Wide sum = 0;
  Wide binom = 1;
  for (int i = 0; i <= j; ++i) {
    const Wide term = binom * (i == 0 ? Wide(1) : detail::gamma_g(i, g));
    sum += ((j - i) % 2 == 0) ? term : Wide(-term);
    binom = binom * (j - i) / (i + 1);
  }
  return static_cast<double>(sum / pow(g, j));
}

double gev_variance_tau2(double gamma) {
  require(gamma < 0.5, Errc::domain_error, "gev_variance_tau2: variance is not finite for gamma >= 1/2");
  if (is_zero_shape(gamma)) return std::numbers::pi * std::numbers::pi / 6.0;
  const Wide g(gamma);
  const Wide g1 = detail::gamma_g(1, g);
  return static_cast<double>((detail::gamma_g(2, g) - g1 * g1) / (g * g));
}

NormingSequence armax_norming(std::size_t r, double alpha, double gamma, std::size_t dim) {
  require(r >= 1, Errc::invalid_argument, "armax_norming: r must be >= 1");
  require(dim >= 1, Errc::invalid_argument, "armax_norming: dim must be >= 1");
  const double base = static_cast<double>(r) * (1.0 - alpha);
  require(base > 0.0, Errc::domain_error, "armax_norming: r(1 - alpha) must be positive");
  const double lb = std::log(base);
  const double a = std::exp(gamma * lb);
  const double b = is_zero_shape(gamma) ? lb : std::expm1(gamma * lb) / gamma;
  return NormingSequence{std::vector<double>(dim, a), std::vector<double>(dim, b), r};
}

}  // namespace blockmax
