#pragma once

#include <cstddef>
#include <vector>

namespace blockmax {

/// Generalized extreme value law GEV(mu, sigma, gamma).
struct GevParams {
  double mu = 0.0;
  double sigma = 1.0;
  double gamma = 0.0;
};

/// Block-size dependent norming constants (a_r, b_r), one entry per dimension.
struct NormingSequence {
  std::vector<double> a;
  std::vector<double> b;
  std::size_t r = 1;
};

/// Shape parameters with |gamma| below this use the Gumbel-limit formulas.
inline constexpr double kGammaZeroTol = 1e-9;

double gev_cdf(double x, const GevParams& p);
double gev_quantile(double q, const GevParams& p);

/// Generalized Pareto GPD(0, 1, gamma) with support [0, -1/gamma] for gamma < 0.
double gpd_cdf(double x, double gamma);
double gpd_quantile(double q, double gamma);
/// Quantile evaluated from the exceedance probability 1 - q, accurate for q near 1.
double gpd_quantile_upper(double exceedance, double gamma);

double frechet_cdf(double x);
/// Unit Fréchet inverse cdf, -1/log(q).
double frechet_quantile(double q);

/// j-th raw moment (j = 1..4) of GEV(0, 1, gamma); requires j * gamma < 1.
double gev_moment(int j, double gamma);

/// Variance of GEV(0, 1, gamma), {Gamma(1-2g) - Gamma(1-g)^2} / g^2; requires gamma < 1/2.
double gev_variance_tau2(double gamma);

/// Norming for the GPD-transformed ARMAX(1) model: a_r = (r(1-alpha))^gamma,
/// b_r = (a_r - 1)/gamma (log(r(1-alpha)) at gamma = 0).
NormingSequence armax_norming(std::size_t r, double alpha, double gamma, std::size_t dim = 1);

}  // namespace blockmax
