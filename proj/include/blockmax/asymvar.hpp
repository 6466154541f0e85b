#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "blockmax/dependence.hpp"
#include "blockmax/rng.hpp"
#include "blockmax/ustat.hpp"

namespace blockmax {

enum class AsymVarMethod { closed_form, quadrature, monte_carlo };

const char* to_string(AsymVarMethod m);

/// Asymptotic variances of the disjoint- and sliding-blocks U-statistics.
struct AsymVarResult {
  double sigma2_db = 0.0;
  double sigma2_sb = 0.0;
  AsymVarMethod method = AsymVarMethod::closed_form;
  /// Quadrature error bound, or the Monte Carlo standard error combining both estimates.
  double error_estimate = 0.0;
  /// Monte Carlo standard errors of the two estimates (zero for deterministic methods).
  double se_db = 0.0;
  double se_sb = 0.0;

  [[nodiscard]] double ratio() const noexcept { return sigma2_db / sigma2_sb; }
};

/// The Hajek projection h1(z) = E h(z, Z) - theta of a kernel.
struct H1Closure {
  std::string kernel;
  std::vector<double> parameters;
  std::function<double(std::span<const double>)> h1;
};

/// h1 of the variance kernel under GEV(0, 1, gamma): z^2/2 - mu1 z + mu2/2 - (mu2 - mu1^2).
H1Closure h1_variance_kernel(double gamma);

/// (1 - (1 - w)^(beta + 1)) / (w (beta + 1)), and -log(1 - w)/w at beta = -1.
double alpha_beta(double beta, double w);

/// Integral over (0, 1/2) of (alpha_{(j+k)gamma}(w) - 1) times
/// w^(-j gamma - 1) (1 - w)^(-k gamma - 1) + w^(-k gamma - 1) (1 - w)^(-j gamma - 1).
/// Requires gamma != 0 and (j + k) gamma < 1. `abs_error`, when given,
/// receives the quadrature error estimate.
double i_jk(int j, int k, double gamma, double* abs_error = nullptr);

/// 4 Var(h1(Z)) for the variance kernel, Z ~ GEV(0, 1, gamma), gamma < 1/4.
double sigma2_db_variance_kernel(double gamma);
/// Sliding-blocks counterpart; gamma < 1/4.
double sigma2_sb_variance_kernel(double gamma, double* abs_error = nullptr);
/// Both of the above in one result.
AsymVarResult asymvar_variance_kernel(double gamma);

struct RatioPoint {
  double gamma;
  double sigma2_db;
  double sigma2_sb;
  double ratio;
};

/// Evenly spaced grid of `steps` points from lo to hi inclusive.
std::vector<double> linear_grid(double lo, double hi, std::size_t steps);
std::vector<RatioPoint> ratio_curve(std::span<const double> gamma_grid);
/// Header `gamma,sigma2_db,sigma2_sb,ratio`, one row per point.
void write_ratio_csv(std::ostream& os, std::span<const RatioPoint> points);

/// Number of midpoint strata used for the integral over the overlap parameter.
inline constexpr std::size_t kXiStrata = 64;

/// Asymptotic variances of Kendall's tau-hat for the extreme-value copula
/// with stdf L (d = 2), by Monte Carlo with n_mc draws for each of the two
/// integrals.
AsymVarResult sigma2_kendall(const Stdf& L, std::size_t n_mc, RngStream& rng);

/// Generic order-2 kernel: h1 estimated by an inner average over n_inner
/// fresh draws from G (the law with stdf L and GEV(0, 1, marginal_gamma[j])
/// margins), independently for every outer point. The disjoint estimate
/// subtracts the inner-sampling contribution to the outer variance.
AsymVarResult sigma2_mc(const Kernel& k, std::span<const double> marginal_gamma, const Stdf& L,
                        std::size_t n_outer, std::size_t n_inner, RngStream& rng);

}  // namespace blockmax
