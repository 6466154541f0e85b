#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "blockmax/matrix.hpp"
#include "blockmax/rng.hpp"

namespace blockmax {

/// Stable tail dependence function L of a d-variate extreme-value law.
///
/// Families: independence (sum), comonotone (max), logistic with
/// theta >= 1 ((sum x^theta)^(1/theta)), and a bivariate table-driven family
/// given by Pickands dependence function values A(w_k) on an equispaced grid
/// of [0, 1], interpolated linearly: L(x, y) = (x + y) A(y / (x + y)).
class Stdf {
 public:
  enum class Family { independence, comonotone, logistic, pickands_table };

  static Stdf independence(std::size_t dim);
  static Stdf comonotone(std::size_t dim);
  static Stdf logistic(double theta, std::size_t dim);
  /// Table must be convex with A(0) = A(1) = 1 and max(w, 1-w) <= A(w) <= 1.
  static Stdf pickands_table(std::vector<double> values);

  [[nodiscard]] Family family() const noexcept { return family_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] double theta() const noexcept { return theta_; }

  /// L(x); components must be >= 0, +inf allowed.
  [[nodiscard]] double operator()(std::span<const double> x) const;

  /// Pickands function A(w) = L(1 - w, w) (bivariate only).
  [[nodiscard]] double pickands(double w) const;
  /// Right derivative of A at w (bivariate only).
  [[nodiscard]] double pickands_slope(double w) const;

  /// One draw from the extreme-value law with this dependence and unit Fréchet
  /// margins, written to `out` (size dim()).
  void sample_frechet(RngStream& rng, std::span<double> out) const;

 private:
  Stdf(Family f, std::size_t dim, double theta) : family_(f), dim_(dim), theta_(theta) {}

  Family family_;
  std::size_t dim_;
  double theta_ = 1.0;
  std::vector<double> table_;
};

/// C(u) = exp(-L(-log u_1, ..., -log u_d)).
double ev_copula_cdf(const Stdf& L, std::span<const double> u);

/// Joint extreme-value law of two block maxima whose windows overlap by a
/// fraction 1 - xi (no overlap once xi >= 1).
struct XiDependence {
  Stdf base;
  double xi = 0.0;
  /// GEV(0, 1, gamma_j) margin per dimension; used by gxi_cdf and sample_gxi.
  std::vector<double> marginal_gamma;
};

/// L_xi(x, y) = (xi ^ 1) {L(x) + L(y)} + (1 - (xi ^ 1)) L(x v y).
double lxi_eval(const XiDependence& dep, std::span<const double> x, std::span<const double> y);
/// The 2d-variate copula exp(-L_xi(-log u, -log v)).
double cxi_eval(const XiDependence& dep, std::span<const double> u, std::span<const double> v);
/// C_xi evaluated at the GEV margins.
double gxi_cdf(const XiDependence& dep, std::span<const double> x, std::span<const double> y);

/// n draws (Z1, Z2) ~ G_xi; rows of the two returned n x d matrices are paired.
std::pair<Matrix, Matrix> sample_gxi(const XiDependence& dep, std::size_t n, RngStream& rng);

/// Same construction, but both members left on the unit Fréchet scale.
std::pair<Matrix, Matrix> sample_gxi_frechet(const Stdf& L, double xi, std::size_t n, RngStream& rng);

/// Bivariate copulas used for the innovations of the simulated time series.
struct InnovationCopula {
  enum class Family { independence, gaussian, student_t, gumbel_hougaard };
  Family family = Family::independence;
  /// rho for gaussian / student_t, theta for gumbel_hougaard.
  double param = 0.0;
  int dof = 4;

  static InnovationCopula independence() { return {}; }
  static InnovationCopula gaussian(double rho) { return {Family::gaussian, rho, 4}; }
  static InnovationCopula student_t(double rho, int dof = 4) { return {Family::student_t, rho, dof}; }
  static InnovationCopula gumbel_hougaard(double theta) { return {Family::gumbel_hougaard, theta, 4}; }
  /// Family parameterised by Kendall's tau.
  static InnovationCopula from_tau(Family family, double tau);
};

/// n x 2 matrix of draws in (0, 1)^2.
Matrix copula_sample(const InnovationCopula& c, std::size_t n, RngStream& rng);
/// One draw.
std::pair<double, double> copula_draw(const InnovationCopula& c, RngStream& rng);

/// rho = sin(pi tau / 2) for elliptical families, theta = 1 / (1 - tau) for Gumbel-Hougaard.
double copula_param_from_tau(InnovationCopula::Family family, double tau);

/// Upper tail dependence coefficient at Kendall's tau.
double tail_dep_upper(InnovationCopula::Family family, double tau);

/// Positive stable variate with Laplace transform exp(-s^alpha), 0 < alpha <= 1.
double positive_stable(double alpha, RngStream& rng);

}  // namespace blockmax
