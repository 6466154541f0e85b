#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "blockmax/dependence.hpp"
#include "blockmax/evd.hpp"
#include "blockmax/matrix.hpp"
#include "blockmax/rng.hpp"

namespace blockmax {

enum class Temporal { iid, armax, car };

const char* to_string(Temporal t);

/// Target marginal law of a generated series. `native` keeps the model's own
/// margin (unit Fréchet for iid and ARMAX, stationary Cauchy for CAR).
struct Marginal {
  enum class Kind { native, gpd, frechet1, gev };
  Kind kind = Kind::native;
  double gamma = 0.0;
  GevParams gev{};

  static Marginal native() { return {}; }
  static Marginal gpd(double gamma) { return {Kind::gpd, gamma, {}}; }
  static Marginal frechet1() { return {Kind::frechet1, 0.0, {}}; }
  static Marginal gev_law(const GevParams& p) { return {Kind::gev, p.gamma, p}; }
};

struct ModelSpec {
  Temporal temporal = Temporal::iid;
  /// alpha for ARMAX, phi for CAR, ignored for iid.
  double param = 0.0;
  Marginal marginal{};
  std::size_t dim = 1;
  /// Dependence between the two innovation sequences when dim = 2.
  InnovationCopula copula{};
  /// Season length of the piecewise stationary scheme.
  std::optional<std::size_t> piecewise;
};

/// Marginal law the raw generator output follows.
struct MarginSource {
  enum class Kind { frechet1, cauchy };
  Kind kind = Kind::frechet1;
  double scale = 1.0;

  static MarginSource frechet1() { return {}; }
  static MarginSource cauchy_scale(double s) { return {Kind::cauchy, s}; }
};

/// Y_t = max(alpha Y_{t-1}, (1 - alpha) W_t), W_t unit Fréchet, Y_0 drawn from
/// the stationary law. Returns Y_0, ..., Y_{n-1}.
std::vector<double> gen_armax(std::size_t n, double alpha, RngStream& rng);

/// Y_t = phi Y_{t-1} + W_t, W_t standard Cauchy, Y_0 ~ Cauchy(0, 1/(1 - phi)).
std::vector<double> gen_car(std::size_t n, double phi, RngStream& rng);

/// The stationary margin of the raw output of a temporal model.
MarginSource native_source(Temporal t, double param);

/// Probability-integral transform from `source` to GPD(0, 1, target_gamma),
/// computed through exceedance probabilities so the upper tail keeps full
/// relative precision.
std::vector<double> transform_margins(std::span<const double> series, const MarginSource& source,
                                      double target_gamma);
/// Same, for any target law.
std::vector<double> transform_margins(std::span<const double> series, const MarginSource& source,
                                      const Marginal& target);

/// Bivariate series on the native scale: innovation pairs coupled by `c`, each
/// coordinate following its own recursion. The start pair uses the stationary
/// margins coupled by the same copula.
Matrix gen_bivariate(std::size_t n, Temporal temporal, double param, const InnovationCopula& c, RngStream& rng);

/// Concatenation of ceil(n / r) independent simulations of `base` (without its
/// own piecewise setting) of length r, cut to n rows.
Matrix gen_piecewise(std::size_t n, std::size_t r, const ModelSpec& base, RngStream& rng);

/// Full pipeline: temporal model, innovation copula, margin transform and the
/// piecewise scheme when the spec requests it.
Matrix generate(const ModelSpec& spec, std::size_t n, RngStream& rng);

/// Checks parameter ranges; throws on violation.
void validate(const ModelSpec& spec);

}  // namespace blockmax
