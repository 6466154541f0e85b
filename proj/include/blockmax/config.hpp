#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "blockmax/rng.hpp"
#include "blockmax/tsgen.hpp"

namespace blockmax {

enum class Estimand { variance, kendall_tau, pwm1 };
enum class EstimatorMode { disjoint, sliding, bias_reduced_sliding };

const char* to_string(Estimand e);
const char* to_string(EstimatorMode m);
Estimand parse_estimand(const std::string& s);
EstimatorMode parse_estimator_mode(const std::string& s);

struct TruthConfig {
  std::size_t n = 1'000'000;
  Seed seed = 1;
};

/// A Monte Carlo study. Text form is one `key = value` per line, `#` starts a
/// comment. Keys:
///
///   model.temporal   iid | armax | car
///   model.alpha      ARMAX coefficient (armax only)
///   model.phi        CAR coefficient (car only)
///   model.gamma      GPD shape of the transformed margins; omit to keep the
///                    model's native margins
///   model.copula     independence | gaussian | student_t | gumbel; makes the
///                    series bivariate
///   model.tau        Kendall's tau of the innovation copula
///   model.dof        degrees of freedom for student_t (default 4)
///   model.piecewise  season length of the piecewise stationary scheme
///   r                block size
///   m_grid           comma-separated numbers of disjoint blocks
///   N                replications per grid point
///   estimand         variance | kendall_tau | pwm1
///   modes            comma-separated subset of disjoint, sliding, bias_reduced_sliding
///   master_seed      seed of the replication streams
///   truth.n          number of simulated block maxima for the reference value
///   truth.seed       seed of the reference simulation
struct ExperimentConfig {
  ModelSpec model;
  std::size_t r = 90;
  std::vector<std::size_t> m_grid;
  std::size_t N = 500;
  Estimand estimand = Estimand::variance;
  std::vector<EstimatorMode> modes{EstimatorMode::disjoint, EstimatorMode::sliding};
  Seed master_seed = 1;
  TruthConfig truth;
};

/// Throws Error(Errc::config_error) on unknown keys, malformed values or an
/// inconsistent combination (e.g. kendall_tau on a univariate model).
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& cfg);
/// Canonical text form, accepted by parse_config.
std::string write_config(const ExperimentConfig& cfg);

}  // namespace blockmax
