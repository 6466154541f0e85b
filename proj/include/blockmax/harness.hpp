#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "blockmax/config.hpp"
#include "blockmax/tsgen.hpp"

namespace blockmax {

/// Reference value of the estimand for block maxima of size r.
struct TruthValue {
  Estimand estimand = Estimand::variance;
  double value = 0.0;
  /// Batch-means standard error of `value`.
  double std_error = 0.0;
  std::size_t n_truth = 0;
  Seed seed = 0;
};

/// Simulates n_truth independent maxima M_{r,1}, each from a fresh series of
/// length r, and evaluates the estimand on them.
TruthValue estimate_truth(const ModelSpec& model, std::size_t r, Estimand estimand, std::size_t n_truth, Seed seed);

struct Summary {
  double mse = 0.0;
  double bias_sq = 0.0;
  double variance = 0.0;
};

/// mse = mean (x - truth)^2, bias_sq = (mean x - truth)^2, variance = mean (x - mean x)^2.
Summary summarize(std::span<const double> estimates, double truth);

struct MetricsRow {
  Estimand estimand = Estimand::variance;
  std::string model;
  double gamma = 0.0;
  double ts_param = 0.0;
  std::size_t m = 0;
  EstimatorMode mode = EstimatorMode::disjoint;
  Summary summary;
  /// MSE of this mode over the MSE of the sliding estimator at the same m;
  /// NaN when the sliding mode was not run.
  double mse_ratio = 0.0;
};

/// Estimator of the configured estimand from one series in the given mode.
double estimate(const Matrix& series, std::size_t r, Estimand estimand, EstimatorMode mode);

/// Raw replicate estimates, indexed [m index][mode index][replication].
using ReplicateTable = std::vector<std::vector<std::vector<double>>>;
ReplicateTable run_replications(const ExperimentConfig& cfg);

std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg, const TruthValue& truth);
/// Computes the truth from cfg.truth first.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg);

/// Header `estimand,model,gamma,ts_param,m,mode,mse,bias_sq,variance,mse_ratio`.
void write_metrics_csv(std::ostream& os, std::span<const MetricsRow> rows);
/// Header `estimand,value,std_error,n_truth,seed`.
void write_truth_csv(std::ostream& os, const TruthValue& truth);

/// Label used in the `model` column, e.g. `armax`, `car/gumbel`, `iid/piecewise`.
std::string model_label(const ModelSpec& model);

}  // namespace blockmax
