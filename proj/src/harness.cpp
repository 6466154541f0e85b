#include "blockmax/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "blockmax/blocks.hpp"
#include "blockmax/csv.hpp"
#include "blockmax/error.hpp"
#include "blockmax/ustat.hpp"
#include "parallel.hpp"
#include "summation.hpp"

namespace blockmax {

namespace {

using detail::CompensatedSum;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kTruthBatch = 1000;

double estimand_on_maxima(const Matrix& maxima, Estimand estimand) {
  switch (estimand) {
    case Estimand::variance:
      return u_statistic(maxima, Kernel::variance()).value;
    case Estimand::kendall_tau:
      return kendall_tau(maxima);
    case Estimand::pwm1:
      return pwm_orderstat(maxima.data(), 1);
  }
  return kNaN;
}

}  // namespace

std::string model_label(const ModelSpec& model) {
  std::string label = to_string(model.temporal);
  if (model.dim == 2) {
    using F = InnovationCopula::Family;
    switch (model.copula.family) {
      case F::independence:
        label += "/independence";
        break;
      case F::gaussian:
        label += "/gaussian";
        break;
      case F::student_t:
        label += "/student_t";
        break;
      case F::gumbel_hougaard:
        label += "/gumbel";
        break;
    }
  }
  if (model.piecewise) label += "/piecewise";
  return label;
}

TruthValue estimate_truth(const ModelSpec& model, std::size_t r, Estimand estimand, std::size_t n_truth, Seed seed) {
  validate(model);
  require(r >= 1, Errc::invalid_argument, "estimate_truth: r must be >= 1");
  require(n_truth >= 1000, Errc::invalid_argument, "estimate_truth: n_truth must be >= 1000");
  const std::size_t d = model.dim;
  const std::size_t batches = (n_truth + kTruthBatch - 1) / kTruthBatch;
  Matrix maxima(n_truth, d);
  ModelSpec season = model;
  season.piecewise.reset();

  detail::parallel_for(batches, [&](std::size_t b) {
    RngStream rng(derive_seed(seed, b, 1));
    const std::size_t lo = b * kTruthBatch;
    const std::size_t hi = std::min(n_truth, lo + kTruthBatch);
    for (std::size_t i = lo; i < hi; ++i) {
      const Matrix s = generate(season, r, rng);
      for (std::size_t j = 0; j < d; ++j) {
        double m = s(0, j);
        for (std::size_t t = 1; t < r; ++t) m = std::max(m, s(t, j));
        maxima(i, j) = m;
      }
    }
  });

  TruthValue out{estimand, estimand_on_maxima(maxima, estimand), 0.0, n_truth, seed};
  // Batch means over groups of whole simulation batches.
  const std::size_t groups = std::min<std::size_t>(batches, 50);
  if (groups >= 2) {
    std::vector<double> est(groups);
    const std::size_t per = n_truth / groups;
    for (std::size_t g = 0; g < groups; ++g) {
      const std::size_t lo = g * per;
      const std::size_t hi = g + 1 == groups ? n_truth : lo + per;
      Matrix part(hi - lo, d);
      for (std::size_t i = lo; i < hi; ++i) {
        for (std::size_t j = 0; j < d; ++j) part(i - lo, j) = maxima(i, j);
      }
      est[g] = estimand_on_maxima(part, estimand);
    }
    CompensatedSum s;
    for (double v : est) s += v;
    const double mean = s.value() / static_cast<double>(groups);
    CompensatedSum ss;
    for (double v : est) ss += (v - mean) * (v - mean);
    out.std_error = std::sqrt(ss.value() / static_cast<double>(groups - 1) / static_cast<double>(groups));
  }
  return out;
}

Summary summarize(std::span<const double> estimates, double truth) {
  require(!estimates.empty(), Errc::invalid_argument, "summarize: no estimates");
  const double n = static_cast<double>(estimates.size());
  CompensatedSum s;
  for (double v : estimates) s += v;
  const double mean = s.value() / n;
  CompensatedSum se;
  CompensatedSum sv;
  for (double v : estimates) {
    se += (v - truth) * (v - truth);
    sv += (v - mean) * (v - mean);
  }
  return {se.value() / n, (mean - truth) * (mean - truth), sv.value() / n};
}

double estimate(const Matrix& series, std::size_t r, Estimand estimand, EstimatorMode mode) {
  if (mode == EstimatorMode::disjoint) {
    return estimand_on_maxima(block_maxima(series, r, BlockMode::disjoint).maxima, estimand);
  }
  const auto sb = block_maxima(series, r, BlockMode::sliding);
  if (mode == EstimatorMode::sliding) return estimand_on_maxima(sb.maxima, estimand);
  switch (estimand) {
    case Estimand::variance:
      return bias_reduced_sliding(sb, Kernel::variance()).value;
    case Estimand::kendall_tau:
      return 2.0 * bias_reduced_sliding(sb, Kernel::kendall()).value - 1.0;
    case Estimand::pwm1:
      return bias_reduced_sliding(sb, Kernel::pwm(2)).value;
  }
  return kNaN;
}

ReplicateTable run_replications(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::size_t grid = cfg.m_grid.size();
  const std::size_t modes = cfg.modes.size();
  ReplicateTable table(grid, std::vector<std::vector<double>>(modes, std::vector<double>(cfg.N)));
  const std::size_t tasks = grid * cfg.N;
  detail::parallel_for(tasks, [&](std::size_t task) {
    const std::size_t k = task / cfg.N;
    const std::size_t i = task % cfg.N;
    RngStream rng(derive_seed(cfg.master_seed, i, k));
    const Matrix series = generate(cfg.model, cfg.m_grid[k] * cfg.r, rng);
    for (std::size_t md = 0; md < modes; ++md) table[k][md][i] = estimate(series, cfg.r, cfg.estimand, cfg.modes[md]);
  });
  return table;
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg, const TruthValue& truth) {
  require(truth.estimand == cfg.estimand, Errc::invalid_argument, "run_experiment: truth is for another estimand");
  const auto table = run_replications(cfg);
  std::vector<MetricsRow> rows;
  const std::string label = model_label(cfg.model);
  const double gamma = cfg.model.marginal.kind == Marginal::Kind::gpd ? cfg.model.marginal.gamma : kNaN;
  const double ts_param = cfg.model.temporal == Temporal::iid ? kNaN : cfg.model.param;
  for (std::size_t k = 0; k < cfg.m_grid.size(); ++k) {
    const std::size_t first = rows.size();
    double sliding_mse = kNaN;
    for (std::size_t md = 0; md < cfg.modes.size(); ++md) {
      MetricsRow row{cfg.estimand, label, gamma, ts_param, cfg.m_grid[k], cfg.modes[md],
                     summarize(table[k][md], truth.value), kNaN};
      if (cfg.modes[md] == EstimatorMode::sliding) sliding_mse = row.summary.mse;
      rows.push_back(row);
    }
    for (std::size_t i = first; i < rows.size(); ++i) rows[i].mse_ratio = rows[i].summary.mse / sliding_mse;
  }
  return rows;
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const auto truth = estimate_truth(cfg.model, cfg.r, cfg.estimand, cfg.truth.n, cfg.truth.seed);
  return run_experiment(cfg, truth);
}

void write_metrics_csv(std::ostream& os, std::span<const MetricsRow> rows) {
  os << "estimand,model,gamma,ts_param,m,mode,mse,bias_sq,variance,mse_ratio\n";
  for (const auto& r : rows) {
    os << to_string(r.estimand) << ',' << r.model << ',' << format_double(r.gamma) << ','
       << format_double(r.ts_param) << ',' << r.m << ',' << to_string(r.mode) << ',' << format_double(r.summary.mse)
       << ',' << format_double(r.summary.bias_sq) << ',' << format_double(r.summary.variance) << ','
       << format_double(r.mse_ratio) << '\n';
  }
}

void write_truth_csv(std::ostream& os, const TruthValue& truth) {
  os << "estimand,value,std_error,n_truth,seed\n"
     << to_string(truth.estimand) << ',' << format_double(truth.value) << ',' << format_double(truth.std_error) << ','
     << truth.n_truth << ',' << truth.seed << '\n';
}

}  // namespace blockmax
