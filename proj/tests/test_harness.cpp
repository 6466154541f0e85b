#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <sstream>
#include <vector>

#include "blockmax/config.hpp"
#include "blockmax/csv.hpp"
#include "blockmax/error.hpp"
#include "blockmax/harness.hpp"

using namespace blockmax;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

const char* kIidVariance =
    "model.temporal = iid\n"
    "model.gamma = 0\n"
    "r = 10\n"
    "m_grid = 5, 8\n"
    "N = 40\n"
    "estimand = variance\n"
    "modes = disjoint, sliding, bias_reduced_sliding\n"
    "master_seed = 17\n"
    "truth.n = 5000\n"
    "truth.seed = 3\n";

class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* value) { setenv("BLOCKMAX_THREADS", value, 1); }
  ~ThreadsEnv() { unsetenv("BLOCKMAX_THREADS"); }
};

std::string metrics_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  const auto rows = run_experiment(cfg);
  write_metrics_csv(os, rows);
  return os.str();
}

}  // namespace

TEST_CASE("summarize examples") {
  const std::vector<double> same{2.0, 2.0};
  const auto z = summarize(same, 2.0);
  CHECK(z.mse == 0.0);
  CHECK(z.bias_sq == 0.0);
  CHECK(z.variance == 0.0);
  const std::vector<double> pm{1.0, 3.0};
  const auto s = summarize(pm, 2.0);
  CHECK(s.mse == 1.0);
  CHECK(s.bias_sq == 0.0);
  CHECK(s.variance == 1.0);
  CHECK_THROWS_AS(summarize(std::vector<double>{}, 0.0), Error);

  RngStream rng(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(1 + rng.next_u64() % 300);
    for (double& v : x) v = 5.0 + rng.normal();
    const double truth = 4.5 + rng.uniform();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= x.size();
    double mse = 0.0, var = 0.0;
    for (double v : x) {
      mse += (v - truth) * (v - truth);
      var += (v - mean) * (v - mean);
    }
    mse /= x.size();
    var /= x.size();
    const auto r = summarize(x, truth);
    CHECK(r.mse == doctest::Approx(mse).epsilon(1e-12));
    CHECK(r.variance == doctest::Approx(var).epsilon(1e-12).scale(1.0));
    CHECK(r.bias_sq == doctest::Approx((mean - truth) * (mean - truth)).epsilon(1e-12).scale(1.0));
    CHECK(std::fabs(r.mse - r.bias_sq - r.variance) <= 1e-10 * std::max(1.0, r.mse));
  }
}

TEST_CASE("config parsing") {
  const auto cfg = parse(kIidVariance);
  CHECK(cfg.model.temporal == Temporal::iid);
  CHECK(cfg.model.marginal.kind == Marginal::Kind::gpd);
  CHECK(cfg.r == 10);
  CHECK(cfg.m_grid == std::vector<std::size_t>{5, 8});
  CHECK(cfg.N == 40);
  CHECK(cfg.modes.size() == 3);
  CHECK(cfg.truth.n == 5000);
  CHECK(cfg.truth.seed == 3);

  const auto round = parse(write_config(cfg));
  CHECK(write_config(round) == write_config(cfg));

  const auto car = parse(
      "# bivariate\nmodel.temporal = car\nmodel.phi = 0.5\nmodel.copula = gumbel\nmodel.tau = 0.6\n"
      "r = 90\nm_grid = 40\nN = 10\nestimand = kendall_tau\nmodes = disjoint,sliding\n");
  CHECK(car.model.dim == 2);
  CHECK(car.model.copula.family == InnovationCopula::Family::gumbel_hougaard);
  CHECK(car.model.copula.param == doctest::Approx(2.5));
  CHECK(car.model.marginal.kind == Marginal::Kind::native);
  CHECK(parse(write_config(car)).model.copula.param == doctest::Approx(2.5).epsilon(1e-14));

  const std::vector<std::string> bad{
      "model.temporal = iid\nr = 10\nm_grid = 5\nN = 4\nfoo = 1\n",
      "model.temporal = iid\nr = 10\nr = 11\nm_grid = 5\nN = 4\n",
      "model.temporal = iid\nr = 10\nm_grid = 5\nN = 0\n",
      "model.temporal = iid\nr = 0\nm_grid = 5\nN = 4\n",
      "model.temporal = iid\nr = 10\nm_grid =\nN = 4\n",
      "model.temporal = iid\nr = ten\nm_grid = 5\nN = 4\n",
      "model.temporal = iid\nmodel.alpha = 0.5\nr = 10\nm_grid = 5\nN = 4\n",
      "model.temporal = armax\nmodel.alpha = 1.0\nr = 10\nm_grid = 5\nN = 4\n",
      "model.temporal = iid\nr = 10\nm_grid = 5\nN = 4\nestimand = kendall_tau\n",
      "model.temporal = iid\nr = 10\nm_grid = 5\nN = 4\nmodes = blocks\n",
      "model.temporal = iid\nr = 10\nm_grid = 5\nN = 4\ntruth.n = 10\n",
      "model.temporal = car\nmodel.phi = 0.5\nmodel.copula = gumbel\nr = 10\nm_grid = 5\nN = 4\nestimand = kendall_tau\n",
      "model.temporal = iid\nr = 10 m_grid = 5\n",
  };
  for (const auto& text : bad) {
    INFO(text);
    try {
      parse(text);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::config_error);
    }
  }
  CHECK_THROWS_AS(load_config("/nonexistent/blockmax.cfg"), Error);
}

TEST_CASE("estimate agrees with direct block maxima computations") {
  RngStream rng(5);
  Matrix x(60, 1);
  for (double& v : x.data()) v = rng.exponential();
  std::vector<double> dj;
  for (std::size_t b = 0; b < 6; ++b) {
    double m = x(b * 10, 0);
    for (std::size_t t = 1; t < 10; ++t) m = std::max(m, x(b * 10 + t, 0));
    dj.push_back(m);
  }
  double mean = 0.0;
  for (double v : dj) mean += v;
  mean /= 6;
  double ss = 0.0;
  for (double v : dj) ss += (v - mean) * (v - mean);
  CHECK(estimate(x, 10, Estimand::variance, EstimatorMode::disjoint) == doctest::Approx(ss / 5).epsilon(1e-13));

  std::vector<double> sl;
  for (std::size_t s = 0; s + 10 <= 60; ++s) {
    double m = x(s, 0);
    for (std::size_t t = 1; t < 10; ++t) m = std::max(m, x(s + t, 0));
    sl.push_back(m);
  }
  double sum = 0.0, pairs = 0.0, sum_all = 0.0, all = 0.0;
  for (std::size_t i = 0; i < sl.size(); ++i) {
    for (std::size_t j = i + 1; j < sl.size(); ++j) {
      const double h = 0.5 * (sl[i] - sl[j]) * (sl[i] - sl[j]);
      sum_all += h;
      all += 1;
      if (j - i >= 10) {
        sum += h;
        pairs += 1;
      }
    }
  }
  CHECK(estimate(x, 10, Estimand::variance, EstimatorMode::sliding) == doctest::Approx(sum_all / all).epsilon(1e-13));
  CHECK(estimate(x, 10, Estimand::variance, EstimatorMode::bias_reduced_sliding) ==
        doctest::Approx(sum / pairs).epsilon(1e-13));

  // pwm1 on disjoint maxima: (1/n) sum (i-1)/(n-1) M_(i).
  std::sort(dj.begin(), dj.end());
  double b1 = 0.0;
  for (std::size_t i = 0; i < 6; ++i) b1 += static_cast<double>(i) / 5.0 * dj[i];
  CHECK(estimate(x, 10, Estimand::pwm1, EstimatorMode::disjoint) == doctest::Approx(b1 / 6).epsilon(1e-13));
}

TEST_CASE("estimate_truth") {
  ModelSpec iid;
  iid.marginal = Marginal::gpd(0.0);
  const auto t = estimate_truth(iid, 90, Estimand::variance, 100'000, 8);
  double exact = 0.0;
  for (int k = 1; k <= 90; ++k) exact += 1.0 / (k * static_cast<double>(k));
  CHECK(t.n_truth == 100'000);
  CHECK(t.seed == 8);
  CHECK(t.std_error > 0.0);
  CHECK(t.std_error < 0.01 * t.value);
  CHECK(std::fabs(t.value - exact) < 4.0 * t.std_error);
  const auto again = estimate_truth(iid, 90, Estimand::variance, 100'000, 8);
  CHECK(again.value == t.value);
  CHECK(again.std_error == t.std_error);

  ModelSpec bi;
  bi.temporal = Temporal::car;
  bi.param = 0.5;
  bi.dim = 2;
  const auto tau = estimate_truth(bi, 30, Estimand::kendall_tau, 20'000, 9);
  CHECK(std::fabs(tau.value) < 4.0 * std::max(tau.std_error, 0.005));
  CHECK_THROWS_AS(estimate_truth(iid, 90, Estimand::variance, 999, 8), Error);

  std::ostringstream os;
  write_truth_csv(os, t);
  CHECK(os.str().rfind("estimand,value,std_error,n_truth,seed\nvariance,", 0) == 0);
}

TEST_CASE("run_experiment") {
  auto cfg = parse(kIidVariance);
  const auto truth = estimate_truth(cfg.model, cfg.r, cfg.estimand, cfg.truth.n, cfg.truth.seed);
  const auto rows = run_experiment(cfg, truth);
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.model == "iid");
    CHECK(r.summary.mse >= 0.0);
    CHECK(r.summary.bias_sq >= 0.0);
    CHECK(r.summary.variance >= 0.0);
    CHECK(std::fabs(r.summary.mse - r.summary.bias_sq - r.summary.variance) <= 1e-10 * std::max(1.0, r.summary.mse));
    if (r.mode == EstimatorMode::sliding) CHECK(r.mse_ratio == 1.0);
  }
  CHECK(rows[0].m == 5);
  CHECK(rows[3].m == 8);

  // Rows are the summaries of the replicate table.
  const auto table = run_replications(cfg);
  const auto s = summarize(table[1][0], truth.value);
  CHECK(rows[3].summary.mse == s.mse);

  std::ostringstream os;
  write_metrics_csv(os, rows);
  CHECK(os.str().rfind("estimand,model,gamma,ts_param,m,mode,mse,bias_sq,variance,mse_ratio\n", 0) == 0);

  // A single replicate has zero variance about its own mean.
  cfg.N = 1;
  const auto one = run_experiment(cfg, truth);
  const auto single = run_replications(cfg);
  for (std::size_t i = 0; i < one.size(); ++i) {
    const double est = single[i / 3][i % 3][0];
    CHECK(one[i].summary.variance == 0.0);
    CHECK(one[i].summary.mse == doctest::Approx((est - truth.value) * (est - truth.value)).epsilon(1e-14));
  }

  TruthValue wrong = truth;
  wrong.estimand = Estimand::pwm1;
  CHECK_THROWS_AS(run_experiment(cfg, wrong), Error);

  cfg.modes = {EstimatorMode::disjoint};
  CHECK(std::isnan(run_experiment(cfg, truth)[0].mse_ratio));
}

TEST_CASE("metrics do not depend on the worker count") {
  auto cfg = parse(
      "model.temporal = armax\nmodel.alpha = 0.5\nmodel.gamma = 0.1\nmodel.piecewise = 10\n"
      "r = 10\nm_grid = 4, 9\nN = 30\nestimand = pwm1\nmodes = disjoint, sliding, bias_reduced_sliding\n"
      "master_seed = 99\ntruth.n = 3000\ntruth.seed = 4\n");
  std::string serial, parallel;
  {
    ThreadsEnv env("1");
    serial = metrics_text(cfg);
  }
  {
    ThreadsEnv env("4");
    parallel = metrics_text(cfg);
  }
  CHECK(serial == parallel);
  CHECK(serial.find("armax/piecewise") != std::string::npos);
  {
    ThreadsEnv env("lots");
    CHECK_THROWS_AS(metrics_text(cfg), Error);
  }
}

TEST_CASE("model labels and csv helpers") {
  ModelSpec m;
  CHECK(model_label(m) == "iid");
  m.temporal = Temporal::car;
  m.dim = 2;
  m.copula = InnovationCopula::gumbel_hougaard(2.0);
  CHECK(model_label(m) == "car/gumbel");
  m.piecewise = 5;
  CHECK(model_label(m) == "car/gumbel/piecewise");

  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(0.1 + 0.2) == "0.30000000000000004");

  std::istringstream is("t,x1,x2\n1,0.5,2\n2,1.5,-3\n");
  const auto table = read_csv(is);
  const auto data = data_columns(table);
  CHECK(data.rows() == 2);
  CHECK(data.cols() == 2);
  CHECK(data(1, 1) == -3.0);
  std::ostringstream os;
  write_series_csv(os, data);
  CHECK(os.str() == "t,x1,x2\n1,0.5,2\n2,1.5,-3\n");
  std::istringstream broken("a,b\n1\n");
  CHECK_THROWS_AS(read_csv(broken), Error);
}

TEST_CASE("every shipped config parses and validates") {
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(BLOCKMAX_SOURCE_DIR "/configs")) {
    if (entry.path().extension() != ".cfg") continue;
    INFO(entry.path().string());
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg = load_config(entry.path().string()));
    CHECK(parse(write_config(cfg)).N == cfg.N);
    ++count;
  }
  CHECK(count >= 49);
}
