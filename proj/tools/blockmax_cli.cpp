// Command-line front end. Everything goes through the C API.

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blockmax/blockmax.h"

namespace {

std::string fmt(double v) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

const char* method_name(bm_asymvar_method m) {
  switch (m) {
    case BM_METHOD_CLOSED_FORM:
      return "closed_form";
    case BM_METHOD_QUADRATURE:
      return "quadrature";
    case BM_METHOD_MONTE_CARLO:
      return "monte_carlo";
  }
  return "unknown";
}

struct Failure {
  int code;
};

void check(bm_status s) {
  if (s == BM_OK) return;
  std::cerr << "blockmax: " << bm_status_name(s) << ": " << bm_last_error_message() << '\n';
  throw Failure{s == BM_INTERNAL_ERROR ? 1 : 2};
}

template <class T, void (*Destroy)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Destroy(p); }
};

using MatrixHandle = Handle<bm_matrix, bm_matrix_destroy>;
using BlocksHandle = Handle<bm_blocks, bm_blocks_destroy>;
using ExperimentHandle = Handle<bm_experiment, bm_experiment_destroy>;

struct Options {
  std::uint64_t seed = 20240101;
  bool seed_given = false;

  std::string kernel = "variance";
  double gamma = 0.0;
  std::string copula;
  std::string method = "exact";
  std::size_t n_mc = 16'000'000;
  std::size_t n_outer = 1 << 17;
  std::size_t n_inner = 64;

  double gamma_min = -0.45;
  double gamma_max = 0.24;
  std::size_t steps = 24;

  std::string config;
  std::string input;
  std::string output = "-";
  std::size_t r = 0;
  std::string mode = "sliding";
  std::size_t bias_reduced_r = 0;
  std::size_t n = 0;
};

void print_asymvar(const std::string& kernel, const std::string& param, const bm_asymvar_result& r) {
  std::cout << "kernel,param,sigma2_db,sigma2_sb,ratio,method,error_estimate,se_db,se_sb\n"
            << kernel << ',' << param << ',' << fmt(r.sigma2_db) << ',' << fmt(r.sigma2_sb) << ','
            << fmt(r.sigma2_db / r.sigma2_sb) << ',' << method_name(r.method) << ',' << fmt(r.error_estimate) << ','
            << fmt(r.se_db) << ',' << fmt(r.se_sb) << '\n';
}

void run_asymvar(const Options& o, bool gamma_given) {
  bm_asymvar_result r{};
  if (o.kernel == "kendall") {
    if (o.copula.empty()) throw CLI::ValidationError("asymvar", "--kernel kendall needs --copula");
    check(bm_asymvar_kendall(o.copula.c_str(), o.n_mc, o.seed, &r));
    print_asymvar("kendall", o.copula, r);
    return;
  }
  if (o.kernel != "variance") throw CLI::ValidationError("--kernel", "must be variance or kendall");
  if (!gamma_given) throw CLI::ValidationError("asymvar", "--kernel variance needs --gamma");
  if (o.method == "mc") {
    check(bm_asymvar_variance_kernel_mc(o.gamma, o.n_outer, o.n_inner, o.seed, &r));
  } else {
    check(bm_asymvar_variance_kernel(o.gamma, &r));
  }
  print_asymvar("variance", fmt(o.gamma), r);
}

void run_blockmax(const Options& o) {
  MatrixHandle series;
  check(bm_matrix_read_csv(o.input.c_str(), &series.p));
  BlocksHandle blocks;
  check(bm_block_maxima(series.p, o.r, o.mode == "disjoint" ? BM_DISJOINT : BM_SLIDING, &blocks.p));
  check(bm_blocks_write_csv(blocks.p, o.output.c_str()));
}

void run_ustat(const Options& o) {
  MatrixHandle sample;
  check(bm_matrix_read_csv(o.input.c_str(), &sample.p));
  bm_ustat_result r{};
  std::string mode = "plain";
  if (o.bias_reduced_r > 0) {
    check(bm_ustat_bias_reduced(sample.p, o.bias_reduced_r, o.kernel.c_str(), &r));
    mode = "bias_reduced_sliding";
  } else {
    check(bm_ustat(sample.p, o.kernel.c_str(), &r));
  }
  std::cout << "kernel,mode,n_blocks,pair_count,value\n"
            << o.kernel << ',' << mode << ',' << r.n_blocks << ',' << r.pair_count << ',' << fmt(r.value) << '\n';
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Disjoint and sliding block maxima U-statistics"};
  app.require_subcommand(1);
  Options o;

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Random seed");
  };

  auto* asymvar = app.add_subcommand("asymvar", "Asymptotic variances of a U-statistic");
  asymvar->add_option("--kernel", o.kernel, "variance | kendall")->check(CLI::IsMember({"variance", "kendall"}));
  auto* gamma_opt = asymvar->add_option("--gamma", o.gamma, "GEV shape (variance kernel)");
  asymvar->add_option("--copula", o.copula, "independence | comonotone | logistic:<theta> (kendall kernel)");
  asymvar->add_option("--method", o.method, "exact | mc (variance kernel)")->check(CLI::IsMember({"exact", "mc"}));
  asymvar->add_option("--n-mc", o.n_mc, "Monte Carlo draws per integral (kendall kernel)");
  asymvar->add_option("--n-outer", o.n_outer, "Outer draws (variance kernel, mc)");
  asymvar->add_option("--n-inner", o.n_inner, "Inner draws per outer point (variance kernel, mc)");
  add_seed(asymvar);

  auto* ratio = app.add_subcommand("ratio-curve", "sigma2_db / sigma2_sb of the variance kernel over a gamma grid");
  ratio->add_option("--gamma-min", o.gamma_min, "First grid point");
  ratio->add_option("--gamma-max", o.gamma_max, "Last grid point");
  ratio->add_option("--steps", o.steps, "Number of grid points")->check(CLI::PositiveNumber);
  ratio->add_option("--output,-o", o.output, "Output CSV path ('-' for stdout)");
  add_seed(ratio);

  auto* truth = app.add_subcommand("truth", "Reference value of the configured estimand");
  truth->add_option("--config", o.config, "Experiment config file")->required();
  truth->add_option("--output,-o", o.output, "Output CSV path ('-' for stdout)");
  auto* truth_seed = truth->add_option("--seed", o.seed, "Overrides truth.seed");

  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo study and write the metrics CSV");
  simulate->add_option("--config", o.config, "Experiment config file")->required();
  simulate->add_option("--output,-o", o.output, "Output CSV path ('-' for stdout)");
  auto* sim_seed = simulate->add_option("--seed", o.seed, "Overrides master_seed");

  auto* blockmax = app.add_subcommand("blockmax", "Block maxima of a series CSV");
  blockmax->add_option("--input,-i", o.input, "Series CSV (t,x1[,x2])")->required();
  blockmax->add_option("--r", o.r, "Block size")->required()->check(CLI::PositiveNumber);
  blockmax->add_option("--mode", o.mode, "disjoint | sliding")->check(CLI::IsMember({"disjoint", "sliding"}));
  blockmax->add_option("--output,-o", o.output, "Output CSV path ('-' for stdout)");
  add_seed(blockmax);

  auto* ustat = app.add_subcommand("ustat", "U-statistic of a block-maxima CSV");
  ustat->add_option("--kernel", o.kernel, "mean | variance | gini | pwm<k> | kendall | spearman")->required();
  ustat->add_option("--input,-i", o.input, "Block maxima CSV (start,m1[,m2])")->required();
  ustat->add_option("--bias-reduced", o.bias_reduced_r,
                    "Treat rows as sliding maxima of block size R and drop pairs closer than R");
  add_seed(ustat);

  auto* generate = app.add_subcommand("generate", "Simulate one series from the configured model");
  generate->add_option("--config", o.config, "Experiment config file")->required();
  generate->add_option("--n", o.n, "Series length")->required()->check(CLI::PositiveNumber);
  generate->add_option("--output,-o", o.output, "Output CSV path ('-' for stdout)");
  add_seed(generate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*asymvar) {
      run_asymvar(o, gamma_opt->count() > 0);
    } else if (*ratio) {
      check(bm_ratio_curve(o.gamma_min, o.gamma_max, o.steps, o.output.c_str()));
    } else if (*truth) {
      ExperimentHandle e;
      check(bm_experiment_load(o.config.c_str(), &e.p));
      if (truth_seed->count() > 0) check(bm_experiment_set_truth_seed(e.p, o.seed));
      check(bm_experiment_write_truth(e.p, o.output.c_str()));
    } else if (*simulate) {
      ExperimentHandle e;
      check(bm_experiment_load(o.config.c_str(), &e.p));
      if (sim_seed->count() > 0) check(bm_experiment_set_master_seed(e.p, o.seed));
      check(bm_experiment_run(e.p, o.output.c_str()));
    } else if (*blockmax) {
      run_blockmax(o);
    } else if (*ustat) {
      run_ustat(o);
    } else if (*generate) {
      ExperimentHandle e;
      check(bm_experiment_load(o.config.c_str(), &e.p));
      MatrixHandle series;
      check(bm_experiment_generate(e.p, o.n, o.seed, &series.p));
      check(bm_matrix_write_series_csv(series.p, o.output.c_str()));
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "blockmax: " << e.what() << '\n' << app.help();
    return 2;
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return dispatch(argc, argv); }
