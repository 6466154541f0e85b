#include "blockmax/blockmax.h"

#include <charconv>
#include <cstring>
#include <fstream>
#include <iostream>
#include <new>
#include <string>

#include "blockmax/asymvar.hpp"
#include "blockmax/blocks.hpp"
#include "blockmax/config.hpp"
#include "blockmax/csv.hpp"
#include "blockmax/error.hpp"
#include "blockmax/harness.hpp"
#include "blockmax/ustat.hpp"

struct bm_matrix {
  blockmax::Matrix m;
};

struct bm_blocks {
  blockmax::BlockMaxSample sample;
};

struct bm_experiment {
  blockmax::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

bm_status status_of(blockmax::Errc c) {
  using blockmax::Errc;
  switch (c) {
    case Errc::invalid_argument:
      return BM_INVALID_ARGUMENT;
    case Errc::domain_error:
      return BM_DOMAIN_ERROR;
    case Errc::dimension_mismatch:
      return BM_DIMENSION_MISMATCH;
    case Errc::guard_tripped:
      return BM_GUARD_TRIPPED;
    case Errc::unsupported:
      return BM_UNSUPPORTED;
    case Errc::io_error:
      return BM_IO_ERROR;
    case Errc::config_error:
      return BM_CONFIG_ERROR;
  }
  return BM_INTERNAL_ERROR;
}

template <class F>
bm_status guarded(F&& f) {
  try {
    f();
    return BM_OK;
  } catch (const blockmax::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BM_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BM_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "unknown error";
    return BM_INTERNAL_ERROR;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) blockmax::fail(blockmax::Errc::invalid_argument, std::string(what) + " must not be NULL");
}

template <class Writer>
void write_to(const char* path, Writer&& w) {
  need(path, "path");
  if (std::strcmp(path, "-") == 0) {
    w(std::cout);
    std::cout.flush();
    if (!std::cout) blockmax::fail(blockmax::Errc::io_error, "write to standard output failed");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) blockmax::fail(blockmax::Errc::io_error, std::string("cannot open '") + path + "' for writing");
  w(out);
  out.flush();
  if (!out) blockmax::fail(blockmax::Errc::io_error, std::string("write to '") + path + "' failed");
}

blockmax::Kernel kernel_by_name(const char* name) {
  need(name, "kernel");
  const std::string k = name;
  using blockmax::Kernel;
  if (k == "mean") return Kernel::mean();
  if (k == "variance") return Kernel::variance();
  if (k == "gini") return Kernel::gini();
  if (k == "kendall") return Kernel::kendall();
  if (k == "spearman") return Kernel::spearman();
  if (k.rfind("pwm", 0) == 0 && k.size() > 3) {
    int order = 0;
    const auto res = std::from_chars(k.data() + 3, k.data() + k.size(), order);
    if (res.ec == std::errc() && res.ptr == k.data() + k.size()) return Kernel::pwm(order);
  }
  blockmax::fail(blockmax::Errc::invalid_argument, "unknown kernel '" + k + "'");
}

blockmax::Stdf copula_by_spec(const char* spec) {
  need(spec, "copula");
  const std::string s = spec;
  if (s == "independence") return blockmax::Stdf::independence(2);
  if (s == "comonotone") return blockmax::Stdf::comonotone(2);
  if (s.rfind("logistic:", 0) == 0) {
    double theta = 0.0;
    const auto* first = s.data() + 9;
    const auto* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, theta);
    if (res.ec == std::errc() && res.ptr == last) return blockmax::Stdf::logistic(theta, 2);
  }
  blockmax::fail(blockmax::Errc::invalid_argument,
                 "unknown copula '" + s + "' (expected independence, comonotone or logistic:<theta>)");
}

void fill(const blockmax::UStatResult& r, bm_ustat_result* out) {
  out->value = r.value;
  out->n_blocks = r.n_blocks;
  out->pair_count = r.pair_count;
}

void fill(const blockmax::AsymVarResult& r, bm_asymvar_result* out) {
  out->sigma2_db = r.sigma2_db;
  out->sigma2_sb = r.sigma2_sb;
  out->error_estimate = r.error_estimate;
  out->se_db = r.se_db;
  out->se_sb = r.se_sb;
  out->method = static_cast<bm_asymvar_method>(r.method);
}

blockmax::TruthValue truth_of(const bm_experiment* e) {
  const auto& c = e->cfg;
  return blockmax::estimate_truth(c.model, c.r, c.estimand, c.truth.n, c.truth.seed);
}

}  // namespace

extern "C" {

const char* bm_version(void) { return "0.1.0"; }

const char* bm_last_error_message(void) { return g_last_error.c_str(); }

const char* bm_status_name(bm_status status) {
  switch (status) {
    case BM_OK:
      return "ok";
    case BM_INVALID_ARGUMENT:
      return "invalid_argument";
    case BM_DOMAIN_ERROR:
      return "domain_error";
    case BM_DIMENSION_MISMATCH:
      return "dimension_mismatch";
    case BM_GUARD_TRIPPED:
      return "guard_tripped";
    case BM_UNSUPPORTED:
      return "unsupported";
    case BM_IO_ERROR:
      return "io_error";
    case BM_CONFIG_ERROR:
      return "config_error";
    case BM_INTERNAL_ERROR:
      return "internal_error";
  }
  return "unknown";
}

bm_status bm_matrix_create(size_t rows, size_t cols, const double* data, bm_matrix** out) {
  return guarded([&] {
    need(out, "out");
    if (rows * cols > 0) need(data, "data");
    std::vector<double> v(data, data + rows * cols);
    *out = new bm_matrix{blockmax::Matrix(rows, cols, std::move(v))};
  });
}

bm_status bm_matrix_read_csv(const char* path, bm_matrix** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new bm_matrix{blockmax::data_columns(blockmax::read_csv_file(path))};
  });
}

bm_status bm_matrix_write_series_csv(const bm_matrix* m, const char* path) {
  return guarded([&] {
    need(m, "matrix");
    write_to(path, [&](std::ostream& os) { blockmax::write_series_csv(os, m->m); });
  });
}

size_t bm_matrix_rows(const bm_matrix* m) { return m != nullptr ? m->m.rows() : 0; }

size_t bm_matrix_cols(const bm_matrix* m) { return m != nullptr ? m->m.cols() : 0; }

bm_status bm_matrix_copy_data(const bm_matrix* m, double* out, size_t capacity) {
  return guarded([&] {
    need(m, "matrix");
    const auto data = m->m.data();
    if (capacity < data.size()) blockmax::fail(blockmax::Errc::invalid_argument, "output buffer too small");
    if (!data.empty()) {
      need(out, "out");
      std::memcpy(out, data.data(), data.size() * sizeof(double));
    }
  });
}

void bm_matrix_destroy(bm_matrix* m) { delete m; }

bm_status bm_block_maxima(const bm_matrix* series, size_t r, bm_block_mode mode, bm_blocks** out) {
  return guarded([&] {
    need(series, "series");
    need(out, "out");
    if (mode != BM_DISJOINT && mode != BM_SLIDING) blockmax::fail(blockmax::Errc::invalid_argument, "unknown block mode");
    const auto m = mode == BM_SLIDING ? blockmax::BlockMode::sliding : blockmax::BlockMode::disjoint;
    *out = new bm_blocks{blockmax::block_maxima(series->m, r, m)};
  });
}

size_t bm_blocks_count(const bm_blocks* b) { return b != nullptr ? b->sample.size() : 0; }

bm_status bm_blocks_maxima(const bm_blocks* b, bm_matrix** out) {
  return guarded([&] {
    need(b, "blocks");
    need(out, "out");
    *out = new bm_matrix{b->sample.maxima};
  });
}

bm_status bm_blocks_write_csv(const bm_blocks* b, const char* path) {
  return guarded([&] {
    need(b, "blocks");
    write_to(path, [&](std::ostream& os) { blockmax::write_blockmax_csv(os, b->sample); });
  });
}

void bm_blocks_destroy(bm_blocks* b) { delete b; }

bm_status bm_ustat(const bm_matrix* sample, const char* kernel, bm_ustat_result* out) {
  return guarded([&] {
    need(sample, "sample");
    need(out, "out");
    fill(blockmax::u_statistic(sample->m, kernel_by_name(kernel)), out);
  });
}

bm_status bm_ustat_bias_reduced(const bm_matrix* sample, size_t r, const char* kernel, bm_ustat_result* out) {
  return guarded([&] {
    need(sample, "sample");
    need(out, "out");
    blockmax::BlockMaxSample s;
    s.mode = blockmax::BlockMode::sliding;
    s.r = r;
    s.maxima = sample->m;
    s.start_indices.resize(s.maxima.rows());
    for (std::size_t i = 0; i < s.start_indices.size(); ++i) s.start_indices[i] = i + 1;
    fill(blockmax::bias_reduced_sliding(s, kernel_by_name(kernel)), out);
  });
}

bm_status bm_kendall_tau(const bm_matrix* sample, double* out) {
  return guarded([&] {
    need(sample, "sample");
    need(out, "out");
    *out = blockmax::kendall_tau(sample->m);
  });
}

bm_status bm_pwm_orderstat(const bm_matrix* sample, int k, double* out) {
  return guarded([&] {
    need(sample, "sample");
    need(out, "out");
    if (sample->m.cols() != 1) blockmax::fail(blockmax::Errc::dimension_mismatch, "pwm_orderstat: need one column");
    *out = blockmax::pwm_orderstat(sample->m.data(), k);
  });
}

bm_status bm_asymvar_variance_kernel(double gamma, bm_asymvar_result* out) {
  return guarded([&] {
    need(out, "out");
    fill(blockmax::asymvar_variance_kernel(gamma), out);
  });
}

bm_status bm_asymvar_kendall(const char* copula, size_t n_mc, uint64_t seed, bm_asymvar_result* out) {
  return guarded([&] {
    need(out, "out");
    blockmax::RngStream rng(seed);
    fill(blockmax::sigma2_kendall(copula_by_spec(copula), n_mc, rng), out);
  });
}

bm_status bm_asymvar_variance_kernel_mc(double gamma, size_t n_outer, size_t n_inner, uint64_t seed,
                                        bm_asymvar_result* out) {
  return guarded([&] {
    need(out, "out");
    if (!(gamma < 0.25)) blockmax::fail(blockmax::Errc::domain_error, "variance kernel needs gamma < 1/4");
    blockmax::RngStream rng(seed);
    const double g[1] = {gamma};
    fill(blockmax::sigma2_mc(blockmax::Kernel::variance(), g, blockmax::Stdf::independence(1), n_outer, n_inner, rng),
         out);
  });
}

bm_status bm_ratio_curve(double gamma_min, double gamma_max, size_t steps, const char* path) {
  return guarded([&] {
    const auto grid = blockmax::linear_grid(gamma_min, gamma_max, steps);
    const auto points = blockmax::ratio_curve(grid);
    write_to(path, [&](std::ostream& os) { blockmax::write_ratio_csv(os, points); });
  });
}

bm_status bm_experiment_load(const char* config_path, bm_experiment** out) {
  return guarded([&] {
    need(config_path, "config_path");
    need(out, "out");
    *out = new bm_experiment{blockmax::load_config(config_path)};
  });
}

bm_status bm_experiment_set_master_seed(bm_experiment* e, uint64_t seed) {
  return guarded([&] {
    need(e, "experiment");
    e->cfg.master_seed = seed;
  });
}

bm_status bm_experiment_set_truth_seed(bm_experiment* e, uint64_t seed) {
  return guarded([&] {
    need(e, "experiment");
    e->cfg.truth.seed = seed;
  });
}

bm_status bm_experiment_truth(const bm_experiment* e, bm_truth_result* out) {
  return guarded([&] {
    need(e, "experiment");
    need(out, "out");
    const auto t = truth_of(e);
    *out = bm_truth_result{t.value, t.std_error, t.n_truth, t.seed};
  });
}

bm_status bm_experiment_write_truth(const bm_experiment* e, const char* path) {
  return guarded([&] {
    need(e, "experiment");
    const auto t = truth_of(e);
    write_to(path, [&](std::ostream& os) { blockmax::write_truth_csv(os, t); });
  });
}

bm_status bm_experiment_run(const bm_experiment* e, const char* path) {
  return guarded([&] {
    need(e, "experiment");
    need(path, "path");
    const auto rows = blockmax::run_experiment(e->cfg);
    write_to(path, [&](std::ostream& os) { blockmax::write_metrics_csv(os, rows); });
  });
}

bm_status bm_experiment_generate(const bm_experiment* e, size_t n, uint64_t seed, bm_matrix** out) {
  return guarded([&] {
    need(e, "experiment");
    need(out, "out");
    blockmax::RngStream rng(seed);
    *out = new bm_matrix{blockmax::generate(e->cfg.model, n, rng)};
  });
}

void bm_experiment_destroy(bm_experiment* e) { delete e; }

}  // extern "C"
