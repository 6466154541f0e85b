// Exercises the shared library through its C header only.
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "blockmax/blockmax.h"

namespace {

std::string slurp(const char* path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(bm_version()) == "0.1.0");
  CHECK(std::string(bm_status_name(BM_OK)) == "ok");
  CHECK(std::string(bm_status_name(BM_CONFIG_ERROR)) == "config_error");
}

TEST_CASE("matrix and block maxima round trip") {
  const double data[] = {1, 4, 2, 5, 3};
  bm_matrix* m = nullptr;
  REQUIRE(bm_matrix_create(5, 1, data, &m) == BM_OK);
  CHECK(bm_matrix_rows(m) == 5);
  CHECK(bm_matrix_cols(m) == 1);

  bm_blocks* b = nullptr;
  REQUIRE(bm_block_maxima(m, 2, BM_SLIDING, &b) == BM_OK);
  CHECK(bm_blocks_count(b) == 4);
  bm_matrix* maxima = nullptr;
  REQUIRE(bm_blocks_maxima(b, &maxima) == BM_OK);
  std::vector<double> out(4);
  REQUIRE(bm_matrix_copy_data(maxima, out.data(), out.size()) == BM_OK);
  CHECK(out == std::vector<double>{4, 4, 5, 5});
  CHECK(bm_matrix_copy_data(maxima, out.data(), 2) == BM_INVALID_ARGUMENT);

  REQUIRE(bm_blocks_write_csv(b, "c_api_blocks.csv") == BM_OK);
  CHECK(slurp("c_api_blocks.csv") == "start,m1\n1,4\n2,4\n3,5\n4,5\n");

  REQUIRE(bm_matrix_write_series_csv(m, "c_api_series.csv") == BM_OK);
  bm_matrix* back = nullptr;
  REQUIRE(bm_matrix_read_csv("c_api_series.csv", &back) == BM_OK);
  std::vector<double> again(5);
  REQUIRE(bm_matrix_copy_data(back, again.data(), again.size()) == BM_OK);
  CHECK(again == std::vector<double>(data, data + 5));

  bm_blocks* disjoint = nullptr;
  REQUIRE(bm_block_maxima(m, 2, BM_DISJOINT, &disjoint) == BM_OK);
  CHECK(bm_blocks_count(disjoint) == 2);

  bm_blocks_destroy(disjoint);
  bm_matrix_destroy(back);
  bm_matrix_destroy(maxima);
  bm_blocks_destroy(b);
  bm_matrix_destroy(m);
  bm_matrix_destroy(nullptr);
  std::remove("c_api_blocks.csv");
  std::remove("c_api_series.csv");
}

TEST_CASE("errors are reported through status codes") {
  bm_matrix* m = nullptr;
  CHECK(bm_matrix_create(2, 1, nullptr, &m) == BM_INVALID_ARGUMENT);
  CHECK(std::string(bm_last_error_message()).find("NULL") != std::string::npos);
  CHECK(bm_matrix_read_csv("/nonexistent/file.csv", &m) == BM_IO_ERROR);
  const double d[] = {1, 2, 3};
  REQUIRE(bm_matrix_create(3, 1, d, &m) == BM_OK);
  bm_blocks* b = nullptr;
  CHECK(bm_block_maxima(m, 4, BM_DISJOINT, &b) != BM_OK);
  CHECK(b == nullptr);
  bm_ustat_result r{};
  CHECK(bm_ustat(m, "nope", &r) == BM_INVALID_ARGUMENT);
  CHECK(bm_ustat(m, "kendall", &r) == BM_DIMENSION_MISMATCH);
  double tau = 0.0;
  CHECK(bm_kendall_tau(m, &tau) == BM_DIMENSION_MISMATCH);
  bm_asymvar_result a{};
  CHECK(bm_asymvar_variance_kernel(0.3, &a) == BM_DOMAIN_ERROR);
  CHECK(bm_asymvar_kendall("clayton", 1000, 1, &a) == BM_INVALID_ARGUMENT);
  bm_experiment* e = nullptr;
  CHECK(bm_experiment_load("/nonexistent/study.cfg", &e) != BM_OK);
  bm_matrix_destroy(m);
}

TEST_CASE("U-statistics") {
  const double d[] = {1, 2, 3};
  bm_matrix* m = nullptr;
  REQUIRE(bm_matrix_create(3, 1, d, &m) == BM_OK);
  bm_ustat_result r{};
  REQUIRE(bm_ustat(m, "variance", &r) == BM_OK);
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.n_blocks == 3);
  CHECK(r.pair_count == 3);
  REQUIRE(bm_ustat(m, "pwm2", &r) == BM_OK);
  CHECK(r.value == doctest::Approx(4.0 / 3.0));
  double p = 0.0;
  REQUIRE(bm_pwm_orderstat(m, 1, &p) == BM_OK);
  CHECK(p == doctest::Approx(4.0 / 3.0));
  REQUIRE(bm_ustat_bias_reduced(m, 2, "variance", &r) == BM_OK);
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(r.pair_count == 1);
  bm_matrix_destroy(m);

  const double pairs[] = {1, 1, 2, 3, 3, 2};
  REQUIRE(bm_matrix_create(3, 2, pairs, &m) == BM_OK);
  double tau = 0.0;
  REQUIRE(bm_kendall_tau(m, &tau) == BM_OK);
  CHECK(tau == doctest::Approx(1.0 / 3.0));
  bm_matrix_destroy(m);
}

TEST_CASE("asymptotic variances") {
  bm_asymvar_result a{};
  REQUIRE(bm_asymvar_variance_kernel(0.0, &a) == BM_OK);
  CHECK(a.sigma2_db == doctest::Approx(11.0 * std::pow(M_PI, 4) / 90.0));
  CHECK(a.sigma2_sb == doctest::Approx(11.6036214975));
  CHECK(a.method == BM_METHOD_CLOSED_FORM);
  REQUIRE(bm_asymvar_variance_kernel(-0.2, &a) == BM_OK);
  CHECK(a.method == BM_METHOD_QUADRATURE);

  REQUIRE(bm_asymvar_kendall("comonotone", 2000, 3, &a) == BM_OK);
  CHECK(std::fabs(a.sigma2_db) < 1e-12);
  REQUIRE(bm_asymvar_kendall("logistic:2", 20000, 3, &a) == BM_OK);
  CHECK(a.method == BM_METHOD_MONTE_CARLO);
  CHECK(a.sigma2_db > 0.0);

  REQUIRE(bm_asymvar_variance_kernel_mc(0.0, 8192, 16, 5, &a) == BM_OK);
  CHECK(std::fabs(a.sigma2_db - 11.9055) < 5.0 * a.se_db);

  REQUIRE(bm_ratio_curve(-0.4, 0.2, 3, "c_api_ratio.csv") == BM_OK);
  const auto text = slurp("c_api_ratio.csv");
  CHECK(text.rfind("gamma,sigma2_db,sigma2_sb,ratio\n-0.4,", 0) == 0);
  std::remove("c_api_ratio.csv");
}

TEST_CASE("experiments") {
  {
    std::ofstream cfg("c_api_study.cfg");
    cfg << "model.temporal = armax\nmodel.alpha = 0.5\nmodel.gamma = 0\nr = 5\nm_grid = 4\nN = 6\n"
           "estimand = variance\nmodes = disjoint, sliding\nmaster_seed = 2\ntruth.n = 2000\ntruth.seed = 1\n";
  }
  bm_experiment* e = nullptr;
  REQUIRE(bm_experiment_load("c_api_study.cfg", &e) == BM_OK);
  bm_truth_result t{};
  REQUIRE(bm_experiment_truth(e, &t) == BM_OK);
  CHECK(t.n_truth == 2000);
  CHECK(t.seed == 1);
  REQUIRE(bm_experiment_set_truth_seed(e, 7) == BM_OK);
  bm_truth_result t7{};
  REQUIRE(bm_experiment_truth(e, &t7) == BM_OK);
  CHECK(t7.seed == 7);
  CHECK(t7.value != t.value);

  REQUIRE(bm_experiment_run(e, "c_api_metrics_a.csv") == BM_OK);
  REQUIRE(bm_experiment_run(e, "c_api_metrics_b.csv") == BM_OK);
  const auto a = slurp("c_api_metrics_a.csv");
  CHECK(a == slurp("c_api_metrics_b.csv"));
  CHECK(a.rfind("estimand,model,gamma,ts_param,m,mode,mse,bias_sq,variance,mse_ratio\n", 0) == 0);
  REQUIRE(bm_experiment_set_master_seed(e, 3) == BM_OK);
  REQUIRE(bm_experiment_run(e, "c_api_metrics_b.csv") == BM_OK);
  CHECK(a != slurp("c_api_metrics_b.csv"));

  REQUIRE(bm_experiment_write_truth(e, "c_api_truth.csv") == BM_OK);
  CHECK(slurp("c_api_truth.csv").rfind("estimand,value,std_error,n_truth,seed\n", 0) == 0);

  bm_matrix* s = nullptr;
  REQUIRE(bm_experiment_generate(e, 50, 11, &s) == BM_OK);
  CHECK(bm_matrix_rows(s) == 50);
  bm_matrix_destroy(s);
  bm_experiment_destroy(e);
  for (const char* f : {"c_api_study.cfg", "c_api_metrics_a.csv", "c_api_metrics_b.csv", "c_api_truth.csv"}) std::remove(f);
}
