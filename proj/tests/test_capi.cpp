#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "rsquant.h"

namespace {

struct DistGuard {
  rsq_dist* d = nullptr;
  ~DistGuard() { rsq_dist_destroy(d); }
};

}  // namespace

TEST_CASE("version and error reporting") {
  CHECK(std::strlen(rsq_version()) > 0);
  rsq_dist* d = nullptr;
  CHECK(rsq_dist_create("bogus:1", &d) == RSQ_ERROR_INVALID_ARGUMENT);
  CHECK(std::strlen(rsq_last_error()) > 0);
  CHECK(rsq_dist_create(nullptr, &d) == RSQ_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("beta functions through the C surface") {
  double out = 0.0;
  CHECK(rsq_beta_pdf(2, 2, 0.5, &out) == RSQ_OK);
  CHECK(out == doctest::Approx(1.5));
  CHECK(rsq_beta_cdf(1, 3, 0.5, &out) == RSQ_OK);
  CHECK(out == doctest::Approx(0.875));
  CHECK(rsq_beta_cdf(1, 3, 1.5, &out) == RSQ_ERROR_DOMAIN);
  CHECK(rsq_beta_pdf(2, 2, 0.5, nullptr) == RSQ_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("distribution handles") {
  DistGuard g;
  REQUIRE(rsq_dist_create("normal:0,1", &g.d) == RSQ_OK);
  double out = 0.0;
  CHECK(rsq_dist_pdf(g.d, 0.0, &out) == RSQ_OK);
  CHECK(out == doctest::Approx(0.3989422804).epsilon(1e-9));
  CHECK(rsq_dist_cdf(g.d, 0.0, &out) == RSQ_OK);
  CHECK(out == doctest::Approx(0.5));
  CHECK(rsq_dist_quantile(g.d, 0.975, &out) == RSQ_OK);
  CHECK(out == doctest::Approx(1.95996).epsilon(1e-5));
  double mean = 1.0, sd = 0.0;
  CHECK(rsq_dist_mean_sd(g.d, &mean, &sd) == RSQ_OK);
  CHECK(mean == 0.0);
  CHECK(sd == 1.0);
  CHECK(rsq_dist_quantile(g.d, 0.0, &out) == RSQ_ERROR_DOMAIN);
  CHECK(rsq_stratum_cdf(g.d, 1, 3, 0.0, &out) == RSQ_OK);
  CHECK(out == doctest::Approx(0.875));
  CHECK(rsq_stratum_cdf(g.d, 5, 3, 0.0, &out) == RSQ_ERROR_DOMAIN);
}

TEST_CASE("sampling through the C surface is deterministic") {
  DistGuard g;
  REQUIRE(rsq_dist_create("exp:1", &g.d) == RSQ_OK);
  std::vector<double> a(10), b(10);
  CHECK(rsq_srs_sample(g.d, 10, 42, 0, a.data()) == RSQ_OK);
  CHECK(rsq_srs_sample(g.d, 10, 42, 0, b.data()) == RSQ_OK);
  CHECK(a == b);

  std::vector<double> rss(15);
  CHECK(rsq_rss_sample(g.d, 5, 3, 1.0, 42, 0, rss.data()) == RSQ_OK);
  for (double v : rss) CHECK(v > 0.0);
  CHECK(rsq_rss_sample(g.d, 5, 3, 0.5, 42, 0, rss.data()) == RSQ_OK);
  CHECK(rsq_rss_sample(g.d, 5, 3, 1.5, 42, 0, rss.data()) == RSQ_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("one-shot estimators") {
  const std::vector<double> values{3, 1, 4, 1.5, 5, 9, 2, 6, 5.5, 3.5};
  double out = 0.0;
  CHECK(rsq_estimate_srs("srs_emp", values.data(), values.size(), 0.5, &out) == RSQ_OK);
  CHECK(out == 3.5);  // 5th of the sorted ten
  CHECK(rsq_estimate_srs("srs_hd", values.data(), values.size(), 0.5, &out) == RSQ_OK);
  CHECK(out > 1.0);
  CHECK(out < 9.0);
  CHECK(rsq_estimate_srs("rss_hd", values.data(), values.size(), 0.5, &out) ==
        RSQ_ERROR_INVALID_ARGUMENT);

  std::vector<double> rss(15, 2.5);
  CHECK(rsq_estimate_rss("rss_hd", rss.data(), 5, 3, 0.5, &out) == RSQ_OK);
  CHECK(out == 2.5);
  CHECK(rsq_estimate_rss("orss_hd", rss.data(), 5, 3, 0.5, &out) == RSQ_OK);
  CHECK(out == doctest::Approx(2.5).epsilon(1e-8));
  CHECK(rsq_estimate_rss("srs_emp", rss.data(), 5, 3, 0.5, &out) == RSQ_ERROR_INVALID_ARGUMENT);
  CHECK(rsq_estimate_rss("rss_hd", rss.data(), 0, 3, 0.5, &out) == RSQ_ERROR_DIMENSION);
}

TEST_CASE("weight tables") {
  rsq_weight_table* table = nullptr;
  REQUIRE(rsq_weight_table_create(5, 3, 0.5, "orss-hd", &table) == RSQ_OK);
  CHECK(rsq_weight_table_size(table) == 15);
  double sum = 0.0;
  for (size_t i = 0; i < 15; ++i) {
    double w = 0.0;
    CHECK(rsq_weight_table_weight(table, i, &w) == RSQ_OK);
    sum += w;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-7));
  double w = 0.0;
  CHECK(rsq_weight_table_weight(table, 15, &w) == RSQ_ERROR_DIMENSION);

  const char* path = "/tmp/rsquant_capi_weights.csv";
  CHECK(rsq_weight_table_write_csv(table, path) == RSQ_OK);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "m,k,p,kind,i,weight");
  in.close();
  std::remove(path);
  rsq_weight_table_destroy(table);

  CHECK(rsq_weight_table_create(5, 3, 0.5, "nope", &table) == RSQ_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("orss distribution functions") {
  double out = 0.0;
  CHECK(rsq_orss_cdf(1, 2, 1, 0.5, &out) == RSQ_OK);
  CHECK(out == doctest::Approx(0.8125));
  CHECK(rsq_orss_pdf(1, 1, 1, 0.3, &out) == RSQ_OK);
  CHECK(out == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rsq_orss_cdf(1, 2, 5, 0.5, &out) == RSQ_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("populations and experiments end to end") {
  const char* path = "/tmp/rsquant_capi_pop.csv";
  {
    std::ofstream out(path);
    out << "resp,rank\n";
    for (int i = 1; i <= 60; ++i) out << i << ',' << i + 0.5 << "\n";
    out << "oops,1\n";
  }
  rsq_population* pop = nullptr;
  size_t dropped = 0;
  REQUIRE(rsq_population_load_csv(path, "resp", "rank", &pop, &dropped) == RSQ_OK);
  CHECK(rsq_population_size(pop) == 60);
  CHECK(dropped == 1);
  double truth = 0.0;
  CHECK(rsq_population_truth(pop, 0.5, &truth) == RSQ_OK);
  CHECK(truth == 30.0);
  double rho = 0.0;
  CHECK(rsq_population_spearman(pop, &rho) == RSQ_OK);
  CHECK(rho == doctest::Approx(1.0));

  rsq_experiment* cfg = rsq_experiment_create();
  CHECK(rsq_experiment_set_population(cfg, pop, "population:resp") == RSQ_OK);
  CHECK(rsq_experiment_add_design(cfg, 4, 3) == RSQ_OK);
  CHECK(rsq_experiment_add_p(cfg, 0.5) == RSQ_OK);
  CHECK(rsq_experiment_set_estimators(cfg, "srs_emp,rss_emp") == RSQ_OK);
  CHECK(rsq_experiment_set_replicates(cfg, 100) == RSQ_OK);
  CHECK(rsq_experiment_set_seed(cfg, 11) == RSQ_OK);
  CHECK(rsq_experiment_set_threads(cfg, 1) == RSQ_OK);

  rsq_result* result = nullptr;
  REQUIRE(rsq_experiment_run(cfg, &result) == RSQ_OK);
  CHECK(rsq_result_row_count(result) == 2);
  rsq_result_row row;
  CHECK(rsq_result_get_row(result, 0, &row) == RSQ_OK);
  CHECK(std::string(row.estimator) == "srs_emp");
  CHECK(row.re == 1.0);
  CHECK(std::isnan(row.rho));
  CHECK(rsq_result_get_row(result, 5, &row) == RSQ_ERROR_DIMENSION);

  const char* out_csv = "/tmp/rsquant_capi_results.csv";
  CHECK(rsq_result_write_csv(result, out_csv) == RSQ_OK);
  std::ifstream in(out_csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "distribution,rho,m,k,p,estimator,bias,mse,re,mc_se");
  in.close();
  std::remove(out_csv);

  rsq_result_destroy(result);
  rsq_experiment_destroy(cfg);
  rsq_population_destroy(pop);
  std::remove(path);
}

TEST_CASE("model experiment through the C surface") {
  rsq_experiment* cfg = rsq_experiment_create();
  CHECK(rsq_experiment_set_distribution(cfg, "normal:0,1") == RSQ_OK);
  CHECK(rsq_experiment_add_design(cfg, 5, 3) == RSQ_OK);
  CHECK(rsq_experiment_add_rho(cfg, 1.0) == RSQ_OK);
  CHECK(rsq_experiment_add_p(cfg, 0.5) == RSQ_OK);
  CHECK(rsq_experiment_set_estimators(cfg, "all") == RSQ_OK);
  CHECK(rsq_experiment_set_replicates(cfg, 60) == RSQ_OK);
  CHECK(rsq_experiment_set_seed(cfg, 5) == RSQ_OK);
  CHECK(rsq_experiment_set_threads(cfg, 1) == RSQ_OK);
  rsq_result* result = nullptr;
  REQUIRE(rsq_experiment_run(cfg, &result) == RSQ_OK);
  CHECK(rsq_result_row_count(result) == 8);
  rsq_result_destroy(result);

  CHECK(rsq_experiment_set_estimators(cfg, "bogus") == RSQ_ERROR_INVALID_ARGUMENT);
  CHECK(rsq_experiment_add_p(cfg, 1.5) == RSQ_ERROR_DOMAIN);
  CHECK(rsq_experiment_add_design(cfg, 0, 3) == RSQ_ERROR_INVALID_ARGUMENT);
  rsq_experiment_destroy(cfg);
}

TEST_CASE("rank correlations through the C surface") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{1, 2, 4, 3};
  double out = 0.0;
  CHECK(rsq_spearman(x.data(), y.data(), 4, &out) == RSQ_OK);
  CHECK(out == doctest::Approx(0.8));
  CHECK(rsq_kendall(x.data(), x.data(), 4, &out) == RSQ_OK);
  CHECK(out == doctest::Approx(1.0));
  CHECK(rsq_kendall(x.data(), y.data(), 1, &out) == RSQ_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("validation suite callback") {
  struct Ctx {
    int count = 0;
    int failures = 0;
  } ctx;
  auto cb = [](const char*, int passed, void* user) {
    auto* c = static_cast<Ctx*>(user);
    ++c->count;
    if (!passed) ++c->failures;
  };
  int all_passed = 0;
  CHECK(rsq_validate(0, cb, &ctx, &all_passed) == RSQ_OK);
  CHECK(ctx.count >= 6);
  CHECK(ctx.failures == 0);
  CHECK(all_passed == 1);

  Ctx corrupted;
  CHECK(rsq_validate(1, cb, &corrupted, &all_passed) == RSQ_OK);
  CHECK(corrupted.failures > 0);
  CHECK(all_passed == 0);
}
