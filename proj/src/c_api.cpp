#include "rsquant.h"

#include <cstring>
#include <exception>
#include <string>

#include "rsquant/detail/text.hpp"
#include "rsquant/distribution.hpp"
#include "rsquant/estimators.hpp"
#include "rsquant/harness.hpp"
#include "rsquant/orss.hpp"
#include "rsquant/sampler.hpp"
#include "rsquant/specfun.hpp"
#include "rsquant/validate.hpp"

namespace {

thread_local std::string g_last_error = "";

rsq_status fail(rsq_status status, const char* message) {
  g_last_error = message;
  return status;
}

// Maps the core exception taxonomy onto status codes.
rsq_status translate_current_exception() {
  try {
    throw;
  } catch (const std::domain_error& e) {
    g_last_error = e.what();
    return RSQ_ERROR_DOMAIN;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return RSQ_ERROR_INVALID_ARGUMENT;
  } catch (const std::runtime_error& e) {
    g_last_error = e.what();
    return RSQ_ERROR_NUMERIC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RSQ_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RSQ_ERROR_INTERNAL;
  }
}

template <typename Fn>
rsq_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (...) {
    return translate_current_exception();
  }
}

}  // namespace

struct rsq_dist {
  rsquant::Distribution dist;
};

struct rsq_weight_table {
  rsquant::WeightTable table;
};

struct rsq_population {
  rsquant::FinitePopulation population;
};

struct rsq_experiment {
  rsquant::ExperimentConfig config;
};

struct rsq_result {
  rsquant::ExperimentResult result;
};

extern "C" {

const char* rsq_version(void) { return "0.1.0"; }

const char* rsq_last_error(void) { return g_last_error.c_str(); }

rsq_status rsq_beta_pdf(double a, double b, double t, double* out) {
  if (!out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "out pointer is null");
  return guarded([&] {
    *out = rsquant::beta_pdf(rsquant::BetaParams{a, b}, t);
    return RSQ_OK;
  });
}

rsq_status rsq_beta_cdf(double a, double b, double t, double* out) {
  if (!out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "out pointer is null");
  return guarded([&] {
    *out = rsquant::beta_cdf(rsquant::BetaParams{a, b}, t);
    return RSQ_OK;
  });
}

rsq_status rsq_dist_create(const char* spec, rsq_dist** out) {
  if (!spec || !out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "spec/out pointer is null");
  return guarded([&] {
    *out = new rsq_dist{rsquant::parse_distribution(spec)};
    return RSQ_OK;
  });
}

void rsq_dist_destroy(rsq_dist* dist) { delete dist; }

rsq_status rsq_dist_pdf(const rsq_dist* dist, double y, double* out) {
  if (!dist || !out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "dist/out pointer is null");
  return guarded([&] {
    *out = dist->dist.pdf(y);
    return RSQ_OK;
  });
}

rsq_status rsq_dist_cdf(const rsq_dist* dist, double y, double* out) {
  if (!dist || !out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "dist/out pointer is null");
  return guarded([&] {
    *out = dist->dist.cdf(y);
    return RSQ_OK;
  });
}

rsq_status rsq_dist_quantile(const rsq_dist* dist, double p, double* out) {
  if (!dist || !out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "dist/out pointer is null");
  return guarded([&] {
    *out = dist->dist.quantile(p);
    return RSQ_OK;
  });
}

rsq_status rsq_dist_mean_sd(const rsq_dist* dist, double* mean, double* sd) {
  if (!dist || !mean || !sd) return fail(RSQ_ERROR_INVALID_ARGUMENT, "dist/out pointer is null");
  return guarded([&] {
    *mean = dist->dist.mean();
    *sd = dist->dist.sd();
    return RSQ_OK;
  });
}

rsq_status rsq_stratum_cdf(const rsq_dist* dist, int rank, int set_size, double y, double* out) {
  if (!dist || !out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "dist/out pointer is null");
  return guarded([&] {
    *out = rsquant::stratum_cdf(rsquant::StratumLaw{dist->dist, rank, set_size}, y);
    return RSQ_OK;
  });
}

rsq_status rsq_srs_sample(const rsq_dist* dist, size_t n, uint64_t master_seed,
                          uint64_t replicate, double* out_values) {
  if (!dist || !out_values) return fail(RSQ_ERROR_INVALID_ARGUMENT, "dist/out pointer is null");
  return guarded([&] {
    const auto values = rsquant::srs_sample(dist->dist, static_cast<int>(n),
                                            rsquant::SeedSpec{master_seed, replicate});
    std::memcpy(out_values, values.data(), values.size() * sizeof(double));
    return RSQ_OK;
  });
}

rsq_status rsq_rss_sample(const rsq_dist* dist, int m, int k, double rho, uint64_t master_seed,
                          uint64_t replicate, double* out_values) {
  if (!dist || !out_values) return fail(RSQ_ERROR_INVALID_ARGUMENT, "dist/out pointer is null");
  return guarded([&] {
    const auto model = rho == 1.0 ? rsquant::RankingModel::perfect()
                                  : rsquant::RankingModel::concomitant(rho);
    const auto sample = rsquant::rss_sample(dist->dist, rsquant::Design{m, k}, model,
                                            rsquant::SeedSpec{master_seed, replicate});
    std::memcpy(out_values, sample.values.data(), sample.values.size() * sizeof(double));
    return RSQ_OK;
  });
}

rsq_status rsq_estimate_srs(const char* estimator, const double* values, size_t n, double p,
                            double* out) {
  if (!estimator || !values || !out) {
    return fail(RSQ_ERROR_INVALID_ARGUMENT, "estimator/values/out pointer is null");
  }
  return guarded([&] {
    const auto id = rsquant::estimator_from_string(estimator);
    if (!id || !rsquant::is_srs_estimator(*id)) {
      return fail(RSQ_ERROR_INVALID_ARGUMENT, "unknown SRS estimator name");
    }
    const auto sample =
        rsquant::OrderedSample::from_unsorted(std::vector<double>(values, values + n));
    switch (*id) {
      case rsquant::EstimatorId::SrsEmp: *out = rsquant::emp_quantile_srs(sample, p); break;
      case rsquant::EstimatorId::SrsLf: *out = rsquant::lf_srs(sample, p); break;
      default: *out = rsquant::hd_srs(sample, p); break;
    }
    return RSQ_OK;
  });
}

rsq_status rsq_estimate_rss(const char* estimator, const double* values, int m, int k, double p,
                            double* out) {
  if (!estimator || !values || !out) {
    return fail(RSQ_ERROR_INVALID_ARGUMENT, "estimator/values/out pointer is null");
  }
  return guarded([&] {
    const auto id = rsquant::estimator_from_string(estimator);
    if (!id || rsquant::is_srs_estimator(*id)) {
      return fail(RSQ_ERROR_INVALID_ARGUMENT, "unknown RSS estimator name");
    }
    if (m < 1 || k < 1) return fail(RSQ_ERROR_DIMENSION, "m and k must be at least 1");
    const rsquant::Design design{m, k};
    const std::size_t n = static_cast<std::size_t>(design.total());
    std::vector<double> data(values, values + n);

    switch (*id) {
      case rsquant::EstimatorId::RssEmp:
        *out = rsquant::emp_quantile_pooled(rsquant::OrderedSample::from_unsorted(std::move(data)), p);
        break;
      case rsquant::EstimatorId::RssLf:
      case rsquant::EstimatorId::RssHd: {
        rsquant::RssSample sample;
        sample.design = design;
        sample.values = std::move(data);
        *out = *id == rsquant::EstimatorId::RssLf ? rsquant::rss_lf(sample, p)
                                                  : rsquant::rss_hd(sample, p);
        break;
      }
      case rsquant::EstimatorId::OrssLf: {
        const auto table = rsquant::orss_lf_weights(design, p);
        *out = rsquant::orss_lf(rsquant::OrderedSample::from_unsorted(std::move(data)), table);
        break;
      }
      default: {
        const auto table = rsquant::orss_hd_weights(design, p);
        *out = rsquant::orss_hd(rsquant::OrderedSample::from_unsorted(std::move(data)), table);
        break;
      }
    }
    return RSQ_OK;
  });
}

rsq_status rsq_weight_table_create(int m, int k, double p, const char* kind,
                                   rsq_weight_table** out) {
  if (!kind || !out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "kind/out pointer is null");
  return guarded([&] {
    const rsquant::Design design{m, k};
    if (std::strcmp(kind, "orss-lf") == 0) {
      *out = new rsq_weight_table{rsquant::orss_lf_weights(design, p)};
    } else if (std::strcmp(kind, "orss-hd") == 0) {
      *out = new rsq_weight_table{rsquant::orss_hd_weights(design, p)};
    } else {
      return fail(RSQ_ERROR_INVALID_ARGUMENT, "kind must be orss-lf or orss-hd");
    }
    return RSQ_OK;
  });
}

void rsq_weight_table_destroy(rsq_weight_table* table) { delete table; }

size_t rsq_weight_table_size(const rsq_weight_table* table) {
  return table ? table->table.weights.size() : 0;
}

rsq_status rsq_weight_table_weight(const rsq_weight_table* table, size_t index, double* out) {
  if (!table || !out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "table/out pointer is null");
  if (index >= table->table.weights.size()) {
    return fail(RSQ_ERROR_DIMENSION, "weight index out of range");
  }
  *out = table->table.weights[index];
  return RSQ_OK;
}

rsq_status rsq_weight_table_write_csv(const rsq_weight_table* table, const char* path) {
  if (!table || !path) return fail(RSQ_ERROR_INVALID_ARGUMENT, "table/path pointer is null");
  return guarded([&] {
    rsquant::write_weight_table_csv(table->table, std::string(path));
    return RSQ_OK;
  });
}

rsq_status rsq_orss_cdf(int m, int k, int i, double t, double* out) {
  if (!out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "out pointer is null");
  return guarded([&] {
    *out = rsquant::orss_cdf(rsquant::Design{m, k}, i, t);
    return RSQ_OK;
  });
}

rsq_status rsq_orss_pdf(int m, int k, int i, double t, double* out) {
  if (!out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "out pointer is null");
  return guarded([&] {
    *out = rsquant::orss_pdf_probscale(rsquant::Design{m, k}, i, t);
    return RSQ_OK;
  });
}

rsq_status rsq_population_load_csv(const char* path, const char* response_column,
                                   const char* ranker_column, rsq_population** out,
                                   size_t* dropped_rows) {
  if (!path || !response_column || !ranker_column || !out) {
    return fail(RSQ_ERROR_INVALID_ARGUMENT, "path/column/out pointer is null");
  }
  return guarded([&]() -> rsq_status {
    try {
      auto load = rsquant::load_population_csv(path, response_column, ranker_column);
      if (dropped_rows) *dropped_rows = load.dropped_rows;
      *out = new rsq_population{std::move(load.population)};
      return RSQ_OK;
    } catch (const std::invalid_argument& e) {
      // Distinguish unreadable files from schema problems for CLI exit codes.
      g_last_error = e.what();
      return g_last_error.find("cannot open") != std::string::npos ? RSQ_ERROR_IO
                                                                   : RSQ_ERROR_INVALID_ARGUMENT;
    }
  });
}

void rsq_population_destroy(rsq_population* pop) { delete pop; }

size_t rsq_population_size(const rsq_population* pop) { return pop ? pop->population.size() : 0; }

rsq_status rsq_population_truth(const rsq_population* pop, double p, double* out) {
  if (!pop || !out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "pop/out pointer is null");
  return guarded([&] {
    *out = rsquant::population_truth(pop->population, p);
    return RSQ_OK;
  });
}

rsq_status rsq_population_spearman(const rsq_population* pop, double* out) {
  if (!pop || !out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "pop/out pointer is null");
  return guarded([&] {
    *out = rsquant::spearman(pop->population.ranker, pop->population.response);
    return RSQ_OK;
  });
}

rsq_status rsq_spearman(const double* x, const double* y, size_t n, double* out) {
  if (!x || !y || !out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "x/y/out pointer is null");
  return guarded([&] {
    *out = rsquant::spearman({x, n}, {y, n});
    return RSQ_OK;
  });
}

rsq_status rsq_kendall(const double* x, const double* y, size_t n, double* out) {
  if (!x || !y || !out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "x/y/out pointer is null");
  return guarded([&] {
    *out = rsquant::kendall({x, n}, {y, n});
    return RSQ_OK;
  });
}

rsq_experiment* rsq_experiment_create(void) {
  auto* cfg = new rsq_experiment{};
  cfg->config.estimators.assign(rsquant::kAllEstimators.begin(), rsquant::kAllEstimators.end());
  return cfg;
}

void rsq_experiment_destroy(rsq_experiment* cfg) { delete cfg; }

rsq_status rsq_experiment_set_distribution(rsq_experiment* cfg, const char* spec) {
  if (!cfg || !spec) return fail(RSQ_ERROR_INVALID_ARGUMENT, "cfg/spec pointer is null");
  return guarded([&] {
    cfg->config.distribution = rsquant::parse_distribution(spec);
    cfg->config.population = nullptr;
    cfg->config.source_label = spec;
    return RSQ_OK;
  });
}

rsq_status rsq_experiment_set_population(rsq_experiment* cfg, const rsq_population* pop,
                                         const char* label) {
  if (!cfg || !pop) return fail(RSQ_ERROR_INVALID_ARGUMENT, "cfg/pop pointer is null");
  cfg->config.population = &pop->population;
  cfg->config.distribution.reset();
  cfg->config.source_label = label ? label : "population";
  return RSQ_OK;
}

rsq_status rsq_experiment_add_design(rsq_experiment* cfg, int m, int k) {
  if (!cfg) return fail(RSQ_ERROR_INVALID_ARGUMENT, "cfg pointer is null");
  if (m < 1 || k < 1) return fail(RSQ_ERROR_INVALID_ARGUMENT, "design needs m >= 1 and k >= 1");
  cfg->config.designs.push_back(rsquant::Design{m, k});
  return RSQ_OK;
}

rsq_status rsq_experiment_add_rho(rsq_experiment* cfg, double rho) {
  if (!cfg) return fail(RSQ_ERROR_INVALID_ARGUMENT, "cfg pointer is null");
  return guarded([&] {
    cfg->config.rank_models.push_back(rho == 1.0 ? rsquant::RankingModel::perfect()
                                                 : rsquant::RankingModel::concomitant(rho));
    return RSQ_OK;
  });
}

rsq_status rsq_experiment_add_p(rsq_experiment* cfg, double p) {
  if (!cfg) return fail(RSQ_ERROR_INVALID_ARGUMENT, "cfg pointer is null");
  if (!(p > 0.0) || !(p < 1.0)) return fail(RSQ_ERROR_DOMAIN, "p must lie in (0, 1)");
  cfg->config.p_grid.push_back(p);
  return RSQ_OK;
}

rsq_status rsq_experiment_set_estimators(rsq_experiment* cfg, const char* ids) {
  if (!cfg || !ids) return fail(RSQ_ERROR_INVALID_ARGUMENT, "cfg/ids pointer is null");
  const std::string text(ids);
  std::vector<rsquant::EstimatorId> selected;
  if (text == "all") {
    selected.assign(rsquant::kAllEstimators.begin(), rsquant::kAllEstimators.end());
  } else {
    for (const auto& token : rsquant::detail::split(text, ',')) {
      const auto id = rsquant::estimator_from_string(rsquant::detail::trim(token));
      if (!id) {
        g_last_error = "unknown estimator '" + token + "'";
        return RSQ_ERROR_INVALID_ARGUMENT;
      }
      selected.push_back(*id);
    }
  }
  if (selected.empty()) return fail(RSQ_ERROR_INVALID_ARGUMENT, "no estimators given");
  cfg->config.estimators = std::move(selected);
  return RSQ_OK;
}

rsq_status rsq_experiment_set_replicates(rsq_experiment* cfg, int64_t replicates) {
  if (!cfg) return fail(RSQ_ERROR_INVALID_ARGUMENT, "cfg pointer is null");
  if (replicates < 1) return fail(RSQ_ERROR_INVALID_ARGUMENT, "replicates must be >= 1");
  cfg->config.replicates = replicates;
  return RSQ_OK;
}

rsq_status rsq_experiment_set_seed(rsq_experiment* cfg, uint64_t master_seed) {
  if (!cfg) return fail(RSQ_ERROR_INVALID_ARGUMENT, "cfg pointer is null");
  cfg->config.master_seed = master_seed;
  return RSQ_OK;
}

rsq_status rsq_experiment_set_threads(rsq_experiment* cfg, int threads) {
  if (!cfg) return fail(RSQ_ERROR_INVALID_ARGUMENT, "cfg pointer is null");
  if (threads < 0) return fail(RSQ_ERROR_INVALID_ARGUMENT, "threads must be >= 0");
  cfg->config.threads = threads;
  return RSQ_OK;
}

rsq_status rsq_experiment_run(const rsq_experiment* cfg, rsq_result** out) {
  if (!cfg || !out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "cfg/out pointer is null");
  return guarded([&] {
    *out = new rsq_result{rsquant::run_experiment(cfg->config)};
    return RSQ_OK;
  });
}

void rsq_result_destroy(rsq_result* result) { delete result; }

size_t rsq_result_row_count(const rsq_result* result) {
  return result ? result->result.rows.size() : 0;
}

rsq_status rsq_result_get_row(const rsq_result* result, size_t index, rsq_result_row* out) {
  if (!result || !out) return fail(RSQ_ERROR_INVALID_ARGUMENT, "result/out pointer is null");
  if (index >= result->result.rows.size()) return fail(RSQ_ERROR_DIMENSION, "row index out of range");
  const auto& row = result->result.rows[index];
  out->distribution = row.distribution.c_str();
  out->rho = row.rho;
  out->m = row.m;
  out->k = row.k;
  out->p = row.p;
  out->estimator = rsquant::to_string(row.estimator).data();
  out->bias = row.bias;
  out->mse = row.mse;
  out->re = row.re;
  out->mc_se = row.mc_se;
  return RSQ_OK;
}

rsq_status rsq_result_write_csv(const rsq_result* result, const char* path) {
  if (!result || !path) return fail(RSQ_ERROR_INVALID_ARGUMENT, "result/path pointer is null");
  return guarded([&] {
    rsquant::write_results_csv(result->result, std::string(path));
    return RSQ_OK;
  });
}

rsq_status rsq_validate(int inject_fault, rsq_check_callback callback, void* user,
                        int* all_passed) {
  return guarded([&] {
    const auto results = rsquant::run_validation({inject_fault != 0});
    bool ok = true;
    for (const auto& check : results) {
      ok = ok && check.passed;
      if (callback) callback(check.name.c_str(), check.passed ? 1 : 0, user);
    }
    if (all_passed) *all_passed = ok ? 1 : 0;
    return RSQ_OK;
  });
}

}  // extern "C"
