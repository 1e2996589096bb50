#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rsquant/estimators.hpp"

namespace rsquant {

/// One Monte Carlo study: a model distribution or a finite population,
/// crossed with designs, ranking models and quantile levels.
struct ExperimentConfig {
  std::optional<Distribution> distribution;      // model runs
  const FinitePopulation* population = nullptr;  // finite-population runs (borrowed)
  std::string source_label;                      // distribution spec or population tag

  std::vector<Design> designs;
  std::vector<RankingModel> rank_models;  // ignored for population runs
  std::vector<double> p_grid;
  std::vector<EstimatorId> estimators;
  bool orss_enabled = true;  // gates the two ORSS estimators

  std::int64_t replicates = 20000;
  std::uint64_t master_seed = 0;
  int threads = 0;  // 0: hardware concurrency; affects speed only, never results
};

/// One (rho, design, p, estimator) cell. rho is NaN for population runs.
struct ResultRow {
  std::string distribution;
  double rho = 1.0;
  int m = 1;
  int k = 1;
  double p = 0.5;
  EstimatorId estimator = EstimatorId::SrsEmp;
  double bias = 0.0;
  double mse = 0.0;
  double re = 1.0;    // mse(srs_emp) / mse, from the same replicate block
  double mc_se = 0.0; // Monte Carlo standard error of the MSE
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
};

/// Runs the full factor grid. Every estimator at a given replicate consumes
/// the same drawn samples (common random numbers), and the SRS empirical
/// quantile is always evaluated internally as the RE reference. Results are
/// bit-identical for a fixed master seed regardless of thread count.
/// Throws std::invalid_argument on inconsistent configs.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Empirical quantile of the full population vector (finite-population truth).
double population_truth(const FinitePopulation& pop, double p);

/// Spearman rank correlation, average ranks for ties. Throws on length
/// mismatch or fewer than two points.
double spearman(std::span<const double> x, std::span<const double> y);

/// Kendall tau-b, O(n log n). Same preconditions as spearman.
double kendall(std::span<const double> x, std::span<const double> y);

/// Results CSV: header distribution,rho,m,k,p,estimator,bias,mse,re,mc_se.
/// Row order follows (rho, design, p, estimator id). NaN rho prints as NA.
void write_results_csv(const ExperimentResult& result, std::ostream& out);
void write_results_csv(const ExperimentResult& result, const std::string& path);

}  // namespace rsquant
