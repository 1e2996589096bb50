#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rsquant/distribution.hpp"

namespace rsquant {

/// RSS design: m cycles of k ranks each, n = m*k measured values.
struct Design {
  int cycles = 1;    // m
  int set_size = 1;  // k
  int total() const { return cycles * set_size; }
};

/// How a given replicate's random streams are derived. Streams are pure
/// functions of (master_seed, replicate_index, stream_id, counter), so
/// replicates can run in any order on any number of threads.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate_index = 0;
};

/// Perfect ranking, or ranking by the concomitant
/// X = rho*(Y - mu)/sigma + sqrt(1 - rho^2)*Z with Z standard normal.
struct RankingModel {
  enum class Kind { Perfect, Concomitant };
  Kind kind = Kind::Perfect;
  double rho = 1.0;  // used by Concomitant; must lie in [0, 1]

  static RankingModel perfect() { return {Kind::Perfect, 1.0}; }
  static RankingModel concomitant(double rho);
};

/// Measured RSS values, indexed by cycle j in 0..m-1 and judgment rank
/// r in 1..k.
struct RssSample {
  Design design;
  std::vector<double> values;  // row-major: cycle-major, rank-minor

  double at(int cycle, int rank) const {
    return values[static_cast<std::size_t>(cycle) * design.set_size + (rank - 1)];
  }
  /// All measurements with judgment rank r, one per cycle.
  std::vector<double> rank_column(int rank) const;
  /// All n values, sorted ascending.
  std::vector<double> pooled_sorted() const;
};

/// Paired response/ranker columns treated as a fixed finite population.
struct FinitePopulation {
  std::vector<double> response;
  std::vector<double> ranker;
  std::size_t size() const { return response.size(); }
};

namespace rng {

/// SplitMix64 finalizer; the core mixing primitive for all streams.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based uniform stream. Key derivation chains the seed fields and
/// a stream id through mix64; outputs are the SplitMix64 sequence of the
/// derived key. Values lie strictly inside (0, 1).
class Stream {
 public:
  Stream(const SeedSpec& seed, std::uint64_t stream_id);
  double uniform();                 // strictly in (0, 1)
  double normal();                  // standard normal via inverse CDF
  std::uint64_t uniform_index(std::uint64_t bound);  // in [0, bound)

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace rng

/// n independent draws from d via inverse CDF on one uniform stream.
std::vector<double> srs_sample(const Distribution& d, int n, const SeedSpec& seed);

/// One RSS sample: each measured value consumes its own fresh set of
/// design.set_size units; the set is ranked (by Y under perfect ranking, by
/// the concomitant X otherwise) and the unit at the target rank is measured.
RssSample rss_sample(const Distribution& d, const Design& design, const RankingModel& model,
                     const SeedSpec& seed);

/// RSS from a finite population: per measured value, draw set_size distinct
/// indices without replacement, rank by the ranker column (ties broken by
/// seeded uniform jitter), and record the response at the target rank. Sets
/// are independent across the m*k selections.
/// Throws std::invalid_argument when the population is smaller than k.
RssSample rss_from_population(const FinitePopulation& pop, const Design& design,
                              const SeedSpec& seed);

/// n distinct indices drawn without replacement; the SRS reference for
/// finite-population studies.
std::vector<double> srs_from_population(const FinitePopulation& pop, int n, const SeedSpec& seed);

/// Monte Carlo check of the RSS mean-variance identity under perfect
/// ranking: Var(mean) = sigma^2/n - (1/(n k)) sum_r (mu_{r:k} - mu)^2.
struct MeanVarianceReport {
  double mc_variance = 0.0;
  double formula_variance = 0.0;
  double relative_error = 0.0;
  int replicates = 0;
};
MeanVarianceReport rss_mean_variance_check(const Distribution& d, const Design& design,
                                           int replicates, std::uint64_t master_seed);

/// Mean of the r-th order statistic of set_size parent draws, by adaptive
/// quadrature of the parent quantile against the Beta(r, k-r+1) density.
double order_statistic_mean(const Distribution& d, int rank, int set_size);

/// Loads a two-column population from a CSV file with a header row. Rows
/// whose response or ranker cell is missing or non-numeric are dropped and
/// counted. Throws std::invalid_argument on missing columns or unreadable
/// files.
struct PopulationLoad {
  FinitePopulation population;
  std::size_t dropped_rows = 0;
};
PopulationLoad load_population_csv(const std::string& path, const std::string& response_column,
                                   const std::string& ranker_column);

/// As above but keeps a whole set of named columns (used for ranker
/// screening); rows with any bad cell among the requested columns drop.
struct ColumnsLoad {
  std::vector<std::vector<double>> columns;
  std::size_t dropped_rows = 0;
};
ColumnsLoad load_columns_csv(const std::string& path, const std::vector<std::string>& names);

}  // namespace rsquant
