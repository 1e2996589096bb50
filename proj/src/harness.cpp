#include "rsquant/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "rsquant/detail/text.hpp"

namespace rsquant {

namespace {

// Replicates are accumulated per fixed-size block and blocks are reduced in
// index order, so floating-point sums do not depend on the thread count.
constexpr std::int64_t kBlockSize = 512;

struct Moments {
  double sum_err = 0.0;
  double sum_sq = 0.0;
  double sum_quad = 0.0;

  void add(double err) {
    const double sq = err * err;
    sum_err += err;
    sum_sq += sq;
    sum_quad += sq * sq;
  }
  void merge(const Moments& other) {
    sum_err += other.sum_err;
    sum_sq += other.sum_sq;
    sum_quad += other.sum_quad;
  }
};

// Everything data-independent for one (design, p): index targets, truth and
// weight vectors, built once and shared read-only across replicates.
struct CellPlan {
  double p = 0.5;
  double truth = 0.0;
  int srs_r_p = 1;
  int rss_r_p = 1;
  LfWeights srs_lf;
  HdWeights srs_hd;
  std::vector<LfWeights> pooled_lf;  // one per rank
  std::vector<HdWeights> pooled_hd;
  WeightTable orss_lf_table;
  WeightTable orss_hd_table;
};

struct DesignPlan {
  Design design;
  std::vector<CellPlan> cells;  // one per p level
};

struct EstimatorSet {
  std::vector<EstimatorId> ids;  // canonical order
  bool need_srs_lf = false;
  bool need_srs_hd = false;
  bool need_rss_lf = false;
  bool need_rss_hd = false;
  bool need_orss_lf = false;
  bool need_orss_hd = false;
};

EstimatorSet resolve_estimators(const ExperimentConfig& cfg) {
  EstimatorSet set;
  for (EstimatorId id : kAllEstimators) {
    const bool requested = std::find(cfg.estimators.begin(), cfg.estimators.end(), id) !=
                           cfg.estimators.end();
    if (!requested) continue;
    if ((id == EstimatorId::OrssLf || id == EstimatorId::OrssHd) && !cfg.orss_enabled) continue;
    set.ids.push_back(id);
    switch (id) {
      case EstimatorId::SrsLf: set.need_srs_lf = true; break;
      case EstimatorId::SrsHd: set.need_srs_hd = true; break;
      case EstimatorId::RssLf: set.need_rss_lf = true; break;
      case EstimatorId::RssHd: set.need_rss_hd = true; break;
      case EstimatorId::OrssLf: set.need_orss_lf = true; break;
      case EstimatorId::OrssHd: set.need_orss_hd = true; break;
      default: break;
    }
  }
  if (set.ids.empty()) throw std::invalid_argument("experiment: no estimators selected");
  return set;
}

DesignPlan build_design_plan(const ExperimentConfig& cfg, const Design& design,
                             const EstimatorSet& set) {
  DesignPlan plan;
  plan.design = design;
  const int n = design.total();
  const auto targets_for = [&](double p) { return stratum_targets(design, p); };

  for (double p : cfg.p_grid) {
    CellPlan cell;
    cell.p = p;
    cell.truth = cfg.population ? population_truth(*cfg.population, p)
                                : cfg.distribution->quantile(p);
    cell.srs_r_p = QuantileTarget::make(n, p).r_p;
    cell.rss_r_p = cell.srs_r_p;
    if (set.need_srs_lf) cell.srs_lf = lf_srs_weights(n, p);
    if (set.need_srs_hd) cell.srs_hd = hd_srs_weights(n, p);
    if (set.need_rss_lf || set.need_rss_hd) {
      const auto targets = targets_for(p);
      for (const auto& t : targets) {
        if (set.need_rss_lf) cell.pooled_lf.push_back(pooled_lf_weights(design, t));
        if (set.need_rss_hd) cell.pooled_hd.push_back(pooled_hd_weights(design, t));
      }
    }
    if (set.need_orss_lf) cell.orss_lf_table = orss_lf_weights(design, p);
    if (set.need_orss_hd) cell.orss_hd_table = orss_hd_weights(design, p);
    plan.cells.push_back(std::move(cell));
  }
  return plan;
}

double dot(const std::vector<double>& w, const std::vector<double>& sorted) {
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * sorted[i];
  return acc;
}

// evaluate_hd's summation-by-parts form on a raw sorted vector.
double hd_apply(const HdWeights& w, const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  double acc = sorted[n - 1];
  for (std::size_t i = 1; i < n; ++i) acc += w.cdf_grid[i] * (sorted[i - 1] - sorted[i]);
  return acc;
}

double combined_estimate(const std::vector<LfWeights>& lf, const std::vector<HdWeights>& hd,
                         bool use_lf, const std::vector<double>& sorted, double p) {
  ComponentEstimates comps;
  comps.kind = use_lf ? EstimatorFamily::LF : EstimatorFamily::HD;
  const std::size_t k = use_lf ? lf.size() : hd.size();
  comps.estimates.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    comps.estimates.push_back(use_lf ? dot(lf[r].weights, sorted) : hd_apply(hd[r], sorted));
  }
  return combine_components(comps, p);
}

void check_config(const ExperimentConfig& cfg) {
  if (cfg.replicates < 1) throw std::invalid_argument("experiment: replicates must be >= 1");
  if (cfg.designs.empty()) throw std::invalid_argument("experiment: no designs");
  if (cfg.p_grid.empty()) throw std::invalid_argument("experiment: empty p grid");
  for (double p : cfg.p_grid) {
    if (!(p > 0.0) || !(p < 1.0)) {
      throw std::invalid_argument("experiment: p grid values must lie in (0, 1)");
    }
  }
  const bool model = cfg.distribution.has_value();
  const bool population = cfg.population != nullptr;
  if (model == population) {
    throw std::invalid_argument("experiment: exactly one of distribution/population required");
  }
  if (model && cfg.rank_models.empty()) {
    throw std::invalid_argument("experiment: no ranking models");
  }
}

}  // namespace

double population_truth(const FinitePopulation& pop, double p) {
  if (pop.response.empty()) throw std::invalid_argument("population_truth: empty population");
  return emp_quantile_srs(OrderedSample::from_unsorted(pop.response), p);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  check_config(cfg);
  const EstimatorSet set = resolve_estimators(cfg);
  const bool population_run = cfg.population != nullptr;

  // Population runs have no ranking-model axis; use one placeholder slot.
  const std::size_t model_count = population_run ? 1 : cfg.rank_models.size();

  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;

  // Weight tables and truths are shared across ranking models.
  std::vector<DesignPlan> plans;
  plans.reserve(cfg.designs.size());
  for (const Design& design : cfg.designs) plans.push_back(build_design_plan(cfg, design, set));

  ExperimentResult result;
  for (std::size_t model_idx = 0; model_idx < model_count; ++model_idx) {
    const RankingModel model = population_run ? RankingModel::perfect() : cfg.rank_models[model_idx];
    for (std::size_t design_idx = 0; design_idx < cfg.designs.size(); ++design_idx) {
      const Design& design = cfg.designs[design_idx];
      const DesignPlan& plan = plans[design_idx];
      const int n = design.total();
      if (population_run && cfg.population->size() < static_cast<std::size_t>(design.set_size)) {
        throw std::invalid_argument("experiment: population smaller than set size");
      }
      if (population_run && cfg.population->size() < static_cast<std::size_t>(n)) {
        throw std::invalid_argument("experiment: population smaller than n = m*k");
      }

      const std::size_t p_count = plan.cells.size();
      const std::size_t est_count = set.ids.size();
      // srs_emp reference occupies one extra slot per p.
      const std::size_t cell_stride = est_count + 1;
      const std::int64_t block_count = (cfg.replicates + kBlockSize - 1) / kBlockSize;
      std::vector<std::vector<Moments>> blocks(
          static_cast<std::size_t>(block_count),
          std::vector<Moments>(p_count * cell_stride));

      std::atomic<std::int64_t> next_block{0};
      auto worker = [&]() {
        std::vector<double> srs_sorted;
        std::vector<double> rss_sorted;
        while (true) {
          const std::int64_t block = next_block.fetch_add(1);
          if (block >= block_count) break;
          auto& acc = blocks[static_cast<std::size_t>(block)];
          const std::int64_t lo = block * kBlockSize;
          const std::int64_t hi = std::min(lo + kBlockSize, cfg.replicates);
          for (std::int64_t b = lo; b < hi; ++b) {
            const SeedSpec seed{cfg.master_seed, static_cast<std::uint64_t>(b)};
            if (population_run) {
              srs_sorted = srs_from_population(*cfg.population, n, seed);
              rss_sorted = rss_from_population(*cfg.population, design, seed).values;
            } else {
              srs_sorted = srs_sample(*cfg.distribution, n, seed);
              rss_sorted = rss_sample(*cfg.distribution, design, model, seed).values;
            }
            std::sort(srs_sorted.begin(), srs_sorted.end());
            std::sort(rss_sorted.begin(), rss_sorted.end());

            for (std::size_t pi = 0; pi < p_count; ++pi) {
              const CellPlan& cell = plan.cells[pi];
              const double ref = srs_sorted[cell.srs_r_p - 1];
              acc[pi * cell_stride + est_count].add(ref - cell.truth);
              for (std::size_t e = 0; e < est_count; ++e) {
                double value = 0.0;
                switch (set.ids[e]) {
                  case EstimatorId::SrsEmp: value = ref; break;
                  case EstimatorId::SrsLf: value = dot(cell.srs_lf.weights, srs_sorted); break;
                  case EstimatorId::SrsHd: value = hd_apply(cell.srs_hd, srs_sorted); break;
                  case EstimatorId::RssEmp: value = rss_sorted[cell.rss_r_p - 1]; break;
                  case EstimatorId::RssLf:
                    value = combined_estimate(cell.pooled_lf, {}, true, rss_sorted, cell.p);
                    break;
                  case EstimatorId::RssHd:
                    value = combined_estimate({}, cell.pooled_hd, false, rss_sorted, cell.p);
                    break;
                  case EstimatorId::OrssLf: value = dot(cell.orss_lf_table.weights, rss_sorted); break;
                  case EstimatorId::OrssHd: value = dot(cell.orss_hd_table.weights, rss_sorted); break;
                }
                acc[pi * cell_stride + e].add(value - cell.truth);
              }
            }
          }
        }
      };

      if (threads == 1) {
        worker();
      } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
      }

      // Ordered reduction over blocks.
      std::vector<Moments> totals(p_count * cell_stride);
      for (const auto& block : blocks) {
        for (std::size_t i = 0; i < totals.size(); ++i) totals[i].merge(block[i]);
      }

      const double B = static_cast<double>(cfg.replicates);
      for (std::size_t pi = 0; pi < p_count; ++pi) {
        const double ref_mse = totals[pi * cell_stride + est_count].sum_sq / B;
        for (std::size_t e = 0; e < est_count; ++e) {
          const Moments& mom = totals[pi * cell_stride + e];
          ResultRow row;
          row.distribution = cfg.source_label;
          row.rho = population_run ? std::numeric_limits<double>::quiet_NaN()
                                   : (model.kind == RankingModel::Kind::Perfect ? 1.0 : model.rho);
          row.m = design.cycles;
          row.k = design.set_size;
          row.p = plan.cells[pi].p;
          row.estimator = set.ids[e];
          row.bias = mom.sum_err / B;
          row.mse = mom.sum_sq / B;
          row.re = set.ids[e] == EstimatorId::SrsEmp ? 1.0 : ref_mse / row.mse;
          const double var_sq = std::max(0.0, mom.sum_quad / B - row.mse * row.mse);
          row.mc_se = std::sqrt(var_sq / B);
          result.rows.push_back(std::move(row));
        }
      }
    }
  }
  return result;
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("rank correlation: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("rank correlation: need at least two points");
}

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

// Counts inversions by merge sort; v is overwritten with its sorted order.
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch,
                               std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inv = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
  std::merge(v.begin() + lo, v.begin() + mid, v.begin() + mid, v.begin() + hi,
             scratch.begin() + lo);
  // Count cross pairs (a in left, b in right) with b < a.
  std::size_t a = lo;
  for (std::size_t b = mid; b < hi; ++b) {
    while (a < mid && v[a] <= v[b]) ++a;
    inv += mid - a;
  }
  std::copy(scratch.begin() + lo, scratch.begin() + hi, v.begin() + lo);
  return inv;
}

double tie_term(std::span<const double> sorted) {
  double total = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    total += 0.5 * t * (t - 1.0);
    i = j + 1;
  }
  return total;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::invalid_argument("spearman: a column is constant");
  }
  return sxy / std::sqrt(sxx * syy);
}

double kendall(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const std::size_t n = x.size();

  // Sort pairs by x, ties broken by y (Knight's algorithm).
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  double xtie = 0.0, xytie = 0.0;
  {
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
      const double t = static_cast<double>(j - i + 1);
      xtie += 0.5 * t * (t - 1.0);
      std::size_t a = i;
      while (a <= j) {
        std::size_t b = a;
        while (b + 1 <= j && y[order[b + 1]] == y[order[a]]) ++b;
        const double u = static_cast<double>(b - a + 1);
        xytie += 0.5 * u * (u - 1.0);
        a = b + 1;
      }
      i = j + 1;
    }
  }

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  std::vector<double> scratch(n);
  const double swaps = static_cast<double>(count_inversions(ys, scratch, 0, n));
  const double ytie = tie_term(ys);  // ys is now sorted

  const double total = 0.5 * static_cast<double>(n) * (static_cast<double>(n) - 1.0);
  const double con_minus_dis = total - xtie - ytie + xytie - 2.0 * swaps;
  const double denom = std::sqrt((total - xtie) * (total - ytie));
  if (denom == 0.0) throw std::invalid_argument("kendall: a column is constant");
  return con_minus_dis / denom;
}

namespace {

std::string format_rho(double rho) {
  if (std::isnan(rho)) return "NA";
  return detail::format_double(rho);
}

}  // namespace

void write_results_csv(const ExperimentResult& result, std::ostream& out) {
  out << "distribution,rho,m,k,p,estimator,bias,mse,re,mc_se\n";
  for (const auto& row : result.rows) {
    out << detail::csv_escape(row.distribution) << ',' << format_rho(row.rho) << ',' << row.m
        << ',' << row.k << ',' << detail::format_double(row.p) << ',' << to_string(row.estimator)
        << ',' << detail::format_double(row.bias) << ',' << detail::format_double(row.mse) << ','
        << detail::format_double(row.re) << ',' << detail::format_double(row.mc_se) << '\n';
  }
}

void write_results_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_results_csv(result, out);
}

}  // namespace rsquant
