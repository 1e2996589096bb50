#include "rsquant/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "rsquant/detail/text.hpp"
#include "rsquant/specfun.hpp"

namespace rsquant {

namespace {

// Stream id layout: id 0 is the SRS draw of a replicate; measured RSS unit
// (cycle j, rank r) uses 1 + j*k + (r-1). Every measured unit owns a
// disjoint sub-stream.
constexpr std::uint64_t kSrsStreamId = 0;
constexpr std::uint64_t kRssStreamBase = 1;

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

void check_design(const Design& d) {
  if (d.cycles < 1 || d.set_size < 1) {
    throw std::invalid_argument("design: cycles and set_size must be at least 1");
  }
}

}  // namespace

RankingModel RankingModel::concomitant(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw std::invalid_argument("ranking model: rho must lie in [0, 1]");
  }
  return {Kind::Concomitant, rho};
}

std::vector<double> RssSample::rank_column(int rank) const {
  std::vector<double> out;
  out.reserve(design.cycles);
  for (int j = 0; j < design.cycles; ++j) out.push_back(at(j, rank));
  return out;
}

std::vector<double> RssSample::pooled_sorted() const {
  std::vector<double> out = values;
  std::sort(out.begin(), out.end());
  return out;
}

namespace rng {

std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Stream::Stream(const SeedSpec& seed, std::uint64_t stream_id) {
  key_ = mix64(mix64(mix64(seed.master_seed) + seed.replicate_index) + stream_id);
}

double Stream::uniform() {
  const std::uint64_t v = mix64(key_ + (++counter_) * kGolden);
  // (v >> 11) spans [0, 2^53); the half-step keeps the value inside (0, 1)
  // so inverse-CDF transforms stay finite.
  return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() { return normal_quantile(uniform()); }

std::uint64_t Stream::uniform_index(std::uint64_t bound) {
  const std::uint64_t v = mix64(key_ + (++counter_) * kGolden);
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(v) * bound) >> 64);
}

}  // namespace rng

std::vector<double> srs_sample(const Distribution& d, int n, const SeedSpec& seed) {
  if (n < 1) throw std::invalid_argument("srs_sample: n must be at least 1");
  rng::Stream stream(seed, kSrsStreamId);
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(d.quantile(stream.uniform()));
  return out;
}

RssSample rss_sample(const Distribution& d, const Design& design, const RankingModel& model,
                     const SeedSpec& seed) {
  check_design(design);
  const int m = design.cycles;
  const int k = design.set_size;
  const bool perfect = model.kind == RankingModel::Kind::Perfect;
  const double rho = model.rho;
  const double mu = perfect ? 0.0 : d.mean();
  const double sigma = perfect ? 1.0 : d.sd();
  const double noise = perfect ? 0.0 : std::sqrt(std::max(0.0, 1.0 - rho * rho));

  RssSample sample;
  sample.design = design;
  sample.values.resize(static_cast<std::size_t>(m) * k);

  std::vector<double> ys(k);
  std::vector<double> keys(k);
  std::vector<int> order(k);
  for (int j = 0; j < m; ++j) {
    for (int r = 1; r <= k; ++r) {
      const std::uint64_t unit = static_cast<std::uint64_t>(j) * k + (r - 1);
      rng::Stream stream(seed, kRssStreamBase + unit);
      for (int i = 0; i < k; ++i) {
        ys[i] = d.quantile(stream.uniform());
        if (perfect) {
          keys[i] = ys[i];
        } else {
          keys[i] = rho * (ys[i] - mu) / sigma + noise * stream.normal();
        }
      }
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return keys[a] < keys[b]; });
      sample.values[static_cast<std::size_t>(j) * k + (r - 1)] = ys[order[r - 1]];
    }
  }
  return sample;
}

namespace {

// Draws `count` distinct indices in [0, n) by rejection; count is tiny
// relative to n in every supported use, and the exhaustive count == n case
// still terminates.
void draw_distinct_indices(rng::Stream& stream, std::uint64_t n, int count,
                           std::vector<std::uint64_t>& out) {
  out.clear();
  while (static_cast<int>(out.size()) < count) {
    const std::uint64_t idx = stream.uniform_index(n);
    if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
  }
}

}  // namespace

RssSample rss_from_population(const FinitePopulation& pop, const Design& design,
                              const SeedSpec& seed) {
  check_design(design);
  const std::uint64_t population_size = pop.size();
  const int m = design.cycles;
  const int k = design.set_size;
  if (population_size < static_cast<std::uint64_t>(k)) {
    throw std::invalid_argument("rss_from_population: population smaller than set size");
  }

  RssSample sample;
  sample.design = design;
  sample.values.resize(static_cast<std::size_t>(m) * k);

  std::vector<std::uint64_t> chosen;
  std::vector<double> keys(k);
  std::vector<double> jitter(k);
  std::vector<int> order(k);
  for (int j = 0; j < m; ++j) {
    for (int r = 1; r <= k; ++r) {
      const std::uint64_t unit = static_cast<std::uint64_t>(j) * k + (r - 1);
      rng::Stream stream(seed, kRssStreamBase + unit);
      draw_distinct_indices(stream, population_size, k, chosen);
      for (int i = 0; i < k; ++i) {
        keys[i] = pop.ranker[chosen[i]];
        jitter[i] = stream.uniform();
      }
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (keys[a] != keys[b]) return keys[a] < keys[b];
        return jitter[a] < jitter[b];
      });
      sample.values[static_cast<std::size_t>(j) * k + (r - 1)] =
          pop.response[chosen[order[r - 1]]];
    }
  }
  return sample;
}

std::vector<double> srs_from_population(const FinitePopulation& pop, int n, const SeedSpec& seed) {
  if (n < 1) throw std::invalid_argument("srs_from_population: n must be at least 1");
  if (pop.size() < static_cast<std::size_t>(n)) {
    throw std::invalid_argument("srs_from_population: population smaller than sample size");
  }
  rng::Stream stream(seed, kSrsStreamId);
  std::vector<std::uint64_t> chosen;
  draw_distinct_indices(stream, pop.size(), n, chosen);
  std::vector<double> out;
  out.reserve(n);
  for (auto idx : chosen) out.push_back(pop.response[idx]);
  return out;
}

double order_statistic_mean(const Distribution& d, int rank, int set_size) {
  if (rank < 1 || rank > set_size) {
    throw std::domain_error("order_statistic_mean: rank must lie in 1..set_size");
  }
  const BetaParams shape{static_cast<double>(rank), static_cast<double>(set_size - rank + 1)};
  constexpr double clip = 1e-12;  // quantile endpoints diverge; tail mass is negligible
  return integrate_adaptive_simpson(
      [&](double u) { return d.quantile(u) * beta_pdf(shape, u); }, clip, 1.0 - clip, 1e-10, 48);
}

MeanVarianceReport rss_mean_variance_check(const Distribution& d, const Design& design,
                                           int replicates, std::uint64_t master_seed) {
  check_design(design);
  if (replicates < 2) throw std::invalid_argument("rss_mean_variance_check: need replicates >= 2");

  const int n = design.total();
  const int k = design.set_size;
  double sum = 0.0;
  double sumsq = 0.0;
  const double center = d.mean();
  for (int b = 0; b < replicates; ++b) {
    const RssSample s =
        rss_sample(d, design, RankingModel::perfect(), SeedSpec{master_seed, static_cast<std::uint64_t>(b)});
    double mean = 0.0;
    for (double v : s.values) mean += v;
    mean = mean / n - center;  // centering keeps the variance accumulation well conditioned
    sum += mean;
    sumsq += mean * mean;
  }
  const double bcount = static_cast<double>(replicates);
  const double mc_var = (sumsq - sum * sum / bcount) / (bcount - 1.0);

  const double sigma = d.sd();
  double stratum_term = 0.0;
  for (int r = 1; r <= k; ++r) {
    const double dev = order_statistic_mean(d, r, k) - center;
    stratum_term += dev * dev;
  }
  const double formula = sigma * sigma / n - stratum_term / (static_cast<double>(n) * k);

  MeanVarianceReport report;
  report.mc_variance = mc_var;
  report.formula_variance = formula;
  report.relative_error = std::fabs(mc_var - formula) / formula;
  report.replicates = replicates;
  return report;
}

ColumnsLoad load_columns_csv(const std::string& path, const std::vector<std::string>& names) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open population file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("population file '" + path + "' is empty");
  if (line.size() >= 3 && line[0] == '\xEF' && line[1] == '\xBB' && line[2] == '\xBF') {
    line.erase(0, 3);
  }
  const auto header = detail::split_csv_line(line);

  std::vector<std::size_t> indices;
  for (const auto& name : names) {
    std::size_t found = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (std::string(detail::trim(header[i])) == name) {
        found = i;
        break;
      }
    }
    if (found == header.size()) {
      throw std::invalid_argument("column '" + name + "' not found in '" + path + "'");
    }
    indices.push_back(found);
  }

  ColumnsLoad out;
  out.columns.resize(names.size());
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    std::vector<double> row;
    row.reserve(indices.size());
    bool ok = true;
    for (std::size_t idx : indices) {
      if (idx >= fields.size()) {
        ok = false;
        break;
      }
      const auto value = detail::parse_double(fields[idx]);
      if (!value) {
        ok = false;
        break;
      }
      row.push_back(*value);
    }
    if (!ok) {
      ++out.dropped_rows;
      continue;
    }
    for (std::size_t c = 0; c < row.size(); ++c) out.columns[c].push_back(row[c]);
  }
  return out;
}

PopulationLoad load_population_csv(const std::string& path, const std::string& response_column,
                                   const std::string& ranker_column) {
  auto cols = load_columns_csv(path, {response_column, ranker_column});
  PopulationLoad out;
  out.population.response = std::move(cols.columns[0]);
  out.population.ranker = std::move(cols.columns[1]);
  out.dropped_rows = cols.dropped_rows;
  return out;
}

}  // namespace rsquant
