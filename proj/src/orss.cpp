#include "rsquant/orss.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "rsquant/detail/text.hpp"
#include "rsquant/specfun.hpp"

namespace rsquant {

namespace {

constexpr double kFiniteDiffStep = 1e-6;
constexpr double kDustTol = 1e-12;
// Finite differencing of G_i floors the achievable accuracy of psi at about
// eps / h; negative psi readings inside that band are roundoff, not signal.
constexpr double kPsiNoiseFloor = 1e-9;
constexpr int kBruteForceLimit = 14;

void check_design(const Design& d) {
  if (d.cycles < 1 || d.set_size < 1) {
    throw std::invalid_argument("orss: cycles and set_size must be at least 1");
  }
}

void check_index(const Design& d, int i) {
  if (i < 1 || i > d.total()) {
    throw std::invalid_argument("orss: order index must lie in 1..n");
  }
}

// log C(m, j) for j = 0..m.
std::vector<double> binomial_log_coeffs(int m) {
  std::vector<double> lc(m + 1);
  const double lgm = std::lgamma(m + 1.0);
  for (int j = 0; j <= m; ++j) {
    lc[j] = lgm - std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0);
  }
  return lc;
}

// Exact Binomial(m, q) mass vector.
void binomial_pmf(int m, double q, const std::vector<double>& lc, std::vector<double>& out) {
  out.assign(m + 1, 0.0);
  if (q <= 0.0) {
    out[0] = 1.0;
    return;
  }
  if (q >= 1.0) {
    out[m] = 1.0;
    return;
  }
  const double lq = std::log(q);
  const double l1q = std::log1p(-q);
  for (int j = 0; j <= m; ++j) {
    out[j] = std::exp(lc[j] + j * lq + (m - j) * l1q);
  }
}

}  // namespace

double stratum_prob(int rank, int set_size, double t) {
  if (rank < 1 || rank > set_size) {
    throw std::invalid_argument("stratum_prob: rank must lie in 1..set_size");
  }
  return beta_cdf(BetaParams{static_cast<double>(rank), static_cast<double>(set_size - rank + 1)},
                  t);
}

CountDistribution count_distribution(const Design& design, double t, ConvolutionStats* stats) {
  check_design(design);
  const int m = design.cycles;
  const int k = design.set_size;
  const auto lc = binomial_log_coeffs(m);

  std::vector<double> acc;
  std::vector<double> pmf;
  std::vector<double> next;
  std::uint64_t ops = 0;
  for (int r = 1; r <= k; ++r) {
    binomial_pmf(m, stratum_prob(r, k, t), lc, pmf);
    if (r == 1) {
      acc = pmf;
      continue;
    }
    next.assign(acc.size() + m, 0.0);
    for (std::size_t a = 0; a < acc.size(); ++a) {
      const double va = acc[a];
      for (int j = 0; j <= m; ++j) {
        next[a + j] += va * pmf[j];
      }
    }
    ops += acc.size() * static_cast<std::uint64_t>(m + 1);
    acc.swap(next);
  }
  if (stats) stats->multiply_adds += ops;

  // Convolution dust can go fractionally negative; clamp it.
  for (double& v : acc) {
    if (v < 0.0 && v > -1e-15) v = 0.0;
  }
  return CountDistribution{std::move(acc)};
}

std::vector<double> orss_cdf_all(const Design& design, double t) {
  const CountDistribution dist = count_distribution(design, t);
  const int n = design.total();
  std::vector<double> tails(n);
  double acc = 0.0;
  for (int j = n; j >= 1; --j) {
    acc += dist.probs[j];
    tails[j - 1] = std::min(acc, 1.0);
  }
  return tails;
}

double orss_cdf(const Design& design, int i, double t) {
  check_index(design, i);
  const CountDistribution dist = count_distribution(design, t);
  double acc = 0.0;
  for (int j = design.total(); j >= i; --j) acc += dist.probs[j];
  return std::min(acc, 1.0);
}

OrssCdfTable build_cdf_table(const Design& design, const std::vector<double>& grid) {
  check_design(design);
  OrssCdfTable table;
  table.design = design;
  table.grid = grid;
  const int n = design.total();
  table.values.assign(n, std::vector<double>(grid.size(), 0.0));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const CountDistribution dist = count_distribution(design, grid[g], &table.stats);
    double acc = 0.0;
    for (int j = n; j >= 1; --j) {
      acc += dist.probs[j];
      table.values[j - 1][g] = std::min(acc, 1.0);
    }
  }
  return table;
}

double orss_pdf_probscale(const Design& design, int i, double t) {
  check_index(design, i);
  return central_diff_bounded([&](double u) { return orss_cdf(design, i, u); }, t,
                              kFiniteDiffStep, 0.0, 1.0);
}

// Weight-table index: floor(np) + 1 throughout. Taking r_p = np at integral
// np would shift the target level half a spacing below p, and for the LF
// table that offset stacks with the half-spacing carried by the Riemann-sum
// weights; floor(np) + 1 keeps the discrete LF estimator centered on p.
int orss_index(int n, double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw std::domain_error("orss_index: p must lie in (0, 1)");
  const long long r = static_cast<long long>(std::floor(n * p)) + 1;
  return static_cast<int>(std::clamp<long long>(r, 1, n));
}

std::string_view weight_kind_name(WeightKind kind) {
  return kind == WeightKind::OrssLf ? "orss-lf" : "orss-hd";
}

WeightTable orss_lf_weights(const Design& design, double p) {
  check_design(design);
  const int n = design.total();
  WeightTable table;
  table.design = design;
  table.p = p;
  table.kind = WeightKind::OrssLf;
  table.r_p = orss_index(n, p);
  table.weights.resize(n);
  for (int i = 1; i <= n; ++i) {
    double w = orss_pdf_probscale(design, table.r_p, static_cast<double>(i) / n) / n;
    if (w < 0.0 && w > -kPsiNoiseFloor) w = 0.0;
    table.weights[i - 1] = w;
  }
  return table;
}

WeightTable orss_hd_weights(const Design& design, double p, double quad_tol) {
  check_design(design);
  if (!(quad_tol > 0.0)) throw std::invalid_argument("orss_hd_weights: quad_tol must be positive");
  const int n = design.total();
  WeightTable table;
  table.design = design;
  table.p = p;
  table.kind = WeightKind::OrssHd;
  table.r_p = orss_index(n, p);
  table.weights.resize(n);

  const auto psi = [&](double u) {
    const double v = orss_pdf_probscale(design, table.r_p, u);
    return v < 0.0 && v > -kPsiNoiseFloor ? 0.0 : v;
  };
  double total = 0.0;
  for (int i = 1; i <= n; ++i) {
    bool converged = true;
    double w = integrate_adaptive_simpson(psi, static_cast<double>(i - 1) / n,
                                          static_cast<double>(i) / n, quad_tol, 20, &converged);
    if (!converged) {
      throw std::runtime_error("orss_hd_weights: quadrature tolerance unmet on interval " +
                               std::to_string(i));
    }
    if (w < 0.0 && w > -kDustTol) w = 0.0;
    if (w < 0.0) {
      throw std::runtime_error("orss_hd_weights: negative weight on interval " + std::to_string(i));
    }
    table.weights[i - 1] = w;
    total += w;
  }
  if (std::fabs(total - 1.0) > quad_tol * n) {
    throw std::runtime_error("orss_hd_weights: weights sum to " + std::to_string(total));
  }
  return table;
}

double brute_force_orss_cdf(const Design& design, int i, double t) {
  check_design(design);
  check_index(design, i);
  const int n = design.total();
  if (n > kBruteForceLimit) {
    throw std::invalid_argument("brute_force_orss_cdf: limited to n <= 14");
  }
  const int m = design.cycles;
  const int k = design.set_size;

  std::vector<double> q(n);
  for (int r = 1; r <= k; ++r) {
    const double qr = stratum_prob(r, k, t);
    for (int s = 0; s < m; ++s) q[(r - 1) * m + s] = qr;
  }

  double tail = 0.0;
  const std::uint64_t masks = 1ULL << n;
  for (std::uint64_t mask = 0; mask < masks; ++mask) {
    if (std::popcount(mask) < i) continue;
    double prod = 1.0;
    for (int u = 0; u < n; ++u) {
      prod *= (mask >> u) & 1ULL ? q[u] : 1.0 - q[u];
    }
    tail += prod;
  }
  return tail;
}

void write_weight_table_csv(const WeightTable& table, std::ostream& out) {
  char pbuf[40];
  std::snprintf(pbuf, sizeof(pbuf), "%.17g", table.p);
  out << "m,k,p,kind,i,weight\n";
  for (std::size_t i = 0; i < table.weights.size(); ++i) {
    out << table.design.cycles << ',' << table.design.set_size << ',' << pbuf << ','
        << weight_kind_name(table.kind) << ',' << i + 1 << ','
        << detail::format_double(table.weights[i]) << '\n';
  }
}

void write_weight_table_csv(const WeightTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_weight_table_csv(table, out);
}

WeightTable load_weight_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weight table '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || detail::split_csv_line(line) !=
                                     std::vector<std::string>{"m", "k", "p", "kind", "i", "weight"}) {
    throw std::runtime_error("bad weight table header in '" + path + "'");
  }
  WeightTable table;
  bool first = true;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 6) throw std::runtime_error("bad weight table row in '" + path + "'");
    const auto m = detail::parse_double(fields[0]);
    const auto k = detail::parse_double(fields[1]);
    const auto p = detail::parse_double(fields[2]);
    const auto w = detail::parse_double(fields[5]);
    if (!m || !k || !p || !w) throw std::runtime_error("bad weight table row in '" + path + "'");
    if (first) {
      table.design = Design{static_cast<int>(*m), static_cast<int>(*k)};
      table.p = *p;
      if (fields[3] == "orss-lf") table.kind = WeightKind::OrssLf;
      else if (fields[3] == "orss-hd") table.kind = WeightKind::OrssHd;
      else throw std::runtime_error("unknown weight kind '" + fields[3] + "'");
      table.r_p = orss_index(table.design.total(), table.p);
      first = false;
    }
    table.weights.push_back(*w);
  }
  if (first) throw std::runtime_error("weight table '" + path + "' has no rows");
  if (static_cast<int>(table.weights.size()) != table.design.total()) {
    throw std::runtime_error("weight table '" + path + "' has wrong row count");
  }
  return table;
}

}  // namespace rsquant
