#include "rsquant/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rsquant/detail/rounding.hpp"
#include "rsquant/specfun.hpp"

namespace rsquant {

namespace {

void check_level(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("quantile level p must lie in (0, 1)");
  }
}

void check_sample(const OrderedSample& s) {
  if (s.values.empty()) throw std::invalid_argument("estimator: sample is empty");
}

void check_pooled(const OrderedSample& s, const Design& design) {
  if (s.size() != design.total()) {
    throw std::invalid_argument("estimator: sample size does not match design m*k");
  }
}

double clamp_open_unit(double v) {
  constexpr double lo = std::numeric_limits<double>::min();
  const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(v, lo, hi);
}

}  // namespace

OrderedSample OrderedSample::from_unsorted(std::vector<double> v) {
  std::stable_sort(v.begin(), v.end());
  return OrderedSample{std::move(v)};
}

OrderedSample OrderedSample::from_sorted(std::vector<double> v) {
  if (!std::is_sorted(v.begin(), v.end())) {
    throw std::invalid_argument("OrderedSample::from_sorted: values are not sorted");
  }
  return OrderedSample{std::move(v)};
}

QuantileTarget QuantileTarget::make(int n, double p) {
  check_level(p);
  if (n < 1) throw std::invalid_argument("QuantileTarget: n must be at least 1");
  QuantileTarget t;
  t.p = p;

  const long long r = detail::quantile_index(n * p);
  if (r < 1 || r > n) t.clamped = true;
  t.r_p = static_cast<int>(std::clamp<long long>(r, 1, n));

  // Nearest-index Beta center. Flooring (n+1)p instead biases the weight
  // window low by up to a full index spacing, which on the stratum scale of
  // the pooled estimators is coarse enough to drag their relative
  // efficiency below the SRS baseline at mid-grid levels.
  const long long j = std::llround((n + 1) * p);
  if (j < 1 || j > n) t.clamped = true;
  t.j_star = static_cast<int>(std::clamp<long long>(j, 1, n));
  return t;
}

std::vector<StratumTarget> stratum_targets(const Design& design, double p) {
  check_level(p);
  const int m = design.cycles;
  const int k = design.set_size;
  std::vector<StratumTarget> targets;
  targets.reserve(k);
  for (int r = 1; r <= k; ++r) {
    StratumTarget t;
    t.rank = r;
    t.level = clamp_open_unit(
        beta_cdf(BetaParams{static_cast<double>(r), static_cast<double>(k - r + 1)}, p));
    t.a = (m + 1) * t.level;
    t.b = (m + 1) * (1.0 - t.level);
    const long long j = std::llround((m + 1) * t.level);
    if (j < 1 || j > m) t.clamped = true;
    t.j_star = static_cast<int>(std::clamp<long long>(j, 1, m));
    targets.push_back(t);
  }
  return targets;
}

LfWeights lf_srs_weights(int n, double p) {
  if (n < 2) throw std::invalid_argument("lf weights: need n >= 2");
  const QuantileTarget target = QuantileTarget::make(n, p);
  const BetaParams shape{static_cast<double>(target.j_star),
                         static_cast<double>(n - target.j_star + 1)};
  LfWeights w;
  w.j_star = target.j_star;
  w.weights.resize(n);
  for (int i = 1; i <= n; ++i) {
    w.weights[i - 1] = beta_pdf(shape, static_cast<double>(i) / n) / n;
    w.sum += w.weights[i - 1];
  }
  return w;
}

HdWeights hd_srs_weights(int n, double p) {
  check_level(p);
  if (n < 1) throw std::invalid_argument("hd weights: need n >= 1");
  const BetaParams shape{(n + 1) * p, (n + 1) * (1.0 - p)};
  HdWeights w;
  w.cdf_grid.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    w.cdf_grid[i] = beta_cdf(shape, static_cast<double>(i) / n);
  }
  return w;
}

LfWeights pooled_lf_weights(const Design& design, const StratumTarget& target) {
  const int n = design.total();
  const int m = design.cycles;
  const int k = design.set_size;
  const BetaParams stratum{static_cast<double>(target.rank),
                           static_cast<double>(k - target.rank + 1)};
  const BetaParams shape{static_cast<double>(target.j_star),
                         static_cast<double>(m - target.j_star + 1)};
  LfWeights w;
  w.j_star = target.j_star;
  w.weights.resize(n);
  for (int i = 1; i <= n; ++i) {
    const double u = static_cast<double>(i) / n;
    // pullback of the stratum-scale Beta density through g_r
    w.weights[i - 1] = beta_pdf(shape, beta_cdf(stratum, u)) * beta_pdf(stratum, u) / n;
    w.sum += w.weights[i - 1];
  }
  return w;
}

HdWeights pooled_hd_weights(const Design& design, const StratumTarget& target) {
  const int n = design.total();
  const int k = design.set_size;
  const BetaParams stratum{static_cast<double>(target.rank),
                           static_cast<double>(k - target.rank + 1)};
  const BetaParams shape{target.a, target.b};
  HdWeights w;
  w.cdf_grid.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    w.cdf_grid[i] = beta_cdf(shape, beta_cdf(stratum, static_cast<double>(i) / n));
  }
  return w;
}

double evaluate_lf(const OrderedSample& s, const LfWeights& w) {
  if (s.values.size() != w.weights.size()) {
    throw std::invalid_argument("evaluate_lf: weight/sample length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < w.weights.size(); ++i) acc += w.weights[i] * s.values[i];
  return acc;
}

double evaluate_hd(const OrderedSample& s, const HdWeights& w) {
  const std::size_t n = s.values.size();
  if (n + 1 != w.cdf_grid.size()) {
    throw std::invalid_argument("evaluate_hd: weight/sample length mismatch");
  }
  // Summation by parts of sum_i (B_i - B_{i-1}) y_i. With B(0) = 0 and
  // B(1) = 1 pinned exactly, a constant sample comes back bit-exact.
  double acc = s.values[n - 1];
  for (std::size_t i = 1; i < n; ++i) {
    acc += w.cdf_grid[i] * (s.values[i - 1] - s.values[i]);
  }
  return acc;
}

std::vector<double> hd_increments(const HdWeights& w) {
  std::vector<double> inc(w.cdf_grid.size() - 1);
  for (std::size_t i = 0; i + 1 < w.cdf_grid.size(); ++i) {
    inc[i] = w.cdf_grid[i + 1] - w.cdf_grid[i];
  }
  return inc;
}

double emp_quantile_srs(const OrderedSample& s, double p) {
  check_sample(s);
  const QuantileTarget target = QuantileTarget::make(s.size(), p);
  return s.values[target.r_p - 1];
}

double lf_srs(const OrderedSample& s, double p) {
  check_sample(s);
  return evaluate_lf(s, lf_srs_weights(s.size(), p));
}

double hd_srs(const OrderedSample& s, double p) {
  check_sample(s);
  return evaluate_hd(s, hd_srs_weights(s.size(), p));
}

double emp_quantile_pooled(const OrderedSample& s, double p) { return emp_quantile_srs(s, p); }

double pooled_lf_component(const OrderedSample& s, const Design& design,
                           const StratumTarget& target) {
  check_pooled(s, design);
  return evaluate_lf(s, pooled_lf_weights(design, target));
}

double pooled_hd_component(const OrderedSample& s, const Design& design,
                           const StratumTarget& target) {
  check_pooled(s, design);
  return evaluate_hd(s, pooled_hd_weights(design, target));
}

// The k components arrive indexed by rank stratum, and the stratum whose
// transformed level p_r is most central at p sits near index (k-1)p + 1, so
// the interpolation walks the rank axis. Sorting the components by realized
// value instead looks equivalent (for interior p they are ordered in rank
// with high probability) but at tail p it latches onto the degenerate
// extreme-stratum component and the estimator falls apart; rank indexing is
// the behavior the relative-efficiency results require.
double combine_components(const ComponentEstimates& c, double p) {
  check_level(p);
  const int k = static_cast<int>(c.estimates.size());
  if (k < 1) throw std::invalid_argument("combine_components: no component estimates");

  const double pos = (k - 1) * p;
  const double lower = std::floor(pos);
  const int l_p = static_cast<int>(lower) + 1;
  if (l_p >= k) return c.estimates[k - 1];
  const double w_p = pos - lower;
  return (1.0 - w_p) * c.estimates[l_p - 1] + w_p * c.estimates[l_p];
}

namespace {

double rss_combined(const RssSample& sample, double p, EstimatorFamily family) {
  const OrderedSample pooled = OrderedSample::from_sorted(sample.pooled_sorted());
  const auto targets = stratum_targets(sample.design, p);
  ComponentEstimates components;
  components.kind = family;
  components.estimates.reserve(targets.size());
  for (const auto& t : targets) {
    components.estimates.push_back(family == EstimatorFamily::LF
                                       ? pooled_lf_component(pooled, sample.design, t)
                                       : pooled_hd_component(pooled, sample.design, t));
  }
  return combine_components(components, p);
}

}  // namespace

double rss_lf(const RssSample& s, double p) { return rss_combined(s, p, EstimatorFamily::LF); }

double rss_hd(const RssSample& s, double p) { return rss_combined(s, p, EstimatorFamily::HD); }

double orss_lf(const OrderedSample& s, const WeightTable& w) {
  if (w.kind != WeightKind::OrssLf) throw std::invalid_argument("orss_lf: wrong weight kind");
  if (static_cast<int>(w.weights.size()) != s.size()) {
    throw std::invalid_argument("orss_lf: weight/sample length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < w.weights.size(); ++i) acc += w.weights[i] * s.values[i];
  return acc;
}

double orss_hd(const OrderedSample& s, const WeightTable& w) {
  if (w.kind != WeightKind::OrssHd) throw std::invalid_argument("orss_hd: wrong weight kind");
  if (static_cast<int>(w.weights.size()) != s.size()) {
    throw std::invalid_argument("orss_hd: weight/sample length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < w.weights.size(); ++i) acc += w.weights[i] * s.values[i];
  return acc;
}

std::string_view to_string(EstimatorId id) {
  switch (id) {
    case EstimatorId::SrsEmp: return "srs_emp";
    case EstimatorId::SrsLf: return "srs_lf";
    case EstimatorId::SrsHd: return "srs_hd";
    case EstimatorId::RssEmp: return "rss_emp";
    case EstimatorId::RssLf: return "rss_lf";
    case EstimatorId::RssHd: return "rss_hd";
    case EstimatorId::OrssLf: return "orss_lf";
    case EstimatorId::OrssHd: return "orss_hd";
  }
  return "unknown";
}

std::optional<EstimatorId> estimator_from_string(std::string_view name) {
  for (EstimatorId id : kAllEstimators) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

}  // namespace rsquant
