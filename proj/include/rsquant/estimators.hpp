#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "rsquant/orss.hpp"
#include "rsquant/sampler.hpp"

namespace rsquant {

/// Sorted measurements. The factory sorts; the sort is stable so ties keep
/// their input order (relevant for finite-population data).
struct OrderedSample {
  std::vector<double> values;  // nondecreasing

  static OrderedSample from_unsorted(std::vector<double> v);
  static OrderedSample from_sorted(std::vector<double> v);
  int size() const { return static_cast<int>(values.size()); }
};

/// Index bookkeeping for a quantile level on a sample of size n:
/// r_p = np when np is integral, floor(np)+1 otherwise; j_star is the
/// nearest index to (n+1)p, truncated to 1..n. `clamped` flags a truncated
/// index.
struct QuantileTarget {
  double p = 0.5;
  int r_p = 1;
  int j_star = 1;
  bool clamped = false;

  static QuantileTarget make(int n, double p);
};

/// Per-stratum target for the pooled transformed-scale estimators:
/// level p_r = I_p(r, k-r+1), Beta shapes a_r = (m+1)p_r, b_r = (m+1)(1-p_r)
/// and j_star the nearest index to (m+1)p_r, truncated to 1..m.
struct StratumTarget {
  int rank = 1;
  double level = 0.5;   // p_r
  double a = 1.0;       // (m+1) p_r
  double b = 1.0;       // (m+1)(1 - p_r)
  int j_star = 1;
  bool clamped = false;
};

/// The k stratum targets for a design at level p; levels are strictly
/// decreasing in rank.
std::vector<StratumTarget> stratum_targets(const Design& design, double p);

enum class EstimatorFamily { LF, HD };

/// The k per-rank component estimates feeding the ordered interpolation.
struct ComponentEstimates {
  std::vector<double> estimates;
  EstimatorFamily kind = EstimatorFamily::HD;
};

// -- Weight vectors ---------------------------------------------------------
//
// Every L-estimator here is data-independent weights applied to sorted
// values, so the weights are computed once per (design, p) and reused across
// replicates.

/// Pointwise Beta-density weights (Stigler type); sum is 1 + O(1/n) and is
/// deliberately not renormalized.
struct LfWeights {
  std::vector<double> weights;  // weight on the i-th order statistic
  double sum = 0.0;
  int j_star = 1;
};

/// Grid of a distribution function B on {i/n}; the estimator weights are
/// the increments B(i/n) - B((i-1)/n). B(0) = 0 and B(1) = 1 exactly, and
/// evaluation uses summation by parts, so the weights telescope to exactly
/// one and constant samples are reproduced exactly.
struct HdWeights {
  std::vector<double> cdf_grid;  // B(i/n) for i = 0..n
};

LfWeights lf_srs_weights(int n, double p);
HdWeights hd_srs_weights(int n, double p);
LfWeights pooled_lf_weights(const Design& design, const StratumTarget& target);
HdWeights pooled_hd_weights(const Design& design, const StratumTarget& target);

double evaluate_lf(const OrderedSample& s, const LfWeights& w);
double evaluate_hd(const OrderedSample& s, const HdWeights& w);
/// The increment form of HD weights (for inspection and tests).
std::vector<double> hd_increments(const HdWeights& w);

// -- Estimators -------------------------------------------------------------

/// Empirical quantile: Y_(np) when np is integral, else Y_(floor(np)+1).
double emp_quantile_srs(const OrderedSample& s, double p);
/// Stigler-type L-estimator (1/n) sum J_{j*, n-j*+1}(i/n) Y_(i); n >= 2.
double lf_srs(const OrderedSample& s, double p);
/// Harrell-Davis estimator with Beta((n+1)p, (n+1)(1-p)) interval weights.
double hd_srs(const OrderedSample& s, double p);
/// Empirical quantile of the pooled RSS sample (same index convention).
double emp_quantile_pooled(const OrderedSample& s, double p);

/// One pooled transformed-scale component (LF or HD) for a stratum target.
/// Throws std::invalid_argument when the sample size does not match m*k.
double pooled_lf_component(const OrderedSample& s, const Design& design,
                           const StratumTarget& target);
double pooled_hd_component(const OrderedSample& s, const Design& design,
                           const StratumTarget& target);

/// Interpolates the rank-indexed component estimates at
/// l_p = floor((k-1)p) + 1 with fraction w_p = (k-1)p - floor((k-1)p);
/// l_p = k returns the last component.
double combine_components(const ComponentEstimates& c, double p);

/// Full pooled transformed-scale RSS estimators.
double rss_lf(const RssSample& s, double p);
double rss_hd(const RssSample& s, double p);

/// ORSS L-estimators: dot product of a precomputed weight table with the
/// pooled ordered sample. Throws std::invalid_argument on length mismatch.
double orss_lf(const OrderedSample& s, const WeightTable& w);
double orss_hd(const OrderedSample& s, const WeightTable& w);

// -- Identifiers ------------------------------------------------------------

enum class EstimatorId { SrsEmp, SrsLf, SrsHd, RssEmp, RssLf, RssHd, OrssLf, OrssHd };

inline constexpr std::array<EstimatorId, 8> kAllEstimators = {
    EstimatorId::SrsEmp, EstimatorId::SrsLf,  EstimatorId::SrsHd,  EstimatorId::RssEmp,
    EstimatorId::RssLf,  EstimatorId::RssHd,  EstimatorId::OrssLf, EstimatorId::OrssHd};

std::string_view to_string(EstimatorId id);
std::optional<EstimatorId> estimator_from_string(std::string_view name);
inline bool is_srs_estimator(EstimatorId id) {
  return id == EstimatorId::SrsEmp || id == EstimatorId::SrsLf || id == EstimatorId::SrsHd;
}

}  // namespace rsquant
