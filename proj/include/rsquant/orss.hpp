#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsquant/sampler.hpp"

namespace rsquant {

/// P{C(t) = j} for j = 0..n, where C(t) counts pooled observations at or
/// below probability level t. Entries are nonnegative and sum to one.
struct CountDistribution {
  std::vector<double> probs;
};

/// Multiply-add count of the convolution cascade; grows as O(n^2) per
/// evaluation point.
struct ConvolutionStats {
  std::uint64_t multiply_adds = 0;
};

/// q_r(t) = I_t(r, k-r+1), the probability-scale CDF of rank stratum r.
double stratum_prob(int rank, int set_size, double t);

/// Coefficients of P(z;t) = prod_r [(1-q_r) + q_r z]^m, built by
/// sequentially convolving the k exact Binomial(m, q_r) mass vectors.
/// Cost O(k^2 m^2) = O(n^2).
CountDistribution count_distribution(const Design& design, double t,
                                     ConvolutionStats* stats = nullptr);

/// G_i(t) = P{C(t) >= i}: CDF of the i-th pooled order statistic on the
/// probability scale.
double orss_cdf(const Design& design, int i, double t);
/// All of G_1(t)..G_n(t) from one convolution pass and a reverse
/// cumulative sum.
std::vector<double> orss_cdf_all(const Design& design, double t);

/// Tabulated G_i over a fixed grid; values[i-1][g] = G_i(grid[g]).
struct OrssCdfTable {
  Design design;
  std::vector<double> grid;
  std::vector<std::vector<double>> values;
  ConvolutionStats stats;
};
OrssCdfTable build_cdf_table(const Design& design, const std::vector<double>& grid);

/// psi_i(t): density of the i-th pooled order statistic on the probability
/// scale, via finite differences of G_i with step 1e-6 (one-sided at the
/// ends of [0, 1]).
double orss_pdf_probscale(const Design& design, int i, double t);

/// Pooled order index targeting level p for the weight tables:
/// floor(np) + 1, truncated to 1..n.
int orss_index(int n, double p);

enum class WeightKind { OrssLf, OrssHd };
std::string_view weight_kind_name(WeightKind kind);

/// Precomputed ORSS estimator weights for one (design, p, kind).
struct WeightTable {
  Design design;
  double p = 0.5;
  WeightKind kind = WeightKind::OrssHd;
  int r_p = 1;
  std::vector<double> weights;
};

/// LF table: weight_i = psi_{r_p}(i/n) / n.
WeightTable orss_lf_weights(const Design& design, double p);

/// HD table: weight_i = integral of psi_{r_p} over ((i-1)/n, i/n], by
/// per-interval adaptive Simpson quadrature. Throws std::runtime_error if
/// the tolerance is unmet after max refinement.
WeightTable orss_hd_weights(const Design& design, double p, double quad_tol = 1e-8);

/// Exact subset-enumeration evaluation of G_i(t); the 2^n test oracle.
/// Throws std::invalid_argument when n > 14.
double brute_force_orss_cdf(const Design& design, int i, double t);

/// Cache CSV: header m,k,p,kind,i,weight; rows ordered by i; p printed with
/// 17 significant digits so the cache key round-trips exactly.
void write_weight_table_csv(const WeightTable& table, std::ostream& out);
void write_weight_table_csv(const WeightTable& table, const std::string& path);
WeightTable load_weight_table_csv(const std::string& path);

}  // namespace rsquant
