#include "rsquant/validate.hpp"

#include <cmath>
#include <functional>

#include "rsquant/detail/text.hpp"
#include "rsquant/distribution.hpp"
#include "rsquant/estimators.hpp"
#include "rsquant/orss.hpp"
#include "rsquant/sampler.hpp"
#include "rsquant/specfun.hpp"

namespace rsquant {

namespace {

using BetaFn = std::function<double(double, double, double)>;

CheckResult check(const std::string& name, bool passed, const std::string& detail) {
  return CheckResult{name, passed, passed ? std::string{} : detail};
}

CheckResult complement_identity(const BetaFn& cdf) {
  double worst = 0.0;
  for (int a = 1; a <= 6; ++a) {
    for (int b = 1; b <= 6; ++b) {
      for (int g = 0; g <= 100; ++g) {
        const double t = g / 100.0;
        const double lhs = cdf(a, b, t) + cdf(b, a, 1.0 - t);
        worst = std::fmax(worst, std::fabs(lhs - 1.0));
      }
    }
  }
  return check("beta-complement-identity", worst <= 1e-12,
               "max deviation " + detail::format_double(worst));
}

CheckResult binomial_tail(const BetaFn& cdf) {
  // For integer a with a + b = k + 1, I_t(a, b) = P(Bin(k, t) >= a).
  double worst = 0.0;
  for (int k = 1; k <= 8; ++k) {
    for (int a = 1; a <= k; ++a) {
      const int b = k - a + 1;
      for (int g = 1; g < 20; ++g) {
        const double t = g / 20.0;
        double tail = 0.0;
        for (int j = k; j >= a; --j) {
          double term = 1.0;
          for (int i = 0; i < j; ++i) term *= (static_cast<double>(k - i) / (j - i)) * t;
          for (int i = 0; i < k - j; ++i) term *= 1.0 - t;
          tail += term;
        }
        worst = std::fmax(worst, std::fabs(cdf(a, b, t) - tail));
      }
    }
  }
  return check("beta-binomial-tail", worst <= 1e-12, "max deviation " + detail::format_double(worst));
}

CheckResult mixture_identity(const BetaFn& cdf) {
  // (1/k) sum_r I_u(r, k-r+1) = u.
  double worst = 0.0;
  for (int k = 1; k <= 6; ++k) {
    for (int g = 0; g <= 50; ++g) {
      const double u = g / 50.0;
      double acc = 0.0;
      for (int r = 1; r <= k; ++r) acc += cdf(r, k - r + 1, u);
      worst = std::fmax(worst, std::fabs(acc / k - u));
    }
  }
  return check("stratum-mixture-identity", worst <= 1e-12,
               "max deviation " + detail::format_double(worst));
}

CheckResult hd_telescoping() {
  bool ok = true;
  std::string detail;
  for (int n : {1, 5, 15, 25, 50}) {
    for (double p : {0.1, 0.3, 0.5, 0.75, 0.9}) {
      const HdWeights w = hd_srs_weights(n, p);
      if (w.cdf_grid.front() != 0.0 || w.cdf_grid.back() != 1.0) {
        ok = false;
        detail = "grid endpoints not exact at n=" + std::to_string(n);
      }
      const OrderedSample constant{std::vector<double>(n, 3.25)};
      if (evaluate_hd(constant, w) != 3.25) {
        ok = false;
        detail = "constant sample not exact at n=" + std::to_string(n);
      }
      double sum = 0.0;
      for (double inc : hd_increments(w)) sum += inc;
      if (std::fabs(sum - 1.0) > 1e-13) {
        ok = false;
        detail = "increments sum to " + detail::format_double(sum);
      }
    }
  }
  return check("hd-weight-telescoping", ok, detail);
}

CheckResult psi_normalization() {
  double worst = 0.0;
  for (const Design design : {Design{2, 2}, Design{3, 2}, Design{2, 3}}) {
    const int n = design.total();
    for (int i = 1; i <= n; ++i) {
      const double integral = integrate_adaptive_simpson(
          [&](double u) { return orss_pdf_probscale(design, i, u); }, 0.0, 1.0, 1e-9, 20);
      worst = std::fmax(worst, std::fabs(integral - 1.0));
    }
  }
  return check("psi-normalization", worst <= 1e-6, "max deviation " + detail::format_double(worst));
}

CheckResult orss_oracle() {
  double worst = 0.0;
  for (const Design design : {Design{1, 2}, Design{2, 2}, Design{2, 3}, Design{1, 4}}) {
    const int n = design.total();
    for (int g = 1; g <= 12; ++g) {
      const double t = g / 13.0;
      const auto fast = orss_cdf_all(design, t);
      for (int i = 1; i <= n; ++i) {
        worst = std::fmax(worst, std::fabs(fast[i - 1] - brute_force_orss_cdf(design, i, t)));
      }
    }
  }
  return check("orss-oracle-equivalence", worst <= 1e-10,
               "max deviation " + detail::format_double(worst));
}

CheckResult k1_degeneracy() {
  const Design design{6, 1};
  const auto sample = rss_sample(Distribution::normal(0.0, 1.0), design,
                                 RankingModel::perfect(), SeedSpec{20240915, 0});
  const OrderedSample sorted = OrderedSample::from_sorted(sample.pooled_sorted());
  bool ok = true;
  std::string detail;
  for (double p : {0.2, 0.5, 0.8}) {
    if (rss_lf(sample, p) != lf_srs(sorted, p)) {
      ok = false;
      detail = "rss_lf != srs_lf at p=" + detail::format_double(p);
    }
    if (rss_hd(sample, p) != hd_srs(sorted, p)) {
      ok = false;
      detail = "rss_hd != srs_hd at p=" + detail::format_double(p);
    }
    if (emp_quantile_pooled(sorted, p) != emp_quantile_srs(sorted, p)) {
      ok = false;
      detail = "rss_emp != srs_emp at p=" + detail::format_double(p);
    }
  }
  return check("k1-degeneracy", ok, detail);
}

CheckResult quantile_inversion() {
  double worst = 0.0;
  const Distribution laws[] = {Distribution::normal(0.0, 1.0), Distribution::exponential(1.0),
                               Distribution::weibull(2.0, 1.0)};
  for (const auto& d : laws) {
    for (int g = 1; g <= 99; ++g) {
      const double p = g / 100.0;
      worst = std::fmax(worst, std::fabs(d.cdf(d.quantile(p)) - p));
    }
  }
  return check("quantile-inverts-cdf", worst <= 1e-10, "max deviation " + detail::format_double(worst));
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
  BetaFn cdf = [](double a, double b, double t) { return beta_cdf(BetaParams{a, b}, t); };
  if (options.corrupt_beta) {
    cdf = [](double a, double b, double t) {
      return beta_cdf(BetaParams{a, b}, t) + 1e-6 * t * (1.0 - t);
    };
  }
  std::vector<CheckResult> results;
  results.push_back(complement_identity(cdf));
  results.push_back(binomial_tail(cdf));
  results.push_back(mixture_identity(cdf));
  results.push_back(hd_telescoping());
  results.push_back(psi_normalization());
  results.push_back(orss_oracle());
  results.push_back(k1_degeneracy());
  results.push_back(quantile_inversion());
  return results;
}

}  // namespace rsquant
