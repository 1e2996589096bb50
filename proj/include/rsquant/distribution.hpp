#pragma once

#include <functional>
#include <string>
#include <variant>

namespace rsquant {

/// Standard normal CDF, accurate to machine precision via erfc.
double normal_cdf(double z);
/// Standard normal density.
double normal_pdf(double z);
/// Standard normal quantile: rational approximation refined by one Newton
/// step against normal_cdf, accurate to ~1e-15 over (0, 1).
double normal_quantile(double p);

/// Hooks for a user-supplied law; all five callables must be consistent
/// (quantile inverts cdf, mean/sd are the true moments).
struct CustomLaw {
  std::string label;
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;
  double mean = 0.0;
  double sd = 1.0;
};

/// Parent distribution: the shipped trio plus a custom extension hook.
/// Immutable value type; cheap to copy, safe to share across threads.
class Distribution {
 public:
  static Distribution normal(double mean, double sd);
  static Distribution exponential(double rate);
  static Distribution weibull(double shape, double scale);
  static Distribution custom(CustomLaw law);

  double pdf(double y) const;
  double cdf(double y) const;
  /// Quantile at p in (0, 1); throws std::domain_error otherwise.
  double quantile(double p) const;
  double mean() const;
  double sd() const;

  /// CLI/config spelling: normal:mean,sd | exp:rate | weibull:shape,scale.
  std::string spec() const;

 private:
  struct Normal {
    double mean, sd;
  };
  struct Exponential {
    double rate;
  };
  struct Weibull {
    double shape, scale;
  };
  using Law = std::variant<Normal, Exponential, Weibull, CustomLaw>;

  explicit Distribution(Law law) : law_(std::move(law)) {}
  Law law_;
};

/// Parses the CLI spelling. Throws std::invalid_argument on malformed specs
/// or out-of-range parameters.
Distribution parse_distribution(const std::string& spec);

/// Law of the r-th order statistic among set_size draws from parent: the
/// marginal of a perfectly ranked measurement in rank stratum r.
struct StratumLaw {
  Distribution parent;
  int rank;      // r in 1..set_size
  int set_size;  // k
};

/// F_(r)(y) = I_{F(y)}(r, k-r+1).
double stratum_cdf(const StratumLaw& s, double y);
/// f_(r)(y), the matching density.
double stratum_pdf(const StratumLaw& s, double y);

}  // namespace rsquant
