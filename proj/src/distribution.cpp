#include "rsquant/distribution.hpp"

#include <cmath>
#include <charconv>
#include <stdexcept>

#include "rsquant/specfun.hpp"

namespace rsquant {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Acklam's rational approximation for the inverse normal CDF (~1e-9 absolute
// error), used as the starting point for one Newton correction.
double normal_quantile_approx(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double parse_number(std::string_view text, const std::string& spec) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw std::invalid_argument("bad distribution parameter in spec '" + spec + "'");
  }
  return value;
}

std::string format_param(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  }
  double x = normal_quantile_approx(p);
  const double err = normal_cdf(x) - p;
  x -= err / normal_pdf(x);
  return x;
}

Distribution Distribution::normal(double mean, double sd) {
  if (!(sd > 0.0)) throw std::invalid_argument("normal: sd must be positive");
  return Distribution(Normal{mean, sd});
}

Distribution Distribution::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exp: rate must be positive");
  return Distribution(Exponential{rate});
}

Distribution Distribution::weibull(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw std::invalid_argument("weibull: shape and scale must be positive");
  }
  return Distribution(Weibull{shape, scale});
}

Distribution Distribution::custom(CustomLaw law) {
  if (!law.pdf || !law.cdf || !law.quantile) {
    throw std::invalid_argument("custom law: pdf, cdf and quantile hooks are required");
  }
  return Distribution(std::move(law));
}

double Distribution::pdf(double y) const {
  return std::visit(
      [y](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return normal_pdf((y - law.mean) / law.sd) / law.sd;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return y < 0.0 ? 0.0 : law.rate * std::exp(-law.rate * y);
        } else if constexpr (std::is_same_v<T, Weibull>) {
          if (y < 0.0) return 0.0;
          if (y == 0.0) {
            if (law.shape > 1.0) return 0.0;
            if (law.shape == 1.0) return 1.0 / law.scale;
            return std::numeric_limits<double>::infinity();
          }
          const double z = y / law.scale;
          return law.shape / law.scale * std::pow(z, law.shape - 1.0) *
                 std::exp(-std::pow(z, law.shape));
        } else {
          return law.pdf(y);
        }
      },
      law_);
}

double Distribution::cdf(double y) const {
  return std::visit(
      [y](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return normal_cdf((y - law.mean) / law.sd);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return y <= 0.0 ? 0.0 : -std::expm1(-law.rate * y);
        } else if constexpr (std::is_same_v<T, Weibull>) {
          return y <= 0.0 ? 0.0 : -std::expm1(-std::pow(y / law.scale, law.shape));
        } else {
          return law.cdf(y);
        }
      },
      law_);
}

double Distribution::quantile(double p) const {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("quantile: p must lie in (0, 1)");
  }
  return std::visit(
      [p](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return law.mean + law.sd * normal_quantile(p);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return -std::log1p(-p) / law.rate;
        } else if constexpr (std::is_same_v<T, Weibull>) {
          return law.scale * std::pow(-std::log1p(-p), 1.0 / law.shape);
        } else {
          return law.quantile(p);
        }
      },
      law_);
}

double Distribution::mean() const {
  return std::visit(
      [](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return law.mean;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return 1.0 / law.rate;
        } else if constexpr (std::is_same_v<T, Weibull>) {
          return law.scale * std::tgamma(1.0 + 1.0 / law.shape);
        } else {
          return law.mean;
        }
      },
      law_);
}

double Distribution::sd() const {
  return std::visit(
      [](const auto& law) -> double {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return law.sd;
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return 1.0 / law.rate;
        } else if constexpr (std::is_same_v<T, Weibull>) {
          const double g1 = std::tgamma(1.0 + 1.0 / law.shape);
          const double g2 = std::tgamma(1.0 + 2.0 / law.shape);
          return law.scale * std::sqrt(g2 - g1 * g1);
        } else {
          return law.sd;
        }
      },
      law_);
}

std::string Distribution::spec() const {
  return std::visit(
      [](const auto& law) -> std::string {
        using T = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<T, Normal>) {
          return "normal:" + format_param(law.mean) + "," + format_param(law.sd);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return "exp:" + format_param(law.rate);
        } else if constexpr (std::is_same_v<T, Weibull>) {
          return "weibull:" + format_param(law.shape) + "," + format_param(law.scale);
        } else {
          return law.label.empty() ? "custom" : law.label;
        }
      },
      law_);
}

Distribution parse_distribution(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::string_view args =
      colon == std::string::npos ? std::string_view{} : std::string_view(spec).substr(colon + 1);

  auto split_two = [&](std::string_view s) -> std::pair<double, double> {
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) {
      throw std::invalid_argument("distribution spec '" + spec + "' needs two parameters");
    }
    return {parse_number(s.substr(0, comma), spec), parse_number(s.substr(comma + 1), spec)};
  };

  if (kind == "normal") {
    auto [mean, sd] = split_two(args);
    return Distribution::normal(mean, sd);
  }
  if (kind == "exp") {
    return Distribution::exponential(parse_number(args, spec));
  }
  if (kind == "weibull") {
    auto [shape, scale] = split_two(args);
    return Distribution::weibull(shape, scale);
  }
  throw std::invalid_argument("unknown distribution kind in spec '" + spec +
                              "' (expected normal:mean,sd | exp:rate | weibull:shape,scale)");
}

double stratum_cdf(const StratumLaw& s, double y) {
  if (s.set_size < 1 || s.rank < 1 || s.rank > s.set_size) {
    throw std::domain_error("stratum_cdf: rank must lie in 1..set_size");
  }
  return beta_cdf(BetaParams{static_cast<double>(s.rank), static_cast<double>(s.set_size - s.rank + 1)},
                  s.parent.cdf(y));
}

double stratum_pdf(const StratumLaw& s, double y) {
  if (s.set_size < 1 || s.rank < 1 || s.rank > s.set_size) {
    throw std::domain_error("stratum_pdf: rank must lie in 1..set_size");
  }
  const double u = s.parent.cdf(y);
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return beta_pdf(BetaParams{static_cast<double>(s.rank), static_cast<double>(s.set_size - s.rank + 1)},
                  u) *
         s.parent.pdf(y);
}

}  // namespace rsquant
