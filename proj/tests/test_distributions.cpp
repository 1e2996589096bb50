#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rsquant/distribution.hpp"
#include "rsquant/specfun.hpp"

using namespace rsquant;

TEST_CASE("pdf closed forms") {
  CHECK(Distribution::normal(0, 1).pdf(0.0) == doctest::Approx(0.3989422804).epsilon(1e-9));
  CHECK(Distribution::exponential(1).pdf(0.0) == 1.0);
  CHECK(Distribution::weibull(2, 1).pdf(0.0) == 0.0);
  CHECK(Distribution::exponential(2).pdf(-1.0) == 0.0);
}

TEST_CASE("cdf closed forms") {
  CHECK(Distribution::normal(0, 1).cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(Distribution::exponential(1).cdf(std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(Distribution::weibull(2, 1).cdf(1.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(Distribution::weibull(2, 1).cdf(-0.5) == 0.0);
}

TEST_CASE("quantile closed forms") {
  CHECK(Distribution::normal(0, 1).quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(Distribution::exponential(1).quantile(0.9) ==
        doctest::Approx(std::log(10.0)).epsilon(1e-13));
  CHECK(Distribution::weibull(2, 1).quantile(0.5) ==
        doctest::Approx(std::sqrt(std::log(2.0))).epsilon(1e-13));
  CHECK_THROWS_AS(Distribution::normal(0, 1).quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(Distribution::normal(0, 1).quantile(1.0), std::domain_error);
}

TEST_CASE("quantile inverts cdf on a 99-point grid") {
  const Distribution laws[] = {Distribution::normal(0, 1), Distribution::exponential(1),
                               Distribution::weibull(2, 1)};
  for (const auto& d : laws) {
    for (int g = 1; g <= 99; ++g) {
      const double p = g / 100.0;
      CHECK(std::fabs(d.cdf(d.quantile(p)) - p) <= 1e-10);
    }
  }
}

TEST_CASE("mean and sd") {
  auto [nm, ns] = std::pair{Distribution::normal(0, 1).mean(), Distribution::normal(0, 1).sd()};
  CHECK(nm == 0.0);
  CHECK(ns == 1.0);
  CHECK(Distribution::exponential(1).mean() == 1.0);
  CHECK(Distribution::exponential(1).sd() == 1.0);

  const auto w = Distribution::weibull(2, 1);
  CHECK(w.mean() == doctest::Approx(0.886227).epsilon(1e-6));
  CHECK(w.sd() == doctest::Approx(0.463251).epsilon(1e-6));

  // numerical-integration oracle for the Weibull moments
  const double mean_num = integrate_adaptive_simpson(
      [&](double u) { return w.quantile(u); }, 1e-12, 1.0 - 1e-12, 1e-11, 48);
  const double second_num = integrate_adaptive_simpson(
      [&](double u) { const double y = w.quantile(u); return y * y; }, 1e-12, 1.0 - 1e-12,
      1e-11, 48);
  CHECK(w.mean() == doctest::Approx(mean_num).epsilon(1e-8));
  CHECK(w.sd() == doctest::Approx(std::sqrt(second_num - mean_num * mean_num)).epsilon(1e-7));
}

TEST_CASE("stratum cdf") {
  const auto normal = Distribution::normal(0, 1);
  SUBCASE("k = 1 stratum is the parent") {
    for (double y : {-1.3, 0.0, 0.4, 2.2}) {
      CHECK(stratum_cdf({normal, 1, 1}, y) == normal.cdf(y));
    }
  }
  SUBCASE("binomial-tail oracle values at the parent median") {
    CHECK(stratum_cdf({normal, 1, 3}, 0.0) == doctest::Approx(0.875).epsilon(1e-12));
    CHECK(stratum_cdf({normal, 3, 3}, 0.0) == doctest::Approx(0.125).epsilon(1e-12));
  }
  SUBCASE("monotone in y, stochastically ordered in rank") {
    for (int k = 1; k <= 6; ++k) {
      double prev = -1.0;
      for (double y = -2.0; y <= 2.0; y += 0.25) {
        const double c = stratum_cdf({normal, 1, k}, y);
        CHECK(c >= prev);
        prev = c;
        for (int r = 1; r < k; ++r) {
          CHECK(stratum_cdf({normal, r + 1, k}, y) <= stratum_cdf({normal, r, k}, y) + 1e-15);
        }
      }
    }
  }
  SUBCASE("mixture identity recovers the parent") {
    for (int k = 1; k <= 6; ++k) {
      for (double y = -2.5; y <= 2.5; y += 0.5) {
        double acc = 0.0;
        for (int r = 1; r <= k; ++r) acc += stratum_cdf({normal, r, k}, y);
        CHECK(std::fabs(acc / k - normal.cdf(y)) <= 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(stratum_cdf({normal, 0, 3}, 0.0), std::domain_error);
  CHECK_THROWS_AS(stratum_cdf({normal, 4, 3}, 0.0), std::domain_error);
}

TEST_CASE("stratum pdf integrates to the stratum cdf") {
  const auto exp1 = Distribution::exponential(1);
  const StratumLaw s{exp1, 2, 3};
  const double integral = integrate_adaptive_simpson(
      [&](double y) { return stratum_pdf(s, y); }, 0.0, 1.5, 1e-11, 40);
  CHECK(integral == doctest::Approx(stratum_cdf(s, 1.5)).epsilon(1e-9));
}

TEST_CASE("custom law hook") {
  CustomLaw law;
  law.label = "uniform01";
  law.pdf = [](double y) { return y >= 0.0 && y <= 1.0 ? 1.0 : 0.0; };
  law.cdf = [](double y) { return y < 0.0 ? 0.0 : (y > 1.0 ? 1.0 : y); };
  law.quantile = [](double p) { return p; };
  law.mean = 0.5;
  law.sd = std::sqrt(1.0 / 12.0);
  const auto d = Distribution::custom(law);
  CHECK(d.cdf(0.25) == 0.25);
  CHECK(d.quantile(0.75) == 0.75);
  CHECK(d.mean() == 0.5);
  CHECK(d.spec() == "uniform01");
  CHECK(stratum_cdf({d, 1, 2}, 0.5) == doctest::Approx(0.75).epsilon(1e-13));

  CustomLaw missing;
  missing.pdf = law.pdf;
  CHECK_THROWS_AS(Distribution::custom(missing), std::invalid_argument);
}

TEST_CASE("spec strings parse and round-trip") {
  CHECK(parse_distribution("normal:0,1").spec() == "normal:0,1");
  CHECK(parse_distribution("exp:2.5").spec() == "exp:2.5");
  CHECK(parse_distribution("weibull:2,1").spec() == "weibull:2,1");
  CHECK(parse_distribution("normal:-1.5,0.25").quantile(0.5) == doctest::Approx(-1.5));

  CHECK_THROWS_AS(parse_distribution("normal:0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_distribution("exp:abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_distribution("cauchy:0,1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_distribution("exp:-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_distribution("normal:0,0"), std::invalid_argument);
}

TEST_CASE("normal quantile precision") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  for (double p : {1e-8, 1e-4, 0.025, 0.31, 0.77, 0.999, 1.0 - 1e-9}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
}
