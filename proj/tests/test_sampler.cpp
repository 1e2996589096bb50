#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "rsquant/distribution.hpp"
#include "rsquant/sampler.hpp"

using namespace rsquant;

namespace {

// One-sample Kolmogorov-Smirnov statistic against a reference CDF.
double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf) {
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double stat = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    stat = std::max(stat, std::fabs((i + 1) / n - f));
    stat = std::max(stat, std::fabs(i / n - f));
  }
  return stat;
}

std::string write_temp_csv(const std::string& name, const std::string& content) {
  const std::string path = std::string("/tmp/rsquant_test_") + name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("srs sampling is deterministic and inverse-CDF based") {
  const auto exp1 = Distribution::exponential(1);
  const SeedSpec seed{99, 7};
  const auto a = srs_sample(exp1, 10, seed);
  const auto b = srs_sample(exp1, 10, seed);
  CHECK(a == b);

  // n = 1 consumes exactly the first uniform of the replicate's SRS stream
  rng::Stream stream(seed, 0);
  const double u = stream.uniform();
  CHECK(srs_sample(exp1, 1, seed)[0] == exp1.quantile(u));

  const auto c = srs_sample(exp1, 10, SeedSpec{99, 8});
  CHECK(a != c);
}

TEST_CASE("srs sample mean obeys the CLT bound") {
  const auto normal = Distribution::normal(0, 1);
  const auto values = srs_sample(normal, 100000, SeedSpec{1234, 0});
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(100000.0));
}

TEST_CASE("rss sampling is deterministic and k = 1 measures each set directly") {
  const auto normal = Distribution::normal(0, 1);
  const Design design{6, 1};
  const SeedSpec seed{5, 3};
  const auto s1 = rss_sample(normal, design, RankingModel::perfect(), seed);
  const auto s2 = rss_sample(normal, design, RankingModel::perfect(), seed);
  CHECK(s1.values == s2.values);

  // with k = 1 the single unit of each set is measured as drawn
  for (int j = 0; j < design.cycles; ++j) {
    rng::Stream stream(seed, 1 + static_cast<std::uint64_t>(j));
    CHECK(s1.at(j, 1) == normal.quantile(stream.uniform()));
  }
}

TEST_CASE("perfect ranking: rank columns match the stratum laws (KS)") {
  const auto normal = Distribution::normal(0, 1);
  const Design design{10000, 3};
  const auto sample = rss_sample(normal, design, RankingModel::perfect(), SeedSpec{2024, 0});
  for (int r = 1; r <= 3; ++r) {
    const StratumLaw law{normal, r, 3};
    const double stat = ks_statistic(sample.rank_column(r),
                                     [&](double y) { return stratum_cdf(law, y); });
    CHECK(stat < 0.02);
  }
}

TEST_CASE("concomitant rho = 0 carries no ranking information") {
  const auto normal = Distribution::normal(0, 1);
  const Design design{10000, 3};
  const auto sample =
      rss_sample(normal, design, RankingModel::concomitant(0.0), SeedSpec{2025, 0});
  for (int r = 1; r <= 3; ++r) {
    const double stat =
        ks_statistic(sample.rank_column(r), [&](double y) { return normal.cdf(y); });
    CHECK(stat < 0.02);
  }
}

TEST_CASE("concomitant rho = 1 ranks like perfect ranking") {
  const auto exp1 = Distribution::exponential(1);
  const Design design{2000, 4};
  const auto sample = rss_sample(exp1, design, RankingModel::concomitant(1.0), SeedSpec{77, 0});
  // stochastic ordering of the rank columns
  double prev = -1e300;
  for (int r = 1; r <= 4; ++r) {
    const auto col = sample.rank_column(r);
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / col.size();
    CHECK(mean > prev);
    prev = mean;
  }
  CHECK_THROWS_AS(RankingModel::concomitant(1.5), std::invalid_argument);
  CHECK_THROWS_AS(RankingModel::concomitant(-0.1), std::invalid_argument);
}

TEST_CASE("pooled EDF is unbiased under consistent imperfect ranking") {
  const auto normal = Distribution::normal(0, 1);
  const Design design{5, 3};
  const int B = 4000;
  for (double p : {0.25, 0.5, 0.75}) {
    const double zeta = normal.quantile(p);
    double sum = 0.0, sumsq = 0.0;
    for (int b = 0; b < B; ++b) {
      const auto sample = rss_sample(normal, design, RankingModel::concomitant(0.5),
                                     SeedSpec{4242, static_cast<std::uint64_t>(b)});
      int below = 0;
      for (double v : sample.values) below += v <= zeta ? 1 : 0;
      const double edf = static_cast<double>(below) / design.total();
      sum += edf;
      sumsq += edf * edf;
    }
    const double mean = sum / B;
    const double se = std::sqrt((sumsq / B - mean * mean) / B);
    CHECK(std::fabs(mean - p) <= 3.0 * se);
  }
}

TEST_CASE("order statistic means match the exponential closed forms") {
  const auto exp1 = Distribution::exponential(1);
  // E[Y_(r:3)] for Exp(1): 1/3, 1/3 + 1/2, 1/3 + 1/2 + 1
  CHECK(order_statistic_mean(exp1, 1, 3) == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
  CHECK(order_statistic_mean(exp1, 2, 3) == doctest::Approx(5.0 / 6.0).epsilon(1e-8));
  CHECK(order_statistic_mean(exp1, 3, 3) == doctest::Approx(11.0 / 6.0).epsilon(1e-8));
  CHECK_THROWS_AS(order_statistic_mean(exp1, 4, 3), std::domain_error);
}

TEST_CASE("rss mean-variance identity") {
  SUBCASE("k = 1 has no stratification term") {
    const auto report =
        rss_mean_variance_check(Distribution::normal(0, 1), Design{15, 1}, 4000, 11);
    CHECK(report.formula_variance == doctest::Approx(1.0 / 15.0).epsilon(1e-9));
  }
  SUBCASE("normal (5,3) beats the SRS variance bound") {
    const auto report =
        rss_mean_variance_check(Distribution::normal(0, 1), Design{5, 3}, 20000, 12);
    CHECK(report.mc_variance < 1.0 / 15.0);
    CHECK(report.formula_variance < 1.0 / 15.0);
  }
  SUBCASE("exponential (5,3) matches the identity") {
    const auto report =
        rss_mean_variance_check(Distribution::exponential(1), Design{5, 3}, 20000, 13);
    // closed form: 1/15 - (7/6)/45
    CHECK(report.formula_variance == doctest::Approx(1.0 / 15.0 - 7.0 / 270.0).epsilon(1e-7));
    CHECK(report.relative_error < 0.10);
  }
}

TEST_CASE("finite population RSS") {
  SUBCASE("exhaustive sets reproduce the sorted population each cycle") {
    FinitePopulation pop;
    pop.response = {3.0, 1.0, 2.0};
    pop.ranker = pop.response;
    const auto sample = rss_from_population(pop, Design{50, 3}, SeedSpec{5, 0});
    for (int j = 0; j < 50; ++j) {
      CHECK(sample.at(j, 1) == 1.0);
      CHECK(sample.at(j, 2) == 2.0);
      CHECK(sample.at(j, 3) == 3.0);
    }
  }
  SUBCASE("k = 1 draws uniform responses") {
    FinitePopulation pop;
    pop.response = {10.0, 20.0, 30.0, 40.0};
    pop.ranker = {1.0, 1.0, 1.0, 1.0};
    const auto sample = rss_from_population(pop, Design{200, 1}, SeedSpec{6, 0});
    for (double v : sample.values) {
      CHECK((v == 10.0 || v == 20.0 || v == 30.0 || v == 40.0));
    }
  }
  SUBCASE("informative ranker orders the column means") {
    FinitePopulation pop;
    for (int i = 0; i < 200; ++i) {
      pop.response.push_back(i);
      pop.ranker.push_back(i);
    }
    const auto sample = rss_from_population(pop, Design{2000, 3}, SeedSpec{7, 0});
    double prev = -1.0;
    for (int r = 1; r <= 3; ++r) {
      const auto col = sample.rank_column(r);
      const double mean = std::accumulate(col.begin(), col.end(), 0.0) / col.size();
      CHECK(mean > prev);
      prev = mean;
    }
  }
  SUBCASE("constant ranker still produces valid deterministic samples") {
    FinitePopulation pop;
    pop.response = {1.0, 2.0, 3.0, 4.0, 5.0};
    pop.ranker = {7.0, 7.0, 7.0, 7.0, 7.0};
    const auto a = rss_from_population(pop, Design{20, 2}, SeedSpec{8, 0});
    const auto b = rss_from_population(pop, Design{20, 2}, SeedSpec{8, 0});
    CHECK(a.values == b.values);
  }
  SUBCASE("population smaller than the set size") {
    FinitePopulation pop;
    pop.response = {1.0, 2.0};
    pop.ranker = {1.0, 2.0};
    CHECK_THROWS_AS(rss_from_population(pop, Design{1, 3}, SeedSpec{9, 0}),
                    std::invalid_argument);
  }
}

TEST_CASE("srs from population draws distinct units") {
  FinitePopulation pop;
  for (int i = 0; i < 30; ++i) {
    pop.response.push_back(i);
    pop.ranker.push_back(0.0);
  }
  auto values = srs_from_population(pop, 30, SeedSpec{10, 0});
  std::sort(values.begin(), values.end());
  for (int i = 0; i < 30; ++i) CHECK(values[i] == i);
  CHECK_THROWS_AS(srs_from_population(pop, 31, SeedSpec{10, 0}), std::invalid_argument);
}

TEST_CASE("population CSV loading") {
  const std::string path = write_temp_csv("pop.csv",
                                          "id,resp,rank,extra\n"
                                          "1,5.5,2.0,x\n"
                                          "2,,3.0,x\n"
                                          "3,6.5,bad,x\n"
                                          "4,7.25,4.0,\"quoted,cell\"\n"
                                          "\n"
                                          "5,8.0,5.0,x\n");
  const auto load = load_population_csv(path, "resp", "rank");
  CHECK(load.population.size() == 3);
  CHECK(load.dropped_rows == 2);
  CHECK(load.population.response == std::vector<double>{5.5, 7.25, 8.0});
  CHECK(load.population.ranker == std::vector<double>{2.0, 4.0, 5.0});

  CHECK_THROWS_AS(load_population_csv(path, "resp", "nope"), std::invalid_argument);
  CHECK_THROWS_AS(load_population_csv("/tmp/rsquant_missing_file.csv", "a", "b"),
                  std::invalid_argument);
  std::remove(path.c_str());
}

TEST_CASE("stream independence across measured units") {
  // disjoint sub-streams: changing one unit's draw count cannot affect others
  const SeedSpec seed{31, 4};
  rng::Stream a(seed, 1);
  rng::Stream b(seed, 2);
  const double a1 = a.uniform();
  (void)a.uniform();
  rng::Stream b2(seed, 2);
  CHECK(b.uniform() == b2.uniform());
  rng::Stream a2(seed, 1);
  CHECK(a2.uniform() == a1);
}
