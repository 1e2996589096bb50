// End-to-end CLI tests: drive the installed binary through a shell and
// check exit codes and output files.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef RSQUANT_CLI_PATH
#error "RSQUANT_CLI_PATH must be defined"
#endif

namespace {

const std::string kCli = RSQUANT_CLI_PATH;
const std::string kDir = "/tmp/rsquant_cli_test";

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >" + kDir + "/stdout.txt 2>" + kDir +
                          "/stderr.txt";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string last_stdout() { return slurp(kDir + "/stdout.txt"); }

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text) n += c == '\n' ? 1 : 0;
  return n;
}

int count_occurrences(const std::string& text, const std::string& needle) {
  int n = 0;
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++n;
    pos += needle.size();
  }
  return n;
}

struct Setup {
  Setup() {
    if (std::system(("mkdir -p " + kDir).c_str()) != 0) std::abort();
    std::ofstream pop(kDir + "/pop.csv");
    pop << "id,resp,waist,bmi\n";
    for (int i = 1; i <= 80; ++i) {
      pop << i << ',' << i * 0.5 << ',' << i * 0.5 + (i % 7) << ',' << i * 0.5 + (i % 3) << "\n";
    }
    pop << "81,notanumber,3,4\n";
  }
} setup_once;

}  // namespace

TEST_CASE("simulate writes the expected row grid and is byte reproducible") {
  const std::string flags = "simulate --dist normal:0,1 --m 3 --k 3 --rho 1.0 "
                            "--p-grid 0.2:0.8:0.2 --replicates 200 --seed 42 "
                            "--estimators all --threads 1 --out " + kDir + "/re.csv";
  REQUIRE(run(flags) == 0);
  CHECK(last_stdout().find("resolved: simulate") != std::string::npos);
  const std::string first = slurp(kDir + "/re.csv");
  CHECK(count_lines(first) == 1 + 4 * 8);  // header + 4 levels x 8 estimators

  REQUIRE(run(flags) == 0);
  CHECK(slurp(kDir + "/re.csv") == first);
}

TEST_CASE("thread count changes speed only, never bytes") {
  const std::string common = "simulate --dist weibull:2,1 --m 3 --k 3 --rho 0.75 "
                             "--p-grid 0.25:0.75:0.25 --replicates 600 --seed 13 "
                             "--estimators all ";
  REQUIRE(run(common + "--threads 1 --out " + kDir + "/t1.csv") == 0);
  REQUIRE(run(common + "--threads 3 --out " + kDir + "/t3.csv") == 0);
  CHECK(slurp(kDir + "/t1.csv") == slurp(kDir + "/t3.csv"));
}

TEST_CASE("simulate with only the reference estimator reports re = 1") {
  REQUIRE(run("simulate --dist exp:1 --m 2 --k 2 --rho 1.0 --p-grid 0.5:0.5:0.1 "
              "--replicates 50 --seed 1 --estimators srs_emp --threads 1 --out " +
              kDir + "/ref.csv") == 0);
  const std::string csv = slurp(kDir + "/ref.csv");
  CHECK(csv.find(",srs_emp,") != std::string::npos);
  CHECK(csv.find(",1,") != std::string::npos);
}

TEST_CASE("flag errors exit with code 2") {
  CHECK(run("simulate --dist normal:0,1 --m 3") == 2);                    // missing flags
  CHECK(run("simulate --bogus 1") == 2);                                  // unknown flag
  CHECK(run("simulate --dist normal:0,1 --m 3 --k 3 --p-grid bad --out x "
            "--replicates 10 --seed 1") == 2);                            // malformed grid
  CHECK(run("simulate --dist normal:0,1 --m 3 --k 3 --p-grid 0.2:0.8:0.2 "
            "--estimators nope --out " + kDir + "/x.csv") == 2);          // unknown estimator
  CHECK(run("simulate --dist what:1 --m 3 --k 3 --p-grid 0.2:0.8:0.2 --out " +
            kDir + "/x.csv") == 2);                                       // bad distribution
  CHECK(run("nonsense") == 2);
}

TEST_CASE("weights subcommand") {
  REQUIRE(run("weights --m 1 --k 1 --p 0.5 --kind orss-hd --out " + kDir + "/w11.csv") == 0);
  const std::string w11 = slurp(kDir + "/w11.csv");
  CHECK(w11.find("m,k,p,kind,i,weight\n1,1,0.5,orss-hd,1,1") == 0);
  // single interval carries weight 1 up to finite-difference noise
  const double w = std::strtod(w11.c_str() + w11.rfind(',') + 1, nullptr);
  CHECK(std::fabs(w - 1.0) <= 1e-8);

  REQUIRE(run("weights --m 5 --k 3 --p 0.5 --kind orss-lf --out " + kDir + "/w53.csv") == 0);
  const std::string w53 = slurp(kDir + "/w53.csv");
  CHECK(count_lines(w53) == 16);
  CHECK(w53.find(",-") == std::string::npos);  // nonnegative weights

  REQUIRE(run("weights --m 5 --k 5 --p 0.5 --kind orss-hd --out " + kDir + "/w55.csv") == 0);
  CHECK(count_lines(slurp(kDir + "/w55.csv")) == 26);

  CHECK(run("weights --m 5 --k 3 --p 0.5 --kind huh --out " + kDir + "/bad.csv") == 2);
  CHECK(run("weights --m 5 --k 3 --p 1.5 --kind orss-hd --out " + kDir + "/bad.csv") == 2);
}

TEST_CASE("plot renders one polyline per estimator plus a reference line") {
  REQUIRE(run("simulate --dist normal:0,1 --m 2 --k 2 --rho 1.0 --p-grid 0.3:0.7:0.4 "
              "--replicates 100 --seed 9 --estimators rss_hd --threads 1 --out " +
              kDir + "/one.csv") == 0);
  REQUIRE(run("plot --input " + kDir + "/one.csv --out " + kDir + "/one.svg") == 0);
  const std::string svg = slurp(kDir + "/one.svg");
  CHECK(count_occurrences(svg, "<polyline") == 1);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(svg.find("rss_hd") != std::string::npos);

  // byte-identical rerun
  REQUIRE(run("plot --input " + kDir + "/one.csv --out " + kDir + "/one2.svg") == 0);
  CHECK(slurp(kDir + "/one2.svg") == svg);

  // plot(simulate(...)) round-trips on a full-grid output
  REQUIRE(run("plot --input " + kDir + "/re.csv --out " + kDir + "/re.svg") == 0);
  CHECK(count_occurrences(slurp(kDir + "/re.svg"), "<polyline") == 8);
}

TEST_CASE("multi-rho runs facet the plot; filters select panels") {
  REQUIRE(run("simulate --dist normal:0,1 --m 2 --k 2 --rho 1.0,0.75,0.5 "
              "--p-grid 0.3:0.7:0.2 --replicates 100 --seed 6 "
              "--estimators srs_hd,rss_hd --threads 1 --out " + kDir + "/multi.csv") == 0);
  CHECK(count_lines(slurp(kDir + "/multi.csv")) == 1 + 3 * 3 * 2);

  REQUIRE(run("plot --input " + kDir + "/multi.csv --out " + kDir + "/multi.svg") == 0);
  CHECK(count_occurrences(slurp(kDir + "/multi.svg"), "<polyline") == 3 * 2);

  REQUIRE(run("plot --input " + kDir + "/multi.csv --rho 0.75 --out " + kDir +
              "/one_rho.svg") == 0);
  const std::string filtered = slurp(kDir + "/one_rho.svg");
  CHECK(count_occurrences(filtered, "<polyline") == 2);
  CHECK(filtered.find("rho=0.75") != std::string::npos);

  CHECK(run("plot --input " + kDir + "/multi.csv --dist nothere --out " + kDir + "/x.svg") == 2);
}

TEST_CASE("plot rejects malformed input") {
  {
    std::ofstream empty(kDir + "/empty.csv");
    empty << "distribution,rho,m,k,p,estimator,bias,mse,re,mc_se\n";
  }
  CHECK(run("plot --input " + kDir + "/empty.csv --out " + kDir + "/empty.svg") == 2);
  CHECK(run("plot --input " + kDir + "/does_not_exist.csv --out " + kDir + "/x.svg") == 2);
  {
    std::ofstream bad(kDir + "/bad.csv");
    bad << "a,b\n1,2\n";
  }
  CHECK(run("plot --input " + kDir + "/bad.csv --out " + kDir + "/x.svg") == 2);
}

TEST_CASE("population study") {
  const std::string base = "population-study --input " + kDir + "/pop.csv "
                           "--response resp --ranker waist --m 3 --k 3 "
                           "--p-grid 0.25:0.75:0.25 --replicates 100 --seed 4 --threads 1 ";
  REQUIRE(run(base + "--out " + kDir + "/study.csv") == 0);
  const std::string out = last_stdout();
  CHECK(out.find("population: 80 usable rows") != std::string::npos);
  CHECK(count_lines(slurp(kDir + "/study.csv")) == 1 + 3 * 8);
  CHECK(slurp(kDir + "/study.csv").find("NA") != std::string::npos);

  SUBCASE("ranker screening prints one spearman line per candidate") {
    REQUIRE(run(base + "--screen-rankers waist,bmi --out " + kDir + "/study2.csv") == 0);
    const std::string screened = last_stdout();
    CHECK(screened.find("spearman(waist, resp)") != std::string::npos);
    CHECK(screened.find("spearman(bmi, resp)") != std::string::npos);
  }
  SUBCASE("missing column exits 2") {
    CHECK(run("population-study --input " + kDir + "/pop.csv --response resp "
              "--ranker nope --m 3 --k 3 --p-grid 0.5:0.5:0.1 --out " +
              kDir + "/x.csv") == 2);
  }
  SUBCASE("population smaller than the set size exits 4") {
    CHECK(run("population-study --input " + kDir + "/pop.csv --response resp "
              "--ranker waist --m 3 --k 100 --p-grid 0.5:0.5:0.1 --out " +
              kDir + "/x.csv") == 4);
  }
}

TEST_CASE("unwritable output path exits 3") {
  CHECK(run("simulate --dist exp:1 --m 2 --k 2 --rho 1.0 --p-grid 0.5:0.5:0.1 "
            "--replicates 10 --seed 1 --threads 1 --out /nonexistent/dir/out.csv") == 3);
  CHECK(run("weights --m 1 --k 1 --p 0.5 --kind orss-hd --out /nonexistent/dir/w.csv") == 3);
}

TEST_CASE("validate command") {
  REQUIRE(run("validate") == 0);
  const std::string out = last_stdout();
  CHECK(count_occurrences(out, "PASS ") >= 6);
  CHECK(run("validate --inject-corruption") == 1);
  CHECK(last_stdout().find("FAIL ") != std::string::npos);
}
