// rsquant command line: Monte Carlo studies of RSS quantile L-estimators,
// ORSS weight tables, finite-population resampling studies, and RE plots.

#include <algorithm>
#include <cinttypes>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "chart_svg.hpp"
#include "csv_util.hpp"
#include "rsquant.h"

namespace {

constexpr const char* kUsage = R"(usage: rsquant <command> [flags]

commands:
  simulate          Monte Carlo relative-efficiency study for a model law
  weights           write an ORSS weight table CSV for one (m, k, p)
  population-study  finite-population RSS study from a CSV file
  plot              render an RE-vs-p SVG chart from a results CSV
  validate          run the fast identity self-checks

simulate flags:
  --dist SPEC            normal:mean,sd | exp:rate | weibull:shape,scale
  --m INT --k INT        RSS design (m cycles, set size k)
  --rho LIST             ranking qualities, comma separated (default 1)
  --p-grid LO:HI:STEP    quantile levels, inclusive decimal grid
  --replicates INT       Monte Carlo replicates (default 20000)
  --seed UINT            master seed (default 0)
  --estimators LIST      comma separated ids or "all" (default all)
  --threads INT          worker threads, 0 = hardware (default 0)
  --out PATH             results CSV

weights flags:
  --m INT --k INT --p DECIMAL --kind {orss-lf|orss-hd} --out PATH

population-study flags:
  --input PATH --response COL --ranker COL
  --m INT --k INT --p-grid LO:HI:STEP --out PATH
  [--replicates INT] [--seed UINT] [--threads INT]
  [--screen-rankers COL1,COL2,...]

plot flags:
  --input PATH --out PATH [--dist NAME] [--rho VALUE]

exit codes: 0 ok, 1 failed validation, 2 bad flags or malformed input,
3 runtime failure, 4 population smaller than the set size
)";

const char* kEstimatorIds[] = {"srs_emp", "srs_lf", "srs_hd", "rss_emp",
                               "rss_lf",  "rss_hd", "orss_lf", "orss_hd"};

int exit_for(rsq_status status) {
  switch (status) {
    case RSQ_OK: return 0;
    case RSQ_ERROR_INVALID_ARGUMENT:
    case RSQ_ERROR_DOMAIN: return 2;
    default: return 3;
  }
}

struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void die(int code, const std::string& message) { throw Failure{code, message}; }

[[noreturn]] void die_status(rsq_status status) {
  die(exit_for(status), rsq_last_error());
}

class Flags {
 public:
  Flags(int argc, char** argv, int first, std::vector<std::string> allowed,
        std::vector<std::string> bare = {})
      : allowed_(std::move(allowed)), bare_(std::move(bare)) {
    for (int i = first; i < argc; ++i) {
      const std::string arg = argv[i];
      if (!arg.starts_with("--")) die(2, "unexpected argument '" + arg + "'");
      const std::string name = arg.substr(2);
      if (std::find(bare_.begin(), bare_.end(), name) != bare_.end()) {
        values_[name] = "1";
        continue;
      }
      if (std::find(allowed_.begin(), allowed_.end(), name) == allowed_.end()) {
        die(2, "unknown flag '--" + name + "'");
      }
      if (i + 1 >= argc) die(2, "flag '--" + name + "' needs a value");
      values_[name] = argv[++i];
    }
  }

  std::optional<std::string> get(const std::string& name) const {
    const auto it = values_.find(name);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }
  std::string require(const std::string& name) const {
    const auto v = get(name);
    if (!v) die(2, "missing required flag '--" + name + "'");
    return *v;
  }
  std::string get_or(const std::string& name, const std::string& fallback) const {
    return get(name).value_or(fallback);
  }
  bool has(const std::string& name) const { return values_.count(name) > 0; }

 private:
  std::vector<std::string> allowed_;
  std::vector<std::string> bare_;
  std::map<std::string, std::string> values_;
};

long long parse_int(const std::string& text, const std::string& flag) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (...) {
    die(2, "flag '--" + flag + "' expects an integer, got '" + text + "'");
  }
}

std::uint64_t parse_uint(const std::string& text, const std::string& flag) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (...) {
    die(2, "flag '--" + flag + "' expects an unsigned integer, got '" + text + "'");
  }
}

// Exact decimal parsing: a grid level is the correctly rounded double of its
// decimal spelling, with no accumulated stepping drift.
struct Decimal {
  long long scaled = 0;
  int digits = 0;
};

std::optional<Decimal> parse_decimal(std::string_view text) {
  Decimal d;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      if (d.scaled > (1LL << 59) / 10 || d.digits >= 15) return std::nullopt;
      d.scaled = d.scaled * 10 + (c - '0');
      if (seen_dot) ++d.digits;
      seen_digit = true;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;
  return d;
}

double decimal_value(Decimal d) {
  double denom = 1.0;
  for (int i = 0; i < d.digits; ++i) denom *= 10.0;
  return static_cast<double>(d.scaled) / denom;
}

double parse_level(const std::string& text, const std::string& flag) {
  const auto d = parse_decimal(text);
  if (!d) die(2, "flag '--" + flag + "' expects a decimal level, got '" + text + "'");
  const double p = decimal_value(*d);
  if (!(p > 0.0) || !(p < 1.0)) die(2, "flag '--" + flag + "' must lie in (0, 1)");
  return p;
}

std::vector<double> parse_p_grid(const std::string& text) {
  const auto parts = rsqcli::split(text, ':');
  if (parts.size() != 3) die(2, "--p-grid expects LO:HI:STEP, got '" + text + "'");
  auto lo = parse_decimal(parts[0]);
  auto hi = parse_decimal(parts[1]);
  auto step = parse_decimal(parts[2]);
  if (!lo || !hi || !step) die(2, "--p-grid has a malformed decimal in '" + text + "'");

  const int digits = std::max({lo->digits, hi->digits, step->digits});
  auto rescale = [&](Decimal d) -> long long {
    for (int i = d.digits; i < digits; ++i) {
      if (d.scaled > (1LL << 59) / 10) die(2, "--p-grid values have too many digits");
      d.scaled *= 10;
    }
    return d.scaled;
  };
  const long long lo_s = rescale(*lo);
  const long long hi_s = rescale(*hi);
  const long long step_s = rescale(*step);
  if (step_s <= 0) die(2, "--p-grid step must be positive");
  if (lo_s > hi_s) die(2, "--p-grid has lo > hi");

  double denom = 1.0;
  for (int i = 0; i < digits; ++i) denom *= 10.0;
  std::vector<double> grid;
  for (long long v = lo_s; v <= hi_s; v += step_s) {
    const double p = static_cast<double>(v) / denom;
    if (!(p > 0.0) || !(p < 1.0)) die(2, "--p-grid levels must lie strictly inside (0, 1)");
    grid.push_back(p);
    if (grid.size() > 10000) die(2, "--p-grid produces too many levels");
  }
  return grid;
}

std::vector<std::string> resolve_estimators(const std::string& text) {
  std::vector<std::string> ids;
  if (text == "all") {
    ids.assign(std::begin(kEstimatorIds), std::end(kEstimatorIds));
    return ids;
  }
  for (const auto& raw : rsqcli::split(text, ',')) {
    const std::string id(rsqcli::trim(raw));
    if (std::find(std::begin(kEstimatorIds), std::end(kEstimatorIds), id) ==
        std::end(kEstimatorIds)) {
      die(2, "unknown estimator '" + id + "'");
    }
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  if (ids.empty()) die(2, "--estimators selected nothing");
  return ids;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

template <typename T>
struct Guard {
  T* handle = nullptr;
  void (*deleter)(T*) = nullptr;
  ~Guard() {
    if (handle) deleter(handle);
  }
};

// ---------------------------------------------------------------------------

int cmd_simulate(int argc, char** argv) {
  const Flags flags(argc, argv, 2,
                    {"dist", "m", "k", "rho", "p-grid", "replicates", "seed", "estimators",
                     "threads", "out"});
  const std::string dist = flags.require("dist");
  const int m = static_cast<int>(parse_int(flags.require("m"), "m"));
  const int k = static_cast<int>(parse_int(flags.require("k"), "k"));
  const std::string p_grid_spec = flags.require("p-grid");
  const std::string out_path = flags.require("out");
  const std::string rho_spec = flags.get_or("rho", "1");
  const long long replicates = parse_int(flags.get_or("replicates", "20000"), "replicates");
  const std::uint64_t seed = parse_uint(flags.get_or("seed", "0"), "seed");
  const int threads = static_cast<int>(parse_int(flags.get_or("threads", "0"), "threads"));
  const auto estimators = resolve_estimators(flags.get_or("estimators", "all"));
  const auto p_grid = parse_p_grid(p_grid_spec);

  std::vector<double> rhos;
  std::vector<std::string> rho_echo;
  for (const auto& raw : rsqcli::split(rho_spec, ',')) {
    const std::string text(rsqcli::trim(raw));
    const auto v = rsqcli::parse_double(text);
    if (!v || !(*v >= 0.0) || !(*v <= 1.0)) die(2, "--rho values must lie in [0, 1]");
    rhos.push_back(*v);
    rho_echo.push_back(text);
  }
  if (rhos.empty()) die(2, "--rho selected nothing");

  std::cout << "resolved: simulate --dist " << dist << " --m " << m << " --k " << k << " --rho "
            << join(rho_echo, ',') << " --p-grid " << p_grid_spec << " --replicates " << replicates
            << " --seed " << seed << " --estimators " << join(estimators, ',') << " --threads "
            << threads << " --out " << out_path << "\n";

  Guard<rsq_experiment> cfg{rsq_experiment_create(), rsq_experiment_destroy};
  rsq_status st;
  if ((st = rsq_experiment_set_distribution(cfg.handle, dist.c_str())) != RSQ_OK) die_status(st);
  if ((st = rsq_experiment_add_design(cfg.handle, m, k)) != RSQ_OK) die_status(st);
  for (double rho : rhos) {
    if ((st = rsq_experiment_add_rho(cfg.handle, rho)) != RSQ_OK) die_status(st);
  }
  for (double p : p_grid) {
    if ((st = rsq_experiment_add_p(cfg.handle, p)) != RSQ_OK) die_status(st);
  }
  if ((st = rsq_experiment_set_estimators(cfg.handle, join(estimators, ',').c_str())) != RSQ_OK) {
    die_status(st);
  }
  if ((st = rsq_experiment_set_replicates(cfg.handle, replicates)) != RSQ_OK) die_status(st);
  if ((st = rsq_experiment_set_seed(cfg.handle, seed)) != RSQ_OK) die_status(st);
  if ((st = rsq_experiment_set_threads(cfg.handle, threads)) != RSQ_OK) die_status(st);

  rsq_result* result = nullptr;
  if ((st = rsq_experiment_run(cfg.handle, &result)) != RSQ_OK) die_status(st);
  Guard<rsq_result> result_guard{result, rsq_result_destroy};
  if ((st = rsq_result_write_csv(result, out_path.c_str())) != RSQ_OK) die_status(st);
  std::cout << "wrote " << rsq_result_row_count(result) << " rows to " << out_path << "\n";
  return 0;
}

int cmd_weights(int argc, char** argv) {
  const Flags flags(argc, argv, 2, {"m", "k", "p", "kind", "out"});
  const int m = static_cast<int>(parse_int(flags.require("m"), "m"));
  const int k = static_cast<int>(parse_int(flags.require("k"), "k"));
  const std::string p_text = flags.require("p");
  const double p = parse_level(p_text, "p");
  const std::string kind = flags.require("kind");
  const std::string out_path = flags.require("out");
  if (kind != "orss-lf" && kind != "orss-hd") die(2, "--kind must be orss-lf or orss-hd");

  std::cout << "resolved: weights --m " << m << " --k " << k << " --p " << p_text << " --kind "
            << kind << " --out " << out_path << "\n";

  rsq_weight_table* table = nullptr;
  rsq_status st = rsq_weight_table_create(m, k, p, kind.c_str(), &table);
  if (st != RSQ_OK) die_status(st);
  Guard<rsq_weight_table> guard{table, rsq_weight_table_destroy};
  if ((st = rsq_weight_table_write_csv(table, out_path.c_str())) != RSQ_OK) die_status(st);
  std::cout << "wrote " << rsq_weight_table_size(table) << " weights to " << out_path << "\n";
  return 0;
}

int cmd_population_study(int argc, char** argv) {
  const Flags flags(argc, argv, 2,
                    {"input", "response", "ranker", "m", "k", "p-grid", "replicates", "seed",
                     "threads", "out", "screen-rankers"});
  const std::string input = flags.require("input");
  const std::string response = flags.require("response");
  const std::string ranker = flags.require("ranker");
  const int m = static_cast<int>(parse_int(flags.require("m"), "m"));
  const int k = static_cast<int>(parse_int(flags.require("k"), "k"));
  const std::string p_grid_spec = flags.require("p-grid");
  const std::string out_path = flags.require("out");
  const long long replicates = parse_int(flags.get_or("replicates", "20000"), "replicates");
  const std::uint64_t seed = parse_uint(flags.get_or("seed", "0"), "seed");
  const int threads = static_cast<int>(parse_int(flags.get_or("threads", "0"), "threads"));
  const auto p_grid = parse_p_grid(p_grid_spec);

  std::cout << "resolved: population-study --input " << input << " --response " << response
            << " --ranker " << ranker << " --m " << m << " --k " << k << " --p-grid "
            << p_grid_spec << " --replicates " << replicates << " --seed " << seed
            << " --threads " << threads << " --out " << out_path;
  if (flags.has("screen-rankers")) std::cout << " --screen-rankers " << *flags.get("screen-rankers");
  std::cout << "\n";

  if (const auto screen = flags.get("screen-rankers")) {
    for (const auto& raw : rsqcli::split(*screen, ',')) {
      const std::string candidate(rsqcli::trim(raw));
      rsq_population* cand_pop = nullptr;
      size_t cand_dropped = 0;
      rsq_status st = rsq_population_load_csv(input.c_str(), response.c_str(), candidate.c_str(),
                                              &cand_pop, &cand_dropped);
      if (st != RSQ_OK) die_status(st);
      Guard<rsq_population> cand_guard{cand_pop, rsq_population_destroy};
      double rho_s = 0.0;
      if ((st = rsq_population_spearman(cand_pop, &rho_s)) != RSQ_OK) die_status(st);
      std::cout << "spearman(" << candidate << ", " << response << ") = " << rho_s << "\n";
    }
  }

  rsq_population* pop = nullptr;
  size_t dropped = 0;
  rsq_status st = rsq_population_load_csv(input.c_str(), response.c_str(), ranker.c_str(), &pop,
                                          &dropped);
  if (st != RSQ_OK) die_status(st);
  Guard<rsq_population> pop_guard{pop, rsq_population_destroy};
  const size_t population_size = rsq_population_size(pop);
  if (dropped > 0) {
    std::cerr << "warning: dropped " << dropped << " rows with missing or non-numeric cells\n";
  }
  std::cout << "population: " << population_size << " usable rows\n";
  if (population_size < static_cast<size_t>(k)) {
    std::cerr << "error: population (" << population_size << ") is smaller than the set size ("
              << k << ")\n";
    return 4;
  }

  Guard<rsq_experiment> cfg{rsq_experiment_create(), rsq_experiment_destroy};
  const std::string label = "population:" + response;
  if ((st = rsq_experiment_set_population(cfg.handle, pop, label.c_str())) != RSQ_OK) die_status(st);
  if ((st = rsq_experiment_add_design(cfg.handle, m, k)) != RSQ_OK) die_status(st);
  for (double p : p_grid) {
    if ((st = rsq_experiment_add_p(cfg.handle, p)) != RSQ_OK) die_status(st);
  }
  if ((st = rsq_experiment_set_replicates(cfg.handle, replicates)) != RSQ_OK) die_status(st);
  if ((st = rsq_experiment_set_seed(cfg.handle, seed)) != RSQ_OK) die_status(st);
  if ((st = rsq_experiment_set_threads(cfg.handle, threads)) != RSQ_OK) die_status(st);

  rsq_result* result = nullptr;
  if ((st = rsq_experiment_run(cfg.handle, &result)) != RSQ_OK) die_status(st);
  Guard<rsq_result> result_guard{result, rsq_result_destroy};
  if ((st = rsq_result_write_csv(result, out_path.c_str())) != RSQ_OK) die_status(st);
  std::cout << "wrote " << rsq_result_row_count(result) << " rows to " << out_path << "\n";
  return 0;
}

int cmd_plot(int argc, char** argv) {
  const Flags flags(argc, argv, 2, {"input", "out", "dist", "rho"});
  const std::string input = flags.require("input");
  const std::string out_path = flags.require("out");

  std::cout << "resolved: plot --input " << input << " --out " << out_path;
  if (flags.has("dist")) std::cout << " --dist " << *flags.get("dist");
  if (flags.has("rho")) std::cout << " --rho " << *flags.get("rho");
  std::cout << "\n";

  std::ifstream in(input);
  if (!in) die(2, "cannot open '" + input + "'");
  std::string line;
  if (!std::getline(in, line)) die(2, "'" + input + "' is empty");
  const auto header = rsqcli::split_csv_line(line);
  auto column = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    die(2, "results CSV is missing column '" + name + "'");
  };
  const std::size_t col_dist = column("distribution");
  const std::size_t col_rho = column("rho");
  const std::size_t col_p = column("p");
  const std::size_t col_est = column("estimator");
  const std::size_t col_re = column("re");

  struct Row {
    std::string dist, rho, est;
    double p, re;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (rsqcli::trim(line).empty()) continue;
    const auto fields = rsqcli::split_csv_line(line);
    const std::size_t needed = std::max({col_dist, col_rho, col_p, col_est, col_re});
    if (fields.size() <= needed) die(2, "malformed row in '" + input + "'");
    const auto p = rsqcli::parse_double(fields[col_p]);
    const auto re = rsqcli::parse_double(fields[col_re]);
    if (!p || !re) die(2, "non-numeric p/re in '" + input + "'");
    rows.push_back({fields[col_dist], std::string(rsqcli::trim(fields[col_rho])),
                    std::string(rsqcli::trim(fields[col_est])), *p, *re});
  }
  if (rows.empty()) die(2, "'" + input + "' has no data rows");

  if (const auto want = flags.get("dist")) {
    std::erase_if(rows, [&](const Row& r) { return r.dist != *want; });
  }
  if (const auto want = flags.get("rho")) {
    const auto want_value = rsqcli::parse_double(*want);
    std::erase_if(rows, [&](const Row& r) {
      const auto have = rsqcli::parse_double(r.rho);
      if (want_value && have) return *have != *want_value;
      return r.rho != *want;
    });
  }
  if (rows.empty()) die(2, "filters matched no rows");

  // Facet per (distribution, rho), first-appearance order.
  std::vector<std::pair<std::string, std::string>> facet_keys;
  for (const auto& r : rows) {
    const std::pair<std::string, std::string> key{r.dist, r.rho};
    if (std::find(facet_keys.begin(), facet_keys.end(), key) == facet_keys.end()) {
      facet_keys.push_back(key);
    }
  }

  auto estimator_order = [&](const std::string& id) -> int {
    for (std::size_t i = 0; i < std::size(kEstimatorIds); ++i) {
      if (kEstimatorIds[i] == id) return static_cast<int>(i);
    }
    return static_cast<int>(std::size(kEstimatorIds));
  };

  std::vector<rsqcli::Facet> facets;
  for (const auto& key : facet_keys) {
    rsqcli::Facet facet;
    facet.title = key.second == "NA" ? key.first : key.first + "  rho=" + key.second;
    std::vector<std::string> est_names;
    for (const auto& r : rows) {
      if (r.dist != key.first || r.rho != key.second) continue;
      if (std::find(est_names.begin(), est_names.end(), r.est) == est_names.end()) {
        est_names.push_back(r.est);
      }
    }
    std::stable_sort(est_names.begin(), est_names.end(),
                     [&](const std::string& a, const std::string& b) {
                       return estimator_order(a) < estimator_order(b);
                     });
    for (const auto& est : est_names) {
      rsqcli::Series series;
      series.label = est;
      for (const auto& r : rows) {
        if (r.dist == key.first && r.rho == key.second && r.est == est) {
          series.points.emplace_back(r.p, r.re);
        }
      }
      std::stable_sort(series.points.begin(), series.points.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      facet.series.push_back(std::move(series));
    }
    facets.push_back(std::move(facet));
  }

  const std::string svg = rsqcli::render_re_chart(facets);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) die(3, "cannot open '" + out_path + "' for writing");
  out << svg;
  std::cout << "wrote " << facets.size() << " panel(s) to " << out_path << "\n";
  return 0;
}

int cmd_validate(int argc, char** argv) {
  const Flags flags(argc, argv, 2, {}, {"inject-corruption"});
  const int inject = flags.has("inject-corruption") ? 1 : 0;
  std::cout << "resolved: validate" << (inject ? " --inject-corruption" : "") << "\n";

  struct Context {
    int failures = 0;
  } ctx;
  int all_passed = 0;
  const rsq_status st = rsq_validate(
      inject,
      [](const char* name, int passed, void* user) {
        auto* c = static_cast<Context*>(user);
        if (!passed) ++c->failures;
        std::cout << (passed ? "PASS " : "FAIL ") << name << "\n";
      },
      &ctx, &all_passed);
  if (st != RSQ_OK) die_status(st);
  std::cout << (all_passed ? "all checks passed" : "some checks FAILED") << "\n";
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2 || std::strcmp(argv[1], "--help") == 0 || std::strcmp(argv[1], "help") == 0) {
    std::cout << kUsage;
    return argc < 2 ? 2 : 0;
  }
  const std::string verb = argv[1];
  try {
    if (verb == "simulate") return cmd_simulate(argc, argv);
    if (verb == "weights") return cmd_weights(argc, argv);
    if (verb == "population-study") return cmd_population_study(argc, argv);
    if (verb == "plot") return cmd_plot(argc, argv);
    if (verb == "validate") return cmd_validate(argc, argv);
    std::cerr << "error: unknown command '" << verb << "'\n" << kUsage;
    return 2;
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
