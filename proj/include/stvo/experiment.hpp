#pragma once

// Monte-Carlo experiment driver behind `stvo run|solve|check`. Runs execute
// in parallel; results are reduced in run order and written only after every
// run succeeded.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stvo/runner.hpp"
#include "stvo/scenarios.hpp"
#include "stvo/solvers.hpp"

namespace stvo {

enum class Scenario { exp1, exp2, rss, synthetic };

std::string to_string(Scenario s);
// Throws InvalidInput on unknown names.
Scenario parse_scenario(std::string_view name);

// 200 for the TVARX experiments, 10 for RSS walks, 20 for synthetic streams.
int default_runs(Scenario s);

struct RunSpec {
  Scenario scenario = Scenario::exp1;
  std::vector<Algorithm> algorithms{Algorithm::odr};
  int runs = 0;                 // 0 selects default_runs
  std::optional<int> r;         // inner iterations per round; calibrated if absent
  std::optional<double> tr_ms;  // calibration budget; block duration / round_ms by default
  int r_cap = 2000;
  std::optional<std::uint64_t> seed;  // overrides a seed from the config file; 1 if neither
  std::filesystem::path out = "out";
  bool common_random = true;  // off: each algorithm draws from its own seed
  bool svg = false;
  ConfigMap config;  // scenario keys; unknown keys are rejected

  void validate() const;
};

struct MetricRow {
  std::string algorithm;
  std::string metric;
  double value = 0.0;
};

struct RunReport {
  std::vector<MetricRow> summary;
  std::vector<std::filesystem::path> files;
};

// Throws InvalidInput/InvalidParameter on bad specs and NumericalError when a
// run fails; nothing is left in spec.out in either case.
RunReport run_experiment(const RunSpec& spec, std::ostream& log);

struct CheckReport {
  int files = 0;
  std::vector<std::string> problems;

  bool ok() const { return problems.empty() && files > 0; }
};

// Validates every CSV in dir against its schema: header, LF endings, numeric
// fields, nondecreasing regret and loss >= oracle loss - 1e-9 in traces.
CheckReport check_outputs(const std::filesystem::path& dir);

// Whitespace separated tokens, '#' to end of line is a comment: n, the n x n
// rows of Q, phi, lambda. Throws InvalidInput on malformed text.
QuadraticL1Problem read_problem(std::istream& is);

struct SolveReport {
  BatchResult batch;
  double residual = 0.0;
};

SolveReport solve_problem(const QuadraticL1Problem& problem);

}  // namespace stvo
