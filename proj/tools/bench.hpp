#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "dstp/instance.hpp"
#include "dstp/pipeline.hpp"

namespace dstp::cli {

enum Exit { kOk = 0, kBoundViolation = 2, kInfeasible = 3, kInputError = 4 };

int exit_code_for(ErrorKind kind);

/// auto | lp | opt | <number>, resolved to input cost units (0 means c(E)).
double resolve_gamma(const ProblemInstance& inst, const std::string& mode);

/// Exact optimum for the instance's roots and variant; NaN when the oracle
/// refuses the size.
double oracle_value(const ProblemInstance& inst);

std::vector<std::string> default_algos(const ProblemInstance& inst);

struct RunCheck {
  bool feasible = false;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
  bool within = true;
};

/// Feasibility plus the ratio bound that applies to `algo` at this gamma mode.
RunCheck check_run(const ProblemInstance& inst, const std::string& algo, const SolutionReport& rep,
                   double opt, double opt_density, const std::string& gamma_mode);

struct BenchOptions {
  std::string dir;
  int jobs = 1;
  std::vector<std::string> algos;  // empty: per-variant defaults
  std::string gamma = "opt";
  std::uint64_t seed = 1;
};

struct BenchResult {
  nlohmann::json report;
  int exit_code = kOk;
};

BenchResult bench(const BenchOptions& opt);

}  // namespace dstp::cli
