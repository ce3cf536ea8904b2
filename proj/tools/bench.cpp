#include "bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <thread>

#include "dstp/lp.hpp"
#include "dstp/oracle.hpp"

namespace dstp::cli {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Infeasible:
    case ErrorKind::InfeasibleGroup:
    case ErrorKind::NoReachableGroup:
    case ErrorKind::UnreachableTerminal:
    case ErrorKind::UnreachableSupport:
    case ErrorKind::UnreachableWeight:
    case ErrorKind::InfeasibleX:
      return kInfeasible;
    default:
      return kInputError;
  }
}

double resolve_gamma(const ProblemInstance& inst, const std::string& mode) {
  if (mode == "auto") return 0.0;
  if (mode == "lp") {
    const auto lp = solve_dst_lp(inst.graph, inst.root(), inst.terminal_set(), DstLpMode::CuttingPlane);
    return lp.objective;
  }
  if (mode == "opt") {
    const double opt = oracle_value(inst);
    if (std::isnan(opt)) throw Error(ErrorKind::TooManyTerminals, "gamma=opt needs the oracle");
    return opt;
  }
  std::size_t used = 0;
  double g = 0.0;
  try {
    g = std::stod(mode, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != mode.size()) throw Error(ErrorKind::MalformedSyntax, "gamma must be auto, lp, opt or a number");
  if (g <= 0) throw Error(ErrorKind::GammaNonpositive, "gamma must be positive");
  return g;
}

double oracle_value(const ProblemInstance& inst) {
  if (static_cast<int>(inst.terminal_set().size()) > kOracleMaxTerminals) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return inst.roots.size() > 1 ? exact_multiroot(inst).cost : exact_variant(inst).cost;
}

std::vector<std::string> default_algos(const ProblemInstance& inst) {
  if (inst.roots.size() > 1) return {"multiroot"};
  switch (inst.variant) {
    case Variant::DST: return {"direct", "embed", "lp-round", "min-density"};
    case Variant::DGST: return {"dgst"};
    case Variant::DCST: return {"dcst"};
    case Variant::DPST: return {"dpst"};
  }
  return {};
}

RunCheck check_run(const ProblemInstance& inst, const std::string& algo, const SolutionReport& rep,
                   double opt, double opt_density, const std::string& gamma_mode) {
  RunCheck c;
  const double k = static_cast<double>(inst.terminal_set().size());
  const double lk = std::log2(std::max(k, 1.0)) + 1.0;
  const auto fc = check_feasibility(inst, rep.solution.arcs);
  if (algo == "min-density") {
    c.feasible = fc.value > 0 || k == 0;
    if (opt_density > 0 && std::isfinite(opt_density)) {
      c.ratio = rep.density / opt_density;
      c.bound = dst_ratio_bound(k);
    }
  } else {
    c.feasible = fc.feasible;
    if (opt > 0 && std::isfinite(opt)) c.ratio = rep.cost() / opt;
    if (algo == "direct" || algo == "embed") {
      if (gamma_mode == "opt") c.bound = dst_ratio_bound(k);
    } else if (algo == "lp-round") {
      if (rep.lp_value > 0) {
        c.ratio = rep.cost() / rep.lp_value;
        c.bound = 2.0 * kMaxSeparatorPaths * lk * lk;
      }
    } else if (algo == "multiroot") {
      if (inst.variant == Variant::DST) c.bound = dst_ratio_bound(k) * (1.0 + std::log(std::max(k, 1.0)));
      if (rep.stats.contains("iterations") && rep.stats["iterations"].get<int>() > inst.k()) c.within = false;
    } else if (algo == "dpst") {
      const double l = 1.0 + std::log(std::max(k, 1.0));
      c.bound = 4.0 * l * l;
    }
  }
  if (!std::isnan(c.bound) && !std::isnan(c.ratio) && c.ratio > c.bound + 1e-9) c.within = false;
  return c;
}

namespace {

json run_instance(const fs::path& file, const BenchOptions& opt, int& status) {
  json out = {{"file", file.filename().string()}};
  status = kOk;
  ProblemInstance inst;
  try {
    inst = load_instance(file.string());
  } catch (const Error& e) {
    out["error"] = std::string(e.what());
    status = kInputError;
    return out;
  }
  out["variant"] = std::string(to_string(inst.variant));
  out["k"] = inst.terminal_set().size();
  out["roots"] = inst.roots.size();
  double opt_v = std::numeric_limits<double>::quiet_NaN();
  double opt_density = std::numeric_limits<double>::quiet_NaN();
  try {
    opt_v = oracle_value(inst);
    if (!std::isnan(opt_v)) {
      out["oracle_opt"] = opt_v;
      if (inst.variant == Variant::DST) {
        opt_density = exact_min_density(inst).density;
        out["oracle_min_density"] = opt_density;
      }
    }
  } catch (const Error& e) {
    out["error"] = std::string(e.what());
    status = exit_code_for(e.kind());
    return out;
  }
  std::string gamma_mode = opt.gamma;
  if (gamma_mode == "opt" && std::isnan(opt_v)) gamma_mode = "auto";
  out["gamma_mode"] = gamma_mode;
  json runs = json::array();
  const auto algos = opt.algos.empty() ? default_algos(inst) : opt.algos;
  for (const auto& algo : algos) {
    json run = {{"algo", algo}};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      SolveOptions so;
      so.seed = opt.seed;
      so.gamma = resolve_gamma(inst, gamma_mode);
      const auto rep = solve(inst, algo, so);
      const auto c = check_run(inst, algo, rep, opt_v, opt_density, gamma_mode);
      run["cost"] = rep.cost();
      run["value"] = rep.value;
      if (std::isfinite(rep.density)) run["density"] = rep.density;
      if (!std::isnan(rep.lp_value)) run["lp_value"] = rep.lp_value;
      run["feasible"] = c.feasible;
      if (!std::isnan(c.ratio)) run["ratio"] = c.ratio;
      if (!std::isnan(c.bound)) run["bound"] = c.bound;
      run["within_bound"] = c.within;
      if (rep.stats.contains("tree_height")) run["tree_height"] = rep.stats["tree_height"];
      if (!c.feasible || !c.within) status = kBoundViolation;
    } catch (const Error& e) {
      run["error"] = std::string(e.what());
      if (status == kOk) status = exit_code_for(e.kind());
    }
    run["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    runs.push_back(run);
  }
  out["runs"] = runs;
  return out;
}

}  // namespace

BenchResult bench(const BenchOptions& opt) {
  std::vector<fs::path> files;
  if (!fs::is_directory(opt.dir)) throw Error(ErrorKind::MalformedSyntax, "not a directory: " + opt.dir);
  for (const auto& e : fs::directory_iterator(opt.dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<json> rows(files.size());
  std::vector<int> status(files.size(), kOk);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < files.size();) rows[i] = run_instance(files[i], opt, status[i]);
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(files.size())));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  struct Agg {
    int runs = 0, ratios = 0, violations = 0, errors = 0;
    double max_ratio = 0.0, sum_ratio = 0.0;
    double gkr_sum = 0.0;
    int gkr_n = 0;
  };
  std::map<std::string, Agg> agg;
  int violations = 0, infeasible = 0, input_errors = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (status[i] == kBoundViolation) ++violations;
    if (status[i] == kInfeasible) ++infeasible;
    if (status[i] == kInputError) ++input_errors;
    if (!rows[i].contains("runs")) continue;
    for (const auto& run : rows[i]["runs"]) {
      auto& a = agg[run["algo"].get<std::string>()];
      ++a.runs;
      if (run.contains("error")) {
        ++a.errors;
        continue;
      }
      if (!run["feasible"].get<bool>() || !run["within_bound"].get<bool>()) ++a.violations;
      if (run.contains("ratio")) {
        const double r = run["ratio"].get<double>();
        ++a.ratios;
        a.sum_ratio += r;
        a.max_ratio = std::max(a.max_ratio, r);
      }
      if (run["algo"] == "dgst" && run.contains("lp_value") && run["lp_value"].get<double>() > 0) {
        const double d = std::max(1.0, run["tree_height"].get<double>());
        const double k = rows[i]["k"].get<double>();
        a.gkr_sum += run["cost"].get<double>() / (d * (1.0 + std::log(std::max(k, 1.0))) * run["lp_value"].get<double>());
        ++a.gkr_n;
      }
    }
  }
  json summary = json::object();
  bool gkr_violation = false;
  for (const auto& [algo, a] : agg) {
    json s = {{"runs", a.runs}, {"errors", a.errors}, {"violations", a.violations}};
    if (a.ratios > 0) {
      s["max_ratio"] = a.max_ratio;
      s["mean_ratio"] = a.sum_ratio / a.ratios;
    }
    if (a.gkr_n > 0) {
      const double mean = a.gkr_sum / a.gkr_n;
      s["gkr_mean_normalized"] = mean;
      s["gkr_bound"] = 20.0;
      if (mean > 20.0) gkr_violation = true;
    }
    summary[algo] = s;
  }
  BenchResult res;
  res.report = {{"instances", rows},
                {"summary", summary},
                {"bound_violations", violations},
                {"infeasible", infeasible},
                {"input_errors", input_errors}};
  if (violations > 0 || gkr_violation) res.exit_code = kBoundViolation;
  else if (infeasible > 0) res.exit_code = kInfeasible;
  return res;
}

}  // namespace dstp::cli
