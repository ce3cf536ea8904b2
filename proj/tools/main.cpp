#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bench.hpp"
#include "dstp/embed.hpp"
#include "dstp/gen.hpp"
#include "dstp/lp.hpp"
#include "dstp/oracle.hpp"
#include "dstp/separator.hpp"

using namespace dstp;
using nlohmann::json;

namespace {

void emit(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::MalformedSyntax, "cannot write " + path);
  out << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MalformedSyntax, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedSyntax, e.what());
  }
}

double gamma_input_units(const ProblemInstance& inst, double g) {
  return g > 0 ? g : inst.graph.total_cost();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directed Steiner tree solvers for planar digraphs"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate instances");
  std::string spec_file, gen_out, gen_dir;
  json spec = json::object();
  std::string kind, variant, polymatroid;
  int rows = 0, cols = 0, n = 0, k = 0, roots = 0, groups = 0, group_size = 0, max_req = 0, max_cost = 0;
  int count = 1;
  double both = -1;
  bool prizes = false;
  std::uint64_t gen_seed = 1;
  gen->add_option("--spec", spec_file, "JSON spec; flags override its fields");
  gen->add_option("--kind", kind, "grid | triangulated-disk | series-parallel");
  gen->add_option("--rows", rows);
  gen->add_option("--cols", cols);
  gen->add_option("--n", n, "Vertex count for series-parallel");
  gen->add_option("--k", k, "Terminals, or polymatroid support size");
  gen->add_option("--variant", variant, "dst | dgst | dcst | dpst");
  gen->add_option("--roots", roots);
  gen->add_option("--groups", groups);
  gen->add_option("--group-size", group_size);
  gen->add_option("--max-requirement", max_req);
  gen->add_option("--polymatroid", polymatroid, "coverage | truncated_partition | modular");
  gen->add_option("--both-directions", both, "Probability that an edge gets both orientations");
  gen->add_option("--max-cost", max_cost);
  gen->add_flag("--prizes", prizes);
  gen->add_option("--seed", gen_seed);
  gen->add_option("--count", count, "Number of instances, seeds seed..seed+count-1");
  gen->add_option("-o,--output", gen_out, "Output file (single instance)");
  gen->add_option("--dir", gen_dir, "Output directory (corpus)");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Run one solver on an instance");
  std::string algo = "direct", in_file, out_file, gamma_mode = "auto", dump_tree, dump_seps;
  std::uint64_t seed = 1;
  solve_cmd->add_option("--algo", algo)
      ->check(CLI::IsMember({"direct", "embed", "lp-round", "dgst", "dcst", "dpst", "multiroot", "min-density"}));
  solve_cmd->add_option("-i,--input", in_file)->required();
  solve_cmd->add_option("-o,--output", out_file);
  solve_cmd->add_option("--gamma", gamma_mode, "auto | lp | opt | <number>");
  solve_cmd->add_option("--seed", seed);
  solve_cmd->add_option("--dump-tree", dump_tree, "Write the tree embedding as JSON");
  solve_cmd->add_option("--dump-separators", dump_seps, "Write the top-level separator as JSON");

  // gap
  auto* gap = app.add_subcommand("gap", "LP value, oracle optimum and rounding ratio");
  std::string gap_in, gap_out, gap_mode = "cutting";
  gap->add_option("-i,--input", gap_in)->required();
  gap->add_option("-o,--output", gap_out);
  gap->add_option("--lp", gap_mode, "compact | cutting")->check(CLI::IsMember({"compact", "cutting"}));

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Exact optimum for small instances");
  std::string or_in, or_out;
  oracle->add_option("-i,--input", or_in)->required();
  oracle->add_option("-o,--output", or_out);

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run solvers and the oracle over a directory");
  cli::BenchOptions bo;
  std::string report;
  bench_cmd->add_option("--dir", bo.dir)->required();
  bench_cmd->add_option("--jobs", bo.jobs);
  bench_cmd->add_option("--report", report);
  bench_cmd->add_option("--algos", bo.algos, "Override the per-variant solver list");
  bench_cmd->add_option("--gamma", bo.gamma, "opt | auto | lp | <number>");
  bench_cmd->add_option("--seed", bo.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kInputError;
  }

  try {
    if (*gen) {
      if (!spec_file.empty()) spec = read_json(spec_file);
      if (!kind.empty()) spec["kind"] = kind;
      if (rows > 0) spec["rows"] = rows;
      if (cols > 0) spec["cols"] = cols;
      if (n > 0) spec["n"] = n;
      if (k > 0) spec["k"] = k;
      if (!variant.empty()) spec["variant"] = variant;
      if (roots > 0) spec["roots"] = roots;
      if (groups > 0) spec["groups"] = groups;
      if (group_size > 0) spec["group_size"] = group_size;
      if (max_req > 0) spec["max_requirement"] = max_req;
      if (!polymatroid.empty()) spec["polymatroid"] = polymatroid;
      if (both >= 0) spec["both_directions"] = both;
      if (max_cost > 0) spec["max_cost"] = max_cost;
      if (prizes) spec["prizes"] = true;
      if (gen->count("--seed") || !spec.contains("seed")) spec["seed"] = gen_seed;
      auto s = gen_spec_from_json(spec);
      if (gen_dir.empty()) {
        if (count != 1) throw Error(ErrorKind::SpecInvalid, "--count needs --dir");
        emit(instance_to_json(generate(s)), gen_out);
        return 0;
      }
      std::filesystem::create_directories(gen_dir);
      const auto base = s.seed;
      for (int i = 0; i < count; ++i) {
        s.seed = base + i;
        const auto path = std::filesystem::path(gen_dir) /
                          (s.kind + "-" + std::string(to_string(s.variant)) + (s.roots > 1 ? "-r" + std::to_string(s.roots) : "") +
                           "-" + std::to_string(s.seed) + ".json");
        std::ofstream out(path);
        out << serialize_instance(generate(s));
      }
      return 0;
    }

    if (*solve_cmd) {
      const auto inst = load_instance(in_file);
      SolveOptions so;
      so.seed = seed;
      so.gamma = cli::resolve_gamma(inst, gamma_mode);
      const double g = gamma_input_units(inst, so.gamma);
      if (!dump_seps.empty()) {
        emit(separator_to_json(inst.graph, prune_and_separate(inst.graph, inst.root(), inst.terminal_set(), g)),
             dump_seps);
      }
      if (!dump_tree.empty()) {
        const auto tree = algo == "min-density" || algo == "direct"
                              ? tree_emb(inst.graph, inst.root(), inst.terminal_set(), g)
                              : tree_emb_height_reduced(inst.graph, inst.root(), inst.terminal_set(), g);
        emit(embed_tree_to_json(tree), dump_tree);
      }
      const auto rep = solve(inst, algo, so);
      auto j = rep.to_json(inst);
      j["algo"] = algo;
      j["gamma"] = g;
      emit(j, out_file);
      return check_feasibility(inst, rep.solution.arcs).feasible || algo == "min-density" ? 0 : cli::kBoundViolation;
    }

    if (*gap) {
      const auto inst = load_instance(gap_in);
      const auto terms = inst.terminal_set();
      const auto lp = solve_dst_lp(inst.graph, inst.root(), terms,
                                   gap_mode == "compact" ? DstLpMode::Compact : DstLpMode::CuttingPlane);
      const auto rounded = round_lp(inst.graph, inst.root(), terms, lp.x);
      const double kk = static_cast<double>(terms.size());
      const double lk = std::log2(std::max(kk, 1.0)) + 1.0;
      const double bound = 2.0 * kMaxSeparatorPaths * lk * lk;
      json j = {{"lp", lp.objective}, {"lp_rounds", lp.rounds}, {"round_lp_cost", rounded.cost}, {"bound", bound}};
      bool ok = true;
      if (lp.objective > 0) {
        j["round_ratio"] = rounded.cost / lp.objective;
        ok = rounded.cost <= bound * lp.objective + 1e-9;
      }
      if (static_cast<int>(terms.size()) <= kOracleMaxTerminals) {
        const double opt = exact_dst(inst.graph, inst.root(), terms).cost;
        j["opt"] = opt;
        if (lp.objective > 0) j["gap"] = opt / lp.objective;
        ok = ok && lp.objective <= opt + 1e-6;
      }
      emit(j, gap_out);
      return ok ? 0 : cli::kBoundViolation;
    }

    if (*oracle) {
      const auto inst = load_instance(or_in);
      const auto s = inst.roots.size() > 1 ? exact_multiroot(inst) : exact_variant(inst);
      std::vector<int> ids;
      for (int a : s.arcs) ids.push_back(inst.arc_labels[a]);
      std::sort(ids.begin(), ids.end());
      emit({{"opt", s.cost}, {"arcs", ids}}, or_out);
      return 0;
    }

    if (*bench_cmd) {
      const auto res = cli::bench(bo);
      emit(res.report, report);
      return res.exit_code;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kInputError;
  }
  return 0;
}
