// Copyright 2026 The boxprop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: generate graphs, validate them, compute bounds,
// run BP or exact inference, and produce comparison reports.
//
// Exit status: 0 on success, 1 on a usage error, 2 when the input is invalid
// or a computation fails.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>

#include "boxprop/boxprop.hpp"

namespace {

using namespace boxprop;

constexpr int kUsageError = 1;
constexpr int kRunError = 2;

/// Writes `produce`'s output to `path` via a temporary file and a rename,
/// or straight to stdout for "-".
void write_output(const std::string& path, const std::function<void(std::ostream&)>& produce) {
  if (path == "-") {
    produce(std::cout);
    std::cout.flush();
    return;
  }
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    produce(out);
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename into " + path + ": " + ec.message());
  }
}

/// Echoes every effective option of the chosen subcommand, defaults
/// included, so a run can be repeated from its log.
void print_banner(const CLI::App& sub) {
  std::ostringstream line;
  line << "# boxprop " << sub.get_name();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_name() == "--help") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    } else {
      value = opt->get_default_str();
    }
    if (value.empty() && opt->get_expected_max() == 0) value = "false";
    line << " " << (opt->get_lnames().empty() ? opt->get_name() : "--" + opt->get_lnames().front()) << "="
         << value;
  }
  std::cerr << line.str() << "\n";
}

FactorGraph load_valid(const std::string& path) {
  FactorGraph g = read_fg_file(path);
  const auto problems = validate(g);
  if (!problems.empty()) {
    std::ostringstream msg;
    msg << path << " failed validation:";
    for (const Violation& v : problems) msg << "\n  " << v.message;
    throw Error(msg.str());
  }
  return g;
}

std::vector<VariableId> select_roots(const FactorGraph& g, const std::string& root) {
  std::vector<VariableId> roots;
  if (root == "all") {
    for (const Variable& v : g.variables()) roots.push_back(v.id);
    return roots;
  }
  const std::size_t id = std::stoul(root);
  if (id >= g.num_variables())
    throw Error("root " + root + " is out of range: the graph has " + std::to_string(g.num_variables()) +
                " variables");
  roots.push_back(VariableId{id});
  return roots;
}

nlohmann::ordered_json marginal_record(std::size_t v, const char* key, const Measure& m) {
  nlohmann::ordered_json j;
  j["variable"] = v;
  j[key] = m.values();
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rigorous bounds on single-variable marginals of discrete factor graphs"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a seeded random factor graph");
  std::string gen_kind;
  GridSpec grid;
  RandomGraphSpec rnd;
  std::string gen_out = "-";
  gen->add_option("kind", gen_kind, "grid, random or tree")->required()->check(CLI::IsMember({"grid", "random", "tree"}));
  gen->add_option("--rows", grid.rows, "Grid rows")->check(CLI::PositiveNumber);
  gen->add_option("--cols", grid.cols, "Grid columns")->check(CLI::PositiveNumber);
  gen->add_option("--domain", grid.domain_size, "Grid domain size: 2 (spin glass) or 3")->check(CLI::IsMember({2, 3}));
  gen->add_option("--beta", grid.beta, "Interaction strength multiplier")->check(CLI::PositiveNumber);
  gen->add_option("--variables", rnd.num_variables, "Variables of a random graph or tree")->check(CLI::PositiveNumber);
  gen->add_option("--min-domain", rnd.min_domain, "Smallest domain size")->check(CLI::Range(2, 64));
  gen->add_option("--max-domain", rnd.max_domain, "Largest domain size")->check(CLI::Range(2, 64));
  gen->add_option("--max-arity", rnd.max_arity, "Largest factor scope")->check(CLI::Range(1, 8));
  gen->add_option("--extra-factors", rnd.extra_factors, "Loop-closing factors of a random graph");
  gen->add_option("--strength", rnd.strength, "Log-table scale of random factors")->check(CLI::NonNegativeNumber);
  std::uint64_t seed = 0;
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--out", gen_out, "Output .fg file, - for stdout");

  // validate
  auto* val = app.add_subcommand("validate", "Check connectedness and the positivity condition");
  std::string in_path;
  val->add_option("--in", in_path, "Input .fg file")->required();

  // bound
  auto* bound = app.add_subcommand("bound", "Bound the marginals of one or all variables");
  std::string method_name = "sawtree", root = "all", bound_out = "-";
  std::size_t max_nodes = kDefaultMaxNodes;
  bound->add_option("--in", in_path, "Input .fg file")->required();
  bound->add_option("--method", method_name, "subtree or sawtree")->check(CLI::IsMember({"subtree", "sawtree"}));
  bound->add_option("--max-nodes", max_nodes, "Tree size budget")->check(CLI::PositiveNumber);
  bound->add_option("--root", root, "Variable id, or all")
      ->check([](const std::string& s) {
        return s == "all" || (!s.empty() && s.find_first_not_of("0123456789") == std::string::npos)
                   ? std::string{}
                   : std::string("must be 'all' or a variable id");
      });
  bound->add_option("--out", bound_out, "Output detail records, - for stdout");

  // bp
  auto* bp = app.add_subcommand("bp", "Loopy belief propagation");
  BpOptions bp_opt;
  std::string bp_out = "-";
  auto add_bp_flags = [&](CLI::App* sub) {
    sub->add_option("--tol", bp_opt.tol, "Convergence threshold on message changes")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", bp_opt.max_iter, "Maximum number of sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--damping", bp_opt.damping, "Weight of the previous message")->check(CLI::Range(0.0, 0.999999));
  };
  bp->add_option("--in", in_path, "Input .fg file")->required();
  add_bp_flags(bp);
  bp->add_option("--out", bp_out, "Output beliefs, - for stdout");

  // exact
  auto* ex = app.add_subcommand("exact", "Exact marginals");
  std::string engine_name = "varelim", ex_out = "-";
  ex->add_option("--in", in_path, "Input .fg file")->required();
  ex->add_option("--engine", engine_name, "brute or varelim")->check(CLI::IsMember({"brute", "varelim"}));
  ex->add_option("--out", ex_out, "Output marginals, - for stdout");

  // compare
  auto* cmp = app.add_subcommand("compare", "Run every method on every variable and report gaps");
  std::vector<std::string> methods{"subtree", "sawtree"};
  std::string summary_out = "-", details_out, profile_out;
  bool no_exact = false, no_bp = false;
  unsigned threads = std::max(1U, std::thread::hardware_concurrency());
  cmp->add_option("--in", in_path, "Input .fg file")->required();
  cmp->add_option("--methods", methods, "Methods to run")->delimiter(',')->check(CLI::IsMember({"subtree", "sawtree"}));
  cmp->add_option("--max-nodes", max_nodes, "Tree size budget for both methods")->check(CLI::PositiveNumber);
  cmp->add_option("--engine", engine_name, "Exact engine: brute or varelim")->check(CLI::IsMember({"brute", "varelim"}));
  cmp->add_flag("--no-exact", no_exact, "Skip exact marginals");
  cmp->add_flag("--no-bp", no_bp, "Skip belief propagation");
  add_bp_flags(cmp);
  cmp->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1U, 1024U));
  cmp->add_option("--summary", summary_out, "Summary CSV, - for stdout");
  cmp->add_option("--details", details_out, "Detail records (JSON lines)");
  cmp->add_option("--profile", profile_out, "Sorted-gap profile CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  print_banner(*chosen);

  try {
    if (chosen == gen) {
      grid.seed = rnd.seed = seed;
      if (rnd.max_domain < rnd.min_domain) throw CLI::ValidationError("--max-domain must be at least --min-domain");
      FactorGraph g = gen_kind == "grid" ? gen_grid(grid) : gen_kind == "random" ? gen_random_graph(rnd) : gen_random_tree(rnd);
      write_output(gen_out, [&](std::ostream& o) { write_fg(o, g); });
      std::cerr << "# wrote " << g.num_variables() << " variables, " << g.num_factors() << " factors\n";
    } else if (chosen == val) {
      const FactorGraph g = read_fg_file(in_path);
      const auto problems = validate(g);
      for (const Violation& v : problems) std::cout << v.message << "\n";
      if (!problems.empty()) return kRunError;
      std::cout << "ok: " << g.num_variables() << " variables, " << g.num_factors() << " factors\n";
    } else if (chosen == bound) {
      const FactorGraph g = load_valid(in_path);
      const Method method = *parse_method(method_name);
      std::vector<DetailRecord> records;
      for (VariableId v : select_roots(g, root)) {
        const BoundResult r = compute_bound(g, v, method, max_nodes);
        records.push_back({v, method, r.box, r.nodes_used, r.elapsed.count(), {}, {}, {}});
      }
      write_output(bound_out, [&](std::ostream& o) {
        for (const DetailRecord& d : records) o << to_json(d).dump() << "\n";
      });
    } else if (chosen == bp) {
      const FactorGraph g = load_valid(in_path);
      const BpResult r = bp_marginals(g, bp_opt);
      std::cerr << "# " << (r.converged ? "converged" : "did not converge") << " after " << r.iterations
                << " sweeps, last change " << r.max_change << "\n";
      write_output(bp_out, [&](std::ostream& o) {
        for (std::size_t v = 0; v < r.beliefs.size(); ++v) {
          auto j = marginal_record(v, "belief", r.beliefs[v]);
          j["converged"] = r.converged;
          o << j.dump() << "\n";
        }
      });
    } else if (chosen == ex) {
      const FactorGraph g = load_valid(in_path);
      const auto m = exact_marginals(g, *parse_engine(engine_name));
      write_output(ex_out, [&](std::ostream& o) {
        for (std::size_t v = 0; v < m.size(); ++v) o << marginal_record(v, "marginal", m[v]).dump() << "\n";
      });
    } else if (chosen == cmp) {
      const FactorGraph g = load_valid(in_path);
      CompareOptions opt;
      opt.methods.clear();
      for (const auto& m : methods) opt.methods.push_back(*parse_method(m));
      opt.subtree_max_nodes = opt.saw_max_nodes = max_nodes;
      opt.run_exact = !no_exact;
      opt.engine = *parse_engine(engine_name);
      opt.run_bp = !no_bp;
      opt.bp = bp_opt;
      opt.threads = threads;
      const CompareReport rep = compare(g, opt);
      for (const std::string& note : rep.notes) std::cerr << "# note: " << note << "\n";
      const auto problems = check_report(rep);
      if (!problems.empty()) {
        for (const auto& p : problems) std::cerr << "error: " << p << "\n";
        return kRunError;
      }
      write_output(summary_out, [&](std::ostream& o) { write_summary_csv(o, rep); });
      if (!details_out.empty()) write_output(details_out, [&](std::ostream& o) { write_details(o, rep); });
      if (!profile_out.empty()) write_output(profile_out, [&](std::ostream& o) { write_profile_csv(o, rep); });
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRunError;
  }
  return 0;
}
