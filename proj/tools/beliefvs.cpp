// beliefvs: generate, solve, search and evaluate factored POMDPs.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "beliefvs/bounds.hpp"
#include "beliefvs/error.hpp"
#include "beliefvs/eval.hpp"
#include "beliefvs/random.hpp"
#include "beliefvs/search.hpp"
#include "beliefvs/serialize.hpp"
#include "beliefvs/solver.hpp"

using namespace beliefvs;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitGuard = 3;
constexpr int kExitNumerical = 4;

bool g_no_timing = false;

double timing(double seconds) { return g_no_timing ? 0.0 : seconds; }

class Manifest {
 public:
  Manifest(std::string command, std::string out)
      : command_(std::move(command)), path_(std::move(out) + ".manifest.json"),
        start_(std::chrono::steady_clock::now()) {}

  void input(const std::string& path) { inputs_.push_back(path); }
  void config(const std::string& key, json value) { config_[key] = std::move(value); }
  void seed(std::uint64_t s) { seed_ = s; }

  void write(const std::string& path, const std::string& text) {
    write_text_file(path, text);
    outputs_.push_back(path);
  }

  void finish() {
    json doc;
    doc["command"] = command_;
    doc["inputs"] = inputs_;
    doc["seed"] = seed_ ? json(*seed_) : json(nullptr);
    doc["config"] = config_;
    doc["outputs"] = outputs_;
    doc["seconds"] = timing(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
    write_text_file(path_, dump(doc));
  }

 private:
  std::string command_;
  std::string path_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  json config_ = json::object();
  std::optional<std::uint64_t> seed_;
};

struct GenArgs {
  std::size_t vars = 3;
  std::size_t actions = 2;
  std::size_t obs = 2;
  double sparsity = 0.0;
  double discount = 0.95;
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_gen(const GenArgs& args) {
  Manifest manifest("gen", args.out);
  RandomPomdpOptions options;
  options.num_variables = args.vars;
  options.num_actions = args.actions;
  options.num_observations = args.obs;
  options.sparsity = args.sparsity;
  options.discount = args.discount;
  if (args.vars > 12) throw GuardError("gen: more than 12 variables is not supported");
  Rng rng(args.seed);
  const Pomdp model = random_pomdp(options, rng);
  manifest.seed(args.seed);
  manifest.config("vars", args.vars);
  manifest.config("actions", args.actions);
  manifest.config("obs", args.obs);
  manifest.config("sparsity", args.sparsity);
  manifest.config("discount", args.discount);
  manifest.write(args.out, dump(model_to_json(model)));
  manifest.finish();
}

struct SolveArgs {
  std::string model;
  std::size_t horizon = 1;
  std::string out;
};

void cmd_solve(const SolveArgs& args) {
  Manifest manifest("solve", args.out);
  manifest.input(args.model);
  manifest.config("horizon", args.horizon);
  const Pomdp model = compile_model(read_json_file(args.model));
  const auto stages = solve(model, args.horizon);
  for (const AlphaSet& set : stages) {
    std::cout << "stage " << set.stage << ": " << set.size() << " vectors\n";
  }
  manifest.write(args.out, dump(policy_to_json(model, stages)));
  manifest.finish();
}

struct SearchArgs {
  std::string policy;
  std::string method = "vs-sum";
  std::string scope = "all";
  std::string out;
};

void cmd_search(const SearchArgs& args) {
  Manifest manifest("search", args.out);
  manifest.input(args.policy);
  manifest.config("method", args.method);
  manifest.config("scope", args.scope);
  SearchConfig config;
  const auto method = parse_search_method(args.method);
  if (!method) throw InputError("--method: unknown search method '" + args.method + "'");
  const auto scope = parse_stage_scope(args.scope);
  if (!scope) throw InputError("--scope: expected 'last' or 'all'");
  config.method = *method;
  config.scope = *scope;
  const Policy policy = parse_policy(read_json_file(args.policy));
  SearchResult result = run_search(policy.model, policy.stages, config);
  result.seconds = timing(result.seconds);
  manifest.write(args.out, dump(search_result_to_json(result, policy.model.variables)));
  manifest.finish();
}

struct EvalArgs {
  std::string model;
  std::string policy;
  std::string result;
  std::string scheme;
  std::string mode = "successive";
  std::size_t beliefs = 5000;
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_eval(const EvalArgs& args) {
  Manifest manifest("eval", args.out);
  manifest.input(args.model);
  manifest.input(args.policy);
  const Pomdp model = compile_model(read_json_file(args.model));
  const Policy policy = parse_policy(read_json_file(args.policy));
  if (policy.model.num_states() != model.num_states() ||
      policy.model.num_actions() != model.num_actions() ||
      policy.model.num_observations() != model.num_observations()) {
    throw InputError("eval: model and policy dimensions differ");
  }

  EvalConfig config;
  const auto mode = parse_approx_mode(args.mode);
  if (!mode) throw InputError("--mode: expected 'single' or 'successive'");
  config.mode = *mode;
  config.num_beliefs = args.beliefs;
  config.seed = args.seed;

  SchemeAssignment schemes;
  std::string method = "scheme";
  double seconds = 0.0;
  if (!args.result.empty()) {
    manifest.input(args.result);
    const SearchResult result = parse_search_result(read_json_file(args.result), model.variables);
    schemes = result.schemes;
    method = to_string(result.method);
    seconds = result.seconds;
    if (result.method == SearchMethod::BLp || result.method == SearchMethod::ELp) {
      config.bound_tests = SwitchMethod::LP;
    }
  } else if (args.scheme == "identity") {
    schemes = SchemeAssignment(ProjectionScheme::identity(model.num_variables()));
    method = "identity";
  } else if (args.scheme == "singletons") {
    schemes = SchemeAssignment(ProjectionScheme::singletons(model.num_variables()));
    method = "singletons";
  } else {
    manifest.input(args.scheme);
    schemes = SchemeAssignment(parse_scheme(read_json_file(args.scheme), model.variables));
  }

  manifest.seed(args.seed);
  manifest.config("mode", args.mode);
  manifest.config("beliefs", args.beliefs);
  manifest.config("method", method);
  manifest.config("bound_tests", to_string(config.bound_tests));

  EvalReport report = average_error(model, policy.stages, schemes, config, method, seconds);
  report.seconds = timing(report.seconds);
  report.eval_seconds = timing(report.eval_seconds);
  manifest.write(args.out + ".json", dump(eval_report_to_json(report)));
  manifest.write(args.out + ".csv", eval_csv({report}));
  manifest.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Value-directed belief-state approximation for factored POMDPs"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--no-timing", g_no_timing, "Write 0 for every wall-clock field");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random factored POMDP");
  gen_cmd->add_option("--vars", gen.vars, "Number of binary state variables")->required();
  gen_cmd->add_option("--actions", gen.actions, "Number of actions")->required();
  gen_cmd->add_option("--obs", gen.obs, "Number of observations")->required();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->required();
  gen_cmd->add_option("--sparsity", gen.sparsity, "Probability of a zeroed table entry");
  gen_cmd->add_option("--discount", gen.discount, "Discount factor");
  gen_cmd->add_option("--out", gen.out, "Model file to write")->required();

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Compute the stage alpha-vector sets");
  solve_cmd->add_option("model", solve_args.model, "Model file")->required();
  solve_cmd->add_option("--horizon", solve_args.horizon, "Number of stages")->required();
  solve_cmd->add_option("--out", solve_args.out, "Policy file to write")->required();

  SearchArgs search;
  auto* search_cmd = app.add_subcommand("search", "Search the projection lattice");
  search_cmd->add_option("policy", search.policy, "Policy file")->required();
  search_cmd->add_option("--method", search.method, "b-lp|b-vs|e-lp|e-vs|vs-sum|vs-max")->required();
  search_cmd->add_option("--scope", search.scope, "last|all");
  search_cmd->add_option("--out", search.out, "Result file to write")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Measure decision loss of approximate monitoring");
  eval_cmd->add_option("--model", eval.model, "Model file")->required();
  eval_cmd->add_option("--policy", eval.policy, "Policy file")->required();
  auto* result_opt = eval_cmd->add_option("--result", eval.result, "Search result file");
  auto* scheme_opt =
      eval_cmd->add_option("--scheme", eval.scheme, "Scheme file, 'identity' or 'singletons'");
  result_opt->excludes(scheme_opt);
  eval_cmd->add_option("--mode", eval.mode, "single|successive")->required();
  eval_cmd->add_option("--beliefs", eval.beliefs, "Number of random initial beliefs");
  eval_cmd->add_option("--seed", eval.seed, "Random seed")->required();
  eval_cmd->add_option("--out", eval.out, "Output prefix for .json and .csv")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*gen_cmd) {
      cmd_gen(gen);
    } else if (*solve_cmd) {
      cmd_solve(solve_args);
    } else if (*search_cmd) {
      cmd_search(search);
    } else if (*eval_cmd) {
      if (eval.result.empty() && eval.scheme.empty()) {
        throw InputError("eval: one of --result or --scheme is required");
      }
      cmd_eval(eval);
    }
  } catch (const GuardError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGuard;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}
