// rough: run scenario files and emit JSON certificate documents.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rough/errors.hpp"
#include "rough/harness.hpp"

namespace {

struct Args {
  std::string scenario;
  std::string out = "-";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget;
  std::size_t workers = 1;
};

int write(const rough::Json& doc, const std::string& out) {
  const auto text = doc.dump(2);
  if (out == "-") {
    std::cout << text << '\n';
    return 0;
  }
  std::ofstream f(out);
  if (!f) {
    std::cerr << "rough: cannot write '" << out << "'\n";
    return 2;
  }
  f << text << '\n';
  return f.good() ? 0 : 2;
}

int run(const std::string& subcommand, const Args& args) {
  rough::RunOptions opts;
  opts.only = subcommand == "suite" ? "" : subcommand;
  opts.workers = args.workers;
  opts.seed = args.seed;
  opts.budget = args.budget;
  rough::Scenario scenario;
  try {
    scenario = rough::load_scenario(args.scenario);
  } catch (const rough::InputError& e) {
    rough::Json doc{{"tool", "rough"},  {"subcommand", subcommand}, {"scenario", args.scenario},
                    {"verdict", "error"}, {"exit_code", 2},
                    {"errors", rough::Json::array({{{"kind", "input"}, {"message", e.what()}}})}};
    std::cerr << "rough: " << e.what() << '\n';
    write(doc, args.out);
    return 2;
  }
  const auto result = rough::run_suite(scenario, opts);
  const auto doc = rough::suite_document(scenario, result, subcommand, opts);
  for (const auto& r : result.operations)
    if (!r.error_kind.empty()) std::cerr << "rough: " << r.spec.op << ": " << r.error << '\n';
  if (write(doc, args.out) != 0) return 2;
  return result.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact finite checks for rough approximate groups"};
  app.require_subcommand(1);
  Args args;
  std::string chosen;

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"validate", "check group, metric, A and the chain"},
      {"axioms", "check the rough-measure axioms"},
      {"union", "check the union lower bound on random families"},
      {"thickness", "compute t-thickness and a translate cover"},
      {"stable-set", "build the stable set S(B)"},
      {"trank", "evaluate thick-rank membership"},
      {"iterate", "run the square iteration"},
      {"core", "build the bounded normal core"},
      {"ruzsa", "build a rough Ruzsa cover"},
      {"propagate", "propagate a power bound"},
      {"metric-seq", "tabulate hypotheses along a metric sequence"},
      {"suite", "run every operation in the scenario"},
  };
  for (const auto& [name, help] : subs) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--scenario", args.scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output file, - for stdout")->capture_default_str();
    sub->add_option("--seed", args.seed, "override the scenario seed");
    sub->add_option("--workers", args.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--budget", args.budget, "override the search node budget")->check(CLI::PositiveNumber);
    sub->callback([&chosen, n = name] { chosen = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return run(chosen, args);
  } catch (const rough::BudgetExceeded& e) {
    std::cerr << "rough: budget exceeded: " << e.what() << '\n';
    return 2;
  } catch (const rough::InputError& e) {
    std::cerr << "rough: " << e.what() << '\n';
    return 2;
  }
}
