#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rough/certificate.hpp"
#include "rough/gset.hpp"
#include "rough/measure.hpp"
#include "rough/metric.hpp"

namespace rough {

struct OperationSpec {
  std::string op;
  Json params = Json::object();
};

/// A validated scenario file. Sets (A, operation parameters) stay in their
/// JSON form and are resolved against the instantiated group.
struct Scenario {
  std::string name;
  std::string source;
  std::uint64_t seed = 1;
  std::uint64_t budget = kDefaultNodeBudget;
  std::size_t order_budget = kDefaultOrderBudget;
  GroupSpec group;
  Json a = nullptr;
  std::vector<Rational> radii;
  std::vector<Json> chain_sets;
  std::int64_t ell = 1;
  std::optional<Rational> lipschitz_radius;
  std::vector<Rational> k_targets;
  RoughMeasureSpec::Kind measure = RoughMeasureSpec::Kind::packing;
  SearchMode mode = SearchMode::exact;
  std::vector<OperationSpec> operations;
  /// Scale label m for metric-sequence families.
  std::optional<std::int64_t> scale;
  /// Metric-sequence family (scales), if any.
  std::vector<Scenario> family;

  [[nodiscard]] bool has_chain() const { return !radii.empty() || !chain_sets.empty(); }
};

/// Known operation names (the CLI subcommands plus "approximate").
const std::vector<std::string>& operation_names();

/// Parses and validates; every violation is collected into one InputError.
Scenario parse_scenario(const Json& doc, const std::string& source = "<memory>");
/// Reads a JSON file; parse errors carry line and column.
Scenario load_scenario(const std::string& path);

/// A scenario instantiated: group, metric, A, chain and per-index measures.
class Context {
 public:
  explicit Context(const Scenario& scenario);

  [[nodiscard]] const Scenario& scenario() const noexcept { return scenario_; }
  [[nodiscard]] const GroupInstance& instance() const noexcept { return instance_; }
  [[nodiscard]] const std::shared_ptr<const FiniteGroup>& group() const noexcept { return instance_.group; }
  [[nodiscard]] const LeftInvariantMetric& metric() const { return *instance_.metric; }
  [[nodiscard]] const GSet& a() const noexcept { return a_; }
  [[nodiscard]] bool has_chain() const noexcept { return chain_.has_value(); }
  [[nodiscard]] const ThickeningChain& chain() const;
  /// μ_i normalised at A, shared across operations.
  [[nodiscard]] RoughMeasure measure(std::size_t i) const;
  /// Resolves a set description: element list (indices or labels), "A",
  /// {"ball": r}, {"power": n[, "of": set]}, {"generated": set}, {"T": i}.
  [[nodiscard]] GSet set(const Json& spec) const;
  [[nodiscard]] Element element(const Json& spec) const;

 private:
  Scenario scenario_;
  GroupInstance instance_;
  GSet a_;
  std::optional<ThickeningChain> chain_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, RoughMeasure> measures_;
};

struct OperationResult {
  OperationSpec spec;
  std::vector<Certificate> certificates;
  /// "input" or "budget" when the operation could not complete.
  std::string error_kind;
  std::string error;

  [[nodiscard]] bool passed() const;
};

/// Runs one operation; InputError and BudgetExceeded are captured, not thrown.
OperationResult run_operation(const Context& context, const OperationSpec& op);

/// The operation a subcommand runs when the scenario declares none of its kind.
OperationSpec default_operation(const Scenario& scenario, const std::string& op);

struct RunOptions {
  /// Restrict to one operation kind (a CLI subcommand); empty runs everything.
  std::string only;
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> budget;
};

struct SuiteResult {
  std::vector<OperationResult> operations;
  [[nodiscard]] bool any_error() const;
  [[nodiscard]] bool all_pass() const;
  /// 0 all pass, 1 a claim fails, 2 an input or budget error.
  [[nodiscard]] int exit_code() const;
};

/// Executes the scenario's operations (in declaration order in the output,
/// whatever the worker count).
SuiteResult run_suite(const Scenario& scenario, const RunOptions& options = {});

/// Per (m, i): Lipschitz, chain axioms, max{ℓ,2}·r_i ≤ r_{i−1}, packing ratio
/// N_{r_i}(A⁴) ≤ K_i·N_{r_i}(A), and μ_i(A⁴T) ≤ μ_i(A⁴T_{i+2}) ≤ μ_{i−1}(A⁴) ≤ K_{i−1},
/// with a trend table and an "eventually holds" column.
Certificate metric_sequence_report(const std::vector<Scenario>& family, std::int64_t ell,
                                   const std::vector<Rational>& k_targets);

/// Z_{bᵐ} with A = ball(b^{m−1}) and radii b^{m−1−i} for i = 0..m.
std::vector<Scenario> cyclic_power_family(std::int64_t base, const std::vector<std::int64_t>& scales);

/// The output document for a run.
Json suite_document(const Scenario& scenario, const SuiteResult& result, const std::string& subcommand,
                    const RunOptions& options);

}  // namespace rough
