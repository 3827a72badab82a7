#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rough/certificate.hpp"
#include "rough/group.hpp"
#include "rough/gset.hpp"
#include "rough/rational.hpp"

namespace rough {

/// Exact distance on a finite group.
///
/// Word metrics and product metrics are stored as a norm g ↦ d(1, g) and are
/// left-invariant by construction (d(x, y) = |x⁻¹y|). Explicit matrices are
/// stored verbatim and may violate the axioms; validate_structure reports that.
class LeftInvariantMetric {
 public:
  /// Breadth-first word metric. The generators must be symmetric; throws
  /// InputError if they do not generate the group.
  static LeftInvariantMetric word(std::shared_ptr<const FiniteGroup> group,
                                  const std::vector<Element>& generators);
  static LeftInvariantMetric from_norm(std::shared_ptr<const FiniteGroup> group,
                                       std::vector<Rational> norm);
  static LeftInvariantMetric from_matrix(std::shared_ptr<const FiniteGroup> group,
                                         std::vector<Rational> matrix);

  [[nodiscard]] const FiniteGroup& group() const noexcept { return *group_; }
  [[nodiscard]] const std::shared_ptr<const FiniteGroup>& group_ptr() const noexcept { return group_; }

  [[nodiscard]] Rational dist(Element x, Element y) const;
  /// d(1, g)
  [[nodiscard]] Rational norm(Element g) const { return dist(group_->identity(), g); }
  [[nodiscard]] bool norm_based() const noexcept { return matrix_.empty(); }
  [[nodiscard]] Rational diameter() const;

  /// Closed ball {g : d(1, g) ≤ r}.
  [[nodiscard]] GSet ball(const Rational& r) const;

 private:
  LeftInvariantMetric(std::shared_ptr<const FiniteGroup> group, std::vector<Rational> norm,
                      std::vector<Rational> matrix);

  std::shared_ptr<const FiniteGroup> group_;
  std::vector<Rational> norm_;
  std::vector<Rational> matrix_;
};

/// Closed ball of radius r at the identity.
GSet ball(const LeftInvariantMetric& metric, const Rational& r);

/// Declarative description of a group with a metric.
struct GroupSpec {
  enum class Kind { cyclic, dihedral, heisenberg, product, explicit_table };
  enum class Combine { max, sum };

  Kind kind = Kind::cyclic;
  std::size_t param = 0;
  /// Word-metric generators by label; empty selects the standard generators.
  std::vector<std::string> generators;

  std::shared_ptr<const GroupSpec> left;
  std::shared_ptr<const GroupSpec> right;
  Combine combine = Combine::max;

  std::vector<std::vector<Element>> table;
  std::vector<std::string> labels;
  std::vector<std::vector<Rational>> dist;

  static GroupSpec cyclic(std::size_t n, std::vector<std::string> generators = {});
  static GroupSpec dihedral(std::size_t n, std::vector<std::string> generators = {});
  static GroupSpec heisenberg(std::size_t p, std::vector<std::string> generators = {});
  static GroupSpec product(GroupSpec a, GroupSpec b, Combine combine);
  static GroupSpec explicit_table(std::vector<std::vector<Element>> table,
                                  std::vector<std::string> labels = {},
                                  std::vector<std::vector<Rational>> dist = {},
                                  std::vector<std::string> generators = {});

  [[nodiscard]] std::size_t predicted_order() const;
  [[nodiscard]] std::string describe() const;
};

struct GroupInstance {
  std::shared_ptr<const FiniteGroup> group;
  std::shared_ptr<const LeftInvariantMetric> metric;
  /// e.g. generator symmetrization performed during construction.
  std::vector<std::string> notes;
};

inline constexpr std::size_t kDefaultOrderBudget = 4096;

/// Builds and validates a group and its metric. Throws InputError for malformed
/// specs or non-group tables and BudgetExceeded when the order exceeds the budget.
GroupInstance make_group(const GroupSpec& spec, std::size_t order_budget = kDefaultOrderBudget);

/// Metric axioms, left invariance and the (ℓ, r)-Lipschitz property of A:
/// d(xa, ya) ≤ ℓ·d(x, y) for a ∈ A and x, y in the ball of radius r.
/// Failures are recorded with witnesses; the least valid ℓ is always reported.
Certificate validate_structure(const LeftInvariantMetric& metric, const GSet& a, std::int64_t ell,
                               const Rational& r);

}  // namespace rough
