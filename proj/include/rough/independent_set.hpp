#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rough {

/// Undirected conflict graph on vertices 0..n-1 with bitset adjacency rows.
class ConflictGraph {
 public:
  explicit ConflictGraph(std::size_t n);

  void add_edge(std::size_t u, std::size_t v);
  [[nodiscard]] bool adjacent(std::size_t u, std::size_t v) const;
  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] std::size_t degree(std::size_t v) const;
  [[nodiscard]] std::size_t words() const noexcept { return words_; }
  [[nodiscard]] const std::uint64_t* row(std::size_t v) const { return adj_.data() + v * words_; }

 private:
  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> adj_;
};

enum class SearchMode { exact, greedy };

struct IndependentSet {
  /// Sorted vertex ids.
  std::vector<std::size_t> vertices;
  /// False when the search was greedy or ran out of budget.
  bool exact = true;
  /// Clique-cover bound; equals vertices.size() when exact.
  std::size_t upper_bound = 0;
  std::uint64_t nodes = 0;
};

inline constexpr std::uint64_t kDefaultNodeBudget = 1'000'000;

/// Maximal independent set, greedy in vertex order (a lower bound).
IndependentSet greedy_independent_set(const ConflictGraph& graph);

/// Size of a greedy clique partition: an upper bound on the independence number.
std::size_t clique_cover_bound(const ConflictGraph& graph);

/// Maximum independent set by colour-bounded branch and bound (maximum clique
/// in the complement), vertices ordered by ascending conflict degree and
/// seeded with the greedy solution. On budget exhaustion the best set found is
/// returned with exact = false and the root clique-cover bound.
IndependentSet maximum_independent_set(const ConflictGraph& graph, SearchMode mode = SearchMode::exact,
                                       std::uint64_t node_budget = kDefaultNodeBudget);

}  // namespace rough
