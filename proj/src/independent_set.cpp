#include "rough/independent_set.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "rough/errors.hpp"

namespace rough {

namespace {

using Words = std::vector<std::uint64_t>;

bool any(const Words& w) {
  return std::any_of(w.begin(), w.end(), [](std::uint64_t x) { return x != 0; });
}

std::size_t lowest(const Words& w) {
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (w[k]) return k * 64 + static_cast<std::size_t>(std::countr_zero(w[k]));
  }
  return w.size() * 64;
}

void reset(Words& w, std::size_t v) { w[v / 64] &= ~(std::uint64_t{1} << (v % 64)); }

/// Branch and bound for a maximum clique of the compatibility (complement) graph.
class CliqueSearch {
 public:
  CliqueSearch(std::vector<Words> compat, std::size_t words, std::uint64_t budget)
      : compat_(std::move(compat)), words_(words), budget_(budget) {}

  void run(const Words& all, std::vector<std::size_t> seed) {
    best_ = std::move(seed);
    std::vector<std::size_t> current;
    root_bound_ = colour_count(all);
    expand(current, all);
  }

  [[nodiscard]] const std::vector<std::size_t>& best() const { return best_; }
  [[nodiscard]] bool aborted() const { return aborted_; }
  [[nodiscard]] std::uint64_t nodes() const { return nodes_; }
  [[nodiscard]] std::size_t root_bound() const { return root_bound_; }

 private:
  std::size_t colour_count(const Words& p) const {
    Words u = p;
    std::size_t k = 0;
    while (any(u)) {
      ++k;
      Words q = u;
      while (any(q)) {
        const auto v = lowest(q);
        reset(u, v);
        reset(q, v);
        for (std::size_t w = 0; w < words_; ++w) q[w] &= ~compat_[v][w];
      }
    }
    return k;
  }

  void expand(std::vector<std::size_t>& current, Words p) {
    if (aborted_) return;
    if (++nodes_ > budget_) {
      aborted_ = true;
      return;
    }
    // Greedy colouring: each colour class is pairwise incompatible, so at most
    // one of its vertices can extend the current clique.
    std::vector<std::size_t> order;
    std::vector<std::size_t> colour;
    Words u = p;
    std::size_t k = 0;
    while (any(u)) {
      ++k;
      Words q = u;
      while (any(q)) {
        const auto v = lowest(q);
        reset(u, v);
        reset(q, v);
        for (std::size_t w = 0; w < words_; ++w) q[w] &= ~compat_[v][w];
        order.push_back(v);
        colour.push_back(k);
      }
    }
    for (std::size_t idx = order.size(); idx-- > 0;) {
      if (current.size() + colour[idx] <= best_.size()) return;
      const auto v = order[idx];
      current.push_back(v);
      Words next(words_);
      for (std::size_t w = 0; w < words_; ++w) next[w] = p[w] & compat_[v][w];
      if (!any(next)) {
        if (current.size() > best_.size()) best_ = current;
      } else {
        expand(current, std::move(next));
        if (aborted_) return;
      }
      current.pop_back();
      reset(p, v);
    }
  }

  std::vector<Words> compat_;
  std::size_t words_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  std::size_t root_bound_ = 0;
  std::vector<std::size_t> best_;
};

}  // namespace

ConflictGraph::ConflictGraph(std::size_t n) : n_(n), words_((n + 63) / 64), adj_(n * ((n + 63) / 64), 0) {}

void ConflictGraph::add_edge(std::size_t u, std::size_t v) {
  if (u >= n_ || v >= n_) throw InputError("conflict graph edge out of range");
  if (u == v) return;
  adj_[u * words_ + v / 64] |= std::uint64_t{1} << (v % 64);
  adj_[v * words_ + u / 64] |= std::uint64_t{1} << (u % 64);
}

bool ConflictGraph::adjacent(std::size_t u, std::size_t v) const {
  return (adj_[u * words_ + v / 64] >> (v % 64)) & 1U;
}

std::size_t ConflictGraph::degree(std::size_t v) const {
  std::size_t c = 0;
  for (std::size_t w = 0; w < words_; ++w) c += static_cast<std::size_t>(std::popcount(adj_[v * words_ + w]));
  return c;
}

IndependentSet greedy_independent_set(const ConflictGraph& graph) {
  IndependentSet out;
  Words blocked(graph.words(), 0);
  for (std::size_t v = 0; v < graph.size(); ++v) {
    if ((blocked[v / 64] >> (v % 64)) & 1U) continue;
    out.vertices.push_back(v);
    const auto* r = graph.row(v);
    for (std::size_t w = 0; w < graph.words(); ++w) blocked[w] |= r[w];
  }
  out.exact = false;
  out.upper_bound = clique_cover_bound(graph);
  return out;
}

std::size_t clique_cover_bound(const ConflictGraph& graph) {
  // Each clique keeps the common neighbourhood of its members.
  std::vector<Words> common;
  for (std::size_t v = 0; v < graph.size(); ++v) {
    bool placed = false;
    for (auto& c : common) {
      if ((c[v / 64] >> (v % 64)) & 1U) {
        const auto* r = graph.row(v);
        for (std::size_t w = 0; w < graph.words(); ++w) c[w] &= r[w];
        placed = true;
        break;
      }
    }
    if (!placed) {
      const auto* r = graph.row(v);
      common.emplace_back(r, r + graph.words());
    }
  }
  return common.size();
}

IndependentSet maximum_independent_set(const ConflictGraph& graph, SearchMode mode, std::uint64_t node_budget) {
  auto greedy = greedy_independent_set(graph);
  const std::size_t n = graph.size();
  if (mode == SearchMode::greedy || n == 0) {
    if (n == 0) {
      greedy.exact = true;
      greedy.upper_bound = 0;
    }
    return greedy;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> degree(n);
  for (std::size_t v = 0; v < n; ++v) degree[v] = graph.degree(v);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return degree[a] < degree[b]; });
  std::vector<std::size_t> position(n);
  for (std::size_t k = 0; k < n; ++k) position[order[k]] = k;

  const std::size_t words = graph.words();
  std::vector<Words> compat(n, Words(words, 0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && !graph.adjacent(order[a], order[b])) compat[a][b / 64] |= std::uint64_t{1} << (b % 64);
    }
  }
  Words all(words, 0);
  for (std::size_t v = 0; v < n; ++v) all[v / 64] |= std::uint64_t{1} << (v % 64);

  std::vector<std::size_t> seed;
  for (auto v : greedy.vertices) seed.push_back(position[v]);

  CliqueSearch search(std::move(compat), words, node_budget);
  search.run(all, std::move(seed));

  IndependentSet out;
  for (auto v : search.best()) out.vertices.push_back(order[v]);
  std::sort(out.vertices.begin(), out.vertices.end());
  out.nodes = search.nodes();
  out.exact = !search.aborted();
  out.upper_bound = out.exact ? out.vertices.size()
                              : std::min(search.root_bound(), clique_cover_bound(graph));
  return out;
}

}  // namespace rough
