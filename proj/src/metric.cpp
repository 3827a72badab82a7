#include "rough/metric.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <random>

#include "rough/errors.hpp"

namespace rough {

namespace {

constexpr std::size_t kExhaustiveMatrixChecks = 256;
constexpr std::size_t kSampledTriples = 100000;
constexpr std::uint64_t kMetricSampleSeed = 0x7a1e'5eedULL;

/// Values over a common denominator so hot loops compare plain integers.
struct Scaled {
  std::vector<std::int64_t> values;
  std::int64_t denominator = 1;
};

Scaled scale(const std::vector<Rational>& xs) {
  Scaled out;
  for (const auto& x : xs) out.denominator = std::lcm(out.denominator, x.denominator());
  out.values.reserve(xs.size());
  for (const auto& x : xs) out.values.push_back(x.numerator() * (out.denominator / x.denominator()));
  return out;
}

std::vector<Element> resolve_generators(const FiniteGroup& g, const std::vector<std::string>& labels) {
  std::vector<Element> out;
  for (const auto& label : labels) {
    auto e = g.find(label);
    if (!e) throw InputError("unknown generator '" + label + "'");
    out.push_back(*e);
  }
  return out;
}

/// Drops the identity, adds missing inverses; returns a note if anything changed.
std::vector<Element> symmetrize(const FiniteGroup& g, std::vector<Element> gens, std::vector<std::string>& notes) {
  std::vector<Element> out;
  bool changed = false;
  auto push = [&](Element e) {
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  };
  for (auto e : gens) {
    if (e == g.identity()) {
      changed = true;
      continue;
    }
    push(e);
  }
  const auto original = out;
  for (auto e : original) {
    if (std::find(original.begin(), original.end(), g.inv(e)) == original.end()) changed = true;
    push(g.inv(e));
  }
  std::sort(out.begin(), out.end());
  if (changed) {
    std::string list;
    for (auto e : out) list += (list.empty() ? "" : ", ") + g.label(e);
    notes.push_back("generator set symmetrized to {" + list + "}");
  }
  return out;
}

std::shared_ptr<const FiniteGroup> cyclic_group(std::size_t n) {
  std::vector<Element> table(n * n);
  std::vector<std::string> labels;
  for (std::size_t a = 0; a < n; ++a) {
    labels.push_back(std::to_string(a));
    for (std::size_t b = 0; b < n; ++b) table[a * n + b] = static_cast<Element>((a + b) % n);
  }
  return std::make_shared<const FiniteGroup>(std::move(table), std::move(labels));
}

// Index j is r^j, index n + j is s·r^j; (s^a r^i)(s^b r^j) = s^(a+b) r^((-1)^b i + j).
std::shared_ptr<const FiniteGroup> dihedral_group(std::size_t n) {
  const std::size_t order = 2 * n;
  std::vector<Element> table(order * order);
  std::vector<std::string> labels;
  for (std::size_t j = 0; j < n; ++j) labels.push_back("r" + std::to_string(j));
  for (std::size_t j = 0; j < n; ++j) labels.push_back("s" + std::to_string(j));
  for (std::size_t x = 0; x < order; ++x) {
    const std::size_t a = x / n, i = x % n;
    for (std::size_t y = 0; y < order; ++y) {
      const std::size_t b = y / n, j = y % n;
      const std::size_t rot = (b == 0 ? i + j : (n - i) + j) % n;
      table[x * order + y] = static_cast<Element>(((a + b) % 2) * n + rot);
    }
  }
  return std::make_shared<const FiniteGroup>(std::move(table), std::move(labels));
}

// (a, b, c)·(a', b', c') = (a + a', b + b', c + c' + a b') over Z/p; index a p² + b p + c.
std::shared_ptr<const FiniteGroup> heisenberg_group(std::size_t p) {
  const std::size_t order = p * p * p;
  std::vector<Element> table(order * order);
  std::vector<std::string> labels;
  for (std::size_t x = 0; x < order; ++x) {
    labels.push_back("(" + std::to_string(x / (p * p)) + "," + std::to_string((x / p) % p) + "," +
                     std::to_string(x % p) + ")");
  }
  for (std::size_t x = 0; x < order; ++x) {
    const std::size_t a = x / (p * p), b = (x / p) % p, c = x % p;
    for (std::size_t y = 0; y < order; ++y) {
      const std::size_t a2 = y / (p * p), b2 = (y / p) % p, c2 = y % p;
      const std::size_t ra = (a + a2) % p, rb = (b + b2) % p, rc = (c + c2 + a * b2) % p;
      table[x * order + y] = static_cast<Element>(ra * p * p + rb * p + rc);
    }
  }
  return std::make_shared<const FiniteGroup>(std::move(table), std::move(labels));
}

GroupInstance build(const GroupSpec& spec, std::size_t order_budget);

GroupInstance with_word_metric(std::shared_ptr<const FiniteGroup> group, const std::vector<std::string>& labels,
                               std::vector<std::string> defaults) {
  GroupInstance out;
  const auto& use = labels.empty() ? defaults : labels;
  auto gens = symmetrize(*group, resolve_generators(*group, use), out.notes);
  out.metric = std::make_shared<const LeftInvariantMetric>(LeftInvariantMetric::word(group, gens));
  out.group = std::move(group);
  return out;
}

GroupInstance build_product(const GroupSpec& spec, std::size_t order_budget) {
  if (!spec.left || !spec.right) throw InputError("product group needs two factors");
  auto lhs = build(*spec.left, order_budget);
  auto rhs = build(*spec.right, order_budget);
  const std::size_t n1 = lhs.group->order(), n2 = rhs.group->order();
  const std::size_t order = n1 * n2;
  std::vector<Element> table(order * order);
  std::vector<std::string> labels;
  for (std::size_t x = 0; x < order; ++x) {
    labels.push_back("(" + lhs.group->label(static_cast<Element>(x / n2)) + "," +
                     rhs.group->label(static_cast<Element>(x % n2)) + ")");
  }
  for (std::size_t x = 0; x < order; ++x) {
    for (std::size_t y = 0; y < order; ++y) {
      const auto a = lhs.group->mul(static_cast<Element>(x / n2), static_cast<Element>(y / n2));
      const auto b = rhs.group->mul(static_cast<Element>(x % n2), static_cast<Element>(y % n2));
      table[x * order + y] = static_cast<Element>(a * n2 + b);
    }
  }
  auto group = std::make_shared<const FiniteGroup>(std::move(table), std::move(labels));
  GroupInstance out;
  for (auto& n : lhs.notes) out.notes.push_back("left factor: " + n);
  for (auto& n : rhs.notes) out.notes.push_back("right factor: " + n);
  if (!spec.generators.empty()) {
    auto word = with_word_metric(group, spec.generators, {});
    word.notes.insert(word.notes.begin(), out.notes.begin(), out.notes.end());
    return word;
  }
  auto combine = [&](const Rational& u, const Rational& v) {
    return spec.combine == GroupSpec::Combine::max ? std::max(u, v) : u + v;
  };
  if (lhs.metric->norm_based() && rhs.metric->norm_based()) {
    std::vector<Rational> norm(order);
    for (std::size_t x = 0; x < order; ++x) {
      norm[x] = combine(lhs.metric->norm(static_cast<Element>(x / n2)),
                        rhs.metric->norm(static_cast<Element>(x % n2)));
    }
    out.metric = std::make_shared<const LeftInvariantMetric>(LeftInvariantMetric::from_norm(group, std::move(norm)));
  } else {
    std::vector<Rational> matrix(order * order);
    for (std::size_t x = 0; x < order; ++x)
      for (std::size_t y = 0; y < order; ++y)
        matrix[x * order + y] =
            combine(lhs.metric->dist(static_cast<Element>(x / n2), static_cast<Element>(y / n2)),
                    rhs.metric->dist(static_cast<Element>(x % n2), static_cast<Element>(y % n2)));
    out.metric = std::make_shared<const LeftInvariantMetric>(LeftInvariantMetric::from_matrix(group, std::move(matrix)));
  }
  out.group = std::move(group);
  return out;
}

GroupInstance build_explicit(const GroupSpec& spec) {
  const std::size_t n = spec.table.size();
  std::vector<Element> flat;
  flat.reserve(n * n);
  for (const auto& row : spec.table) {
    if (row.size() != n) throw InputError("explicit multiplication table is not square");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  if (!spec.labels.empty() && spec.labels.size() != n) throw InputError("explicit labels do not match table size");
  auto group = std::make_shared<const FiniteGroup>(std::move(flat), spec.labels);
  if (!spec.dist.empty()) {
    if (spec.dist.size() != n) throw InputError("explicit distance matrix does not match table size");
    std::vector<Rational> matrix;
    matrix.reserve(n * n);
    for (const auto& row : spec.dist) {
      if (row.size() != n) throw InputError("explicit distance matrix is not square");
      matrix.insert(matrix.end(), row.begin(), row.end());
    }
    GroupInstance out;
    out.metric = std::make_shared<const LeftInvariantMetric>(LeftInvariantMetric::from_matrix(group, std::move(matrix)));
    out.group = std::move(group);
    return out;
  }
  if (spec.generators.empty()) throw InputError("explicit group needs a distance matrix or generators");
  return with_word_metric(std::move(group), spec.generators, {});
}

GroupInstance build(const GroupSpec& spec, std::size_t order_budget) {
  const auto predicted = spec.predicted_order();
  if (predicted == 0) throw InputError("group parameters must be positive: " + spec.describe());
  if (predicted > order_budget) {
    throw BudgetExceeded("group " + spec.describe() + " has order " + std::to_string(predicted) +
                         " above the budget " + std::to_string(order_budget));
  }
  switch (spec.kind) {
    case GroupSpec::Kind::cyclic: {
      const auto n = spec.param;
      std::vector<std::string> defaults{"1"};
      if (n > 1) defaults.push_back(std::to_string(n - 1));
      if (n == 1) defaults.clear();
      return with_word_metric(cyclic_group(n), spec.generators, defaults);
    }
    case GroupSpec::Kind::dihedral: {
      const auto n = spec.param;
      std::vector<std::string> defaults{"s0"};
      if (n > 1) {
        defaults.push_back("r1");
        defaults.push_back("r" + std::to_string(n - 1));
      }
      return with_word_metric(dihedral_group(n), spec.generators, defaults);
    }
    case GroupSpec::Kind::heisenberg: {
      const auto p = spec.param;
      if (p < 2) throw InputError("heisenberg(p) needs p >= 2");
      const auto m = std::to_string(p - 1);
      return with_word_metric(heisenberg_group(p), spec.generators,
                              {"(1,0,0)", "(" + m + ",0,0)", "(0,1,0)", "(0," + m + ",0)"});
    }
    case GroupSpec::Kind::product:
      return build_product(spec, order_budget);
    case GroupSpec::Kind::explicit_table:
      return build_explicit(spec);
  }
  throw InputError("unknown group kind");
}

}  // namespace

LeftInvariantMetric::LeftInvariantMetric(std::shared_ptr<const FiniteGroup> group, std::vector<Rational> norm,
                                         std::vector<Rational> matrix)
    : group_(std::move(group)), norm_(std::move(norm)), matrix_(std::move(matrix)) {}

LeftInvariantMetric LeftInvariantMetric::word(std::shared_ptr<const FiniteGroup> group,
                                              const std::vector<Element>& generators) {
  const std::size_t n = group->order();
  std::vector<std::int64_t> depth(n, -1);
  std::deque<Element> queue{group->identity()};
  depth[group->identity()] = 0;
  while (!queue.empty()) {
    const auto x = queue.front();
    queue.pop_front();
    for (auto s : generators) {
      const auto y = group->mul(x, s);
      if (depth[y] < 0) {
        depth[y] = depth[x] + 1;
        queue.push_back(y);
      }
    }
  }
  std::vector<Rational> norm(n);
  for (std::size_t g = 0; g < n; ++g) {
    if (depth[g] < 0) {
      throw InputError("generators do not generate the group (element '" +
                       group->label(static_cast<Element>(g)) + "' unreachable)");
    }
    norm[g] = Rational(depth[g]);
  }
  return {std::move(group), std::move(norm), {}};
}

LeftInvariantMetric LeftInvariantMetric::from_norm(std::shared_ptr<const FiniteGroup> group,
                                                   std::vector<Rational> norm) {
  if (norm.size() != group->order()) throw InputError("norm vector does not match group order");
  return {std::move(group), std::move(norm), {}};
}

LeftInvariantMetric LeftInvariantMetric::from_matrix(std::shared_ptr<const FiniteGroup> group,
                                                     std::vector<Rational> matrix) {
  const auto n = group->order();
  if (matrix.size() != n * n) throw InputError("distance matrix does not match group order");
  return {std::move(group), {}, std::move(matrix)};
}

Rational LeftInvariantMetric::dist(Element x, Element y) const {
  if (matrix_.empty()) return norm_[group_->mul(group_->inv(x), y)];
  return matrix_[static_cast<std::size_t>(x) * group_->order() + y];
}

Rational LeftInvariantMetric::diameter() const {
  Rational best(0);
  const auto n = static_cast<Element>(group_->order());
  if (matrix_.empty()) {
    for (const auto& v : norm_) best = std::max(best, v);
  } else {
    for (Element x = 0; x < n; ++x)
      for (Element y = 0; y < n; ++y) best = std::max(best, dist(x, y));
  }
  return best;
}

GSet LeftInvariantMetric::ball(const Rational& r) const {
  GSet out(group_);
  const auto n = static_cast<Element>(group_->order());
  for (Element g = 0; g < n; ++g) {
    if (norm(g) <= r) out.insert(g);
  }
  return out;
}

GSet ball(const LeftInvariantMetric& metric, const Rational& r) {
  if (r < 0) throw InputError("ball radius must be non-negative");
  return metric.ball(r);
}

GroupSpec GroupSpec::cyclic(std::size_t n, std::vector<std::string> generators) {
  GroupSpec s;
  s.kind = Kind::cyclic;
  s.param = n;
  s.generators = std::move(generators);
  return s;
}

GroupSpec GroupSpec::dihedral(std::size_t n, std::vector<std::string> generators) {
  GroupSpec s = cyclic(n, std::move(generators));
  s.kind = Kind::dihedral;
  return s;
}

GroupSpec GroupSpec::heisenberg(std::size_t p, std::vector<std::string> generators) {
  GroupSpec s = cyclic(p, std::move(generators));
  s.kind = Kind::heisenberg;
  return s;
}

GroupSpec GroupSpec::product(GroupSpec a, GroupSpec b, Combine combine) {
  GroupSpec s;
  s.kind = Kind::product;
  s.left = std::make_shared<const GroupSpec>(std::move(a));
  s.right = std::make_shared<const GroupSpec>(std::move(b));
  s.combine = combine;
  return s;
}

GroupSpec GroupSpec::explicit_table(std::vector<std::vector<Element>> table, std::vector<std::string> labels,
                                    std::vector<std::vector<Rational>> dist, std::vector<std::string> generators) {
  GroupSpec s;
  s.kind = Kind::explicit_table;
  s.table = std::move(table);
  s.labels = std::move(labels);
  s.dist = std::move(dist);
  s.generators = std::move(generators);
  return s;
}

std::size_t GroupSpec::predicted_order() const {
  switch (kind) {
    case Kind::cyclic: return param;
    case Kind::dihedral: return 2 * param;
    case Kind::heisenberg: return param * param * param;
    case Kind::product:
      return (left && right) ? left->predicted_order() * right->predicted_order() : 0;
    case Kind::explicit_table: return table.size();
  }
  return 0;
}

std::string GroupSpec::describe() const {
  switch (kind) {
    case Kind::cyclic: return "cyclic(" + std::to_string(param) + ")";
    case Kind::dihedral: return "dihedral(" + std::to_string(param) + ")";
    case Kind::heisenberg: return "heisenberg(" + std::to_string(param) + ")";
    case Kind::product:
      return "product(" + (left ? left->describe() : "?") + ", " + (right ? right->describe() : "?") + ", " +
             (combine == Combine::max ? "max" : "sum") + ")";
    case Kind::explicit_table: return "explicit(" + std::to_string(table.size()) + ")";
  }
  return "?";
}

GroupInstance make_group(const GroupSpec& spec, std::size_t order_budget) { return build(spec, order_budget); }

Certificate validate_structure(const LeftInvariantMetric& metric, const GSet& a, std::int64_t ell,
                               const Rational& r) {
  const auto& g = metric.group();
  if (a.group_ptr() != metric.group_ptr()) throw InputError("A is not a subset of the metric's group");
  if (ell < 1) throw InputError("Lipschitz constant must be a positive integer");
  Certificate cert("group_core.validate_structure", "d(xa, ya) <= l d(x, y) for a in A, x, y in D_r");
  cert.inputs = {{"A", fingerprint(a)}, {"ell", ell}, {"r", to_string(r)}, {"order", g.order()}};
  const auto n = static_cast<Element>(g.order());

  auto pair = [&](Element x, Element y) { return Json{{"x", x}, {"y", y}}; };

  if (metric.norm_based()) {
    std::vector<Rational> norms(n);
    for (Element x = 0; x < n; ++x) norms[x] = metric.norm(x);
    const auto s = scale(norms);
    Json bad = nullptr;
    for (Element x = 0; x < n && bad.is_null(); ++x) {
      if (s.values[x] < 0) bad = {{"g", x}, {"d(1,g)", to_string(norms[x])}};
    }
    cert.check("non_negative", bad.is_null(), bad);
    bad = nullptr;
    for (Element x = 0; x < n && bad.is_null(); ++x) {
      if ((s.values[x] == 0) != (x == g.identity())) bad = {{"g", x}, {"d(1,g)", to_string(norms[x])}};
    }
    cert.check("identity_of_indiscernibles", bad.is_null(), bad);
    bad = nullptr;
    for (Element x = 0; x < n && bad.is_null(); ++x) {
      if (s.values[x] != s.values[g.inv(x)]) bad = pair(g.identity(), x);
    }
    cert.check("symmetry", bad.is_null(), bad);
    bad = nullptr;
    // d(x, z) <= d(x, y) + d(y, z) reduces to |gh| <= |g| + |h| under left invariance.
    for (Element x = 0; x < n && bad.is_null(); ++x) {
      const auto row = g.row(x);
      for (Element y = 0; y < n; ++y) {
        if (s.values[row[y]] > s.values[x] + s.values[y]) {
          bad = {{"x", g.identity()}, {"y", x}, {"z", row[y]}};
          break;
        }
      }
    }
    cert.check("triangle_inequality", bad.is_null(), bad);
    cert.check("left_invariance", true);
    cert.note("left invariance holds by construction: d(x, y) = d(1, x^-1 y)");
  } else {
    const bool exhaustive = n <= kExhaustiveMatrixChecks;
    std::mt19937_64 rng(kMetricSampleSeed);
    Json bad = nullptr;
    for (Element x = 0; x < n && bad.is_null(); ++x)
      for (Element y = 0; y < n && bad.is_null(); ++y)
        if (metric.dist(x, y) < 0) bad = pair(x, y);
    cert.check("non_negative", bad.is_null(), bad);
    bad = nullptr;
    for (Element x = 0; x < n && bad.is_null(); ++x)
      for (Element y = 0; y < n && bad.is_null(); ++y)
        if ((metric.dist(x, y) == Rational(0)) != (x == y)) bad = pair(x, y);
    cert.check("identity_of_indiscernibles", bad.is_null(), bad);
    bad = nullptr;
    for (Element x = 0; x < n && bad.is_null(); ++x)
      for (Element y = x + 1; y < n && bad.is_null(); ++y)
        if (metric.dist(x, y) != metric.dist(y, x)) bad = pair(x, y);
    cert.check("symmetry", bad.is_null(), bad);

    Json tri = nullptr;
    Json inv = nullptr;
    auto test = [&](Element x, Element y, Element z) {
      if (tri.is_null() && metric.dist(x, z) > metric.dist(x, y) + metric.dist(y, z)) {
        tri = {{"x", x}, {"y", y}, {"z", z}};
      }
      // (g, x, y) with d(gx, gy) != d(x, y)
      if (inv.is_null() && metric.dist(g.mul(x, y), g.mul(x, z)) != metric.dist(y, z)) {
        inv = {{"g", x}, {"x", y}, {"y", z}};
      }
    };
    if (exhaustive) {
      for (Element x = 0; x < n; ++x)
        for (Element y = 0; y < n; ++y)
          for (Element z = 0; z < n; ++z) test(x, y, z);
    } else {
      for (std::size_t k = 0; k < kSampledTriples; ++k) {
        test(static_cast<Element>(rng() % n), static_cast<Element>(rng() % n), static_cast<Element>(rng() % n));
      }
      cert.note("triangle inequality and left invariance sampled on " + std::to_string(kSampledTriples) +
                " seeded triples");
    }
    cert.check("triangle_inequality", tri.is_null(), tri);
    cert.check("left_invariance", inv.is_null(), inv);
  }

  // Lipschitz: the largest ratio d(xa, ya) / d(x, y) over a ∈ A, x ≠ y in D_r.
  const GSet d = metric.ball(r);
  Rational max_ratio(0);
  Json argmax = nullptr;
  Json violation = nullptr;
  auto consider = [&](Element x, Element y, Element el, const Rational& num, const Rational& den) {
    const Rational ratio = num / den;
    if (ratio > max_ratio) {
      max_ratio = ratio;
      argmax = {{"a", el}, {"x", x}, {"y", y}};
    }
    if (violation.is_null() && num > Rational(ell) * den) violation = {{"a", el}, {"x", x}, {"y", y}};
  };
  if (metric.norm_based()) {
    // d(xa, ya) = |a⁻¹ (x⁻¹y) a|; every quotient u = x⁻¹y with x, y ∈ D_r is realized.
    const GSet quotients = product_set(inverse_set(d), d);
    const auto ds = d.elements();
    auto realize = [&](Element u) {
      for (auto x : ds) {
        if (d.contains(g.mul(x, u))) return std::pair{x, g.mul(x, u)};
      }
      return std::pair{g.identity(), u};
    };
    a.for_each([&](Element el) {
      quotients.for_each([&](Element u) {
        if (u == g.identity()) return;
        const Rational num = metric.norm(g.conj(el, u));
        const Rational den = metric.norm(u);
        if (num / den > max_ratio || (violation.is_null() && num > Rational(ell) * den)) {
          auto [x, y] = realize(u);
          consider(x, y, el, num, den);
        }
      });
    });
  } else {
    const auto ds = d.elements();
    a.for_each([&](Element el) {
      for (auto x : ds)
        for (auto y : ds) {
          if (x == y) continue;
          const Rational den = metric.dist(x, y);
          if (den <= 0) continue;
          consider(x, y, el, metric.dist(g.mul(x, el), g.mul(y, el)), den);
        }
    });
  }
  const std::int64_t least_ell = std::max<std::int64_t>(1, ceil(max_ratio));
  cert.check("lipschitz", violation.is_null(), violation);
  cert.values["ball_size"] = d.size();
  cert.values["max_ratio"] = to_string(max_ratio);
  cert.values["least_ell"] = least_ell;
  if (!argmax.is_null()) cert.values["max_ratio_at"] = argmax;
  return cert;
}

}  // namespace rough
