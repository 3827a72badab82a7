#include "rough/thickness.hpp"

#include <boost/functional/hash.hpp>

#include "rough/errors.hpp"

namespace rough {

namespace {

bool quotient_hits(const FiniteGroup& g, const GSet& y, Element a, Element b) {
  return y.contains(g.mul(g.inv(a), b)) || y.contains(g.mul(g.inv(b), a));
}

Json report_json(const ThicknessReport& r) {
  return {{"t_star", r.t_star}, {"witness", to_json(r.witness)}, {"exact", r.exact},
          {"upper_bound", r.upper_bound}, {"nodes", r.nodes}};
}

std::int64_t exact_t_star(const GSet& y, const GSet& x, std::uint64_t budget) {
  const auto r = min_thickness(y, x, SearchMode::exact, budget);
  if (!r.exact) {
    throw BudgetExceeded("thickness search exceeded " + std::to_string(budget) + " nodes (Y " + fingerprint(y) +
                         ", X " + fingerprint(x) + ")");
  }
  return r.t_star;
}

}  // namespace

ThicknessReport min_thickness(const GSet& y, const GSet& x, SearchMode mode, std::uint64_t budget) {
  if (x.empty()) throw InputError("min_thickness: X must be nonempty");
  if (x.group_ptr() != y.group_ptr()) throw InputError("min_thickness: X and Y are in different groups");
  const auto& g = x.group();
  const auto xs = x.elements();
  ConflictGraph graph(xs.size());
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (std::size_t b = a + 1; b < xs.size(); ++b)
      if (quotient_hits(g, y, xs[a], xs[b])) graph.add_edge(a, b);

  const auto mis = maximum_independent_set(graph, mode, budget);
  ThicknessReport out{static_cast<std::int64_t>(mis.vertices.size()), GSet(x.group_ptr()), mis.exact,
                      static_cast<std::int64_t>(mis.upper_bound), mis.nodes};
  for (auto v : mis.vertices) out.witness.insert(xs[v]);
  return out;
}

bool is_thick(const GSet& y, const GSet& x, std::int64_t t, std::uint64_t budget) {
  if (t >= static_cast<std::int64_t>(x.size())) return true;
  return exact_t_star(y, x, budget) <= t;
}

std::pair<GSet, Certificate> translate_cover(const GSet& y, const GSet& x, std::uint64_t budget) {
  if (x.empty()) throw InputError("translate_cover: X must be nonempty");
  if (!is_symmetric(y)) throw InputError("translate_cover: Y must be symmetric (1 ∈ Y = Y^-1)");
  const auto& g = x.group();
  GSet e(x.group_ptr());
  std::vector<Element> chosen;
  x.for_each([&](Element c) {
    for (auto d : chosen)
      if (quotient_hits(g, y, d, c)) return;
    chosen.push_back(c);
    e.insert(c);
  });

  Certificate cert("thickness.translate_cover", "E ⊆ X maximal Y-free, X ⊆ EY, |E| ≤ t_star(Y, X)");
  cert.inputs = {{"Y", to_json(y)}, {"X", to_json(x)}};
  cert.values["E"] = to_json(e);
  cert.values["size"] = e.size();

  const GSet covered = product_set(e, y);
  Json miss = nullptr;
  x.for_each([&](Element c) {
    if (miss.is_null() && !covered.contains(c)) miss = {{"uncovered", c}};
  });
  cert.check("X ⊆ EY", miss.is_null(), miss);

  Json clash = nullptr;
  for (std::size_t a = 0; a < chosen.size() && clash.is_null(); ++a)
    for (std::size_t b = a + 1; b < chosen.size(); ++b)
      if (quotient_hits(g, y, chosen[a], chosen[b])) {
        clash = {{"e", chosen[a]}, {"f", chosen[b]}};
        break;
      }
  cert.check("E is Y-free", clash.is_null(), clash);

  Json extendable = nullptr;
  (x - e).for_each([&](Element c) {
    if (!extendable.is_null()) return;
    bool blocked = false;
    for (auto d : chosen) blocked = blocked || quotient_hits(g, y, d, c);
    if (!blocked) extendable = {{"element", c}};
  });
  cert.check("E maximal", extendable.is_null(), extendable);

  const auto report = min_thickness(y, x, SearchMode::exact, budget);
  cert.values["t_star"] = report.t_star;
  if (report.exact) {
    cert.check("|E| ≤ t_star", static_cast<std::int64_t>(e.size()) <= report.t_star,
               Json{{"E", e.size()}, {"t_star", report.t_star}});
  } else {
    cert.note("thickness search hit its budget; |E| compared with the clique-cover bound instead");
    cert.check("|E| ≤ t_star upper bound", static_cast<std::int64_t>(e.size()) <= report.upper_bound,
               Json{{"E", e.size()}, {"upper_bound", report.upper_bound}});
  }
  return {std::move(e), std::move(cert)};
}

Certificate thickness_duality(const GSet& y, const GSet& x, std::uint64_t budget) {
  Certificate cert("thickness.duality", "|E| ≤ t_star(Y, X) and t_star(Y^-1 Y, X) ≤ |E|");
  cert.inputs = {{"Y", to_json(y)}, {"X", to_json(x)}};
  auto [e, cover] = translate_cover(y, x, budget);
  cert.merge(cover, "cover");
  const auto c = static_cast<std::int64_t>(e.size());
  const auto t_star = exact_t_star(y, x, budget);
  const GSet yy = product_set(inverse_set(y), y);
  const auto t_yy = exact_t_star(yy, x, budget);
  cert.values["cover_size"] = c;
  cert.values["t_star"] = t_star;
  cert.values["t_star(Y^-1 Y)"] = t_yy;
  cert.check("cover size ≤ t_star", c <= t_star, Json{{"cover", c}, {"t_star", t_star}});
  cert.check("t_star(Y^-1 Y) ≤ cover size", t_yy <= c, Json{{"cover", c}, {"t_star(Y^-1 Y)", t_yy}});
  return cert;
}

Certificate intersection_thickness(const GSet& y1, const GSet& y2, const GSet& x, std::uint64_t budget) {
  Certificate cert("thickness.intersection", "t_star(Y1 ∩ Y2, X) ≤ |X|");
  cert.inputs = {{"Y1", to_json(y1)}, {"Y2", to_json(y2)}, {"X", to_json(x)}};
  const auto r1 = min_thickness(y1, x, SearchMode::exact, budget);
  const auto r2 = min_thickness(y2, x, SearchMode::exact, budget);
  const auto r12 = min_thickness(y1 & y2, x, SearchMode::exact, budget);
  cert.values["t1"] = report_json(r1);
  cert.values["t2"] = report_json(r2);
  cert.values["t_intersection"] = report_json(r12);
  cert.check("finite", r12.t_star <= static_cast<std::int64_t>(x.size()),
             Json{{"t_intersection", r12.t_star}, {"|X|", x.size()}});
  if (!(r1.exact && r2.exact && r12.exact)) cert.note("a thickness search hit its budget; values are lower bounds");
  return cert;
}

// ---------------------------------------------------------------- 𝒯-rank

std::size_t TrankEvaluator::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = boost::hash_value(k.bits);
  boost::hash_combine(h, k.t);
  boost::hash_combine(h, k.n);
  return h;
}

TrankEvaluator::TrankEvaluator(const ThickeningChain& chain, std::size_t i, TrankContext context,
                               std::size_t max_rank, std::uint64_t budget)
    : t_(chain.at(i)),
      a_m_(power(context.a, context.m)),
      a_2m_(power(context.a, 2 * context.m)),
      max_rank_(max_rank),
      budget_(budget) {
  if (context.m == 0) throw InputError("trank: m must be positive");
  if (context.a.group().order() > kMaxOrder) {
    throw InputError("trank: exact evaluation limited to groups of order ≤ " + std::to_string(kMaxOrder) +
                     " (got " + std::to_string(context.a.group().order()) + ")");
  }
  if (t_.group_ptr() != context.a.group_ptr()) throw InputError("trank: chain and A are in different groups");
}

std::int64_t TrankEvaluator::saturate(std::int64_t t) const {
  const auto cap = static_cast<std::int64_t>(a_m_.size());
  return t > cap ? cap : t;
}

void TrankEvaluator::require_domain(const GSet& x, std::int64_t t, std::size_t n) const {
  if (t < 1) throw InputError("trank: t must be a positive integer");
  if (n > max_rank_) {
    throw InputError("trank: rank " + std::to_string(n) + " exceeds the cap " + std::to_string(max_rank_));
  }
  if (x.group_ptr() != a_m_.group_ptr()) throw InputError("trank: X is in a different group");
  if (!x.is_subset_of(a_m_)) throw InputError("trank: X must be a subset of A^m");
}

bool TrankEvaluator::member(const GSet& x, std::int64_t t, std::size_t n) {
  require_domain(x, t, n);
  return member_unchecked(x, saturate(t), n);
}

GSet TrankEvaluator::directed_stable_set(const GSet& x, std::int64_t t, std::size_t n) {
  require_domain(x, t, n);
  return stable_unchecked(x, saturate(t), n);
}

bool TrankEvaluator::member_unchecked(const GSet& x, std::int64_t t, std::size_t n) {
  if (x.empty()) return false;
  if (n == 0) return true;
  Key key{x.bits(), t, n};
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  if (++evaluations_ > budget_) {
    throw BudgetExceeded("trank evaluation exceeded " + std::to_string(budget_) + " memo entries");
  }
  const GSet s = stable_unchecked(x, t, n - 1);
  const bool result = is_thick(s, a_m_, t);
  memo_.emplace(std::move(key), result);
  return result;
}

GSet TrankEvaluator::stable_unchecked(const GSet& x, std::int64_t t, std::size_t n) {
  const auto& g = x.group();
  const auto t2 = saturate(t * t);
  const GSet xt = product_set(x, t_);
  GSet out(x.group_ptr());
  a_2m_.for_each([&](Element h) {
    if (out.contains(h)) return;
    const GSet left = x & translate_set(h, xt);
    if (!member_unchecked(left, t2, n)) return;
    const GSet right = x & translate_set(g.inv(h), xt);
    if (!member_unchecked(right, t2, n)) return;
    // The condition is symmetric in h and h⁻¹, and A²ᵐ is symmetric.
    out.insert(h);
    if (a_2m_.contains(g.inv(h))) out.insert(g.inv(h));
  });
  return out;
}

bool trank_member(const GSet& x, const ThickeningChain& chain, std::size_t i, std::int64_t t, std::size_t n,
                  const TrankContext& context, std::uint64_t budget) {
  TrankEvaluator ev(chain, i, context, TrankEvaluator::kDefaultMaxRank, budget);
  return ev.member(x, t, n);
}

GSet directed_stable_set(const GSet& x, const ThickeningChain& chain, std::size_t i, std::int64_t t,
                         std::size_t n, const TrankContext& context, std::uint64_t budget) {
  TrankEvaluator ev(chain, i, context, TrankEvaluator::kDefaultMaxRank, budget);
  return ev.directed_stable_set(x, t, n);
}

}  // namespace rough
