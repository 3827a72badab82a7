#include "rough/approximate.hpp"

#include <functional>

#include "rough/errors.hpp"

namespace rough {

namespace {

constexpr std::size_t kExactCoverCandidates = 24;

Json containment(const std::string& name, bool holds) { return {{"containment", name}, {"verified", holds}}; }

/// Smallest subfamily of `pieces` covering `target`, if one of size ≤ k exists.
std::optional<std::vector<std::size_t>> exact_cover(const std::vector<GSet::Bits>& pieces,
                                                    const GSet::Bits& target, std::size_t k) {
  for (std::size_t size = 0; size <= std::min(k, pieces.size()); ++size) {
    std::vector<std::size_t> pick;
    std::function<bool(std::size_t, const GSet::Bits&)> go = [&](std::size_t from, const GSet::Bits& left) {
      if (left.none()) return true;
      if (pick.size() == size) return false;
      for (std::size_t c = from; c < pieces.size(); ++c) {
        pick.push_back(c);
        if (go(c + 1, left - pieces[c])) return true;
        pick.pop_back();
      }
      return false;
    };
    if (go(0, target)) return pick;
  }
  return std::nullopt;
}

}  // namespace

ApproximateResult is_rough_approximate(const GSet& a, std::int64_t k, const GSet& z) {
  if (k < 0) throw InputError("is_rough_approximate: K must be non-negative");
  const auto& gp = a.group_ptr();
  ApproximateResult out{false, true, {GSet(gp), k, z, Json::array()}, Certificate{}};
  Certificate cert("approximate.is_rough_approximate", "A^2 ⊆ E A Z with |E| ≤ K");
  cert.inputs = {{"A", to_json(a)}, {"K", k}, {"Z", to_json(z)}};
  if (!is_symmetric(a)) cert.note("A is not symmetric");
  if (!is_symmetric(z)) cert.note("Z is not symmetric");

  const GSet a2 = product_set(a, a);
  const GSet az = product_set(a, z);
  const GSet candidates = product_set(a2, inverse_set(az));
  const auto cand = candidates.elements();
  std::vector<GSet::Bits> pieces;
  for (auto e : cand) pieces.push_back(translate_set(e, az).bits());

  // Greedy by gain.
  GSet::Bits left = a2.bits();
  std::vector<Element> chosen;
  while (left.any()) {
    std::size_t best = cand.size();
    std::size_t gain = 0;
    for (std::size_t c = 0; c < cand.size(); ++c) {
      const auto here = (pieces[c] & left).count();
      if (here > gain) {
        gain = here;
        best = c;
      }
    }
    if (best == cand.size()) break;
    chosen.push_back(cand[best]);
    left -= pieces[best];
  }
  GSet e(gp, chosen);
  cert.values["greedy_E"] = to_json(e);
  cert.values["greedy_size"] = e.size();
  cert.values["candidates"] = cand.size();

  if (static_cast<std::int64_t>(e.size()) > k) {
    if (cand.size() <= kExactCoverCandidates) {
      const auto pick = exact_cover(pieces, a2.bits(), static_cast<std::size_t>(k));
      if (pick) {
        e = GSet(gp);
        for (auto c : *pick) e.insert(cand[c]);
        cert.note("greedy cover exceeded K; exact search found a smaller cover");
      } else {
        cert.note("no cover with at most K translates exists (exact search)");
      }
    } else {
      out.exact = false;
      cert.note("greedy cover exceeded K and the instance is too large for exact search; answer is a lower bound");
    }
  }

  const bool covers = a2.is_subset_of(product_set(product_set(e, a), z));
  out.holds = covers && static_cast<std::int64_t>(e.size()) <= k;
  out.witness.e = e;
  out.witness.containments.push_back(containment("A^2 ⊆ E A Z", covers));
  cert.values["E"] = to_json(e);
  cert.values["exact"] = out.exact;
  cert.values["holds"] = out.holds;
  cert.values["containments"] = out.witness.containments;
  if (static_cast<std::int64_t>(e.size()) <= k) {
    cert.check("cover verified by products", covers);
  } else {
    cert.note("no witness claimed: the best cover found uses " + std::to_string(e.size()) + " translates");
  }
  out.certificate = std::move(cert);
  return out;
}

std::pair<GSet, Certificate> rough_ruzsa_cover(const ThickeningChain& chain, std::size_t i,
                                               const RuzsaContext& context) {
  if (i + 3 >= chain.size()) {
    throw InputError("rough_ruzsa_cover: chain has " + std::to_string(chain.size()) + " sets, index " +
                     std::to_string(i) + " needs " + std::to_string(i + 4));
  }
  const GSet& a = chain.base();
  if (!is_symmetric(a)) throw InputError("rough_ruzsa_cover: A must be symmetric");
  const auto& g = a.group();
  const GSet& t0 = chain.at(i);
  const GSet& t2 = chain.at(i + 2);
  const GSet& t3 = chain.at(i + 3);

  PowerTable pa(a);
  const GSet a2 = pa(2);
  const GSet a3 = pa(3);
  const GSet at3 = product_set(a, t3);
  const GSet w = product_set(at3, inverse_set(a));
  const GSet w_sym = w | inverse_set(w);

  // gA ∩ eAT = ∅ and eA ∩ gAT = ∅ iff e⁻¹g ∉ W ∪ W⁻¹ with W = A·T·A⁻¹.
  auto clash = [&](Element e, Element h) { return w_sym.contains(g.mul(g.inv(e), h)); };
  std::vector<Element> chosen;
  a3.for_each([&](Element h) {
    for (auto e : chosen)
      if (clash(e, h)) return;
    chosen.push_back(h);
  });
  GSet e(a.group_ptr(), chosen);

  Certificate cert("approximate.rough_ruzsa_cover",
                   "E ⊆ A^3 separated modulo T_(i+3), A^3 ⊆ E A^2 T_(i+2), (A^2)^2 ⊆ E^2 A^2 T_i");
  cert.inputs = {{"A", to_json(a)}, {"chain_index", i}};
  cert.values["E"] = to_json(e);
  cert.values["size"] = e.size();

  Json sep = nullptr;
  for (std::size_t x = 0; x < chosen.size() && sep.is_null(); ++x)
    for (std::size_t y = 0; y < chosen.size(); ++y)
      if (x != y && translate_set(chosen[x], a).intersects(translate_set(chosen[y], at3))) {
        sep = {{"e", chosen[x]}, {"f", chosen[y]}};
        break;
      }
  cert.check("eA ∩ fA T_(i+3) = ∅ for distinct e, f", sep.is_null(), sep);

  Json extendable = nullptr;
  (a3 - e).for_each([&](Element h) {
    if (!extendable.is_null()) return;
    bool hit = false;
    for (auto x : chosen) {
      if (translate_set(h, a).intersects(translate_set(x, at3)) ||
          translate_set(x, a).intersects(translate_set(h, at3))) {
        hit = true;
        break;
      }
    }
    if (!hit) extendable = {{"g", h}};
  });
  cert.check("E maximal in A^3", extendable.is_null(), extendable);

  const GSet ea = product_set(e, a);
  const GSet eat3a = product_set(product_set(ea, t3), a);
  const GSet ea2t2 = product_set(product_set(e, a2), t2);
  cert.check("A^3 ⊆ E A T_(i+3) A", a3.is_subset_of(eat3a));
  cert.check("E A T_(i+3) A ⊆ E A^2 T_(i+2)", eat3a.is_subset_of(ea2t2));
  cert.check("A^3 ⊆ E A^2 T_(i+2)", a3.is_subset_of(ea2t2));
  const GSet e2 = product_set(e, e);
  cert.check("(A^2)^2 ⊆ E^2 A^2 T_i", pa(4).is_subset_of(product_set(product_set(e2, a2), t0)));

  RoughMeasureSpec spec;
  spec.index = i + 3;
  spec.mode = context.mode;
  spec.budget = context.budget;
  const auto mu = RoughMeasure::for_chain(context.metric, chain, spec);
  const Rational mu_a4 = mu(pa(4));
  const Rational mu_union = mu(ea);
  const std::int64_t bound = floor(mu_a4);
  cert.values["mu_(i+3)(A^4)"] = to_string(mu_a4);
  cert.values["K_effective"] = to_string(mu_a4);
  cert.values["mu_(i+3)(E A)"] = to_string(mu_union);
  cert.values["measure"] = mu.describe();
  cert.check("|E| ≤ floor(mu_(i+3)(A^4))", static_cast<std::int64_t>(e.size()) <= bound,
             Json{{"E", e.size()}, {"bound", bound}});
  cert.check("mu_(i+3)(∪ eA) = |E|", mu_union == Rational(static_cast<std::int64_t>(e.size())),
             Json{{"mu", to_string(mu_union)}, {"E", e.size()}});
  return {std::move(e), std::move(cert)};
}

PowerBound power_bound_propagation(const ThickeningChain& chain, std::size_t i, std::size_t m,
                                   const RuzsaContext& context) {
  if (m < 2) throw InputError("power_bound_propagation: m must be at least 2");
  (void)chain.at(i);
  const GSet& a = chain.base();
  const auto& gp = a.group_ptr();
  PowerTable pa(a);
  const GSet a2 = pa(2);

  Certificate cert("approximate.power_bound_propagation", "A^m ⊆ E A^2 T_j and mu_i(A^m) ≤ |E| mu_i(A^2 T_j)");
  cert.inputs = {{"A", to_json(a)}, {"chain_index", i}, {"m", m}};

  GSet e = GSet::identity_set(gp);
  std::size_t j = chain.last_index();
  if (m >= 3) {
    // A^k ⊆ E₁^{k−2} A² T_{c+8−2k}: each extra factor of A costs two levels.
    const std::size_t c = m >= 4 ? 2 * m - 8 : 0;
    if (c + 3 >= chain.size()) {
      throw InputError("power_bound_propagation: m = " + std::to_string(m) + " needs chain index " +
                       std::to_string(c + 3) + " but the chain has " + std::to_string(chain.size()) + " sets");
    }
    auto [e1, ruzsa] = rough_ruzsa_cover(chain, c, context);
    cert.merge(ruzsa, "ruzsa");
    cert.values["E_1"] = to_json(e1);
    cert.values["ruzsa_index"] = c;
    Json steps = Json::array();
    GSet ek = e1;
    std::size_t jk = c + 2;
    for (std::size_t k = 3;; ++k) {
      const bool holds = pa(k).is_subset_of(product_set(product_set(ek, a2), chain.at(jk)));
      const std::string name = "A^" + std::to_string(k) + " ⊆ E_1^" + std::to_string(k - 2) + " A^2 T_" +
                               std::to_string(jk);
      steps.push_back(containment(name, holds));
      cert.check(name, holds);
      if (k == m) break;
      ek = product_set(ek, e1);
      jk -= 2;
    }
    cert.values["containments"] = steps;
    e = ek;
    j = jk;
  }

  const GSet a2tj = product_set(a2, chain.at(j));
  const bool holds = pa(m).is_subset_of(product_set(e, a2tj));
  cert.check("A^m ⊆ E A^2 T_j", holds);

  RoughMeasureSpec spec;
  spec.index = i;
  spec.mode = context.mode;
  spec.budget = context.budget;
  const auto mu = RoughMeasure::for_chain(context.metric, chain, spec);
  const Rational lhs = mu(pa(m));
  const Rational bound = Rational(static_cast<std::int64_t>(e.size())) * mu(a2tj);
  cert.values["E"] = to_json(e);
  cert.values["j"] = j;
  cert.values["mu_i(A^m)"] = to_string(lhs);
  cert.values["bound"] = to_string(bound);
  cert.check("mu_i(A^m) ≤ |E| mu_i(A^2 T_j)", lhs <= bound, Json{{"lhs", to_string(lhs)}, {"rhs", to_string(bound)}});
  return {lhs, bound, std::move(e), j, std::move(cert)};
}

}  // namespace rough
