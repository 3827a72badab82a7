#include "rough/measure.hpp"

#include <mutex>
#include <random>
#include <unordered_map>

#include <boost/functional/hash.hpp>

#include "rough/errors.hpp"

namespace rough {

namespace {

constexpr std::size_t kMaxRecordedCounterexamples = 5;

struct BitsHash {
  std::size_t operator()(const GSet::Bits& b) const noexcept { return boost::hash_value(b); }
};

/// Deterministic Bernoulli draws from mt19937_64 (identical on every platform).
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

GSet random_subset(const std::vector<Element>& universe, const std::shared_ptr<const FiniteGroup>& group,
                   std::mt19937_64& rng, double density) {
  const double p = density > 0 ? density : static_cast<double>(1 + rng() % 5) / 8.0;
  GSet out(group);
  for (auto e : universe) {
    if (unit(rng) < p) out.insert(e);
  }
  return out;
}

struct AxiomTally {
  std::size_t tested = 0;
  std::size_t failures = 0;
  Json examples = Json::array();

  void record(bool ok, Json witness) {
    ++tested;
    if (ok) return;
    ++failures;
    if (examples.size() < kMaxRecordedCounterexamples) examples.push_back(std::move(witness));
  }
  [[nodiscard]] Json summary() const { return {{"tested", tested}, {"failures", failures}}; }
};

}  // namespace

// ---------------------------------------------------------------- chain

ThickeningChain::ThickeningChain(std::vector<GSet> sets, std::vector<Rational> radii, GSet base)
    : sets_(std::move(sets)), radii_(std::move(radii)), base_(std::move(base)) {
  if (sets_.empty()) throw InputError("thickening chain must have at least one set");
  for (const auto& s : sets_) {
    if (s.group_ptr() != base_.group_ptr()) throw InputError("chain sets and base live in different groups");
  }
}

ThickeningChain ThickeningChain::from_radii(const LeftInvariantMetric& metric, std::vector<Rational> radii,
                                            GSet base) {
  if (radii.empty()) throw InputError("thickening chain needs at least one radius");
  std::vector<GSet> sets;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (radii[k] < 0) throw InputError("chain radius " + to_string(radii[k]) + " is negative");
    if (k > 0 && radii[k] > radii[k - 1]) {
      throw InputError("chain radii must be non-increasing: r_" + std::to_string(k - 1) + " = " +
                       to_string(radii[k - 1]) + " < r_" + std::to_string(k) + " = " + to_string(radii[k]));
    }
    sets.push_back(metric.ball(radii[k]));
  }
  return {std::move(sets), std::move(radii), std::move(base)};
}

ThickeningChain ThickeningChain::from_sets(std::vector<GSet> sets, GSet base) {
  return {std::move(sets), {}, std::move(base)};
}

const GSet& ThickeningChain::at(std::size_t i) const {
  if (i >= sets_.size()) {
    throw InputError("chain index " + std::to_string(i) + " out of range (chain has " +
                     std::to_string(sets_.size()) + " sets)");
  }
  return sets_[i];
}

std::optional<Rational> ThickeningChain::radius(std::size_t i) const {
  if (i >= radii_.size()) return std::nullopt;
  return radii_[i];
}

Certificate ThickeningChain::validate() const {
  Certificate cert("rough_measure.chain", "T_i symmetric, T_{i+1}^2 ⊆ T_i, T_{i+1}^A ⊆ T_i");
  cert.inputs["A"] = fingerprint(base_);
  Json sizes = Json::array();
  for (const auto& s : sets_) sizes.push_back(s.size());
  cert.values["sizes"] = sizes;
  if (!radii_.empty()) {
    Json rs = Json::array();
    for (const auto& r : radii_) rs.push_back(to_string(r));
    cert.inputs["radii"] = rs;
  }
  const auto& g = base_.group();
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    const auto& t = sets_[i];
    Json bad = nullptr;
    if (!t.contains(g.identity())) {
      bad = {{"missing_identity", g.identity()}};
    } else {
      t.for_each([&](Element x) {
        if (bad.is_null() && !t.contains(g.inv(x))) bad = {{"element", x}, {"inverse", g.inv(x)}};
      });
    }
    cert.check("T_" + std::to_string(i) + " symmetric", bad.is_null(), bad);
  }
  const auto as = base_.elements();
  for (std::size_t i = 0; i + 1 < sets_.size(); ++i) {
    const auto& big = sets_[i];
    const auto& small = sets_[i + 1];
    Json bad = nullptr;
    small.for_each([&](Element x) {
      if (bad.is_null() && !big.contains(x)) bad = {{"element", x}};
    });
    cert.check("T_" + std::to_string(i + 1) + " ⊆ T_" + std::to_string(i), bad.is_null(), bad);

    bad = nullptr;
    const auto ss = small.elements();
    for (auto s : ss) {
      for (auto t : ss) {
        if (!big.contains(g.mul(s, t))) {
          bad = {{"s", s}, {"t", t}, {"st", g.mul(s, t)}};
          break;
        }
      }
      if (!bad.is_null()) break;
    }
    cert.check("T_" + std::to_string(i + 1) + "^2 ⊆ T_" + std::to_string(i), bad.is_null(), bad);

    bad = nullptr;
    for (auto a : as) {
      for (auto t : ss) {
        if (!big.contains(g.conj(a, t))) {
          bad = {{"a", a}, {"t", t}, {"a^-1 t a", g.conj(a, t)}};
          break;
        }
      }
      if (!bad.is_null()) break;
    }
    cert.check("T_" + std::to_string(i + 1) + "^A ⊆ T_" + std::to_string(i), bad.is_null(), bad);
  }
  return cert;
}

// ---------------------------------------------------------------- packing

PackingResult packing_number(const LeftInvariantMetric& metric, const GSet& y, const Rational& r, SearchMode mode,
                             std::uint64_t budget) {
  if (y.group_ptr() != metric.group_ptr()) throw InputError("packing set is not in the metric's group");
  if (r < 0) throw InputError("packing radius must be non-negative");
  const auto& g = metric.group();
  const auto members = y.elements();
  std::vector<std::size_t> index(g.order(), 0);
  for (std::size_t k = 0; k < members.size(); ++k) index[members[k]] = k;

  ConflictGraph graph(members.size());
  if (metric.norm_based()) {
    const auto near = metric.ball(r).elements();
    for (std::size_t k = 0; k < members.size(); ++k) {
      const auto row = g.row(members[k]);
      for (auto b : near) {
        const auto z = row[b];
        if (z != members[k] && y.contains(z)) graph.add_edge(k, index[z]);
      }
    }
  } else {
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        if (metric.dist(members[a], members[b]) <= r) graph.add_edge(a, b);
  }

  const auto mis = maximum_independent_set(graph, mode, budget);
  PackingResult out{static_cast<std::int64_t>(mis.vertices.size()), GSet(y.group_ptr()), mis.exact,
                    static_cast<std::int64_t>(mis.upper_bound), mis.nodes};
  for (auto v : mis.vertices) out.witness.insert(members[v]);

  // Witness verification: inside Y and pairwise r-separated.
  const auto w = out.witness.elements();
  for (std::size_t a = 0; a < w.size(); ++a)
    for (std::size_t b = a + 1; b < w.size(); ++b)
      if (metric.dist(w[a], w[b]) <= r) throw std::logic_error("packing witness is not separated");
  if (!out.witness.is_subset_of(y)) throw std::logic_error("packing witness escapes Y");
  return out;
}

// ---------------------------------------------------------------- measure

struct RoughMeasure::State {
  RoughMeasureSpec::Kind kind = RoughMeasureSpec::Kind::packing;
  std::shared_ptr<const LeftInvariantMetric> metric;
  Rational radius;
  GSet base;
  SearchMode mode = SearchMode::exact;
  std::uint64_t budget = kDefaultNodeBudget;
  std::int64_t normaliser = 0;
  std::mutex mutex;
  std::unordered_map<GSet::Bits, std::int64_t, BitsHash> cache;

  explicit State(GSet b) : base(std::move(b)) {}
};

RoughMeasure::RoughMeasure(std::shared_ptr<State> state) : state_(std::move(state)) {
  if (state_->base.empty()) throw InputError("measure normaliser is zero: the base set A is empty");
  state_->normaliser = raw(state_->base);
  if (state_->normaliser <= 0) throw InputError("measure normaliser is zero");
}

RoughMeasure RoughMeasure::packing(std::shared_ptr<const LeftInvariantMetric> metric, Rational radius, GSet base,
                                   SearchMode mode, std::uint64_t budget) {
  if (!metric) throw InputError("packing measure needs a metric");
  if (base.group_ptr() != metric->group_ptr()) throw InputError("measure base is not in the metric's group");
  auto state = std::make_shared<State>(std::move(base));
  state->kind = RoughMeasureSpec::Kind::packing;
  state->metric = std::move(metric);
  state->radius = radius;
  state->mode = mode;
  state->budget = budget;
  return RoughMeasure(std::move(state));
}

RoughMeasure RoughMeasure::counting(GSet base) {
  auto state = std::make_shared<State>(std::move(base));
  state->kind = RoughMeasureSpec::Kind::counting;
  return RoughMeasure(std::move(state));
}

RoughMeasure RoughMeasure::for_chain(std::shared_ptr<const LeftInvariantMetric> metric,
                                     const ThickeningChain& chain, const RoughMeasureSpec& spec) {
  (void)chain.at(spec.index);
  if (spec.kind == RoughMeasureSpec::Kind::counting || !chain.has_radii()) return counting(chain.base());
  return packing(std::move(metric), *chain.radius(spec.index), chain.base(), spec.mode, spec.budget);
}

std::int64_t RoughMeasure::raw(const GSet& y) const {
  if (y.group_ptr() != state_->base.group_ptr()) throw InputError("measured set is in a different group");
  if (state_->kind == RoughMeasureSpec::Kind::counting) return static_cast<std::int64_t>(y.size());
  {
    std::lock_guard lock(state_->mutex);
    if (auto it = state_->cache.find(y.bits()); it != state_->cache.end()) return it->second;
  }
  const auto result = packing_number(*state_->metric, y, state_->radius, state_->mode, state_->budget);
  if (state_->mode == SearchMode::exact && !result.exact) {
    throw BudgetExceeded("exact packing search exceeded " + std::to_string(state_->budget) +
                         " nodes on set " + fingerprint(y) + " (greedy lower bound " +
                         std::to_string(result.value) + ", upper bound " + std::to_string(result.upper_bound) +
                         ")");
  }
  std::lock_guard lock(state_->mutex);
  state_->cache.emplace(y.bits(), result.value);
  return result.value;
}

Rational RoughMeasure::operator()(const GSet& y) const { return Rational(raw(y), state_->normaliser); }

std::int64_t RoughMeasure::normaliser() const noexcept { return state_->normaliser; }

bool RoughMeasure::exact_mode() const noexcept {
  return state_->kind == RoughMeasureSpec::Kind::counting || state_->mode == SearchMode::exact;
}

const GSet& RoughMeasure::base() const noexcept { return state_->base; }

Json RoughMeasure::describe() const {
  Json out;
  if (state_->kind == RoughMeasureSpec::Kind::counting) {
    out["kind"] = "counting";
  } else {
    out["kind"] = "packing";
    out["radius"] = to_string(state_->radius);
    out["mode"] = state_->mode == SearchMode::exact ? "exact" : "greedy";
    out["budget"] = state_->budget;
  }
  out["base"] = fingerprint(state_->base);
  out["normaliser"] = state_->normaliser;
  return out;
}

Rational mu(std::shared_ptr<const LeftInvariantMetric> metric, const ThickeningChain& chain,
            const RoughMeasureSpec& spec, const GSet& y) {
  return RoughMeasure::for_chain(std::move(metric), chain, spec)(y);
}

// ---------------------------------------------------------------- axioms

Certificate check_additivity_pair(const RoughMeasure& measure, const GSet& y, const GSet& z, const GSet& t) {
  Certificate cert("rough_measure.additivity", "Y ∩ ZT = ∅ implies mu(Y ∪ Z) = mu(Y) + mu(Z)");
  cert.inputs = {{"Y", to_json(y)}, {"Z", to_json(z)}, {"T", fingerprint(t)}};
  const bool separated = !y.intersects(product_set(z, t));
  const bool separated_other = !product_set(y, t).intersects(z);
  cert.values["Y ∩ ZT empty"] = separated;
  cert.values["YT ∩ Z empty"] = separated_other;
  const auto lhs = measure(y | z);
  const auto rhs = measure(y) + measure(z);
  cert.values["mu(Y ∪ Z)"] = to_string(lhs);
  cert.values["mu(Y) + mu(Z)"] = to_string(rhs);
  if (separated) {
    cert.check("additive", lhs == rhs, Json{{"lhs", to_string(lhs)}, {"rhs", to_string(rhs)}});
  } else {
    cert.note("premise Y ∩ ZT = ∅ does not hold; additivity not asserted");
  }
  return cert;
}

Certificate check_measure_axioms(const RoughMeasure& measure, const ThickeningChain& chain, std::size_t i,
                                 const AxiomCheckOptions& options) {
  const auto& group_ptr = measure.base().group_ptr();
  const auto& g = *group_ptr;
  const GSet& t = chain.at(i);
  const GSet universe = options.universe ? *options.universe : GSet::full(group_ptr);
  const auto u = universe.elements();

  Certificate cert("rough_measure.check_measure_axioms",
                   "increasing, subadditive, additive modulo T_i, invariant under left translation");
  cert.inputs = {{"measure", measure.describe()},
                 {"chain_index", i},
                 {"T", fingerprint(t)},
                 {"universe", fingerprint(universe)},
                 {"seed", options.seed},
                 {"trials", options.trials},
                 {"density", options.density},
                 {"all_translates", options.all_translates}};
  if (!measure.exact_mode()) cert.note("greedy packing values are lower bounds; failures may be artefacts");

  AxiomTally monotone, subadditive, additive, invariant;
  std::size_t convention_mismatch = 0;
  std::mt19937_64 rng(options.seed);

  auto trial = [&](std::size_t k, const GSet& y, const GSet& z) {
    const auto my = measure(y);
    const auto mz = measure(z);
    const auto mu_union = measure(y | z);
    const auto mu_meet = measure(y & z);
    auto w = [&](const char* what) {
      return Json{{"trial", k}, {"relation", what}, {"Y", to_json(y)}, {"Z", to_json(z)}};
    };
    monotone.record(mu_meet <= my, w("mu(Y ∩ Z) <= mu(Y)"));
    monotone.record(my <= mu_union, w("mu(Y) <= mu(Y ∪ Z)"));
    monotone.record(mz <= mu_union, w("mu(Z) <= mu(Y ∪ Z)"));
    subadditive.record(mu_union <= my + mz, w("mu(Y ∪ Z) <= mu(Y) + mu(Z)"));

    // Y' = Y \ ZT satisfies Y' ∩ ZT = ∅.
    const GSet zt = product_set(z, t);
    const GSet yp = y - zt;
    if (product_set(yp, t).intersects(z)) ++convention_mismatch;
    const auto lhs = measure(yp | z);
    const auto rhs = measure(yp) + measure(z);
    additive.record(lhs == rhs, Json{{"trial", k},
                                     {"Y", to_json(yp)},
                                     {"Z", to_json(z)},
                                     {"mu(Y ∪ Z)", to_string(lhs)},
                                     {"mu(Y) + mu(Z)", to_string(rhs)}});

    if (options.all_translates) {
      for (Element h = 0; h < g.order(); ++h) {
        const auto m = measure(translate_set(h, y));
        invariant.record(m == my, Json{{"trial", k}, {"g", h}, {"Y", to_json(y)}, {"mu(gY)", to_string(m)}});
      }
    } else {
      const auto h = static_cast<Element>(rng() % g.order());
      const auto m = measure(translate_set(h, y));
      invariant.record(m == my, Json{{"trial", k}, {"g", h}, {"Y", to_json(y)}, {"mu(gY)", to_string(m)}});
    }
  };

  const std::size_t usize = u.size();
  const bool exhaustive = usize < 16 && (std::size_t{1} << (2 * usize)) <= options.trials;
  if (exhaustive) {
    const std::size_t count = std::size_t{1} << usize;
    std::size_t k = 0;
    for (std::size_t a = 0; a < count; ++a) {
      for (std::size_t b = 0; b < count; ++b) {
        GSet y(group_ptr), z(group_ptr);
        for (std::size_t e = 0; e < usize; ++e) {
          if ((a >> e) & 1U) y.insert(u[e]);
          if ((b >> e) & 1U) z.insert(u[e]);
        }
        trial(k++, y, z);
      }
    }
    cert.note("all " + std::to_string(count * count) + " pairs of subsets of the universe enumerated");
  } else {
    for (std::size_t k = 0; k < options.trials; ++k) {
      GSet y = random_subset(u, group_ptr, rng, options.density);
      GSet z = random_subset(u, group_ptr, rng, options.density);
      trial(k, y, z);
    }
  }

  cert.check("monotone", monotone.failures == 0, monotone.examples.empty() ? Json(nullptr) : monotone.examples);
  cert.check("subadditive", subadditive.failures == 0,
             subadditive.examples.empty() ? Json(nullptr) : subadditive.examples);
  cert.check("additive_modulo_T", additive.failures == 0,
             additive.examples.empty() ? Json(nullptr) : additive.examples);
  cert.check("left_invariant", invariant.failures == 0,
             invariant.examples.empty() ? Json(nullptr) : invariant.examples);
  cert.values["monotone"] = monotone.summary();
  cert.values["subadditive"] = subadditive.summary();
  cert.values["additive_modulo_T"] = additive.summary();
  cert.values["left_invariant"] = invariant.summary();
  // Y ∩ ZT = ∅ and YT ∩ Z = ∅ agree whenever T is symmetric.
  cert.values["pairs_where_YT_meets_Z"] = convention_mismatch;
  return cert;
}

// ---------------------------------------------------------------- union bound

UnionBound union_lower_bound(const RoughMeasure& measure, const std::vector<GSet>& sets, const GSet& t) {
  if (!measure.exact_mode()) throw InputError("union_lower_bound requires an exact-mode measure");
  if (sets.empty()) throw InputError("union_lower_bound needs at least one set");
  Certificate cert("rough_measure.union_lower_bound",
                   "mu(∪S_k) >= Σ mu(S_k) - Σ_{k<l} min{mu(S_k ∩ S_l T), mu(S_k T ∩ S_l)}");
  Json in = Json::array();
  GSet all(t.group_ptr());
  Rational sum(0);
  std::vector<GSet> thick;
  for (const auto& s : sets) {
    in.push_back(to_json(s));
    all |= s;
    sum += measure(s);
    thick.push_back(product_set(s, t));
  }
  cert.inputs = {{"sets", in}, {"T", fingerprint(t)}, {"measure", measure.describe()}};
  Rational overlap(0);
  Json pairs = Json::array();
  for (std::size_t k = 0; k < sets.size(); ++k) {
    for (std::size_t l = k + 1; l < sets.size(); ++l) {
      const auto left = measure(sets[k] & thick[l]);
      const auto right = measure(thick[k] & sets[l]);
      const auto m = std::min(left, right);
      overlap += m;
      pairs.push_back({{"k", k}, {"l", l}, {"min", to_string(m)}});
    }
  }
  UnionBound out;
  out.lhs = measure(all);
  out.rhs = sum - overlap;
  out.slack = out.lhs - out.rhs;
  cert.values["lhs"] = to_string(out.lhs);
  cert.values["rhs"] = to_string(out.rhs);
  cert.values["slack"] = to_string(out.slack);
  cert.values["pair_overlaps"] = pairs;
  cert.check("slack >= 0", out.slack >= 0,
             out.slack >= 0 ? Json(nullptr) : Json{{"slack", to_string(out.slack)}});
  out.certificate = std::move(cert);
  return out;
}

}  // namespace rough
