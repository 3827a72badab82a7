#include "rough/harness.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "rough/approximate.hpp"
#include "rough/errors.hpp"
#include "rough/stabilizer.hpp"
#include "rough/thickness.hpp"

namespace rough {

namespace {

constexpr std::size_t kMaxExamples = 5;

// ---------------------------------------------------------------- JSON helpers

Rational json_rational(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number_float()) return parse_rational(j.dump());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw InputError("expected a rational (integer or \"p/q\" string), got " + j.dump());
}

std::int64_t param_int(const Json& p, const char* key, std::int64_t fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number_integer()) throw InputError(std::string("parameter '") + key + "' must be an integer");
  return p[key].get<std::int64_t>();
}

std::size_t param_size(const Json& p, const char* key, std::size_t fallback) {
  const auto v = param_int(p, key, static_cast<std::int64_t>(fallback));
  if (v < 0) throw InputError(std::string("parameter '") + key + "' must be non-negative");
  return static_cast<std::size_t>(v);
}

std::optional<Rational> param_rational(const Json& p, const char* key) {
  if (!p.contains(key) || p[key].is_null()) return std::nullopt;
  return json_rational(p[key]);
}

double param_double(const Json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_number()) throw InputError(std::string("parameter '") + key + "' must be a number");
  return p[key].get<double>();
}

bool param_bool(const Json& p, const char* key, bool fallback) {
  if (!p.contains(key)) return fallback;
  if (!p[key].is_boolean()) throw InputError(std::string("parameter '") + key + "' must be a boolean");
  return p[key].get<bool>();
}

SearchMode parse_mode(const std::string& s) {
  if (s == "exact") return SearchMode::exact;
  if (s == "greedy") return SearchMode::greedy;
  throw InputError("unknown search mode '" + s + "' (expected exact or greedy)");
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// ---------------------------------------------------------------- scenario parsing

struct Collector {
  std::vector<std::string> errors;
  void add(const std::string& where, const std::string& what) { errors.push_back(where + ": " + what); }
};

GroupSpec parse_group(const Json& j, const std::string& where, Collector& c) {
  GroupSpec spec;
  if (!j.is_object()) {
    c.add(where, "group must be an object");
    return spec;
  }
  if (!j.contains("kind") || !j["kind"].is_string()) {
    c.add(where, "missing group kind");
    return spec;
  }
  const auto kind = j["kind"].get<std::string>();
  std::vector<std::string> gens;
  if (j.contains("generators")) {
    if (!j["generators"].is_array()) {
      c.add(where + ".generators", "must be an array of labels");
    } else {
      for (const auto& g : j["generators"]) gens.push_back(g.is_string() ? g.get<std::string>() : g.dump());
    }
  }
  auto positive = [&](const char* key) -> std::size_t {
    if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<std::int64_t>() <= 0) {
      c.add(where + "." + key, "must be a positive integer");
      return 1;
    }
    return j[key].get<std::size_t>();
  };
  if (kind == "cyclic") return GroupSpec::cyclic(positive("n"), gens);
  if (kind == "dihedral") return GroupSpec::dihedral(positive("n"), gens);
  if (kind == "heisenberg") return GroupSpec::heisenberg(positive("p"), gens);
  if (kind == "product") {
    GroupSpec l = parse_group(j.value("left", Json()), where + ".left", c);
    GroupSpec r = parse_group(j.value("right", Json()), where + ".right", c);
    const auto comb = j.value("combine", std::string("max"));
    if (comb != "max" && comb != "sum") c.add(where + ".combine", "must be max or sum");
    auto spec2 = GroupSpec::product(std::move(l), std::move(r),
                                    comb == "sum" ? GroupSpec::Combine::sum : GroupSpec::Combine::max);
    spec2.generators = gens;
    return spec2;
  }
  if (kind == "table") {
    std::vector<std::vector<Element>> table;
    std::vector<std::string> labels;
    std::vector<std::vector<Rational>> dist;
    try {
      table = j.at("table").get<std::vector<std::vector<Element>>>();
      if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
      if (j.contains("dist")) {
        for (const auto& row : j["dist"]) {
          std::vector<Rational> r;
          for (const auto& v : row) r.push_back(json_rational(v));
          dist.push_back(std::move(r));
        }
      }
    } catch (const std::exception& e) {
      c.add(where, std::string("malformed table group: ") + e.what());
      return spec;
    }
    return GroupSpec::explicit_table(std::move(table), std::move(labels), std::move(dist), gens);
  }
  c.add(where + ".kind", "unknown group kind '" + kind + "'");
  return spec;
}

Scenario parse_impl(const Json& doc, const std::string& source, const std::string& where, Collector& c) {
  Scenario s;
  s.source = source;
  if (!doc.is_object()) {
    c.add(where, "scenario must be a JSON object");
    return s;
  }
  s.name = doc.value("name", source);
  auto uint_field = [&](const char* key, std::uint64_t& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_unsigned() && !(doc[key].is_number_integer() && doc[key].get<std::int64_t>() >= 0)) {
      c.add(where + "." + key, "must be a non-negative integer");
      return;
    }
    out = doc[key].get<std::uint64_t>();
  };
  uint_field("seed", s.seed);
  uint_field("budget", s.budget);
  std::uint64_t ob = s.order_budget;
  uint_field("order_budget", ob);
  s.order_budget = static_cast<std::size_t>(ob);
  if (s.budget == 0) c.add(where + ".budget", "must be positive");
  if (doc.contains("scale")) {
    if (doc["scale"].is_number_integer()) s.scale = doc["scale"].get<std::int64_t>();
    else c.add(where + ".scale", "must be an integer");
  }

  const bool has_family = doc.contains("family");
  if (has_family) {
    const auto& fam = doc["family"];
    if (fam.is_array()) {
      for (std::size_t k = 0; k < fam.size(); ++k) {
        auto sub = parse_impl(fam[k], source, where + ".family[" + std::to_string(k) + "]", c);
        if (!sub.scale) sub.scale = static_cast<std::int64_t>(k + 1);
        s.family.push_back(std::move(sub));
      }
    } else if (fam.is_object() && fam.contains("cyclic_powers")) {
      const auto& cp = fam["cyclic_powers"];
      const auto base = cp.value("base", std::int64_t{4});
      std::vector<std::int64_t> scales;
      if (cp.contains("scales") && cp["scales"].is_array()) scales = cp["scales"].get<std::vector<std::int64_t>>();
      if (base < 2) c.add(where + ".family.cyclic_powers.base", "must be at least 2");
      if (scales.empty()) c.add(where + ".family.cyclic_powers.scales", "must be a nonempty integer array");
      for (auto m : scales)
        if (m < 1) c.add(where + ".family.cyclic_powers.scales", "scales must be positive");
      if (c.errors.empty()) s.family = cyclic_power_family(base, scales);
    } else {
      c.add(where + ".family", "must be an array of scales or {\"cyclic_powers\": {...}}");
    }
  }

  if (doc.contains("group")) {
    s.group = parse_group(doc["group"], where + ".group", c);
  } else if (!has_family) {
    c.add(where + ".group", "missing group");
  }
  if (doc.contains("A")) {
    s.a = doc["A"];
  } else if (!has_family) {
    c.add(where + ".A", "missing A");
  }

  if (doc.contains("chain")) {
    const auto& ch = doc["chain"];
    if (ch.is_object() && ch.contains("radii") && ch["radii"].is_array()) {
      for (std::size_t k = 0; k < ch["radii"].size(); ++k) {
        try {
          s.radii.push_back(json_rational(ch["radii"][k]));
        } catch (const InputError& e) {
          c.add(where + ".chain.radii[" + std::to_string(k) + "]", e.what());
        }
      }
      if (s.radii.empty()) c.add(where + ".chain.radii", "must be nonempty");
      for (std::size_t k = 0; k < s.radii.size(); ++k) {
        if (s.radii[k] < 0) c.add(where + ".chain.radii[" + std::to_string(k) + "]", "must be non-negative");
        if (k > 0 && !(s.radii[k] < s.radii[k - 1])) {
          c.add(where + ".chain.radii",
                "radii must be strictly decreasing: r_" + std::to_string(k) + " = " + to_string(s.radii[k]) +
                    " is not below r_" + std::to_string(k - 1) + " = " + to_string(s.radii[k - 1]));
        }
      }
    } else if (ch.is_object() && ch.contains("sets") && ch["sets"].is_array() && !ch["sets"].empty()) {
      for (const auto& set : ch["sets"]) s.chain_sets.push_back(set);
    } else {
      c.add(where + ".chain", "must be {\"radii\": [...]} or {\"sets\": [...]}");
    }
  }

  if (doc.contains("lipschitz")) {
    const auto& lp = doc["lipschitz"];
    if (!lp.is_object()) {
      c.add(where + ".lipschitz", "must be an object {ell, r}");
    } else {
      if (lp.contains("ell")) {
        if (lp["ell"].is_number_integer() && lp["ell"].get<std::int64_t>() >= 1) s.ell = lp["ell"].get<std::int64_t>();
        else c.add(where + ".lipschitz.ell", "must be a positive integer");
      }
      if (lp.contains("r")) {
        try {
          s.lipschitz_radius = json_rational(lp["r"]);
        } catch (const InputError& e) {
          c.add(where + ".lipschitz.r", e.what());
        }
      }
    }
  }
  if (doc.contains("ell")) {
    if (doc["ell"].is_number_integer() && doc["ell"].get<std::int64_t>() >= 1) s.ell = doc["ell"].get<std::int64_t>();
    else c.add(where + ".ell", "must be a positive integer");
  }
  if (doc.contains("K")) {
    if (!doc["K"].is_array()) {
      c.add(where + ".K", "must be an array of rationals");
    } else {
      for (std::size_t k = 0; k < doc["K"].size(); ++k) {
        try {
          s.k_targets.push_back(json_rational(doc["K"][k]));
        } catch (const InputError& e) {
          c.add(where + ".K[" + std::to_string(k) + "]", e.what());
        }
      }
    }
  }
  if (doc.contains("measure")) {
    const auto& m = doc["measure"];
    const auto kind = m.value("kind", std::string("packing"));
    if (kind == "packing") s.measure = RoughMeasureSpec::Kind::packing;
    else if (kind == "counting") s.measure = RoughMeasureSpec::Kind::counting;
    else c.add(where + ".measure.kind", "must be packing or counting");
    try {
      s.mode = parse_mode(m.value("mode", std::string("exact")));
    } catch (const InputError& e) {
      c.add(where + ".measure.mode", e.what());
    }
  }
  if (doc.contains("operations")) {
    const auto& ops = doc["operations"];
    if (!ops.is_array()) {
      c.add(where + ".operations", "must be an array");
    } else {
      const auto& names = operation_names();
      for (std::size_t k = 0; k < ops.size(); ++k) {
        const auto& o = ops[k];
        const auto at = where + ".operations[" + std::to_string(k) + "]";
        if (!o.is_object() || !o.contains("op") || !o["op"].is_string()) {
          c.add(at, "each operation needs an \"op\" name");
          continue;
        }
        OperationSpec spec{o["op"].get<std::string>(), o};
        spec.params.erase("op");
        if (std::find(names.begin(), names.end(), spec.op) == names.end()) {
          c.add(at + ".op", "unknown operation '" + spec.op + "'");
          continue;
        }
        s.operations.push_back(std::move(spec));
      }
    }
  }
  return s;
}

// ---------------------------------------------------------------- operations

using OpFn = std::function<std::vector<Certificate>(const Context&, const Json&)>;

std::uint64_t op_seed(const Context& ctx, const Json& p) {
  return static_cast<std::uint64_t>(param_int(p, "seed", static_cast<std::int64_t>(ctx.scenario().seed)));
}

std::size_t default_index(const Context& ctx, const Json& p, bool last) {
  const std::size_t fallback = ctx.has_chain() && last ? ctx.chain().last_index() : 0;
  return param_size(p, "index", fallback);
}

/// A chain to read T_i from: the scenario's, or {1} when none is given.
ThickeningChain chain_or_trivial(const Context& ctx) {
  if (ctx.has_chain()) return ctx.chain();
  return ThickeningChain::from_sets({GSet::identity_set(ctx.group())}, ctx.a());
}

GSet random_subset(const GSet& universe, std::mt19937_64& rng, double density) {
  const double p = density > 0 ? density : static_cast<double>(1 + rng() % 5) / 8.0;
  GSet out(universe.group_ptr());
  universe.for_each([&](Element e) {
    if (unit(rng) < p) out.insert(e);
  });
  return out;
}

GSet random_symmetric(const GSet& universe, std::mt19937_64& rng, double density) {
  const auto& g = universe.group();
  const double p = density > 0 ? density : static_cast<double>(1 + rng() % 5) / 8.0;
  GSet out = GSet::identity_set(universe.group_ptr());
  universe.for_each([&](Element e) {
    if (e > g.inv(e) || !universe.contains(g.inv(e))) return;
    if (unit(rng) < p) {
      out.insert(e);
      out.insert(g.inv(e));
    }
  });
  return out;
}

struct Sweep {
  std::size_t runs = 0;
  std::size_t failures = 0;
  Json examples = Json::array();
  void add(const Certificate& c) {
    ++runs;
    if (c.verdict) return;
    ++failures;
    if (examples.size() < kMaxExamples) examples.push_back(c.to_json());
  }
  void finish(Certificate& cert, const std::string& what) const {
    cert.values["runs"] = runs;
    cert.values["failures"] = failures;
    cert.check(what, failures == 0, failures == 0 ? Json(nullptr) : examples);
  }
};

std::vector<Certificate> op_validate(const Context& ctx, const Json& p) {
  const auto ell = param_int(p, "ell", ctx.scenario().ell);
  Rational r;
  if (auto v = param_rational(p, "r")) r = *v;
  else if (ctx.scenario().lipschitz_radius) r = *ctx.scenario().lipschitz_radius;
  else if (!ctx.scenario().radii.empty()) r = ctx.scenario().radii.front();
  else r = ctx.metric().diameter();
  std::vector<Certificate> out;
  out.push_back(validate_structure(ctx.metric(), ctx.a(), ell, r));
  for (const auto& n : ctx.instance().notes) out.back().note(n);
  if (ctx.has_chain()) out.push_back(ctx.chain().validate());
  return out;
}

std::vector<Certificate> op_axioms(const Context& ctx, const Json& p) {
  const auto chain = chain_or_trivial(ctx);
  std::vector<std::size_t> indices;
  if (p.contains("index") && p["index"].is_number_integer()) {
    indices.push_back(param_size(p, "index", 0));
  } else {
    for (std::size_t i = 0; i < chain.size(); ++i) indices.push_back(i);
  }
  AxiomCheckOptions opt;
  opt.trials = param_size(p, "trials", opt.trials);
  opt.seed = op_seed(ctx, p);
  opt.density = param_double(p, "density", 0.0);
  opt.all_translates = param_bool(p, "all_translates", true);
  if (p.contains("universe")) opt.universe = ctx.set(p["universe"]);
  std::vector<Certificate> out;
  for (auto i : indices) {
    const auto mu = ctx.has_chain() ? ctx.measure(i) : RoughMeasure::counting(ctx.a());
    out.push_back(check_measure_axioms(mu, chain, i, opt));
  }
  return out;
}

std::vector<Certificate> op_union(const Context& ctx, const Json& p) {
  const auto chain = chain_or_trivial(ctx);
  const auto i = default_index(ctx, p, false);
  const auto mu = ctx.has_chain() ? ctx.measure(i) : RoughMeasure::counting(ctx.a());
  const GSet& t = chain.at(i);
  if (p.contains("sets")) {
    std::vector<GSet> sets;
    for (const auto& s : p["sets"]) sets.push_back(ctx.set(s));
    return {union_lower_bound(mu, sets, t).certificate};
  }
  const auto families = param_size(p, "families", 500);
  const auto max_sets = param_size(p, "max_sets", 4);
  if (max_sets < 1) throw InputError("union: max_sets must be at least 1");
  const auto density = param_double(p, "density", 0.0);
  const GSet universe = p.contains("universe") ? ctx.set(p["universe"]) : GSet::full(ctx.group());
  std::mt19937_64 rng(op_seed(ctx, p));
  Certificate cert("rough_measure.union_lower_bound",
                   "mu(∪S_k) >= Σ mu(S_k) - Σ_{k<l} min{mu(S_k ∩ S_l T), mu(S_k T ∩ S_l)}");
  cert.inputs = {{"chain_index", i},     {"families", families}, {"max_sets", max_sets},
                 {"seed", op_seed(ctx, p)}, {"universe", fingerprint(universe)}, {"measure", mu.describe()}};
  Sweep sweep;
  std::optional<Rational> min_slack;
  for (std::size_t f = 0; f < families; ++f) {
    const std::size_t n = 1 + rng() % max_sets;
    std::vector<GSet> sets;
    for (std::size_t k = 0; k < n; ++k) sets.push_back(random_subset(universe, rng, density));
    auto ub = union_lower_bound(mu, sets, t);
    if (!min_slack || ub.slack < *min_slack) min_slack = ub.slack;
    sweep.add(ub.certificate);
  }
  if (min_slack) cert.values["min_slack"] = to_string(*min_slack);
  sweep.finish(cert, "slack >= 0 on every family");
  return {cert};
}

std::vector<Certificate> op_thickness(const Context& ctx, const Json& p) {
  const auto budget = ctx.scenario().budget;
  if (p.contains("pairs")) {
    const auto pairs = param_size(p, "pairs", 500);
    const auto density = param_double(p, "density", 0.0);
    const GSet universe = p.contains("universe") ? ctx.set(p["universe"]) : GSet::full(ctx.group());
    std::mt19937_64 rng(op_seed(ctx, p));
    Certificate cert("thickness.duality", "|E| ≤ t_star(Y, X) and t_star(Y^-1 Y, X) ≤ |E|");
    cert.inputs = {{"pairs", pairs}, {"seed", op_seed(ctx, p)}, {"universe", fingerprint(universe)}};
    Sweep sweep;
    for (std::size_t k = 0; k < pairs; ++k) {
      const GSet y = random_symmetric(universe, rng, density);
      const GSet x = random_symmetric(universe, rng, density);
      sweep.add(thickness_duality(y, x, budget));
    }
    sweep.finish(cert, "duality holds on every pair");
    return {cert};
  }
  const GSet y = ctx.set(p.value("Y", Json("A")));
  const GSet x = ctx.set(p.value("X", Json{{"power", 2}}));
  const auto mode = parse_mode(p.value("mode", std::string("exact")));
  const auto report = min_thickness(y, x, mode, budget);
  Certificate cert("thickness.min_thickness", "Y is t-thick in X exactly when t ≥ t_star");
  cert.inputs = {{"Y", to_json(y)}, {"X", to_json(x)}, {"mode", mode == SearchMode::exact ? "exact" : "greedy"}};
  cert.values["t_star"] = report.t_star;
  cert.values["witness"] = to_json(report.witness);
  cert.values["exact"] = report.exact;
  cert.values["upper_bound"] = report.upper_bound;
  cert.budgets = {{"nodes", report.nodes}, {"node_budget", budget}};
  const auto& g = x.group();
  const auto w = report.witness.elements();
  bool free = report.witness.is_subset_of(x);
  for (std::size_t a = 0; a < w.size() && free; ++a)
    for (std::size_t b = a + 1; b < w.size(); ++b)
      if (y.contains(g.mul(g.inv(w[a]), w[b])) || y.contains(g.mul(g.inv(w[b]), w[a]))) free = false;
  cert.check("witness is a Y-free subset of X", free);
  if (!report.exact) cert.note("search not exact: t_star is a lower bound");
  std::vector<Certificate> out{cert};
  if (is_symmetric(y)) out.push_back(translate_cover(y, x, budget).second);
  return out;
}

std::vector<Certificate> op_stable_set(const Context& ctx, const Json& p) {
  const auto chain = chain_or_trivial(ctx);
  const auto i = default_index(ctx, p, true);
  const auto m = param_size(p, "m", 1);
  const auto mu = ctx.has_chain() ? ctx.measure(i) : RoughMeasure::counting(ctx.a());
  const GSet a_2m = power(ctx.a(), 2 * m);
  const Rational mu_2m = mu(a_2m);
  if (p.contains("samples")) {
    const auto samples = param_size(p, "samples", 200);
    std::vector<std::int64_t> ts = p.value("t_values", std::vector<std::int64_t>{4, 5, 6, 7, 8});
    const GSet a_m = power(ctx.a(), m);
    std::mt19937_64 rng(op_seed(ctx, p));
    Certificate cert("stabilizer.stable_set", "S(B) is t-thick in A^m and S(B) ⊆ B T B^-1");
    cert.inputs = {{"chain_index", i}, {"m", m}, {"samples", samples}, {"t_values", ts}, {"seed", op_seed(ctx, p)}};
    Sweep sweep;
    std::size_t rejected = 0;
    for (auto t : ts) {
      std::size_t got = 0;
      for (std::size_t attempt = 0; got < samples && attempt < samples * 200; ++attempt) {
        const GSet b = random_subset(a_m, rng, 0.0);
        if (b.empty() || mu(b) < Rational(2) * mu_2m / t) {
          ++rejected;
          continue;
        }
        ++got;
        sweep.add(stable_set(mu, chain, i, b, t, m).second);
      }
      if (got < samples) cert.note("t = " + std::to_string(t) + ": only " + std::to_string(got) + " admissible B found");
    }
    cert.values["rejected_draws"] = rejected;
    sweep.finish(cert, "every sampled S(B) is t-thick and inside B T B^-1");
    return {cert};
  }
  const GSet b = ctx.set(p.value("B", Json("A")));
  std::int64_t t = 0;
  if (p.contains("t")) {
    t = param_int(p, "t", 0);
  } else {
    t = ceil(Rational(2) * mu_2m / mu(b));
  }
  return {stable_set(mu, chain, i, b, t, m).second};
}

std::vector<Certificate> op_trank(const Context& ctx, const Json& p) {
  const auto chain = chain_or_trivial(ctx);
  const auto i = default_index(ctx, p, true);
  TrankContext tc{ctx.a(), param_size(p, "m", 1)};
  const auto max_rank = param_size(p, "max_rank", TrankEvaluator::kDefaultMaxRank);
  TrankEvaluator ev(chain, i, tc, max_rank, ctx.scenario().budget);
  const GSet x = ctx.set(p.value("X", Json("A")));
  const auto t = param_int(p, "t", 1);
  const auto n = param_size(p, "n", 1);
  Certificate cert("thickness.trank_member", "X ∈ T^t_(n+1) iff X nonempty and S^t_n(X) is t-thick in A^m");
  cert.inputs = {{"X", to_json(x)}, {"chain_index", i}, {"t", t}, {"n", n}, {"m", tc.m}, {"A", to_json(ctx.a())}};
  const bool member = ev.member(x, t, n);
  cert.values["member"] = member;
  if (n > 0) cert.values["S^t_(n-1)(X)"] = to_json(ev.directed_stable_set(x, t, n - 1));
  cert.values["S^t_n(X)"] = to_json(ev.directed_stable_set(x, t, n));
  cert.budgets = {{"evaluations", ev.evaluations()}, {"memo_entries", ev.memo_size()}};
  if (p.contains("expect")) {
    const bool expect = param_bool(p, "expect", true);
    cert.check("membership matches expectation", member == expect, Json{{"member", member}, {"expected", expect}});
  }
  return {cert};
}

IterationParams iteration_params(const Context& ctx, const Json& p) {
  IterationParams ip;
  ip.m = param_size(p, "m", 1);
  ip.r = param_size(p, "r", 2);
  ip.i = default_index(ctx, p, false);
  ip.K = param_rational(p, "K");
  ip.epsilon = param_rational(p, "epsilon");
  ip.max_iterations = param_size(p, "max_iterations", 0);
  ip.tuple_budget = static_cast<std::uint64_t>(param_size(p, "tuple_budget", ip.tuple_budget));
  ip.tuple_samples = param_size(p, "tuple_samples", ip.tuple_samples);
  ip.seed = op_seed(ctx, p);
  ip.node_budget = ctx.scenario().budget;
  return ip;
}

std::vector<Certificate> op_iterate(const Context& ctx, const Json& p) {
  const auto chain = chain_or_trivial(ctx);
  const auto ip = iteration_params(ctx, p);
  const auto mu = ctx.has_chain() ? ctx.measure(ip.i) : RoughMeasure::counting(ctx.a());
  const GSet b = ctx.set(p.value("B", Json("A")));
  auto res = square_iteration(mu, chain, b, ip);
  Json trace = Json::array();
  for (const auto& st : res.trace.steps) {
    Json row{{"X", to_json(st.x)}, {"S", to_json(st.s)}, {"t", st.t}, {"t_saturated", st.t_saturated}};
    Json fb = Json::array(), fa = Json::array();
    for (const auto& v : st.f_before) fb.push_back(to_string(v));
    for (const auto& v : st.f_after) fa.push_back(to_string(v));
    row["f_before"] = fb;
    if (st.g) {
      row["g"] = *st.g;
      row["k"] = *st.k;
      row["f_after"] = fa;
    }
    trace.push_back(row);
  }
  res.certificate.values["trace"] = trace;
  return {res.certificate};
}

std::vector<Certificate> op_core(const Context& ctx, const Json& p) {
  const auto chain = chain_or_trivial(ctx);
  CoreParams cp;
  cp.stages = param_size(p, "stages", cp.stages);
  cp.r = param_size(p, "r", cp.r);
  if (p.contains("index")) cp.i = param_size(p, "index", 0);
  if (p.contains("thickness_m")) cp.thickness_m = p["thickness_m"].get<std::vector<std::size_t>>();
  cp.tuple_budget = static_cast<std::uint64_t>(param_size(p, "tuple_budget", cp.tuple_budget));
  cp.tuple_samples = param_size(p, "tuple_samples", cp.tuple_samples);
  cp.seed = op_seed(ctx, p);
  cp.node_budget = ctx.scenario().budget;
  const auto i = cp.i.value_or(chain.last_index());
  const auto mu = ctx.has_chain() ? ctx.measure(i) : RoughMeasure::counting(ctx.a());
  return {bounded_core(mu, chain, cp).certificate};
}

RuzsaContext ruzsa_context(const Context& ctx) {
  RuzsaContext rc;
  if (ctx.scenario().measure == RoughMeasureSpec::Kind::packing) rc.metric = ctx.instance().metric;
  rc.mode = ctx.scenario().mode;
  rc.budget = ctx.scenario().budget;
  return rc;
}

ThickeningChain measured_chain(const Context& ctx) {
  if (!ctx.has_chain()) throw InputError("this operation needs a chain");
  if (ctx.scenario().measure == RoughMeasureSpec::Kind::counting && ctx.chain().has_radii()) {
    std::vector<GSet> sets;
    for (std::size_t k = 0; k < ctx.chain().size(); ++k) sets.push_back(ctx.chain().at(k));
    return ThickeningChain::from_sets(std::move(sets), ctx.a());
  }
  return ctx.chain();
}

std::vector<Certificate> op_ruzsa(const Context& ctx, const Json& p) {
  return {rough_ruzsa_cover(measured_chain(ctx), default_index(ctx, p, false), ruzsa_context(ctx)).second};
}

std::vector<Certificate> op_propagate(const Context& ctx, const Json& p) {
  return {power_bound_propagation(measured_chain(ctx), default_index(ctx, p, false), param_size(p, "m", 4),
                                  ruzsa_context(ctx))
              .certificate};
}

std::vector<Certificate> op_approximate(const Context& ctx, const Json& p) {
  std::int64_t k = 0;
  if (p.contains("K")) k = param_int(p, "K", 0);
  else if (!ctx.scenario().k_targets.empty()) k = floor(ctx.scenario().k_targets.front());
  else throw InputError("approximate: K is required");
  const GSet z = p.contains("Z") ? ctx.set(p["Z"]) : GSet::identity_set(ctx.group());
  auto res = is_rough_approximate(ctx.a(), k, z);
  if (p.contains("expect")) {
    const bool expect = param_bool(p, "expect", true);
    res.certificate.check("answer matches expectation", res.holds == expect,
                          Json{{"holds", res.holds}, {"expected", expect}});
  }
  return {res.certificate};
}

const std::map<std::string, OpFn>& operations() {
  static const std::map<std::string, OpFn> ops = {
      {"validate", op_validate},   {"axioms", op_axioms},   {"union", op_union},
      {"thickness", op_thickness}, {"stable-set", op_stable_set}, {"trank", op_trank},
      {"iterate", op_iterate},     {"core", op_core},       {"ruzsa", op_ruzsa},
      {"propagate", op_propagate}, {"approximate", op_approximate},
  };
  return ops;
}

}  // namespace

const std::vector<std::string>& operation_names() {
  static const std::vector<std::string> names = {"validate", "axioms", "union",     "thickness",
                                                 "stable-set", "trank", "iterate",  "core",
                                                 "ruzsa",    "propagate", "metric-seq", "approximate"};
  return names;
}

Scenario parse_scenario(const Json& doc, const std::string& source) {
  Collector c;
  Scenario s = parse_impl(doc, source, "scenario", c);
  if (!c.errors.empty()) {
    std::string msg = "invalid scenario " + source + ":";
    for (const auto& e : c.errors) msg += "\n  " + e;
    throw InputError(msg);
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("scenario " + path + " is not valid JSON: " + e.what());
  }
  return parse_scenario(doc, path);
}

// ---------------------------------------------------------------- context

namespace {

GSet resolve(const FiniteGroup& g, const std::shared_ptr<const FiniteGroup>& gp, const LeftInvariantMetric& metric,
             const GSet* a, const ThickeningChain* chain, const Json& spec);

Element resolve_element(const FiniteGroup& g, const Json& spec) {
  if (spec.is_number_integer()) {
    const auto v = spec.get<std::int64_t>();
    if (v < 0 || static_cast<std::size_t>(v) >= g.order()) {
      throw InputError("element index " + std::to_string(v) + " out of range for a group of order " +
                       std::to_string(g.order()));
    }
    return static_cast<Element>(v);
  }
  if (spec.is_string()) {
    if (auto e = g.find(spec.get<std::string>())) return *e;
    throw InputError("unknown element label '" + spec.get<std::string>() + "'");
  }
  throw InputError("an element is an index or a label, got " + spec.dump());
}

GSet resolve(const FiniteGroup& g, const std::shared_ptr<const FiniteGroup>& gp, const LeftInvariantMetric& metric,
             const GSet* a, const ThickeningChain* chain, const Json& spec) {
  if (spec.is_array()) {
    GSet out(gp);
    for (const auto& e : spec) out.insert(resolve_element(g, e));
    return out;
  }
  if (spec.is_string() && spec.get<std::string>() == "A") {
    if (!a) throw InputError("\"A\" cannot be used inside the definition of A");
    return *a;
  }
  if (spec.is_string() && spec.get<std::string>() == "G") return GSet::full(gp);
  if (spec.is_object()) {
    if (spec.contains("elements")) return resolve(g, gp, metric, a, chain, spec["elements"]);
    if (spec.contains("ball")) return metric.ball(json_rational(spec["ball"]));
    if (spec.contains("power")) {
      const GSet base = spec.contains("of") ? resolve(g, gp, metric, a, chain, spec["of"])
                                            : resolve(g, gp, metric, a, chain, Json("A"));
      const auto n = spec["power"].get<std::int64_t>();
      if (n < 0) throw InputError("power must be non-negative");
      return power(base, static_cast<std::size_t>(n));
    }
    if (spec.contains("generated")) return generated_closure(resolve(g, gp, metric, a, chain, spec["generated"]));
    if (spec.contains("T")) {
      if (!chain) throw InputError("{\"T\": i} needs a chain");
      return chain->at(spec["T"].get<std::size_t>());
    }
  }
  throw InputError("cannot interpret set description " + spec.dump());
}

GSet make_a(const GroupInstance& gi, const Json& spec) {
  if (spec.is_null()) throw InputError("scenario has no A");
  return resolve(*gi.group, gi.group, *gi.metric, nullptr, nullptr, spec);
}

}  // namespace

Context::Context(const Scenario& scenario)
    : scenario_(scenario),
      instance_(make_group(scenario.group, scenario.order_budget)),
      a_(make_a(instance_, scenario.a)) {
  if (!scenario_.radii.empty()) {
    chain_ = ThickeningChain::from_radii(*instance_.metric, scenario_.radii, a_);
  } else if (!scenario_.chain_sets.empty()) {
    std::vector<GSet> sets;
    for (const auto& s : scenario_.chain_sets) sets.push_back(set(s));
    chain_ = ThickeningChain::from_sets(std::move(sets), a_);
  }
}

const ThickeningChain& Context::chain() const {
  if (!chain_) throw InputError("scenario has no chain");
  return *chain_;
}

RoughMeasure Context::measure(std::size_t i) const {
  std::lock_guard lock(mutex_);
  if (auto it = measures_.find(i); it != measures_.end()) return it->second;
  RoughMeasureSpec spec{scenario_.measure, i, scenario_.mode, scenario_.budget};
  auto mu = chain_ ? RoughMeasure::for_chain(instance_.metric, *chain_, spec) : RoughMeasure::counting(a_);
  measures_.emplace(i, mu);
  return mu;
}

GSet Context::set(const Json& spec) const {
  return resolve(*instance_.group, instance_.group, *instance_.metric, &a_, chain_ ? &*chain_ : nullptr, spec);
}

Element Context::element(const Json& spec) const { return resolve_element(*instance_.group, spec); }

// ---------------------------------------------------------------- running

bool OperationResult::passed() const {
  if (!error_kind.empty()) return false;
  return std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.verdict; });
}

OperationResult run_operation(const Context& context, const OperationSpec& op) {
  OperationResult out{op, {}, {}, {}};
  const auto& ops = operations();
  const auto it = ops.find(op.op);
  try {
    if (it == ops.end()) throw InputError("operation '" + op.op + "' needs the metric-sequence runner");
    out.certificates = it->second(context, op.params);
  } catch (const BudgetExceeded& e) {
    out.error_kind = "budget";
    out.error = e.what();
  } catch (const InputError& e) {
    out.error_kind = "input";
    out.error = e.what();
  } catch (const Json::exception& e) {
    out.error_kind = "input";
    out.error = std::string("malformed parameter: ") + e.what();
  }
  return out;
}

OperationSpec default_operation(const Scenario& scenario, const std::string& op) {
  (void)scenario;
  return {op, Json::object()};
}

bool SuiteResult::any_error() const {
  return std::any_of(operations.begin(), operations.end(), [](const auto& r) { return !r.error_kind.empty(); });
}

bool SuiteResult::all_pass() const {
  return std::all_of(operations.begin(), operations.end(), [](const auto& r) { return r.passed(); });
}

int SuiteResult::exit_code() const {
  if (any_error()) return 2;
  return all_pass() ? 0 : 1;
}

SuiteResult run_suite(const Scenario& scenario_in, const RunOptions& options) {
  Scenario scenario = scenario_in;
  if (options.seed) scenario.seed = *options.seed;
  if (options.budget) scenario.budget = *options.budget;
  for (auto& s : scenario.family) {
    if (options.seed) s.seed = *options.seed;
    if (options.budget) s.budget = *options.budget;
  }

  std::vector<OperationSpec> ops;
  for (const auto& op : scenario.operations)
    if (options.only.empty() || op.op == options.only) ops.push_back(op);
  if (ops.empty() && !options.only.empty()) ops.push_back(default_operation(scenario, options.only));

  SuiteResult result;
  result.operations.resize(ops.size());
  std::unique_ptr<Context> context;
  std::string context_error, context_kind;
  const bool needs_context =
      std::any_of(ops.begin(), ops.end(), [](const OperationSpec& o) { return o.op != "metric-seq"; });
  if (needs_context) {
    try {
      context = std::make_unique<Context>(scenario);
    } catch (const BudgetExceeded& e) {
      context_kind = "budget";
      context_error = e.what();
    } catch (const InputError& e) {
      context_kind = "input";
      context_error = e.what();
    }
  }

  auto run_one = [&](std::size_t k) {
    const auto& op = ops[k];
    if (op.op == "metric-seq") {
      OperationResult r{op, {}, {}, {}};
      try {
        if (scenario.family.empty()) throw InputError("metric-seq needs a \"family\"");
        std::vector<Rational> ks = scenario.k_targets;
        if (op.params.contains("K")) {
          ks.clear();
          for (const auto& v : op.params["K"]) ks.push_back(json_rational(v));
        }
        r.certificates.push_back(
            metric_sequence_report(scenario.family, param_int(op.params, "ell", scenario.ell), ks));
      } catch (const BudgetExceeded& e) {
        r.error_kind = "budget";
        r.error = e.what();
      } catch (const InputError& e) {
        r.error_kind = "input";
        r.error = e.what();
      }
      result.operations[k] = std::move(r);
      return;
    }
    if (!context) {
      result.operations[k] = OperationResult{op, {}, context_kind, context_error};
      return;
    }
    result.operations[k] = run_operation(*context, op);
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, ops.size()));
  if (workers <= 1) {
    for (std::size_t k = 0; k < ops.size(); ++k) run_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < ops.size(); k = next++) run_one(k);
      });
    }
    for (auto& t : pool) t.join();
  }
  return result;
}

Json suite_document(const Scenario& scenario, const SuiteResult& result, const std::string& subcommand,
                    const RunOptions& options) {
  Json doc;
  doc["tool"] = "rough";
  doc["subcommand"] = subcommand;
  doc["scenario"] = scenario.source;
  doc["name"] = scenario.name;
  doc["seed"] = options.seed.value_or(scenario.seed);
  doc["budget"] = options.budget.value_or(scenario.budget);
  const int code = result.exit_code();
  doc["verdict"] = code == 0 ? "pass" : code == 1 ? "fail" : "error";
  doc["exit_code"] = code;
  Json certs = Json::array();
  Json errors = Json::array();
  for (std::size_t k = 0; k < result.operations.size(); ++k) {
    const auto& r = result.operations[k];
    for (const auto& c : r.certificates) {
      Json j;
      j["operation"] = k;
      j["op"] = r.spec.op;
      const Json body = c.to_json();
      for (const auto& [key, value] : body.items()) j[key] = value;
      certs.push_back(std::move(j));
    }
    if (!r.error_kind.empty()) {
      errors.push_back({{"operation", k}, {"op", r.spec.op}, {"kind", r.error_kind}, {"message", r.error}});
    }
  }
  doc["certificates"] = certs;
  doc["errors"] = errors;
  return doc;
}

// ---------------------------------------------------------------- metric sequences

std::vector<Scenario> cyclic_power_family(std::int64_t base, const std::vector<std::int64_t>& scales) {
  std::vector<Scenario> out;
  for (auto m : scales) {
    Scenario s;
    std::int64_t n = 1;
    for (std::int64_t k = 0; k < m; ++k) n *= base;
    s.name = "Z_" + std::to_string(n);
    s.source = "cyclic_powers";
    s.group = GroupSpec::cyclic(static_cast<std::size_t>(n));
    s.a = Json{{"ball", n / base}};
    for (std::int64_t i = 0; i <= m; ++i) {
      // base^(m−1−i), which is 1/base at i = m.
      Rational r(1);
      for (std::int64_t k = 0; k < m - 1 - i; ++k) r *= base;
      if (m - 1 - i < 0) r = Rational(1, base);
      s.radii.push_back(r);
    }
    s.scale = m;
    s.order_budget = std::max<std::size_t>(kDefaultOrderBudget, static_cast<std::size_t>(n));
    out.push_back(std::move(s));
  }
  return out;
}

Certificate metric_sequence_report(const std::vector<Scenario>& family, std::int64_t ell,
                                   const std::vector<Rational>& k_targets) {
  if (family.empty()) throw InputError("metric_sequence_report: empty family");
  if (k_targets.empty()) throw InputError("metric_sequence_report: K targets are required");
  if (ell < 1) throw InputError("metric_sequence_report: ell must be a positive integer");
  auto k_at = [&](std::size_t i) { return i < k_targets.size() ? k_targets[i] : k_targets.back(); };

  Certificate cert("harness.metric_sequence_report",
                   "hypotheses per scale and mu_i(A^4 T) ≤ mu_i(A^4 T_(i+2)) ≤ mu_(i-1)(A^4) ≤ K_(i-1)");
  Json kj = Json::array();
  for (const auto& k : k_targets) kj.push_back(to_string(k));
  cert.inputs = {{"ell", ell}, {"K", kj}, {"scales", family.size()}};
  cert.note("the trend table is a finite surrogate for the ultrafilter limit: a row eventually holds when it "
            "holds at every tested scale from some m0 on");

  Json table = Json::array();
  // trend[i] = list of (m, pass)
  std::map<std::size_t, std::vector<std::pair<std::int64_t, bool>>> trend;
  bool truncation_noted = false;
  for (std::size_t idx = 0; idx < family.size(); ++idx) {
    const auto& s = family[idx];
    const std::int64_t m = s.scale.value_or(static_cast<std::int64_t>(idx + 1));
    if (s.radii.empty()) throw InputError("metric_sequence_report: scale " + std::to_string(m) + " has no radii");
    Context ctx(s);
    const auto& chain = ctx.chain();
    const GSet& a = ctx.a();
    const auto& g = a.group();
    const GSet a4 = power(a, 4);
    const GSet& t_last = chain.last();
    const auto lip = validate_structure(ctx.metric(), a, ell, s.radii.front());
    const bool symmetric = is_symmetric(a);
    const std::size_t last = chain.last_index();

    for (std::size_t i = 0; i <= last; ++i) {
      Json row{{"m", m}, {"i", i}, {"r_i", to_string(s.radii[i])}};
      std::vector<std::pair<std::string, bool>> checks;
      checks.emplace_back("A symmetric", symmetric);
      checks.emplace_back("A (ell, r_0)-Lipschitz", lip.verdict);

      const Rational r = s.radii[i];
      bool hyp3 = r > 0;
      if (i > 0) hyp3 = hyp3 && Rational(std::max<std::int64_t>(ell, 2)) * r <= s.radii[i - 1];
      checks.emplace_back("max{ell,2} r_i ≤ r_(i-1)", hyp3);

      const auto n_a4 = packing_number(ctx.metric(), a4, r, s.mode, s.budget);
      const auto n_a = packing_number(ctx.metric(), a, r, s.mode, s.budget);
      if (!n_a4.exact || !n_a.exact) throw BudgetExceeded("metric_sequence_report: packing search exceeded budget");
      const Rational ki = k_at(i);
      const bool packing = Rational(n_a4.value) <= ki * Rational(n_a.value);
      row["N(A^4)"] = n_a4.value;
      row["N(A)"] = n_a.value;
      checks.emplace_back("N_(r_i)(A^4) ≤ K_i N_(r_i)(A)", packing);

      if (i + 1 <= last) {
        const GSet& big = chain.at(i);
        const GSet& small = chain.at(i + 1);
        const bool sq = product_set(small, small).is_subset_of(big);
        const bool conj = conjugates(small, a).is_subset_of(big);
        checks.emplace_back("T_(i+1)^2 ⊆ T_i", sq);
        checks.emplace_back("T_(i+1)^A ⊆ T_i", conj);
      }

      if (i >= 1) {
        const std::size_t i2 = std::min(i + 2, last);
        if (i + 2 > last && !truncation_noted) {
          cert.note("radii beyond the last index repeat the last radius, so T_(i+2) = T_last there");
          truncation_noted = true;
        }
        const auto mu_i = RoughMeasure::for_chain(ctx.instance().metric, chain,
                                                  RoughMeasureSpec{RoughMeasureSpec::Kind::packing, i, s.mode, s.budget});
        const auto mu_prev = RoughMeasure::for_chain(
            ctx.instance().metric, chain, RoughMeasureSpec{RoughMeasureSpec::Kind::packing, i - 1, s.mode, s.budget});
        const Rational v1 = mu_i(product_set(a4, t_last));
        const Rational v2 = mu_i(product_set(a4, chain.at(i2)));
        const Rational v3 = mu_prev(a4);
        const Rational v4 = k_at(i - 1);
        row["mu_i(A^4 T)"] = to_string(v1);
        row["mu_i(A^4 T_(i+2))"] = to_string(v2);
        row["mu_(i-1)(A^4)"] = to_string(v3);
        row["K_(i-1)"] = to_string(v4);
        checks.emplace_back("mu_i(A^4 T) ≤ mu_i(A^4 T_(i+2))", v1 <= v2);
        checks.emplace_back("mu_i(A^4 T_(i+2)) ≤ mu_(i-1)(A^4)", v2 <= v3);
        checks.emplace_back("mu_(i-1)(A^4) ≤ K_(i-1)", v3 <= v4);
      }

      bool all = true;
      Json cj = Json::object();
      for (const auto& [name, ok] : checks) {
        cj[name] = ok;
        all = all && ok;
        cert.check("m=" + std::to_string(m) + " i=" + std::to_string(i) + ": " + name, ok,
                   ok ? Json(nullptr) : row);
      }
      row["checks"] = cj;
      row["pass"] = all;
      table.push_back(row);
      trend[i].emplace_back(m, all);
    }
    (void)g;
  }

  Json trend_j = Json::array();
  for (const auto& [i, cells] : trend) {
    Json row{{"i", i}};
    Json per = Json::object();
    for (const auto& [m, ok] : cells) per[std::to_string(m)] = ok ? "pass" : "FAIL";
    row["by_m"] = per;
    // Least m0 from which every tested scale passes.
    std::optional<std::int64_t> m0;
    for (auto it = cells.rbegin(); it != cells.rend() && it->second; ++it) m0 = it->first;
    row["eventually_holds_from"] = m0 ? Json(*m0) : Json(nullptr);
    trend_j.push_back(row);
  }
  cert.values["table"] = table;
  cert.values["trend"] = trend_j;
  return cert;
}

}  // namespace rough
