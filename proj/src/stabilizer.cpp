#include "rough/stabilizer.hpp"

#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_int.hpp>

#include "rough/errors.hpp"
#include "rough/thickness.hpp"

namespace rough {

namespace {

using BigInt = boost::multiprecision::cpp_int;

constexpr std::size_t kMaxExamples = 5;

Json rationals(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& q : v) out.push_back(to_string(q));
  return out;
}

/// q^α ≤ a/b with q = qn/qd, all exact.
bool power_at_most(const Rational& q, std::int64_t alpha, const Rational& ratio) {
  BigInt lhs = boost::multiprecision::pow(BigInt(q.numerator()), static_cast<unsigned>(alpha));
  BigInt rhs = boost::multiprecision::pow(BigInt(q.denominator()), static_cast<unsigned>(alpha));
  return lhs * BigInt(ratio.denominator()) <= rhs * BigInt(ratio.numerator());
}

/// Saturating t², capped at `cap`.
std::int64_t square_capped(std::int64_t t, std::int64_t cap) {
  if (t > cap / t) return cap;
  return std::min(cap, t * t);
}

std::int64_t isqrt(std::int64_t v) {
  auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (s * s > v) --s;
  while ((s + 1) * (s + 1) <= v) ++s;
  return s;
}

}  // namespace

// ---------------------------------------------------------------- S(B)

std::pair<GSet, Certificate> stable_set(const RoughMeasure& mu, const ThickeningChain& chain, std::size_t i,
                                        const GSet& b, std::int64_t t, std::size_t m) {
  if (t <= 0) throw InputError("stable_set: t must be a positive integer");
  if (m == 0) throw InputError("stable_set: m must be positive");
  const GSet& a = mu.base();
  const GSet& tt = chain.at(i);
  const auto& g = a.group();
  const GSet a_m = power(a, m);
  const GSet a_2m = power(a, 2 * m);
  if (!b.is_subset_of(a_m)) throw InputError("stable_set: B must be a subset of A^m");
  const Rational mu_a2m = mu(a_2m);
  if (mu_a2m <= 0) throw InputError("stable_set: mu(A^2m) must be positive");
  const Rational mu_b = mu(b);
  const Rational need = Rational(2) * mu_a2m / t;
  if (mu_b < need) {
    throw InputError("stable_set: mu(B) = " + to_string(mu_b) + " is below 2 mu(A^2m)/t = " + to_string(need) +
                     " (deficit " + to_string(need - mu_b) + ")");
  }
  const Rational threshold = Rational(2) * mu_a2m / (t * t);

  Certificate cert("stabilizer.stable_set", "S(B) is t-thick in A^m and S(B) ⊆ B T B^-1");
  cert.inputs = {{"A", fingerprint(a)}, {"B", to_json(b)},       {"T", fingerprint(tt)},
                 {"chain_index", i},    {"t", t},                {"m", m},
                 {"measure", mu.describe()}};
  cert.values["mu(B)"] = to_string(mu_b);
  cert.values["mu(A^2m)"] = to_string(mu_a2m);
  cert.values["threshold"] = to_string(threshold);

  const GSet bt = product_set(b, tt);
  GSet s(a.group_ptr());
  a_2m.for_each([&](Element h) {
    const Rational left = mu(b & translate_set(h, bt));
    if (left < threshold) return;
    const Rational right = mu(translate_set(h, b) & bt);
    if (right >= threshold) s.insert(h);
  });
  cert.values["S"] = to_json(s);

  const auto report = min_thickness(s, a_m, SearchMode::exact);
  if (!report.exact) throw BudgetExceeded("stable_set: exact thickness search exceeded its budget");
  cert.values["t_star"] = report.t_star;
  cert.check("S t-thick in A^m", report.t_star <= t,
             Json{{"t_star", report.t_star}, {"t", t}, {"free_set", to_json(report.witness)}});

  const GSet btb = product_set(bt, inverse_set(b));
  Json outside = nullptr;
  s.for_each([&](Element h) {
    if (outside.is_null() && !btb.contains(h)) outside = {{"g", h}};
  });
  cert.check("S ⊆ B T B^-1", outside.is_null(), outside);

  Json asym = nullptr;
  s.for_each([&](Element h) {
    if (asym.is_null() && !s.contains(g.inv(h))) asym = {{"g", h}, {"g^-1", g.inv(h)}};
  });
  cert.check("S symmetric", asym.is_null(), asym);
  return {std::move(s), std::move(cert)};
}

// ---------------------------------------------------------------- Sanders

std::int64_t sanders_bound(const Rational& a, const Rational& b, const Rational& epsilon) {
  if (a <= 0 || b < a) throw InputError("sanders_bound: need 0 < a <= b");
  if (epsilon <= 0 || epsilon >= 1) throw InputError("sanders_bound: epsilon must lie in (0, 1)");
  const Rational q = Rational(1) - epsilon;
  const Rational ratio = a / b;
  if (ratio == Rational(1)) return 0;
  const double est = std::log(boost::rational_cast<double>(b / a)) / -std::log(boost::rational_cast<double>(q));
  auto alpha = static_cast<std::int64_t>(std::ceil(est));
  if (alpha < 1) alpha = 1;
  while (alpha > 1 && power_at_most(q, alpha - 1, ratio)) --alpha;
  while (!power_at_most(q, alpha, ratio)) ++alpha;
  return alpha;
}

std::pair<std::size_t, Certificate> sanders_stable_index(const std::vector<std::vector<Rational>>& values,
                                                         const Rational& a, const Rational& b,
                                                         const Rational& epsilon) {
  Certificate cert("stabilizer.sanders_stable_index",
                   "each f_k drops by a factor (1-eps) at most ceil(ln(b/a) / -ln(1-eps)) times");
  const auto alpha = sanders_bound(a, b, epsilon);
  const Rational keep = Rational(1) - epsilon;
  std::size_t length = 0;
  for (const auto& f : values) {
    if (length != 0 && f.size() != length) throw InputError("sanders_stable_index: sequences differ in length");
    length = f.size();
    for (const auto& v : f) {
      if (v < a || v > b) {
        throw InputError("sanders_stable_index: value " + to_string(v) + " outside [" + to_string(a) + ", " +
                         to_string(b) + "]");
      }
    }
  }
  Json in = Json::array();
  for (const auto& f : values) in.push_back(rationals(f));
  cert.inputs = {{"values", in}, {"a", to_string(a)}, {"b", to_string(b)}, {"epsilon", to_string(epsilon)}};
  cert.values["alpha"] = alpha;

  Json drops = Json::array();
  Json monotone_bad = nullptr;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto& f = values[k];
    std::int64_t count = 0;
    if (!f.empty()) {
      Rational base = f[0];
      for (std::size_t x = 1; x < f.size(); ++x) {
        if (f[x] > f[x - 1] && monotone_bad.is_null()) monotone_bad = {{"k", k}, {"position", x}};
        if (f[x] <= keep * base) {
          ++count;
          base = f[x];
        }
      }
    }
    drops.push_back(count);
    cert.check("drops of f_" + std::to_string(k) + " ≤ alpha", count <= alpha, Json{{"drops", count}});
  }
  cert.values["drops"] = drops;
  if (!monotone_bad.is_null()) cert.note("values increase along the chain at " + monotone_bad.dump());

  std::size_t index = length == 0 ? 0 : length - 1;
  for (std::size_t x = 0; x < length; ++x) {
    bool stable = true;
    for (std::size_t y = x + 1; y < length && stable; ++y)
      for (const auto& f : values)
        if (!(f[y] > keep * f[x])) {
          stable = false;
          break;
        }
    if (stable) {
      index = x;
      break;
    }
  }
  cert.values["index"] = index;
  return {index, std::move(cert)};
}

// ---------------------------------------------------------------- square iteration

std::size_t IterationTrace::shrinks() const {
  std::size_t c = 0;
  for (const auto& s : steps) c += s.g.has_value() ? 1 : 0;
  return c;
}

SquareIterationResult square_iteration(const RoughMeasure& mu, const ThickeningChain& chain, const GSet& b,
                                       const IterationParams& params) {
  const std::size_t m = params.m;
  const std::size_t r = params.r;
  if (m == 0 || r == 0) throw InputError("square_iteration: m and r must be positive");
  const GSet& a = mu.base();
  const GSet& t_i = chain.at(params.i);
  const auto& grp = a.group();
  if (b.empty()) throw InputError("square_iteration: B must be nonempty");
  if (!is_symmetric(b)) throw InputError("square_iteration: B must be symmetric");
  PowerTable pa(a);
  const GSet a_m = pa(m);
  const GSet a_2m = pa(2 * m);
  const GSet a_top = pa(2 * m + r);
  if (!b.is_subset_of(a_m)) throw InputError("square_iteration: B must be a subset of A^m");

  const Rational mu_b = mu(b);
  const Rational mu_top = mu(a_top);
  const Rational mu_2m = mu(a_2m);
  if (mu_b <= 0) throw InputError("square_iteration: mu(B) must be positive");
  const Rational k_bound = params.K.value_or(mu_top);
  if (k_bound < mu_top) {
    throw InputError("square_iteration: K = " + to_string(k_bound) + " is below mu(A^(2m+r)) = " +
                     to_string(mu_top));
  }
  if (k_bound < mu_b) throw InputError("square_iteration: K must be at least mu(B)");
  const Rational eps = params.epsilon.value_or(mu_b / (Rational(static_cast<std::int64_t>(2 * r)) * k_bound));
  if (eps <= 0 || eps >= 1) throw InputError("square_iteration: epsilon must lie in (0, 1)");
  const auto alpha = sanders_bound(mu_b, k_bound, eps);
  const auto budget = static_cast<std::int64_t>(r) * alpha;
  const auto max_iter = params.max_iterations == 0 ? budget : static_cast<std::int64_t>(params.max_iterations);

  // Past this cap every threshold 2μ(A²ᵐ)/t² is below one packing point and
  // every set is t-thick in Aᵐ, so larger t change nothing.
  const std::int64_t n_2m = mu.raw(a_2m);
  const std::int64_t cap =
      std::max<std::int64_t>(static_cast<std::int64_t>(a_m.size()), isqrt(2 * n_2m) + 1);
  const Rational t0_exact = Rational(2) * k_bound / mu_b;
  const std::int64_t t0 = ceil(t0_exact);

  Certificate cert("stabilizer.square_iteration",
                   "S thick in A^m with XB ∩ g_<r X T^r B T^r nonempty and S^r ⊆ B B T^r B T^r B");
  cert.inputs = {{"A", fingerprint(a)},
                 {"B", to_json(b)},
                 {"T", fingerprint(t_i)},
                 {"chain_index", params.i},
                 {"m", m},
                 {"r", r},
                 {"seed", params.seed},
                 {"measure", mu.describe()}};
  cert.values["mu(B)"] = to_string(mu_b);
  cert.values["mu(A^2m)"] = to_string(mu_2m);
  cert.values["mu(A^(2m+r))"] = to_string(mu_top);
  cert.values["K"] = to_string(k_bound);
  cert.values["epsilon"] = to_string(eps);
  cert.values["t_0"] = t0;
  cert.values["alpha"] = alpha;
  cert.values["sanders_budget"] = budget;
  cert.budgets = {{"max_iterations", max_iter},
                  {"tuple_budget", params.tuple_budget},
                  {"tuple_samples", params.tuple_samples},
                  {"node_budget", params.node_budget}};

  const auto thick_b = min_thickness(b, a, SearchMode::exact, params.node_budget);
  cert.values["t_star(B, A)"] = thick_b.t_star;

  // P_k = T^k B T^k for k ≤ r.
  std::vector<GSet> t_pow;
  t_pow.push_back(GSet::identity_set(a.group_ptr()));
  for (std::size_t k = 1; k <= r; ++k) t_pow.push_back(product_set(t_pow.back(), t_i));
  std::vector<GSet> p;
  for (std::size_t k = 0; k < r; ++k) p.push_back(product_set(product_set(t_pow[k], b), t_pow[k]));
  auto f = [&](const GSet& x) {
    std::vector<Rational> out;
    for (std::size_t k = 0; k < r; ++k) out.push_back(mu(product_set(x, p[k]) & a_top));
    return out;
  };

  SquareIterationResult res{b, GSet(a.group_ptr()), {}, k_bound, eps, budget, Certificate{}};
  GSet x = b;
  std::optional<GSet> s_prev;
  std::int64_t t = std::min(t0, cap);
  const Rational keep = Rational(1) - eps;
  std::int64_t shrinks = 0;
  for (;;) {
    const Rational threshold = Rational(2) * mu_2m / (t * t);
    const GSet xt = product_set(x, t_i);
    GSet d(a.group_ptr());
    a_2m.for_each([&](Element g) {
      if (mu(x & translate_set(g, xt)) >= threshold && mu(x & translate_set(grp.inv(g), xt)) >= threshold)
        d.insert(g);
    });
    GSet s = s_prev ? (*s_prev & d) : d;

    IterationStep step{x, s, t, t == cap, std::nullopt, std::nullopt, f(x), {}};
    bool found = false;
    for (std::size_t k = 0; k < r && !found; ++k) {
      const Rational limit = keep * step.f_before[k];
      for (auto g : s.elements()) {
        const GSet cand = x & translate_set(g, xt);
        if (mu(product_set(cand, p[k]) & a_top) <= limit) {
          step.g = g;
          step.k = k;
          step.f_after = f(cand);
          x = cand;
          found = true;
          break;
        }
      }
    }
    res.trace.steps.push_back(step);
    if (!found) {
      res.x = x;
      res.s = s;
      break;
    }
    ++shrinks;
    if (shrinks > max_iter) {
      throw BudgetExceeded("square_iteration: more than " + std::to_string(max_iter) + " shrink steps");
    }
    s_prev = std::move(s);
    t = square_capped(t, cap);
  }
  const std::int64_t t_final = t;
  cert.values["t_final"] = t_final;
  cert.values["t_cap"] = cap;
  cert.values["shrinks"] = shrinks;
  cert.values["X"] = to_json(res.x);
  cert.values["S"] = to_json(res.s);
  cert.check("shrinks ≤ r·alpha", shrinks <= budget, Json{{"shrinks", shrinks}, {"budget", budget}});

  // Trace invariants, recomputed.
  Json trace_bad = nullptr;
  for (std::size_t n = 0; n < res.trace.steps.size() && trace_bad.is_null(); ++n) {
    const auto& st = res.trace.steps[n];
    if (n + 1 < res.trace.steps.size()) {
      const auto& nx = res.trace.steps[n + 1];
      if (!nx.x.is_subset_of(st.x)) trace_bad = {{"step", n}, {"violation", "X_{n+1} ⊄ X_n"}};
      else if (!nx.s.is_subset_of(st.s)) trace_bad = {{"step", n}, {"violation", "S_{n+1} ⊄ S_n"}};
      else if (!st.g) trace_bad = {{"step", n}, {"violation", "missing g"}};
      else {
        const GSet again = st.x & translate_set(*st.g, product_set(st.x, t_i));
        const Rational before = mu(product_set(st.x, p[*st.k]) & a_top);
        const Rational after = mu(product_set(again, p[*st.k]) & a_top);
        if (!(again == nx.x) || after > keep * before)
          trace_bad = {{"step", n}, {"violation", "recorded drop not reproduced"}};
      }
    }
  }
  cert.check("trace: descending X and S with true (1-eps)-drops", trace_bad.is_null(), trace_bad);

  std::vector<std::vector<Rational>> fv(r);
  for (const auto& st : res.trace.steps)
    for (std::size_t k = 0; k < r; ++k) fv[k].push_back(st.f_before[k]);
  auto [stable_index, sanders] = sanders_stable_index(fv, mu_b, k_bound, eps);
  cert.merge(sanders, "sanders");
  cert.values["stable_index"] = stable_index;

  // (a)
  const auto thick = min_thickness(res.s, a_m, SearchMode::exact, params.node_budget);
  if (!thick.exact) throw BudgetExceeded("square_iteration: exact thickness of S exceeded its budget");
  cert.values["t_star(S, A^m)"] = thick.t_star;
  cert.check("(a) S t_final-thick in A^m", thick.t_star <= t_final,
             Json{{"t_star", thick.t_star}, {"t_final", t_final}, {"free_set", to_json(thick.witness)}});

  // (b) and per-tuple membership in the (c) product.
  const GSet xb = product_set(res.x, b);
  const GSet right = product_set(product_set(product_set(res.x, t_pow[r]), b), t_pow[r]);
  const GSet q = product_set(xb, inverse_set(right));
  const GSet c_set = product_set(product_set(product_set(product_set(product_set(b, b), t_pow[r]), b), t_pow[r]), b);
  const auto s_elems = res.s.elements();
  std::uint64_t total = 1;
  bool overflow = false;
  for (std::size_t k = 0; k < r; ++k) {
    if (s_elems.size() != 0 && total > params.tuple_budget / s_elems.size()) overflow = true;
    total *= s_elems.size();
    if (overflow) break;
  }
  const bool exhaustive = !overflow && total <= params.tuple_budget;
  std::uint64_t checked = 0, fail_b = 0, fail_c = 0;
  Json bad_b = Json::array(), bad_c = Json::array();
  auto check_tuple = [&](const std::vector<Element>& tuple) {
    Element g = grp.identity();
    for (auto e : tuple) g = grp.mul(g, e);
    ++checked;
    if (!q.contains(g)) {
      ++fail_b;
      if (bad_b.size() < kMaxExamples) bad_b.push_back({{"tuple", tuple}, {"product", g}});
    }
    if (!c_set.contains(g)) {
      ++fail_c;
      if (bad_c.size() < kMaxExamples) bad_c.push_back({{"tuple", tuple}, {"product", g}});
    }
  };
  if (!s_elems.empty()) {
    std::vector<Element> tuple(r);
    if (exhaustive) {
      std::vector<std::size_t> idx(r, 0);
      for (;;) {
        for (std::size_t k = 0; k < r; ++k) tuple[k] = s_elems[idx[k]];
        check_tuple(tuple);
        std::size_t k = r;
        while (k > 0) {
          --k;
          if (++idx[k] < s_elems.size()) break;
          idx[k] = 0;
          if (k == 0) {
            k = r + 1;
            break;
          }
        }
        if (k == r + 1) break;
      }
    } else {
      std::mt19937_64 rng(params.seed);
      for (std::size_t n = 0; n < params.tuple_samples; ++n) {
        for (std::size_t k = 0; k < r; ++k) tuple[k] = s_elems[rng() % s_elems.size()];
        check_tuple(tuple);
      }
      cert.note("r-tuples sampled (" + std::to_string(params.tuple_samples) + " seeded draws)");
    }
  }
  cert.values["tuples_checked"] = checked;
  cert.values["tuples_exhaustive"] = exhaustive;
  cert.check("(b) XB ∩ g_<r X T^r B T^r nonempty for every checked tuple", fail_b == 0,
             fail_b == 0 ? Json(nullptr) : Json{{"failures", fail_b}, {"examples", bad_b}});
  cert.check("(b⇒c) g_<r ∈ B B T^r B T^r B for every checked tuple", fail_c == 0,
             fail_c == 0 ? Json(nullptr) : Json{{"failures", fail_c}, {"examples", bad_c}});

  // (c)
  const GSet s_r = power(res.s, r);
  Json outside = nullptr;
  s_r.for_each([&](Element g) {
    if (outside.is_null() && !c_set.contains(g)) outside = {{"g", g}};
  });
  cert.check("(c) S^r ⊆ B B T^r B T^r B", outside.is_null(), outside);
  cert.values["|S^r|"] = s_r.size();
  cert.values["|B B T^r B T^r B|"] = c_set.size();

  const GSet xtx = product_set(product_set(res.x, t_i), inverse_set(res.x));
  cert.check("S ⊆ X T X^-1", res.s.is_subset_of(xtx));
  cert.check("X ⊆ B", res.x.is_subset_of(b));
  if (chain.last_index() != params.i) {
    cert.note("certificates use T_" + std::to_string(params.i) + "; the limit thickening is not represented");
  }
  res.certificate = std::move(cert);
  return res;
}

// ---------------------------------------------------------------- core

CoreResult bounded_core(const RoughMeasure& mu, const ThickeningChain& chain, const CoreParams& params) {
  const GSet& a = mu.base();
  if (!is_symmetric(a)) throw InputError("bounded_core: A must be symmetric");
  if (params.stages == 0) throw InputError("bounded_core: at least one stage is required");
  const std::size_t i = params.i.value_or(chain.last_index());
  const GSet& t_i = chain.at(i);
  const GSet& t_last = chain.last();

  Certificate cert("stabilizer.bounded_core",
                   "H = ∩ A_n^4 T is thick in A^m, N ⊆ H ⊆ A^4 T, N normal in <A T>, T ⊆ N");
  cert.inputs = {{"A", to_json(a)},
                 {"chain_index", i},
                 {"T_last", fingerprint(t_last)},
                 {"stages", params.stages},
                 {"r", params.r},
                 {"measure", mu.describe()}};
  if (chain.last_index() != 0 || i != chain.last_index()) {
    cert.note("the limit thickening is represented by T_" + std::to_string(chain.last_index()));
  }

  PowerTable pa(a);
  const GSet closure = generated_closure(product_set(a, t_last));
  CoreResult out{GSet(a.group_ptr()), GSet(a.group_ptr()), {}, Certificate{}};
  GSet a_n = a;
  GSet h = product_set(power(a, 4), t_last);
  out.stages.push_back({a_n, h, normal_core(h, closure)});

  for (std::size_t n = 0; n < params.stages; ++n) {
    const std::size_t m = std::size_t{1} << n;
    IterationParams ip;
    ip.m = m;
    ip.r = params.r;
    ip.i = i;
    ip.tuple_budget = params.tuple_budget;
    ip.tuple_samples = params.tuple_samples;
    ip.seed = params.seed + n;
    ip.node_budget = params.node_budget;
    std::optional<SquareIterationResult> step;
    try {
      step.emplace(square_iteration(mu, chain, a_n, ip));
    } catch (const InputError& e) {
      throw InputError("bounded_core: stage " + std::to_string(n) + " precondition failed after " +
                       std::to_string(n) + " completed stage(s): " + e.what());
    }
    cert.merge(step->certificate, "stage " + std::to_string(n));
    const GSet next = step->s;
    const GSet a_n_sq = product_set(a_n, a_n);
    const GSet a_pow = pa(2 * m);
    const std::string tag = "A_" + std::to_string(n + 1);
    cert.check(tag + " ⊆ A_" + std::to_string(n) + " T A_" + std::to_string(n),
               next.is_subset_of(product_set(product_set(a_n, t_i), a_n)));
    cert.check("A_" + std::to_string(n) + "^2 ⊆ A^" + std::to_string(2 * m), a_n_sq.is_subset_of(a_pow));
    cert.check(tag + " ⊆ A^" + std::to_string(2 * m), next.is_subset_of(a_pow));
    cert.values[tag + " ⊆ A_" + std::to_string(n) + "^2"] = next.is_subset_of(a_n_sq);
    a_n = next;
    h &= product_set(power(a_n, 4), t_last);
    out.stages.push_back({a_n, h, normal_core(h, closure)});
  }

  out.h = h;
  out.n = out.stages.back().n;
  Json stages = Json::array();
  for (const auto& st : out.stages)
    stages.push_back({{"A_n", to_json(st.a_n)}, {"H", to_json(st.h)}, {"N", to_json(st.n)}});
  cert.values["stages"] = stages;
  cert.values["H"] = to_json(out.h);
  cert.values["N"] = to_json(out.n);
  cert.values["<A T>"] = closure.size();

  cert.check("N ⊆ H", out.n.is_subset_of(out.h));
  cert.check("H ⊆ A^4 T", out.h.is_subset_of(product_set(pa(4), t_last)));
  cert.merge(normalizes(closure, out.n), "N normal in <A T>");
  cert.check("T ⊆ N", t_last.is_subset_of(out.n));
  Json thick = Json::object();
  for (auto m : params.thickness_m) {
    if (m == 0) continue;
    const auto rep = min_thickness(out.h, pa(m), SearchMode::exact, params.node_budget);
    thick["A^" + std::to_string(m)] = {{"t_star", rep.t_star}, {"exact", rep.exact}};
  }
  cert.values["thickness of H"] = thick;
  out.certificate = std::move(cert);
  return out;
}

}  // namespace rough
