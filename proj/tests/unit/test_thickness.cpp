#include <doctest.h>

#include <random>

#include "../support/bridge.hpp"
#include "rough/errors.hpp"
#include "rough/thickness.hpp"

using namespace rough;

namespace {

/// Unmemoised t-rank recursion over plain sets; the inner families use t².
struct TrankOracle {
  oracle::Group g;
  oracle::Set t_i;
  oracle::Set a_m;
  oracle::Set a_2m;

  bool thick(const oracle::Set& y, const oracle::Set& x, std::int64_t t) const {
    return static_cast<std::int64_t>(oracle::thickness(g, y, x)) <= t;
  }
  oracle::Set stable(const oracle::Set& x, std::int64_t t, std::size_t n) const {
    oracle::Set out;
    const auto xt = oracle::product(g, x, t_i);
    for (int h : a_2m) {
      oracle::Set left, right;
      const auto hxt = oracle::product(g, oracle::Set{h}, xt);
      const auto hixt = oracle::product(g, oracle::Set{g.inv(h)}, xt);
      for (int e : x) {
        if (hxt.count(e)) left.insert(e);
        if (hixt.count(e)) right.insert(e);
      }
      if (member(left, t * t, n) && member(right, t * t, n)) out.insert(h);
    }
    return out;
  }
  bool member(const oracle::Set& x, std::int64_t t, std::size_t n) const {
    if (x.empty()) return false;
    if (n == 0) return true;
    return thick(stable(x, t, n - 1), a_m, t);
  }
};

}  // namespace

TEST_SUITE("thickness") {
  TEST_CASE("min_thickness on Z_12 arcs") {
    const auto gi = bridge::cyclic(12);
    const auto d2 = gi.metric->ball(Rational(2));
    const auto d4 = gi.metric->ball(Rational(4));
    const auto rep = min_thickness(d2, d4);
    CHECK(rep.t_star == 3);
    CHECK(rep.exact);
    CHECK(rep.witness.size() == 3);
    CHECK(rep.witness.is_subset_of(d4));
    const auto& g = *gi.group;
    const auto w = rep.witness.elements();
    for (auto a : w)
      for (auto b : w)
        if (a != b) CHECK_FALSE(d2.contains(g.mul(g.inv(a), b)));
  }

  TEST_CASE("trivial thickness values") {
    const auto gi = make_group(GroupSpec::dihedral(5));
    const auto x = gi.metric->ball(Rational(1));
    CHECK(min_thickness(GSet::identity_set(gi.group), x).t_star == static_cast<std::int64_t>(x.size()));
    CHECK(min_thickness(product_set(inverse_set(x), x), x).t_star == 1);
  }

  TEST_CASE("min_thickness matches brute force") {
    std::mt19937_64 rng(21);
    for (auto spec : {GroupSpec::cyclic(14), GroupSpec::dihedral(6), GroupSpec::heisenberg(3)}) {
      const auto gi = make_group(spec);
      const oracle::Group og = spec.kind == GroupSpec::Kind::cyclic     ? oracle::cyclic(14)
                               : spec.kind == GroupSpec::Kind::dihedral ? oracle::dihedral(6)
                                                                        : oracle::heisenberg(3);
      for (int k = 0; k < 25; ++k) {
        GSet y(gi.group), x(gi.group);
        for (Element e = 0; e < gi.group->order(); ++e) {
          if (rng() % 3 == 0) y.insert(e);
          if (rng() % 2 == 0) x.insert(e);
        }
        if (x.empty()) continue;
        const auto rep = min_thickness(y, x);
        CHECK(rep.t_star == static_cast<std::int64_t>(oracle::thickness(og, bridge::to_set(y), bridge::to_set(x))));
        CHECK(is_thick(y, x, rep.t_star));
        if (rep.t_star > 1) CHECK_FALSE(is_thick(y, x, rep.t_star - 1));
      }
    }
  }

  TEST_CASE("translate cover on Z_12") {
    const auto gi = bridge::cyclic(12);
    const auto d2 = gi.metric->ball(Rational(2));
    const auto d4 = gi.metric->ball(Rational(4));
    const auto [e, cert] = translate_cover(d2, d4);
    CHECK(cert.verdict);
    CHECK(e.size() == 3);
    CHECK(d4.is_subset_of(product_set(e, d2)));
    // The cover comes from a maximal free set, so it need not be minimal.
    CHECK(oracle::min_cover(oracle::cyclic(12), bridge::to_set(d2), bridge::to_set(d4)) == 2);
    // X ⊆ Y: one translate.
    const auto [e1, c1] = translate_cover(d4, d2);
    CHECK(c1.verdict);
    CHECK(to_json(e1) == Json::array({d2.first()}));
  }

  TEST_CASE("duality on sampled symmetric pairs") {
    const auto gi = make_group(GroupSpec::dihedral(5));
    const auto& g = *gi.group;
    std::mt19937_64 rng(8);
    for (int k = 0; k < 40; ++k) {
      GSet y = GSet::identity_set(gi.group), x = GSet::identity_set(gi.group);
      for (Element e = 0; e < g.order(); ++e) {
        if (rng() % 4 == 0) {
          y.insert(e);
          y.insert(g.inv(e));
        }
        if (rng() % 2 == 0) {
          x.insert(e);
          x.insert(g.inv(e));
        }
      }
      const auto cert = thickness_duality(y, x);
      CHECK(cert.verdict);
      const auto c = cert.values["cover_size"].get<std::size_t>();
      CHECK(oracle::min_cover(oracle::dihedral(5), bridge::to_set(y), bridge::to_set(x)) <= c);
    }
  }

  TEST_CASE("intersection of thick sets is thick") {
    const auto gi = bridge::cyclic(20);
    const auto x = gi.metric->ball(Rational(6));
    const auto cert = intersection_thickness(gi.metric->ball(Rational(3)), translate_set(1, gi.metric->ball(Rational(4))), x);
    CHECK(cert.verdict);
  }

  TEST_CASE("trank examples on Z_12") {
    const auto gi = bridge::cyclic(12);
    const auto a = gi.metric->ball(Rational(2));
    const auto chain = ThickeningChain::from_sets({GSet::identity_set(gi.group)}, a);
    const TrankContext ctx{a, 1};
    CHECK(trank_member(a, chain, 0, 1, 1, ctx));
    CHECK(trank_member(GSet(gi.group, {1}), chain, 0, 3, 0, ctx));
    CHECK_FALSE(trank_member(GSet(gi.group), chain, 0, 3, 0, ctx));
    CHECK(directed_stable_set(a, chain, 0, 1, 0, ctx) == gi.metric->ball(Rational(4)));
  }

  TEST_CASE("trank agrees with an unmemoised recursion, and stable sets stay in X T X^-1") {
    const auto gi = bridge::cyclic(12);
    const auto a = gi.metric->ball(Rational(2));
    const auto chain = ThickeningChain::from_radii(*gi.metric, {Rational(1), Rational(0)}, a);
    for (std::size_t i = 0; i < chain.size(); ++i) {
      TrankEvaluator ev(chain, i, TrankContext{a, 1}, 2);
      const TrankOracle orc{oracle::cyclic(12), bridge::to_set(chain.at(i)), bridge::to_set(a),
                            bridge::to_set(power(a, 2))};
      const auto elems = a.elements();
      for (unsigned mask = 1; mask < (1U << elems.size()); mask += 3) {
        GSet x(gi.group);
        for (std::size_t k = 0; k < elems.size(); ++k)
          if (mask >> k & 1U) x.insert(elems[k]);
        for (std::int64_t t = 1; t <= 3; ++t)
          for (std::size_t n = 0; n <= 2; ++n) {
            CHECK(ev.member(x, t, n) == orc.member(bridge::to_set(x), t, n));
            const auto s = ev.directed_stable_set(x, t, n);
            CHECK(s.is_subset_of(product_set(product_set(x, chain.at(i)), inverse_set(x))));
          }
      }
    }
  }

  TEST_CASE("trank domain errors") {
    const auto gi = bridge::cyclic(12);
    const auto a = gi.metric->ball(Rational(1));
    const auto chain = ThickeningChain::from_sets({GSet::identity_set(gi.group)}, a);
    TrankEvaluator ev(chain, 0, TrankContext{a, 1});
    CHECK_THROWS_AS(ev.member(a, 0, 1), InputError);
    CHECK_THROWS_AS(ev.member(gi.metric->ball(Rational(3)), 1, 1), InputError);
    CHECK_THROWS_AS(ev.member(a, 1, 9), InputError);
  }
}
