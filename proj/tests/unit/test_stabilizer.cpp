#include <doctest.h>

#include "../support/bridge.hpp"
#include "rough/errors.hpp"
#include "rough/stabilizer.hpp"

using namespace rough;

namespace {

GSet subgroup_of_z12(const GroupInstance& gi) { return GSet(gi.group, {0, 3, 6, 9}); }

Rational q(const oracle::Q& x) { return Rational(x.numerator(), x.denominator()); }

}  // namespace

TEST_SUITE("stabilizer") {
  TEST_CASE("stable set of an arc in Z_12 under counting measure") {
    const auto gi = bridge::cyclic(12);
    const auto a = gi.metric->ball(Rational(2));
    const auto chain = ThickeningChain::from_sets({GSet::identity_set(gi.group)}, a);
    const auto mu = RoughMeasure::counting(a);
    const auto [s, cert] = stable_set(mu, chain, 0, a, 4);
    CHECK(cert.verdict);
    CHECK(s == gi.metric->ball(Rational(3)));
    CHECK(cert.values["t_star"] == 2);
    const auto og = oracle::cyclic(12);
    CHECK(cert.values["t_star"].get<std::size_t>() == oracle::thickness(og, bridge::to_set(s), bridge::to_set(a)));
    // |B ∩ hB| ≥ 2 exactly when |h| ≤ 3.
    oracle::Set direct;
    for (int h = 0; h < 12; ++h) {
      std::size_t common = 0;
      for (int x : bridge::to_set(a))
        if (a.contains(static_cast<Element>((x - h + 12) % 12))) ++common;
      if (common >= 2 && bridge::to_set(power(a, 2)).count(h)) direct.insert(h);
    }
    CHECK(bridge::to_set(s) == direct);
  }

  TEST_CASE("stable set preconditions") {
    const auto gi = bridge::cyclic(12);
    const auto a = gi.metric->ball(Rational(2));
    const auto chain = ThickeningChain::from_sets({GSet::identity_set(gi.group)}, a);
    const auto mu = RoughMeasure::counting(a);
    CHECK_THROWS_AS(stable_set(mu, chain, 0, GSet(gi.group, {0}), 2), InputError);
    CHECK_THROWS_AS(stable_set(mu, chain, 0, gi.metric->ball(Rational(3)), 4), InputError);
    CHECK_THROWS_AS(stable_set(mu, chain, 0, a, 0), InputError);
  }

  TEST_CASE("sanders bound and stable index") {
    const auto [index, cert] = sanders_stable_index({{Rational(4), Rational(2), Rational(1)}}, Rational(1),
                                                    Rational(4), Rational(1, 2));
    CHECK(cert.verdict);
    CHECK(cert.values["alpha"] == 2);
    CHECK(cert.values["drops"][0] == 2);
    CHECK(index == 2);
    const auto [flat, c2] = sanders_stable_index({{Rational(3), Rational(3), Rational(3)}, {Rational(2), Rational(2), Rational(2)}},
                                                 Rational(1), Rational(4), Rational(1, 3));
    CHECK(flat == 0);
    CHECK(c2.verdict);
    CHECK(sanders_bound(Rational(5), Rational(5), Rational(1, 2)) == 0);
    CHECK_THROWS_AS(sanders_bound(Rational(2), Rational(1), Rational(1, 2)), InputError);
    CHECK_THROWS_AS(sanders_bound(Rational(1), Rational(2), Rational(1)), InputError);
  }

  TEST_CASE("sanders bound agrees with repeated multiplication") {
    for (std::int64_t an = 1; an <= 7; ++an)
      for (std::int64_t bn = an; bn <= 40; bn += 3)
        for (std::int64_t d = 2; d <= 40; d += 7) {
          const oracle::Q a(an, 3), b(bn, 3), eps(1, d);
          CHECK(sanders_bound(q(a), q(b), q(eps)) == oracle::least_power(oracle::Q(1) - eps, a / b));
        }
  }

  TEST_CASE("square iteration fixes a subgroup") {
    const auto gi = bridge::cyclic(12);
    const auto h = subgroup_of_z12(gi);
    const auto chain = ThickeningChain::from_sets({GSet::identity_set(gi.group)}, h);
    const auto mu = RoughMeasure::counting(h);
    IterationParams p;
    p.r = 2;
    const auto res = square_iteration(mu, chain, h, p);
    CHECK(res.certificate.verdict);
    CHECK(res.x == h);
    CHECK(res.s == h);
    CHECK(res.trace.shrinks() == 0);
    CHECK(static_cast<std::int64_t>(res.trace.shrinks()) <= res.sanders_budget);
  }

  TEST_CASE("square iteration on an arc keeps its certificates") {
    const auto gi = bridge::cyclic(24);
    const auto a = gi.metric->ball(Rational(3));
    const auto chain = ThickeningChain::from_radii(*gi.metric, {Rational(2), Rational(1), Rational(0)}, a);
    RoughMeasureSpec spec;
    spec.index = 2;
    const auto mu = RoughMeasure::for_chain(gi.metric, chain, spec);
    IterationParams p;
    p.r = 2;
    p.i = 2;
    const auto res = square_iteration(mu, chain, a, p);
    CHECK(res.certificate.verdict);
    CHECK(res.x.is_subset_of(a));
    CHECK(static_cast<std::int64_t>(res.trace.shrinks()) <= res.sanders_budget);
    for (std::size_t n = 1; n < res.trace.steps.size(); ++n) {
      CHECK(res.trace.steps[n].x.is_subset_of(res.trace.steps[n - 1].x));
      CHECK(res.trace.steps[n].s.is_subset_of(res.trace.steps[n - 1].s));
    }
    CHECK_THROWS_AS(square_iteration(mu, chain, GSet(gi.group, {0, 1}), p), InputError);
  }

  TEST_CASE("bounded core of a subgroup is the subgroup") {
    const auto gi = bridge::cyclic(12);
    const auto h = subgroup_of_z12(gi);
    const auto chain = ThickeningChain::from_sets({GSet::identity_set(gi.group)}, h);
    const auto mu = RoughMeasure::counting(h);
    CoreParams p;
    p.stages = 2;
    p.r = 2;
    const auto core = bounded_core(mu, chain, p);
    CHECK(core.certificate.verdict);
    CHECK(core.h == h);
    CHECK(core.n == h);
    for (const auto& st : core.stages) {
      CHECK(st.a_n == h);
      CHECK(st.h == h);
      CHECK(st.n == h);
    }
  }
}
