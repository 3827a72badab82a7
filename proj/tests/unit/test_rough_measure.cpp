#include <doctest.h>

#include <random>

#include "../support/bridge.hpp"
#include "rough/errors.hpp"
#include "rough/measure.hpp"

using namespace rough;
using oracle::Q;

namespace {

ThickeningChain z12_chain(const GroupInstance& gi, int a_radius = 2) {
  return ThickeningChain::from_radii(*gi.metric, {Rational(4), Rational(2), Rational(1), Rational(0)},
                                     gi.metric->ball(Rational(a_radius)));
}

bool separated(const LeftInvariantMetric& m, const GSet& w, const Rational& r) {
  const auto e = w.elements();
  for (std::size_t a = 0; a < e.size(); ++a)
    for (std::size_t b = a + 1; b < e.size(); ++b)
      if (!(m.dist(e[a], e[b]) > r)) return false;
  return true;
}

}  // namespace

TEST_SUITE("rough_measure") {
  TEST_CASE("packing numbers on Z_12 match exhaustive search") {
    const auto gi = bridge::cyclic(12);
    const auto om = oracle::cyclic_metric(12);
    const auto d2 = gi.metric->ball(Rational(2));
    const auto d4 = gi.metric->ball(Rational(4));
    const auto p2 = packing_number(*gi.metric, d2, Rational(1));
    const auto p4 = packing_number(*gi.metric, d4, Rational(1));
    CHECK(p2.value == 3);
    CHECK(p4.value == 5);
    CHECK(p2.value == static_cast<std::int64_t>(oracle::packing(om, bridge::to_set(d2), Q(1))));
    CHECK(p4.value == static_cast<std::int64_t>(oracle::packing(om, bridge::to_set(d4), Q(1))));
    CHECK(p2.witness.size() == 3);
    CHECK(separated(*gi.metric, p2.witness, Rational(1)));
    CHECK(p4.witness.is_subset_of(d4));
    CHECK(separated(*gi.metric, p4.witness, Rational(1)));
  }

  TEST_CASE("radius zero counts points") {
    const auto gi = make_group(GroupSpec::dihedral(5));
    std::mt19937_64 rng(1);
    for (int k = 0; k < 20; ++k) {
      GSet y(gi.group);
      for (Element e = 0; e < 10; ++e)
        if (rng() % 2) y.insert(e);
      CHECK(packing_number(*gi.metric, y, Rational(0)).value == static_cast<std::int64_t>(y.size()));
    }
  }

  TEST_CASE("exact packing agrees with brute force; greedy never exceeds it") {
    std::mt19937_64 rng(9);
    const auto d = make_group(GroupSpec::dihedral(8));
    const auto h = make_group(GroupSpec::heisenberg(3));
    const auto od = oracle::dihedral_metric(8);
    const auto oh = oracle::heisenberg_metric(3);
    for (int trial = 0; trial < 60; ++trial) {
      const bool use_d = trial % 2 == 0;
      const auto& gi = use_d ? d : h;
      const auto& om = use_d ? od : oh;
      GSet y(gi.group);
      for (Element e = 0; e < gi.group->order(); ++e)
        if (rng() % 3 == 0) y.insert(e);
      const Rational r(static_cast<std::int64_t>(rng() % 3));
      const auto exact = packing_number(*gi.metric, y, r);
      const auto greedy = packing_number(*gi.metric, y, r, SearchMode::greedy);
      CHECK(exact.exact);
      CHECK(exact.value == static_cast<std::int64_t>(oracle::packing(om, bridge::to_set(y), Q(r.numerator(), r.denominator()))));
      CHECK(greedy.value <= exact.value);
      CHECK(separated(*gi.metric, greedy.witness, r));
      CHECK(greedy.witness.is_subset_of(y));
      // A translated witness is a witness for the translate.
      const Element g = static_cast<Element>(rng() % gi.group->order());
      CHECK(packing_number(*gi.metric, translate_set(g, y), r).value == exact.value);
      CHECK(separated(*gi.metric, translate_set(g, exact.witness), r));
    }
  }

  TEST_CASE("normalised measure values") {
    const auto gi = bridge::cyclic(12);
    const auto chain = z12_chain(gi);
    RoughMeasureSpec spec;
    spec.index = 2;  // radius 1
    const auto m = RoughMeasure::for_chain(gi.metric, chain, spec);
    CHECK(m(chain.base()) == Rational(1));
    CHECK(m(gi.metric->ball(Rational(4))) == Rational(5, 3));
    CHECK(m(GSet(gi.group)) == Rational(0));
  }

  TEST_CASE("single additivity instance") {
    const auto gi = bridge::cyclic(12);
    const auto chain = z12_chain(gi);
    RoughMeasureSpec spec;
    spec.index = 2;
    const auto m = RoughMeasure::for_chain(gi.metric, chain, spec);
    const GSet y(gi.group, {0});
    const GSet z(gi.group, {3});
    const auto t = gi.metric->ball(Rational(2));
    const auto cert = check_additivity_pair(m, y, z, t);
    CHECK(cert.verdict);
    CHECK(cert.values["Y ∩ ZT empty"] == true);
    CHECK(m.raw(y | z) == 2);
  }

  TEST_CASE("axioms hold on Z_12 at every chain index") {
    const auto gi = bridge::cyclic(12);
    const auto chain = z12_chain(gi);
    for (std::size_t i = 0; i < chain.size(); ++i) {
      RoughMeasureSpec spec;
      spec.index = i;
      const auto m = RoughMeasure::for_chain(gi.metric, chain, spec);
      AxiomCheckOptions opt;
      opt.trials = 300;
      opt.seed = 40 + i;
      const auto cert = check_measure_axioms(m, chain, i, opt);
      CHECK(cert.verdict);
      CHECK(cert.values["pairs_where_YT_meets_Z"] == 0);
    }
  }

  TEST_CASE("counting measure with trivial thickening is additive on disjoint sets") {
    const auto gi = make_group(GroupSpec::dihedral(4));
    const auto a = gi.metric->ball(Rational(1));
    const auto m = RoughMeasure::counting(a);
    std::mt19937_64 rng(4);
    for (int k = 0; k < 50; ++k) {
      GSet y(gi.group), z(gi.group);
      for (Element e = 0; e < 8; ++e) {
        const auto c = rng() % 3;
        if (c == 0) y.insert(e);
        if (c == 1) z.insert(e);
      }
      CHECK(m(y | z) == m(y) + m(z));
      CHECK(m(y) == Rational(static_cast<std::int64_t>(y.size()), static_cast<std::int64_t>(a.size())));
    }
  }

  TEST_CASE("union lower bound") {
    const auto gi = bridge::cyclic(12);
    const auto chain = z12_chain(gi);
    RoughMeasureSpec spec;
    spec.index = 2;
    const auto m = RoughMeasure::for_chain(gi.metric, chain, spec);
    const auto d2 = gi.metric->ball(Rational(2));
    const auto t1 = gi.metric->ball(Rational(1));
    const auto one = union_lower_bound(m, {d2}, t1);
    CHECK(one.slack == Rational(0));
    const auto two = union_lower_bound(m, {d2, translate_set(6, d2)}, t1);
    CHECK(two.lhs == Rational(2));
    CHECK(two.rhs == Rational(2));
    CHECK(two.slack == Rational(0));
    CHECK(two.certificate.verdict);
  }

  TEST_CASE("chain validation reports the failing pair") {
    const auto gi = bridge::cyclic(12);
    const auto d1 = gi.metric->ball(Rational(1));
    const auto bad = ThickeningChain::from_sets({d1, d1}, d1).validate();
    CHECK_FALSE(bad.verdict);
    bool witnessed = false;
    for (const auto& c : bad.checks)
      if (c["name"] == "T_1^2 ⊆ T_0") witnessed = !c["pass"].get<bool>() && !c["witness"].is_null();
    CHECK(witnessed);
    CHECK(z12_chain(gi).validate().verdict);
  }

  TEST_CASE("preconditions") {
    const auto gi = bridge::cyclic(12);
    CHECK_THROWS_AS(ThickeningChain::from_radii(*gi.metric, {Rational(1), Rational(2)}, gi.metric->ball(Rational(1))),
                    InputError);
    CHECK_THROWS_AS(RoughMeasure::counting(GSet(gi.group)), InputError);
    const auto chain = z12_chain(gi);
    CHECK_THROWS_AS((void)chain.at(9), InputError);
  }

  TEST_CASE("node budget exhaustion is reported") {
    const auto gi = make_group(GroupSpec::heisenberg(5));
    std::mt19937_64 rng(3);
    GSet y(gi.group);
    for (Element e = 0; e < gi.group->order(); ++e)
      if (rng() % 2) y.insert(e);
    const auto res = packing_number(*gi.metric, y, Rational(1), SearchMode::exact, 10);
    CHECK_FALSE(res.exact);
    CHECK(res.value <= res.upper_bound);
  }
}
