#include <doctest.h>

#include <random>

#include "../support/bridge.hpp"
#include "rough/gset.hpp"

using namespace rough;

namespace {

GSet random_set(const std::shared_ptr<const FiniteGroup>& g, std::mt19937_64& rng, unsigned num = 1, unsigned den = 3) {
  GSet s(g);
  for (Element e = 0; e < g->order(); ++e)
    if (rng() % den < num) s.insert(e);
  return s;
}

}  // namespace

TEST_SUITE("set_algebra") {
  TEST_CASE("small products in Z_12") {
    const auto gi = bridge::cyclic(12);
    const GSet x(gi.group, {0, 1});
    const GSet y(gi.group, {0, 3});
    CHECK(to_json(product_set(x, y)) == Json::parse("[0,1,3,4]"));
    CHECK(product_set(x, GSet::identity_set(gi.group)) == x);
    const auto d2 = gi.metric->ball(Rational(2));
    const auto d4 = product_set(d2, d2);
    CHECK(d4.size() == 9);
    CHECK(d4 == gi.metric->ball(Rational(4)));
  }

  TEST_CASE("products agree with brute force on all three families") {
    std::mt19937_64 rng(5);
    for (auto spec : {GroupSpec::cyclic(15), GroupSpec::dihedral(6), GroupSpec::heisenberg(3)}) {
      const auto gi = make_group(spec);
      const oracle::Group og = spec.kind == GroupSpec::Kind::cyclic     ? oracle::cyclic(15)
                               : spec.kind == GroupSpec::Kind::dihedral ? oracle::dihedral(6)
                                                                        : oracle::heisenberg(3);
      for (int trial = 0; trial < 30; ++trial) {
        const auto x = random_set(gi.group, rng);
        const auto y = random_set(gi.group, rng);
        CHECK(bridge::to_set(product_set(x, y)) == oracle::product(og, bridge::to_set(x), bridge::to_set(y)));
        CHECK(bridge::to_set(inverse_set(x)) == oracle::inverse(og, bridge::to_set(x)));
        CHECK(bridge::to_set(power(x, 3)) == oracle::power(og, bridge::to_set(x), 3));
      }
    }
  }

  TEST_CASE("inverse and symmetry") {
    const auto gi = bridge::cyclic(12);
    const GSet one(gi.group, {1});
    CHECK(to_json(inverse_set(one)) == Json::parse("[11]"));
    CHECK_FALSE(is_symmetric(one));
    for (int r = 0; r <= 6; ++r) CHECK(is_symmetric(gi.metric->ball(Rational(r))));
    const auto d = make_group(GroupSpec::dihedral(6));
    GSet refl = GSet::identity_set(d.group);
    for (Element e = 6; e < 12; ++e) refl.insert(e);
    CHECK(is_symmetric(refl));
  }

  TEST_CASE("translates") {
    const auto gi = bridge::cyclic(12);
    const auto d2 = gi.metric->ball(Rational(2));
    CHECK(to_json(translate_set(6, d2)) == Json::parse("[4,5,6,7,8]"));
    CHECK(translate_set(0, d2) == d2);
    const auto d = make_group(GroupSpec::dihedral(5));
    std::mt19937_64 rng(2);
    for (int k = 0; k < 20; ++k) {
      const auto x = random_set(d.group, rng);
      for (Element g = 0; g < 10; ++g) {
        CHECK(translate_set(g, x).size() == x.size());
        CHECK(translate_set(g, x, Side::right).size() == x.size());
      }
    }
  }

  TEST_CASE("normalisation") {
    const auto gi = bridge::cyclic(12);
    std::mt19937_64 rng(3);
    CHECK(normalizes(random_set(gi.group, rng), random_set(gi.group, rng)).verdict);
    const auto d = make_group(GroupSpec::dihedral(6));
    GSet rot(d.group);
    for (Element e = 0; e < 6; ++e) rot.insert(e);
    const GSet y(d.group, {0, 6});
    const auto cert = normalizes(rot, y);
    CHECK_FALSE(cert.verdict);
    // Rotations form a normal subgroup.
    CHECK(normalizes(GSet::full(d.group), rot).verdict);
  }

  TEST_CASE("generated closure") {
    const auto gi = bridge::cyclic(12);
    CHECK(generated_closure(GSet::identity_set(gi.group)).size() == 1);
    const GSet evens(gi.group, {0, 2, 10});
    const auto c = generated_closure(evens);
    CHECK(c.size() == 6);
    CHECK(to_json(c) == Json::parse("[0,2,4,6,8,10]"));
    CHECK(generated_closure(gi.metric->ball(Rational(2))).is_full());
  }

  TEST_CASE("algebraic laws on sampled sets") {
    const auto d = make_group(GroupSpec::dihedral(7));
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      const auto x = random_set(d.group, rng, 1, 4);
      const auto y = random_set(d.group, rng, 1, 4);
      const auto z = random_set(d.group, rng, 1, 4);
      CHECK(product_set(product_set(x, y), z) == product_set(x, product_set(y, z)));
      CHECK(inverse_set(product_set(x, y)) == product_set(inverse_set(y), inverse_set(x)));
      auto yy = y;
      yy.insert(0);
      CHECK(x.is_subset_of(product_set(x, yy)));
      auto sym = x | inverse_set(x);
      sym.insert(0);
      for (std::size_t n = 1; n <= 3; ++n) CHECK(is_symmetric(power(sym, n)));
    }
  }

  TEST_CASE("normal core of a non-normal subgroup") {
    const auto d = make_group(GroupSpec::dihedral(6));
    const GSet h(d.group, {0, 6});
    CHECK(normal_core(h, GSet::full(d.group)).size() == 1);
    GSet rot(d.group);
    for (Element e = 0; e < 6; ++e) rot.insert(e);
    CHECK(normal_core(rot, GSet::full(d.group)) == rot);
  }

  TEST_CASE("power table matches direct powers") {
    const auto gi = make_group(GroupSpec::heisenberg(3));
    const auto a = gi.metric->ball(Rational(1));
    PowerTable pt(a);
    for (std::size_t n = 0; n <= 4; ++n) CHECK(pt(n) == power(a, n));
  }
}
