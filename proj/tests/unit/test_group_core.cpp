#include <doctest.h>

#include "../support/bridge.hpp"
#include "rough/errors.hpp"
#include "rough/metric.hpp"

using namespace rough;
using oracle::Q;

TEST_SUITE("group_core") {
  TEST_CASE("cyclic word metric is circular distance") {
    auto gi = bridge::cyclic(12);
    CHECK(gi.group->order() == 12);
    for (Element x = 0; x < 12; ++x)
      for (Element y = 0; y < 12; ++y) {
        const int diff = (static_cast<int>(y) - static_cast<int>(x) + 12) % 12;
        CHECK(gi.metric->dist(x, y) == Rational(std::min(diff, 12 - diff)));
      }
  }

  TEST_CASE("balls in Z_12") {
    auto gi = bridge::cyclic(12);
    CHECK(to_json(gi.metric->ball(Rational(2))) == Json::parse("[0,1,2,10,11]"));
    CHECK(gi.metric->ball(Rational(0)).size() == 1);
    CHECK(gi.metric->ball(Rational(6)).is_full());
    CHECK(gi.metric->ball(Rational(5)).size() == 11);
  }

  TEST_CASE("dihedral and heisenberg tables match independent constructions") {
    const auto d = make_group(GroupSpec::dihedral(6));
    const auto od = oracle::dihedral(6);
    const auto h = make_group(GroupSpec::heisenberg(3));
    const auto oh = oracle::heisenberg(3);
    REQUIRE(d.group->order() == 12);
    REQUIRE(h.group->order() == 27);
    for (int x = 0; x < 12; ++x)
      for (int y = 0; y < 12; ++y) CHECK(static_cast<int>(d.group->mul(x, y)) == od.mul(x, y));
    for (int x = 0; x < 27; ++x)
      for (int y = 0; y < 27; ++y) CHECK(static_cast<int>(h.group->mul(x, y)) == oh.mul(x, y));
  }

  TEST_CASE("heisenberg(3) word lengths and diameter by breadth-first search") {
    const auto h = make_group(GroupSpec::heisenberg(3));
    const auto om = oracle::heisenberg_metric(3);
    int diam = 0;
    for (int x = 0; x < 27; ++x) {
      CHECK(h.metric->norm(x) == Rational(om.len[x]));
      diam = std::max(diam, om.len[x]);
    }
    CHECK(h.metric->diameter() == Rational(diam));
  }

  TEST_CASE("left invariance restated at the identity") {
    for (auto spec : {GroupSpec::cyclic(10), GroupSpec::dihedral(5), GroupSpec::heisenberg(3)}) {
      const auto gi = make_group(spec);
      const auto& g = *gi.group;
      for (Element x = 0; x < g.order(); ++x)
        for (Element y = 0; y < g.order(); ++y)
          CHECK(gi.metric->dist(x, y) == gi.metric->norm(g.mul(g.inv(x), y)));
    }
  }

  TEST_CASE("ball products stay inside the sum ball") {
    const auto gi = make_group(GroupSpec::dihedral(7));
    for (int r = 0; r <= 3; ++r)
      for (int s = 0; s <= 3; ++s) {
        const auto prod = product_set(gi.metric->ball(Rational(r)), gi.metric->ball(Rational(s)));
        CHECK(prod.is_subset_of(gi.metric->ball(Rational(r + s))));
      }
  }

  TEST_CASE("non-associative table is rejected") {
    // Latin square with identity 0 that is not a group (order 5).
    std::vector<std::vector<Element>> t = {
        {0, 1, 2, 3, 4}, {1, 0, 3, 4, 2}, {2, 4, 0, 1, 3}, {3, 2, 4, 0, 1}, {4, 3, 1, 2, 0}};
    CHECK_THROWS_AS(make_group(GroupSpec::explicit_table(t, {}, {}, {"1"})), InputError);
  }

  TEST_CASE("order budget is enforced") {
    CHECK_THROWS_AS(make_group(GroupSpec::cyclic(5000)), BudgetExceeded);
    CHECK(make_group(GroupSpec::cyclic(5000), 5000).group->order() == 5000);
  }

  TEST_CASE("asymmetric generators are symmetrized and noted") {
    const auto gi = make_group(GroupSpec::cyclic(12, {"1"}));
    CHECK(gi.metric->norm(11) == Rational(1));
    CHECK_FALSE(gi.notes.empty());
  }

  TEST_CASE("abelian groups are 1-Lipschitz") {
    const auto gi = bridge::cyclic(12);
    const auto a = gi.metric->ball(Rational(3));
    const auto cert = validate_structure(*gi.metric, a, 1, Rational(6));
    CHECK(cert.verdict);
    CHECK(cert.values["least_ell"] == 1);
  }

  TEST_CASE("explicit matrix that is not left invariant fails with a witness") {
    const auto cyc = bridge::cyclic(4);
    std::vector<std::vector<Element>> t(4, std::vector<Element>(4));
    for (Element x = 0; x < 4; ++x)
      for (Element y = 0; y < 4; ++y) t[x][y] = cyc.group->mul(x, y);
    std::vector<std::vector<Rational>> dist(4, std::vector<Rational>(4, Rational(1)));
    for (int k = 0; k < 4; ++k) dist[k][k] = Rational(0);
    dist[0][1] = dist[1][0] = Rational(2);
    dist[0][2] = dist[2][0] = Rational(2);
    const auto gi = make_group(GroupSpec::explicit_table(t, {}, dist));
    const auto cert = validate_structure(*gi.metric, GSet::identity_set(gi.group), 1, Rational(2));
    CHECK_FALSE(cert.verdict);
    bool found = false;
    for (const auto& c : cert.checks)
      if (c["name"] == "left_invariance" && !c["pass"].get<bool>()) found = !c["witness"].is_null();
    CHECK(found);
  }

  TEST_CASE("least Lipschitz constant of the reflections in dihedral(6)") {
    const auto gi = make_group(GroupSpec::dihedral(6));
    const auto om = oracle::dihedral_metric(6);
    GSet refl(gi.group);
    for (Element e = 6; e < 12; ++e) refl.insert(e);
    const Rational diam = gi.metric->diameter();
    Q worst(0);
    for (int a = 6; a < 12; ++a)
      for (int x = 0; x < 12; ++x)
        for (int y = 0; y < 12; ++y)
          if (x != y) worst = std::max(worst, Q(om.dist(om.g.mul(x, a), om.g.mul(y, a)), om.dist(x, y)));
    const auto cert = validate_structure(*gi.metric, refl, 1, diam);
    const auto expect = std::max<std::int64_t>(1, (worst.numerator() + worst.denominator() - 1) / worst.denominator());
    CHECK(cert.values["least_ell"] == expect);
    CHECK(cert.values["max_ratio"] == to_string(worst));
    CHECK(validate_structure(*gi.metric, refl, expect, diam).verdict);
  }
}
