#include <doctest.h>

#include <string>

#include "rough/errors.hpp"
#include "rough/harness.hpp"

using namespace rough;

namespace {

Scenario parse(const char* text) { return parse_scenario(Json::parse(text)); }

std::string error_of(const char* text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("minimal scenario") {
    const auto s = parse(R"({"group": {"kind": "cyclic", "n": 12}, "A": {"ball": 2}, "chain": {"radii": [2, 1, 0]}})");
    CHECK(s.group.kind == GroupSpec::Kind::cyclic);
    CHECK(s.radii.size() == 3);
    CHECK(s.operations.empty());
    const Context ctx(s);
    CHECK(ctx.a().size() == 5);
    CHECK(ctx.chain().size() == 3);
    CHECK(ctx.set(Json::parse(R"({"power": 2})")).size() == 9);
    CHECK(ctx.set(Json::parse(R"({"T": 1})")).size() == 3);
    CHECK(ctx.set(Json::parse("[0, 5]")).size() == 2);
  }

  TEST_CASE("input errors are collected and named") {
    const auto radii = error_of(R"({"group": {"kind": "cyclic", "n": 12}, "A": {"ball": 2}, "chain": {"radii": [4, 2, 2]}})");
    CHECK(radii.find("strictly decreasing") != std::string::npos);
    CHECK(radii.find("2") != std::string::npos);
    CHECK_FALSE(error_of(R"({"group": {"n": 12}, "A": {"ball": 2}})").empty());
    CHECK_FALSE(error_of(R"({"group": {"kind": "cyclic", "n": 12}, "A": {"ball": 2}, "operations": [{"op": "frobnicate"}]})").empty());
  }

  TEST_CASE("suite exit codes") {
    const auto ok = parse(R"({"group": {"kind": "cyclic", "n": 12}, "A": {"ball": 2}, "chain": {"radii": [4, 2, 1, 0]},
                              "operations": [{"op": "validate"}]})");
    CHECK(run_suite(ok).exit_code() == 0);

    const auto broken = parse(R"({"group": {"kind": "cyclic", "n": 12}, "A": {"ball": 1},
                                  "chain": {"sets": [{"ball": 1}, {"ball": 1}]}, "operations": [{"op": "validate"}]})");
    const auto res = run_suite(broken);
    CHECK(res.exit_code() == 1);
    const auto doc = suite_document(broken, res, "suite", {});
    CHECK(doc["verdict"] == "fail");
    CHECK(doc["exit_code"] == 1);
    bool witnessed = false;
    for (const auto& c : doc["certificates"])
      for (const auto& chk : c["checks"])
        if (!chk["pass"].get<bool>() && !chk["witness"].is_null()) witnessed = true;
    CHECK(witnessed);

    const auto bad_op = parse(R"({"group": {"kind": "cyclic", "n": 12}, "A": {"ball": 2}, "chain": {"radii": [4, 2, 1, 0]},
                                  "operations": [{"op": "trank", "X": "A", "t": 1, "n": 1, "index": 9}]})");
    CHECK(run_suite(bad_op).exit_code() == 2);
  }

  TEST_CASE("results keep declaration order with several workers") {
    const auto s = parse(R"({"group": {"kind": "cyclic", "n": 12}, "A": {"ball": 2}, "chain": {"radii": [4, 2, 1, 0]},
                             "operations": [{"op": "union", "families": 20}, {"op": "validate"},
                                            {"op": "axioms", "trials": 30}, {"op": "thickness", "pairs": 5}]})");
    RunOptions opt;
    opt.workers = 3;
    const auto res = run_suite(s, opt);
    REQUIRE(res.operations.size() == 4);
    CHECK(res.operations[0].spec.op == "union");
    CHECK(res.operations[1].spec.op == "validate");
    CHECK(res.operations[2].spec.op == "axioms");
    CHECK(res.operations[3].spec.op == "thickness");
    const auto serial = run_suite(s);
    CHECK(suite_document(s, res, "suite", opt)["certificates"] == suite_document(s, serial, "suite", {})["certificates"]);
  }

  TEST_CASE("metric sequence on one scale") {
    const auto fam = cyclic_power_family(4, {2});
    REQUIRE(fam.size() == 1);
    CHECK(fam[0].radii.size() == 3);
    const auto cert = metric_sequence_report(fam, 1, {Rational(5)});
    CHECK(cert.values["table"].size() == 3);
    CHECK(cert.values["trend"].size() == 3);
    CHECK(cert.values["table"][0]["checks"]["A symmetric"] == true);
  }

  TEST_CASE("metric sequence flags a radius that does not shrink fast enough") {
    auto s = parse(R"({"group": {"kind": "cyclic", "n": 16}, "A": {"ball": 2}, "chain": {"radii": [3, 2, 1]}, "scale": 1})");
    const auto cert = metric_sequence_report({s}, 1, {Rational(9)});
    CHECK_FALSE(cert.verdict);
    const auto& row = cert.values["table"][1];
    CHECK(row["checks"]["max{ell,2} r_i ≤ r_(i-1)"] == false);
    CHECK(cert.values["table"][2]["checks"]["max{ell,2} r_i ≤ r_(i-1)"] == true);
  }
}
