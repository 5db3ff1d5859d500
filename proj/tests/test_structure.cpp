#include "doctest.h"

#include "gfe/config.hpp"
#include "gfe/errors.hpp"
#include "gfe/structure.hpp"

using namespace gfe;
using Set = std::set<std::uint64_t>;

namespace {
const StructureConfig& shipped() {
    static const ToolConfig cfg = ToolConfig::load(ToolConfig::default_path());
    return cfg.structure;
}
}  // namespace

TEST_CASE("structure a1 coefficient") {
    CHECK(structure_a1(3, 1, 11) == 4);
    Rat expect(Int(3 * (169 + 65)), Int(169 + 13 - 12));
    expect *= Rat(12, 13);
    expect.canonicalize();
    CHECK(structure_a1(3, 1, 13) == expect);
}

TEST_CASE("general x_l classification") {
    auto g = general_constants(shipped());
    std::map<std::pair<std::uint64_t, std::uint64_t>, Set> expect = {
        {{4, 11}, {1, 3, 5}}, {{4, 13}, {1, 3}}, {{4, 17}, {1, 3}},
        {{5, 11}, {1, 3}},    {{5, 13}, {1, 3}}, {{6, 11}, {1, 3}},
    };
    CHECK(g.xlTable == expect);
    CHECK(general_xl_candidates(4, 11, shipped()) == Set{1, 3, 5});
    CHECK(general_xl_candidates(7, 11, shipped()) == Set{1});
    CHECK(general_xl_candidates(4, 19, shipped()) == Set{1});
    CHECK_THROWS_AS(general_xl_candidates(11, 11, shipped()), DomainError);
    CHECK_THROWS_AS(general_xl_candidates(4, 7, shipped()), DomainError);
}

TEST_CASE("general uniform constants") {
    auto g = general_constants(shipped());
    CHECK(g.rl == 37);
    CHECK(g.rlZero == 38);
    CHECK(g.twoAdic == 306);
    CHECK(g.twoAdicR == 303);
    CHECK(g.x1Collapse == 69);
}

TEST_CASE("three-r-s uniform constants") {
    auto c = threers_constants(shipped());
    CHECK(c.rl == 56);
    CHECK(c.threeAdic == 153);
    CHECK(c.twoAdic == 667);
    CHECK(c.collapse == 138);
}

TEST_CASE("two-three admissible exponents") {
    auto c = twothree_constants(shipped());
    Set high;
    for (auto t : c.admissibleT)
        if (t > 109) high.insert(t);
    CHECK(high == Set{113, 121});
    CHECK(c.admissibleT.count(109));
    CHECK_FALSE(c.admissibleT.count(14));  // 7 | t
    CHECK(c.admissibleT.count(25));
    CHECK_FALSE(c.admissibleT.count(105));  // 15 | t
}

TEST_CASE("general profile examples") {
    auto p4 = structure_profile(StructureFamily::General, {4, 5, 6}, 11, shipped());
    CHECK(p4.var("x").lParts == Set{1, 3, 5});
    auto p38 = structure_profile(StructureFamily::General, {38, 5, 6}, 11, shipped());
    CHECK(*p38.var("x").eLCap == 0);
    CHECK(p38.var("x").lParts == Set{1});
    CHECK_FALSE(p38.var("x").smoothForcedOne);
    auto p69 = structure_profile(StructureFamily::General, {69, 5, 6}, 13, shipped());
    CHECK(p69.var("x").smoothForcedOne);
    CHECK(*p69.var("x").eLCap == 0);
    CHECK(p69.var("x").finite());
    CHECK_THROWS_AS(structure_profile(StructureFamily::General, {3, 5, 6}, 11, shipped()), DomainError);
    CHECK_THROWS_AS(structure_profile(StructureFamily::General, {4, 5, 22}, 11, shipped()), DomainError);
}

TEST_CASE("three-r-s profile example") {
    auto p = structure_profile(StructureFamily::ThreeRS, {7, 11}, 17, shipped());
    CHECK(p.var("y").lParts == Set{1});
    CHECK(p.var("x").lParts == Set{1});
    CHECK(p.var("x").split3);
    CHECK_FALSE(p.joints.empty());
}

TEST_CASE("missing tables are configuration errors") {
    StructureConfig empty;
    CHECK_THROWS_AS(general_constants(empty), ConfigError);
    CHECK_THROWS_AS(threers_constants(empty), ConfigError);
    CHECK_THROWS_AS(empty.h("general.odd.s0>=7"), ConfigError);
}

TEST_CASE("structure config round trip") {
    auto j = shipped().toJson();
    auto back = StructureConfig::fromJson(j);
    CHECK(back.toJson() == j);
}
