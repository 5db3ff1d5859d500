#include "doctest.h"

#include <fstream>

#include "gfe/config.hpp"
#include "gfe/errors.hpp"
#include "gfe/ramification.hpp"

using namespace gfe;

namespace {
std::string golden(const std::string& name) { return std::string(GFE_TEST_DIR) + "/golden/" + name; }

bool divides_all(const IndexSet& s, std::uint64_t D) {
    for (auto e : s)
        if (D % e) return false;
    return true;
}
}  // namespace

TEST_CASE("dataset examples") {
    auto d1 = dataset(FreyFamily::GeneralABC, 1, 11);
    CHECK(d1.e0 == 3);
    CHECK(d1.S0 == IndexSet{2, 3, 11});
    CHECK(d1.perPrime.at(11).good == IndexSet{10, 110, 120});
    auto d2 = dataset(FreyFamily::GeneralABC, 2, 11);
    CHECK(d2.perPrime.at(11).good.empty());
    CHECK(d2.perPrime.at(11).mult == d1.perPrime.at(11).mult);
    auto d3 = dataset(FreyFamily::GeneralABC, 3, 13);
    CHECK(d3.e0 == 1);
    CHECK(d3.S0 == IndexSet{2, 13});
    CHECK(d3.perPrime.at(2).mult == IndexSet{2, 26});
    CHECK(dataset(FreyFamily::TwoThree, 2, 11, 5).id() == "twothree:2:11:5");
}

TEST_CASE("unknown datasets are refused") {
    CHECK_THROWS_AS(dataset(FreyFamily::GeneralABC, 5, 11), DomainError);
    CHECK_THROWS_AS(dataset(FreyFamily::TwoRS, 1, 11), DomainError);
    CHECK_THROWS_AS(dataset(FreyFamily::TwoThree, 2, 11), DomainError);
    CHECK_THROWS_AS(dataset(FreyFamily::GeneralABC, 1, 11, 5), DomainError);
    CHECK_THROWS(dataset(FreyFamily::GeneralABC, 1, 7));
    CHECK_THROWS(dataset(FreyFamily::GeneralABC, 1, 15));
}

TEST_CASE("catalog matches the transcribed listings") {
    std::ifstream in(golden("ramification_catalog.json"));
    REQUIRE(in);
    auto g = nlohmann::json::parse(in);
    REQUIRE(g.size() >= 40);
    for (const auto& e : g) {
        std::optional<std::uint64_t> q;
        if (e.contains("q")) q = e["q"].get<std::uint64_t>();
        auto d = dataset(parse_family(e["family"]), e["kind"], e["l"], q);
        CAPTURE(e["id"].get<std::string>());
        CHECK(to_json(d) == e);
    }
}

TEST_CASE("exact index sets divide the coarse bound") {
    for (std::uint64_t l : {11, 13, 17, 19, 23}) {
        const std::uint64_t gl2 = (l * l - 1) * (l * l - l);  // #GL(2, Z/lZ)
        CHECK(divides_all(ram_index_bound(FreyFamily::GeneralABC, TorsionField::QiE3, l, LocalReduction::Good, l).candidates, gl2));
        CHECK(divides_all(ram_index_bound(FreyFamily::GeneralABC, TorsionField::QE12, l, LocalReduction::Good, l).candidates, gl2));
        for (auto f : {TorsionField::QiE3, TorsionField::Qi}) {
            auto g2 = ram_index_bound(FreyFamily::GeneralABC, f, 2, LocalReduction::Good, l);
            CHECK(divides_all(g2.candidates, 24));
        }
        auto g3 = ram_index_bound(FreyFamily::GeneralABC, TorsionField::QiE3, 3, LocalReduction::Good, l);
        CHECK(divides_all(g3.candidates, 24));
        // multiplicative bounds refine the Q(E[12]) ones
        for (std::uint64_t p : std::vector<std::uint64_t>{2, 3, 7, l}) {
            auto coarse = ram_index_bound(FreyFamily::GeneralABC, TorsionField::QE12, p, LocalReduction::Multiplicative, l);
            auto fine = ram_index_bound(FreyFamily::GeneralABC, TorsionField::QiE3, p, LocalReduction::Multiplicative, l);
            CHECK(coarse.divisor % fine.divisor == 0);
        }
    }
}

TEST_CASE("ram index bound examples") {
    auto a = ram_index_bound(FreyFamily::GeneralABC, TorsionField::QiE3, 2, LocalReduction::Good, 11);
    CHECK(a.exact);
    CHECK(a.candidates == IndexSet{2});
    auto b = ram_index_bound(FreyFamily::GeneralABC, TorsionField::QiE3, 7, LocalReduction::Multiplicative, 11);
    CHECK_FALSE(b.exact);
    CHECK(b.divisor == 33);
    auto c = ram_index_bound(FreyFamily::ThreeRS, TorsionField::QE4, 3, LocalReduction::Multiplicative, 13);
    CHECK_FALSE(c.exact);
    CHECK(c.divisor == 104);
    CHECK_THROWS_AS(ram_index_bound(FreyFamily::TwoThree, TorsionField::QiE3, 2, LocalReduction::Good, 11), DomainError);
    CHECK_THROWS_AS(ram_index_bound(FreyFamily::TwoThree, TorsionField::QiE2q, 2, LocalReduction::Good, 11), DomainError);
}

TEST_CASE("vol lookup uses the shipped aggregates and refuses missing keys") {
    auto cfg = ToolConfig::load(ToolConfig::default_path());
    const VolTable& t = cfg.structure.vols;
    CHECK(t.hasAggregate("general/odd", 11));
    CHECK(t.aggregate("general/odd", 11).hi <= 71);
    CHECK(t.aggregate("threers/odd", 17).hi <= 403);
    CHECK(t.aggregate("threers/odd", 17).strict);
    CHECK(vol_lookup("general/odd@11", t).hi == t.aggregate("general/odd", 11).hi);
    CHECK_THROWS_AS(vol_lookup(dataset(FreyFamily::GeneralABC, 1, 11), t), ConfigError);
    CHECK_THROWS_AS(vol_lookup("general/odd@997", t), ConfigError);
    CHECK_THROWS_AS(t.raw("general:1:11"), ConfigError);
}

TEST_CASE("vol table round trips through JSON") {
    VolTable t;
    Enclosure e;
    e.lo = Rat(1, 3);
    e.hi = Rat(7, 2);
    e.provenance = "test";
    t.setRaw("general:1:11", e);
    t.setAggregate("general/odd", 13, e);
    auto back = VolTable::fromJson(t.toJson());
    CHECK(back.raw("general:1:11").hi == Rat(7, 2));
    CHECK(back.aggregate("general/odd", 13).lo == Rat(1, 3));
    CHECK(vol_lookup(dataset(FreyFamily::GeneralABC, 1, 11), back).hi == Rat(7, 2));
}
