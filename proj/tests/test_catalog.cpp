#include "doctest.h"

#include <fstream>

#include "gfe/catalog.hpp"

using namespace gfe;

namespace {

const Registry& reg() {
    static Registry r = Registry::load(std::string(GFE_DATA_DIR) + "/registry.json");
    return r;
}

nlohmann::json golden(const std::string& name) {
    std::ifstream in(std::string(GFE_TEST_DIR) + "/golden/" + name);
    REQUIRE(in.good());
    return nlohmann::json::parse(in);
}

std::vector<std::vector<std::uint64_t>> sigs(const std::vector<Signature>& v) {
    std::vector<std::vector<std::uint64_t>> out;
    for (const auto& s : v) {
        auto c = s.canonical();
        out.push_back({c[0], c[1], c[2]});
    }
    return out;
}

}  // namespace

TEST_CASE("euler characteristic classes") {
    CHECK(classify_chi({2, 3, 5}) == Chi::Spherical);
    CHECK(classify_chi({2, 2, 100}) == Chi::Spherical);
    CHECK(classify_chi({2, 4, 4}) == Chi::Euclidean);
    CHECK(classify_chi({3, 3, 3}) == Chi::Euclidean);
    CHECK(classify_chi({6, 3, 2}) == Chi::Euclidean);
    CHECK(classify_chi({4, 5, 7}) == Chi::Hyperbolic);
    CHECK(classify_chi({2, 3, 7}) == Chi::Hyperbolic);
    CHECK(to_string(Chi::Euclidean) == "Euclidean");
}

TEST_CASE("signatures are unordered") {
    Signature a{7, 3, 5}, b{3, 5, 7};
    CHECK(a == b);
    CHECK(a.canonical() == std::array<std::uint64_t, 3>{3, 5, 7});
    CHECK(a.str() == "(7,3,5)");
    CHECK(b.str() == "(3,5,7)");
}

TEST_CASE("known solutions") {
    const auto& ks = known_solutions();
    CHECK(ks.size() == 10);
    std::set<std::string> shown;
    int families = 0;
    for (const auto& k : ks) {
        CHECK(k.verify());
        shown.insert(k.str());
        families += k.catalanFamily;
    }
    CHECK(families == 1);
    CHECK(shown.count("2^5 + 7^2 = 3^4"));
    CHECK(shown.count("43^8 + 96222^3 = 30042907^2"));
    CHECK(shown.count("1^n + 2^3 = 3^2"));

    auto st = reg().status({3, 8, 2});
    CHECK(st.state == SigState::Solved);
    CHECK(st.knownSolutions.size() == 3);  // the Catalan family, 43^8 + 96222^3 and 33^8 + 1549034^2
    CHECK(reg().status({7, 3, 2}).knownSolutions.size() == 5);

    SolutionRecord bad = ks[2].rec;
    bad.z += 1;
    CHECK_FALSE(bad.verify());
}

TEST_CASE("signature status") {
    auto s = reg().status({5, 5, 5});
    CHECK(s.state == SigState::Solved);
    CHECK_FALSE(s.provenance.empty());

    s = reg().status({4, 5, 11});
    CHECK(s.state == SigState::Remaining);
    CHECK(s.clause == "4-5-n");

    s = reg().status({4, 5, 10});
    CHECK(s.state == SigState::Solved);
    CHECK(reg().status({4, 5, 10}, false).state == SigState::Remaining);

    CHECK(reg().status({2, 3, 5}).state == SigState::OutOfScope);
    CHECK(reg().status({2, 3, 7}).state == SigState::Solved);
    CHECK(reg().status({2, 3, 11}).state == SigState::Remaining);
    CHECK(reg().status({2, 3, 11}).clause == "2-3-n");
    CHECK(reg().status({2, 3, 110}).state == SigState::Solved);
    CHECK(reg().status({2, 3, 113}).state == SigState::Remaining);
    CHECK(reg().status({4, 5, 301}).state == SigState::Remaining);
    CHECK(reg().status({4, 5, 303}).state == SigState::Solved);
    CHECK(reg().status({4, 5, 307}).state == SigState::Solved);
    CHECK(reg().status({5, 5, 13}).state == SigState::Solved);
    // multiple of a solved signature
    CHECK(reg().status({6, 6, 6}).state == SigState::Solved);
    CHECK(reg().status({3, 5, 21}).state == SigState::Solved);
}

TEST_CASE("status is invariant under permutation") {
    for (std::uint64_t r = 2; r <= 9; ++r)
        for (std::uint64_t s = 2; s <= 9; ++s)
            for (std::uint64_t t : {5, 7, 11, 12, 13, 22, 111, 113}) {
                auto a = reg().status({r, s, t});
                for (Signature p : {Signature{s, t, r}, Signature{t, r, s}, Signature{s, r, t}}) {
                    auto b = reg().status(p);
                    CHECK(a.state == b.state);
                    CHECK(a.clause == b.clause);
                }
            }
}

TEST_CASE("each remaining signature lies in exactly one clause") {
    auto led = reg().count_remaining(CountMode::Beal);
    for (const auto& s : led.signatures) {
        int hits = 0;
        for (const auto& c : reg().clauses()) hits += c.pattern.matches(s);
        CHECK_MESSAGE(hits == 1, s.str());
        CHECK(reg().status(s).state == SigState::Remaining);
    }
}

TEST_CASE("ge4 count") {
    auto led = reg().count_remaining(CountMode::GE4);
    CHECK(led.count() == 244);
    CHECK(led.discrepancy.is_null());
    CHECK(led.byClause.at("4-5-n") == 80);
    CHECK(led.byClause.at("4-7-n") == 84);
    CHECK(led.byClause.at("5-6-n") == 80);
    for (const auto& s : led.signatures) CHECK(s.canonical()[0] >= 4);

    auto g = golden("catalog_ge4.json");
    CHECK(led.count() == g["count"].get<std::uint64_t>());
    CHECK(sigs(led.signatures) == g["signatures"].get<std::vector<std::vector<std::uint64_t>>>());
    for (const auto& [k, v] : g["byClause"].items()) CHECK(led.byClause.at(k) == v.get<std::uint64_t>());
}

TEST_CASE("beal count and its discrepancy") {
    auto led = reg().count_remaining(CountMode::Beal);
    auto g = golden("catalog_beal.json");
    CHECK(led.count() == g["count"].get<std::uint64_t>());
    CHECK(sigs(led.signatures) == g["signatures"].get<std::vector<std::vector<std::uint64_t>>>());
    for (const auto& [k, v] : g["byClause"].items()) CHECK(led.byClause.at(k) == v.get<std::uint64_t>());

    REQUIRE(led.expected);
    CHECK(*led.expected == 2446);
    if (led.count() != 2446) {
        const auto& d = led.discrepancy;
        REQUIRE(d.is_object());
        CHECK(d["computed"] == led.count());
        CHECK(d["delta"].get<std::int64_t>() == std::int64_t(led.count()) - 2446);
        bool explained = false;
        for (const auto& h : d["hypotheses"]) {
            auto& withheld = g["withholdingTwoThreeEightAndTen"];
            if (h["matchesExpected"].get<bool>()) explained = true;
            if (h["id"] == "withhold-2-3-8-and-2-3-10") {
                CHECK(h["count"] == withheld["count"]);
                CHECK(h["remainingOnlyUnderHypothesis"].size() == withheld["added"].size());
            }
            for (const auto& e : h["remainingOnlyUnderHypothesis"]) {
                CHECK_FALSE(e["shippedStatus"].get<std::string>().empty());
                CHECK_FALSE(e["clause"].get<std::string>().empty());
                CHECK(e["signature"].size() == 3);
            }
        }
        CHECK(explained);
    }
}

TEST_CASE("withheld divisor signatures") {
    std::set<Registry::Canon> held{{2, 3, 8}, {2, 3, 10}};
    auto a = reg().remaining(CountMode::Beal, true, {});
    auto b = reg().remaining(CountMode::Beal, true, held);
    CHECK(b.size() == 2446);
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    CHECK(reg().status_with({3, 8, 22}, true, held).state == SigState::Remaining);
    CHECK(reg().status_with({2, 3, 8}, true, held).state == SigState::Solved);
}

TEST_CASE("exclusions only remove signatures") {
    auto with = reg().count_remaining(CountMode::GE4, true);
    auto without = reg().count_remaining(CountMode::GE4, false);
    CHECK(without.count() == 891);
    CHECK_FALSE(without.exclusions);
    CHECK(std::includes(without.signatures.begin(), without.signatures.end(), with.signatures.begin(),
                        with.signatures.end()));
}

TEST_CASE("ledger json and hash") {
    auto a = reg().count_remaining(CountMode::GE4);
    auto b = reg().count_remaining(CountMode::GE4);
    CHECK(a.hash == b.hash);
    CHECK(a.hash.size() == 64);
    auto j = a.toJson();
    for (const char* k : {"byClause", "count", "discrepancy", "exclusions", "expected", "floor", "hash", "mode", "notes",
                          "signatures"})
        CHECK_MESSAGE(j.contains(k), k);
    CHECK(j["count"] == 244);
    CHECK(reg().count_remaining(CountMode::Beal).hash != a.hash);
    CHECK(reg().count_remaining(CountMode::GE4, false).hash != a.hash);
}

TEST_CASE("count modes") {
    CHECK(parse_count_mode("ge4") == CountMode::GE4);
    CHECK(parse_count_mode("beal") == CountMode::Beal);
    CHECK_THROWS(parse_count_mode("all"));
}

TEST_CASE("pattern members") {
    auto p = SigPattern::fromJson(nlohmann::json::parse(
        R"({"slots": ["3", "m", "n"], "vars": {"m": {"min": 13, "max": 17}, "n": {"max": 29}}, "less": [["m", "n"]]})"));
    CHECK(p.finite());
    auto m = p.members();
    CHECK(m.size() == 16 + 15 + 14 + 13 + 12);
    CHECK(p.matches({3, 13, 14}));
    CHECK_FALSE(p.matches({3, 13, 13}));
    CHECK_FALSE(p.matches({3, 13, 30}));
    auto inf = SigPattern::fromJson(nlohmann::json::parse(R"({"slots": ["2", "m", "n"], "vars": {"m": {"min": 5}, "n": {"min": 7}}})"));
    CHECK_FALSE(inf.finite());
    CHECK_THROWS(inf.members());
}

TEST_CASE("malformed registry") {
    CHECK_THROWS(Registry::fromJson(nlohmann::json::parse(R"({"rules": 3})")));
}
