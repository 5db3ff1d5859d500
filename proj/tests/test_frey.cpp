#include "doctest.h"

#include <random>

#include "gfe/errors.hpp"
#include "gfe/frey.hpp"
#include "oracles.hpp"

using namespace gfe;

namespace {
const FreyFamily kFamilies[] = {FreyFamily::GeneralABC, FreyFamily::TwoThree, FreyFamily::ThreeRS, FreyFamily::TwoRS};
}

TEST_CASE("abc permutation examples") {
    auto t = abc_permutation(32, 49, -81);
    CHECK(t.a == -81);
    CHECK(t.b == 32);
    CHECK(t.c == 49);
    auto u = abc_permutation(-1, 16, -15);
    CHECK(u.a == -1);
    CHECK(u.b == 16);
    CHECK(u.c == -15);
    auto w = abc_permutation(49, 32, -81);
    CHECK(w.a == -81);
    CHECK(w.b == 32);
    CHECK(w.c == 49);
    CHECK_THROWS_AS(abc_permutation(1, 2, -3), DomainError);
    CHECK_THROWS_AS(abc_permutation(8, 1, -9), DomainError);
    CHECK_THROWS_AS(abc_permutation(1, 1, 1), DomainError);
}

TEST_CASE("abc permutation output is an admissible permutation") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
        auto [a, b, c] = oracle::random_triple(FreyFamily::GeneralABC, rng, Int(1) << 20);
        if (gfe::valuation(b, 2) < 4) continue;
        Int e[3] = {a, b, c};
        int s = static_cast<int>(rng() % 3);
        auto t = abc_permutation(e[s], e[(s + 1) % 3], e[(s + 2) % 3]);
        std::multiset<std::string> in{a.get_str(), b.get_str(), c.get_str()},
            out{t.a.get_str(), t.b.get_str(), t.c.get_str()};
        CHECK(in == out);
        CHECK(mpz_divisible_ui_p(t.b.get_mpz_t(), 16));
        CHECK(mpz_divisible_ui_p(Int(t.a + 1).get_mpz_t(), 4));
    }
}

TEST_CASE("invariant examples") {
    auto g = invariants(FreyFamily::GeneralABC, -1, 16, -15);
    CHECK(g.j == Rat(Int(241) * 241 * 241, 225));
    CHECK(g.denomN.str() == "{3:2, 5:2}");
    CHECK(g.closedFormAgrees);

    auto t = invariants(FreyFamily::TwoThree, 3, -2, 1);
    CHECK(t.j == -13824);
    CHECK(t.denomN.isOne());

    auto r = invariants(FreyFamily::ThreeRS, 1, 7, 2);
    CHECK(r.j == Rat(56623104, 7));
    CHECK(r.denomN.str() == "{7:1}");

    auto s = invariants(FreyFamily::TwoRS, 1, 3, 2);
    CHECK(s.j == Rat(140608, 3));
    CHECK(s.denomN.str() == "{3:1}");
}

TEST_CASE("invalid triples are rejected") {
    CHECK_THROWS_AS(invariants(FreyFamily::GeneralABC, 1, 16, -17), DomainError);  // 4 does not divide 2
    CHECK_THROWS_AS(invariants(FreyFamily::GeneralABC, -1, 8, -7), DomainError);
    CHECK_THROWS_AS(invariants(FreyFamily::TwoThree, 1, 1, 3), DomainError);
    CHECK_THROWS_AS(invariants(FreyFamily::ThreeRS, 2, 6, 2), DomainError);  // not coprime
    CHECK_THROWS_AS(invariants(FreyFamily::TwoRS, 0, 4, 2), DomainError);
    CHECK_THROWS_AS(parse_family("elliptic"), ConfigError);
}

TEST_CASE("closed forms match the Weierstrass recurrences") {
    for (auto f : kFamilies) {
        std::string first;
        CAPTURE(to_string(f));
        CHECK(oracle::invariant_mismatches(f, 1000, 1234 + static_cast<int>(f), &first) == 0);
        CAPTURE(first);
    }
}

TEST_CASE("j times delta is c4 cubed and N is the denominator of j") {
    std::mt19937_64 rng(99);
    for (auto f : kFamilies)
        for (int i = 0; i < 300; ++i) {
            auto [a, b, c] = oracle::random_triple(f, rng, Int(1000000000));
            auto inv = invariants(f, a, b, c);
            CHECK(inv.j * inv.delta == Rat(inv.c4 * inv.c4 * inv.c4));
            CHECK(inv.denomN.value() == inv.j.get_den());
        }
}

TEST_CASE("general family: c4 is coprime to the scaled discriminant") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        auto [a, b, c] = oracle::random_triple(FreyFamily::GeneralABC, rng, Int(1) << 30);
        auto inv = invariants(FreyFamily::GeneralABC, a, b, c);
        Rat d256 = inv.delta * 256;
        CHECK(d256.get_den() == 1);
        CHECK(oracle::igcd(inv.c4, d256.get_num()) == 1);
    }
}

TEST_CASE("reduction type examples") {
    auto g = invariants(FreyFamily::GeneralABC, -1, 16, -15);
    CHECK(reduction_type(g, 7) == Reduction::Good);
    CHECK(reduction_type(g, 5) == Reduction::Multiplicative);
    auto r = invariants(FreyFamily::ThreeRS, 1, 7, 2);
    CHECK(reduction_type(r, 3) == Reduction::PotentiallyBad);
    CHECK(reduction_type(r, 7) == Reduction::Multiplicative);
    CHECK_THROWS_AS(reduction_type(r, 9), DomainError);
}
