#pragma once

// Independent reference computations shared by the unit tests and the acceptance runner.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "gfe/arith.hpp"
#include "gfe/bounds.hpp"
#include "gfe/frey.hpp"
#include "gfe/search.hpp"

namespace oracle {

using gfe::Int;
using gfe::Rat;
using u64 = std::uint64_t;

inline Int big_random(std::mt19937_64& rng, unsigned bits) {
    Int r = 0;
    for (unsigned i = 0; i < bits; i += 32) r = (r << 32) + Int(static_cast<unsigned long>(rng() & 0xffffffffULL));
    Int m = 1;
    m <<= bits;
    return r % m;
}

inline Int igcd(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

// ---- arith laws

struct LawResult {
    u64 cases = 0;
    u64 failures = 0;
    std::string first;
};

// Random factored integers from a pool of primes, some above the trial-division range.
inline gfe::FactoredInteger random_factored(std::mt19937_64& rng) {
    static const std::vector<unsigned long> pool = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 97, 101, 65537, 1000003, 2147483647UL};
    gfe::FactoredInteger::Map m;
    int n = static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) m[Int(pool[rng() % pool.size()])] = 1 + rng() % 9;
    return gfe::FactoredInteger::trusted(m);
}

inline Int radical_by_trial(Int n) {
    Int r = 1;
    for (unsigned long p = 2; n > 1; ++p) {
        if (Int(p) * Int(p) > n) {
            r *= n;
            break;
        }
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            r *= p;
            while (mpz_divisible_ui_p(n.get_mpz_t(), p)) n /= p;
        }
        if (p > 70000) {  // remaining cofactor of the pool is a product of large pool primes
            for (unsigned long q : {1000003UL, 2147483647UL})
                if (mpz_divisible_ui_p(n.get_mpz_t(), q)) {
                    r *= q;
                    while (mpz_divisible_ui_p(n.get_mpz_t(), q)) n /= q;
                }
            if (n > 1) r *= n;
            break;
        }
    }
    return r;
}

// Radical multiplicativity and idempotence, coprime/k-full maximality, nth-root sandwich.
inline LawResult arith_laws(u64 cases, u64 seed) {
    std::mt19937_64 rng(seed);
    LawResult res;
    auto fail = [&](const std::string& what) {
        if (!res.failures++) res.first = what;
    };
    for (u64 i = 0; i < cases; ++i) {
        ++res.cases;
        switch (i % 4) {
            case 0: {
                auto A = random_factored(rng), B = random_factored(rng);
                auto rA = gfe::radical(A);
                if (gfe::radical(rA) != rA) fail("radical not idempotent on " + A.str());
                if (rA.value() != radical_by_trial(A.value())) fail("radical disagrees with trial division on " + A.str());
                if (igcd(A.value(), B.value()) == 1 && gfe::radical(A * B) != rA * gfe::radical(B))
                    fail("radical not multiplicative on " + A.str() + " " + B.str());
                break;
            }
            case 1: {
                auto N = random_factored(rng);
                Int k = 1 + Int(static_cast<unsigned long>(rng() % 3000));
                auto C = gfe::coprime_part(N, k);
                Int rest = N.value() / C.value();
                if (C.value() * rest != N.value()) fail("coprime part does not divide " + N.str());
                if (igcd(C.value(), k) != 1) fail("coprime part shares a factor with k");
                // maximality: every prime left in N / C divides k
                for (const auto& [p, e] : N.factors())
                    if (!C.factors().count(p) && !mpz_divisible_p(k.get_mpz_t(), p.get_mpz_t()))
                        fail("coprime part of " + N.str() + " drops a prime not dividing k");
                break;
            }
            case 2: {
                auto N = random_factored(rng);
                unsigned long k = 2 + rng() % 8;
                auto F = gfe::k_full_part(N, k);
                if (!F.divides(N)) fail("k-full part does not divide " + N.str());
                for (const auto& [p, e] : F.factors())
                    if (e % k || N.valuation(p) != e) fail("k-full part has a bad exponent");
                for (const auto& [p, e] : N.factors())
                    if (!F.factors().count(p) && e % k == 0) fail("k-full part of " + N.str() + " is not maximal");
                break;
            }
            case 3: {
                Int n = 1 + big_random(rng, 1 + static_cast<unsigned>(rng() % 200));
                unsigned long t = 2 + rng() % 30;
                auto nr = gfe::integer_nth_root(n, t);
                Int lo = gfe::ipow(nr.root, t), hi = gfe::ipow(nr.root + 1, t);
                if (!(lo <= n && n < hi)) fail("nth-root sandwich fails for t=" + std::to_string(t));
                if (nr.exact != (lo == n)) fail("nth-root exact flag wrong");
                break;
            }
        }
    }
    return res;
}

// ---- Weierstrass invariants from the defining equation

struct Weierstrass {
    Rat a1, a2, a3, a4, a6;
};

inline Weierstrass defining_equation(gfe::FreyFamily f, const Int& a, const Int& b, const Int& c) {
    using F = gfe::FreyFamily;
    switch (f) {
        case F::GeneralABC: return {1, Rat(b - a - 1, 4), 0, Rat(-a * b, 16), 0};
        case F::TwoThree: return {0, 0, 0, Rat(3 * b), Rat(2 * a)};
        case F::ThreeRS: return {Rat(3 * c), 0, Rat(a), 0, 0};
        case F::TwoRS: return {0, Rat(2 * c), 0, Rat(a), 0};
    }
    return {};
}

struct Invariants {
    Rat c4, delta, j;
};

inline Invariants weierstrass_invariants(const Weierstrass& w) {
    Rat b2 = w.a1 * w.a1 + 4 * w.a2;
    Rat b4 = 2 * w.a4 + w.a1 * w.a3;
    Rat b6 = w.a3 * w.a3 + 4 * w.a6;
    Rat b8 = w.a1 * w.a1 * w.a6 + 4 * w.a2 * w.a6 - w.a1 * w.a3 * w.a4 + w.a2 * w.a3 * w.a3 - w.a4 * w.a4;
    Invariants r;
    r.c4 = b2 * b2 - 24 * b4;
    r.delta = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
    r.c4.canonicalize();
    r.delta.canonicalize();
    r.j = r.c4 * r.c4 * r.c4 / r.delta;
    r.j.canonicalize();
    return r;
}

// A random valid triple for the family with every |entry| <= bound.
inline std::tuple<Int, Int, Int> random_triple(gfe::FreyFamily f, std::mt19937_64& rng, const Int& bound) {
    using F = gfe::FreyFamily;
    auto root = [&](unsigned long k) {
        Int r;
        mpz_root(r.get_mpz_t(), bound.get_mpz_t(), k);
        return r;
    };
    auto pick = [&](const Int& cap) {
        Int v = 1 + big_random(rng, static_cast<unsigned>(mpz_sizeinbase(cap.get_mpz_t(), 2)) + 1) % cap;
        return (rng() & 1) ? Int(-v) : v;
    };
    for (;;) {
        Int a, b, c;
        switch (f) {
            case F::GeneralABC:
                a = 4 * pick(bound / 4) - 1;
                b = 16 * pick(bound / 16);
                c = -a - b;
                break;
            case F::TwoThree:
                a = pick(root(2));
                b = pick(root(3));
                c = a * a + b * b * b;
                break;
            case F::ThreeRS:
                a = pick(bound);
                c = pick(root(3));
                b = c * c * c - a;
                break;
            case F::TwoRS:
                a = pick(bound);
                c = pick(root(2));
                b = c * c - a;
                break;
        }
        if (a == 0 || b == 0 || c == 0) continue;
        if (abs(a) > bound || abs(b) > bound || abs(c) > bound) continue;
        if (igcd(igcd(a, b), c) != 1) continue;
        return {a, b, c};
    }
}

// Failures of the closed-form invariants against the recurrences on `n` random triples.
inline u64 invariant_mismatches(gfe::FreyFamily f, u64 n, u64 seed, std::string* first = nullptr) {
    std::mt19937_64 rng(seed);
    u64 bad = 0;
    gfe::FactorOptions fo;
    fo.maxSeconds = 5;
    for (u64 i = 0; i < n; ++i) {
        auto [a, b, c] = random_triple(f, rng, Int(1000000));
        auto inv = gfe::invariants(f, a, b, c, fo);
        auto w = weierstrass_invariants(defining_equation(f, a, b, c));
        if (Rat(inv.c4) != w.c4 || inv.delta != w.delta || inv.j != w.j) {
            if (!bad++ && first) *first = a.get_str() + "," + b.get_str() + "," + c.get_str();
        }
    }
    return bad;
}

// ---- naive double loop for check_pair

using RecKey = std::tuple<std::string, std::string, std::string, u64, int, int>;

inline std::vector<Int> naive_expand(const Int& base, const gfe::VariableProfile& v, u64 l) {
    std::vector<Int> out;
    if (v.empty || (v.smoothForcedOne && base != 1)) return out;
    for (u64 lp : v.lParts) {
        if (lp != 1 && igcd(base, Int(static_cast<unsigned long>(lp))) != 1) continue;
        for (u64 eL = 0; eL <= *v.eLCap; ++eL)
            for (u64 e3 = 0; e3 <= (v.split3 ? *v.e3Cap : 0); ++e3)
                for (u64 e2 = 0; e2 <= *v.e2Cap; ++e2) {
                    Int x = base;
                    for (u64 i = 0; i < e2; ++i) x *= 2;
                    for (u64 i = 0; i < e3; ++i) x *= 3;
                    for (u64 i = 0; i < eL; ++i) x *= static_cast<unsigned long>(l);
                    for (u64 i = 0; i < l && lp != 1; ++i) x *= static_cast<unsigned long>(lp);
                    out.push_back(x);
                }
    }
    return out;
}

inline std::multiset<RecKey> naive_pair(const Int& x1, u64 r, const Int& y1, u64 s, u64 l, const std::set<u64>& tSet,
                                        const gfe::VariableProfile& px, const gfe::VariableProfile& py) {
    std::multiset<RecKey> out;
    if (igcd(x1, y1) != 1) return out;
    for (const Int& x : naive_expand(x1, px, l))
        for (const Int& y : naive_expand(y1, py, l)) {
            if (x < 2 || y < 2 || igcd(x, y) != 1) continue;
            Int A = gfe::ipow(x, r), B = gfe::ipow(y, s);
            const std::pair<Int, std::pair<int, int>> forms[] = {{A + B, {1, 1}}, {A - B, {1, -1}}, {B - A, {-1, 1}}};
            for (const auto& [D, sg] : forms) {
                if (D <= 0) continue;
                for (u64 t : tSet) {
                    Int z;
                    if (mpz_root(z.get_mpz_t(), D.get_mpz_t(), t) && z >= 2)
                        out.insert({x.get_str(), y.get_str(), z.get_str(), t, sg.first, sg.second});
                }
            }
        }
    return out;
}

inline std::multiset<RecKey> keys_of(const std::vector<gfe::SolutionRecord>& recs) {
    std::multiset<RecKey> out;
    for (const auto& r : recs) out.insert({r.x.get_str(), r.y.get_str(), r.z.get_str(), r.t, r.dr, r.ds});
    return out;
}

struct PairBox {
    Int x1, y1;
    u64 r, s, l;
    std::set<u64> tSet;
    gfe::VariableProfile px, py;
};

inline gfe::VariableProfile random_profile(std::mt19937_64& rng, const std::string& name, u64 maxCount) {
    gfe::VariableProfile v;
    v.name = name;
    for (;;) {
        v.e2Cap = rng() % 25;
        v.eLCap = rng() % 3;
        v.split3 = rng() % 2;
        v.e3Cap = rng() % 4;
        v.lParts = rng() % 3 ? std::set<u64>{1} : std::set<u64>{1, 3};
        u64 n = (*v.e2Cap + 1) * (*v.eLCap + 1) * (v.split3 ? *v.e3Cap + 1 : 1) * v.lParts.size();
        if (n <= maxCount) return v;
    }
}

// Boxes with at most 10^4 candidate pairs; the first few are seeded with known identities.
inline PairBox random_box(std::mt19937_64& rng, u64 index) {
    PairBox b;
    static const u64 ls[] = {11, 13, 17};
    b.l = ls[rng() % 3];
    b.px = random_profile(rng, "x", 100);
    b.py = random_profile(rng, "y", 100);
    switch (index) {
        case 0: b.x1 = 7, b.r = 3, b.y1 = 13, b.s = 2, b.tSet = {9}; break;      // 7^3 + 13^2 = 2^9
        case 1: b.x1 = 1, b.r = 5, b.y1 = 7, b.s = 2, b.tSet = {4}; break;       // 2^5 + 7^2 = 3^4
        case 2: b.x1 = 17, b.r = 3, b.y1 = 1, b.s = 7, b.tSet = {2}; break;      // 2^7 + 17^3 = 71^2
        case 3: b.x1 = 1, b.r = 3, b.y1 = 1, b.s = 2, b.tSet = {2, 3, 5}; break;  // powers of 2 and 3
        default: {
            b.x1 = 1 + 2 * (rng() % 600);
            b.y1 = 1 + 2 * (rng() % 600);
            b.r = 2 + rng() % 8;
            b.s = 2 + rng() % 8;
            u64 nt = 1 + rng() % 4;
            while (b.tSet.size() < nt) b.tSet.insert(2 + rng() % 12);
        }
    }
    if (index < 4) b.px.e2Cap = std::max<u64>(*b.px.e2Cap, 8), b.py.e2Cap = std::max<u64>(*b.py.e2Cap, 8);
    return b;
}

// ---- bound engine replay

// Synthetic configuration with a concrete N whose log spans both sides of the forbidden interval.
inline gfe::BoundConfig random_bound_config(std::mt19937_64& rng) {
    static const std::vector<u64> primes = {5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    gfe::BoundConfig c;
    std::set<u64> S;
    u64 n = 2 + rng() % 5;
    while (S.size() < n) S.insert(primes[rng() % primes.size()]);
    c.S.assign(S.begin(), S.end());
    c.k = 2 + rng() % (c.S.size() - 1);
    c.u0 = 1 + rng() % 40;
    c.e0 = 1 + rng() % 12;
    c.n1S = 1 + static_cast<unsigned long>(rng() % 300);
    c.nkS = c.n1S + static_cast<unsigned long>(rng() % 6000);
    static const std::vector<u64> pNs = {2, 3, 5, 7, 31, 101, 1009};
    c.pN = pNs[rng() % pNs.size()];
    if (rng() % 3 == 0) c.S1 = {2, 3};
    gfe::apply_default_profile(c);
    for (u64 l : c.S) {
        Rat lo(static_cast<long>(rng() % 4000), 100);
        gfe::Enclosure e;
        e.lo = lo;
        e.hi = lo + Rat(1, 1000);
        e.provenance = "synthetic";
        c.perL[l].vol = e;
        c.perL[l].plusLog2 = rng() % 2;
    }
    gfe::FactoredInteger::Map m;
    static const std::vector<unsigned long> np = {2, 3, 5, 7, 11, 13, 31, 101, 1009, 65537};
    u64 parts = 1 + rng() % 4;
    for (u64 i = 0; i < parts; ++i) m[Int(np[rng() % np.size()])] = 1 + rng() % 1500;
    c.N = gfe::FactoredInteger::trusted(m);
    c.label = "synthetic";
    return c;
}

// b1 recomputed from its definition, exactly.
inline Rat reference_b1(const gfe::BoundConfig& c) {
    Rat sum = 0, minA4 = c.perL.at(c.S.front()).a4;
    for (u64 l : c.S) {
        sum += c.perL.at(l).a1;
        if (c.perL.at(l).a4 < minA4) minA4 = c.perL.at(l).a4;
    }
    Rat n(static_cast<unsigned long>(c.S.size()));
    Rat a1 = c.lambda * sum / n, a4 = c.lambda * minA4;
    Rat first = a1 / Rat(static_cast<unsigned long>(c.u0));
    Rat second = Rat(static_cast<unsigned long>(c.k)) / n + (a1 - a4) / Rat(c.n1S);
    Rat b = first > second ? first : second;
    b.canonicalize();
    return b;
}

struct ReplayResult {
    u64 configs = 0;
    u64 disagreements = 0;
    u64 excluded = 0;  // configurations where both sides exclude N
    u64 applicable = 0;
    std::string first;
};

inline ReplayResult bound_replay(u64 n, u64 seed) {
    std::mt19937_64 rng(seed);
    ReplayResult res;
    while (res.configs < n) {
        auto c = random_bound_config(rng);
        ++res.configs;
        auto fi = gfe::forbidden_interval(c, gfe::Mode::Unprimed);
        auto d = gfe::derived_constants(c);
        bool byInterval = fi.applicable && gfe::certainly_inside(fi, c.N->value());
        auto chain = gfe::chain_report(c);
        bool ok = byInterval == chain.excluded && d.b1 == reference_b1(c);
        if (fi.applicable) ++res.applicable;
        if (byInterval && chain.excluded) ++res.excluded;
        if (!ok && !res.disagreements++) res.first = gfe::to_json(c).dump();
    }
    return res;
}

}  // namespace oracle
