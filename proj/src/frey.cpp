#include "gfe/frey.hpp"

#include <array>
#include <vector>

#include "gfe/errors.hpp"

namespace gfe {

std::string to_string(FreyFamily f) {
    switch (f) {
        case FreyFamily::GeneralABC: return "general";
        case FreyFamily::TwoThree: return "twothree";
        case FreyFamily::ThreeRS: return "threers";
        case FreyFamily::TwoRS: return "twors";
    }
    return "?";
}

FreyFamily parse_family(const std::string& s) {
    if (s == "general" || s == "GeneralABC") return FreyFamily::GeneralABC;
    if (s == "twothree" || s == "TwoThree") return FreyFamily::TwoThree;
    if (s == "threers" || s == "ThreeRS") return FreyFamily::ThreeRS;
    if (s == "twors" || s == "TwoRS") return FreyFamily::TwoRS;
    throw ConfigError("unknown family '" + s + "' (general, twothree, threers, twors)");
}

std::string to_string(Reduction r) {
    switch (r) {
        case Reduction::Good: return "Good";
        case Reduction::Multiplicative: return "Multiplicative";
        case Reduction::PotentiallyBad: return "PotentiallyBad";
    }
    return "?";
}

namespace {

Int gcd3(const Int& a, const Int& b, const Int& c) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    return g;
}

Int mod(const Int& x, unsigned long m) {
    Int r = x % Int(m);
    if (r < 0) r += m;
    return r;
}

unsigned long v2(const Int& x) { return x == 0 ? 1000000 : mpz_scan1(x.get_mpz_t(), 0); }

Int gcd2(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

Int absv(const Int& x) { return x < 0 ? Int(-x) : x; }

}  // namespace

AbcTriple abc_permutation(const Int& u, const Int& v, const Int& w) {
    if (u + v + w != 0) throw DomainError("no admissible permutation: entries do not sum to zero");
    if (gcd3(u, v, w) != 1) throw DomainError("no admissible permutation: entries are not coprime");
    std::array<Int, 3> e{u, v, w};
    int evenIdx = -1, evenCount = 0;
    for (int i = 0; i < 3; ++i) {
        if (e[i] == 0) throw DomainError("no admissible permutation: zero entry");
        if (v2(e[i]) >= 4) {
            evenIdx = i;
            ++evenCount;
        } else if (v2(e[i]) > 0) {
            throw DomainError("no admissible permutation: an even entry has 2-adic valuation below 4");
        }
    }
    if (evenCount != 1) throw DomainError("no admissible permutation: need exactly one entry divisible by 16");
    std::vector<int> cands;
    for (int i = 0; i < 3; ++i)
        if (i != evenIdx && mod(e[i], 4) == 3) cands.push_back(i);
    if (cands.empty()) throw DomainError("no admissible permutation: no odd entry is -1 mod 4");
    int pick = cands[0];
    for (int i : cands)
        if (absv(e[i]) < absv(e[pick])) pick = i;
    int other = 3 - evenIdx - pick;
    return AbcTriple{e[pick], e[evenIdx], e[other], cands.size() > 1};
}

void validate_triple(FreyFamily f, const Int& a, const Int& b, const Int& c) {
    auto bad = [&](const std::string& why) {
        throw DomainError("invalid triple for family " + to_string(f) + ": " + why);
    };
    if (a == 0 || b == 0 || c == 0) bad("zero entry");
    if (gcd3(a, b, c) != 1) bad("entries not coprime");
    switch (f) {
        case FreyFamily::GeneralABC:
            if (a + b + c != 0) bad("a+b+c != 0");
            if (mod(a + 1, 4) != 0) bad("4 does not divide a+1");
            if (mod(b, 16) != 0) bad("16 does not divide b");
            break;
        case FreyFamily::TwoThree:
            if (a * a + b * b * b != c) bad("a^2 + b^3 != c");
            break;
        case FreyFamily::ThreeRS:
            if (a + b != c * c * c) bad("a + b != c^3");
            break;
        case FreyFamily::TwoRS:
            if (a + b != c * c) bad("a + b != c^2");
            break;
    }
}

CurveInvariants invariants(FreyFamily f, const Int& a, const Int& b, const Int& c, const FactorOptions& fo) {
    validate_triple(f, a, b, c);
    CurveInvariants inv;
    inv.family = f;
    inv.a = a;
    inv.b = b;
    inv.c = c;
    switch (f) {
        case FreyFamily::GeneralABC: {
            inv.c4 = a * a + a * b + b * b;
            inv.delta = Rat(a * a * b * b * c * c, 256);
            inv.closedFormN = a * a * b * b * c * c / 256;
            break;
        }
        case FreyFamily::TwoThree: {
            inv.c4 = -144 * b;
            inv.delta = Rat(-1728 * c);
            inv.closedFormN = absv(c) / gcd2(Int(1728), c);
            inv.badPrimes = {2, 3};
            break;
        }
        case FreyFamily::ThreeRS: {
            inv.c4 = 9 * c * (a + 9 * b);
            Int d = a * a * a * b;
            inv.delta = Rat(27 * d);
            inv.closedFormN = absv(d) / gcd2(Int(27), d);
            inv.badPrimes = {3};
            break;
        }
        case FreyFamily::TwoRS: {
            inv.c4 = 16 * (a + 4 * b);
            Int d = a * a * b;
            inv.delta = Rat(64 * d);
            inv.closedFormN = absv(d) / gcd2(Int(64), d);
            inv.badPrimes = {2};
            break;
        }
    }
    inv.delta.canonicalize();
    inv.j = Rat(inv.c4 * inv.c4 * inv.c4) / inv.delta;
    inv.j.canonicalize();

    // the denominator of j is supported on primes of 6abc
    Int den = inv.j.get_den();
    FactoredInteger::Map m;
    std::set<Int> cand{Int(2), Int(3)};
    for (const Int* x : {&a, &b, &c})
        for (const Int& p : factor(absv(*x), fo).primes()) cand.insert(p);
    for (const Int& p : cand) {
        unsigned long e = 0;
        while (mpz_divisible_p(den.get_mpz_t(), p.get_mpz_t())) {
            den /= p;
            ++e;
        }
        if (e) m.emplace(p, e);
    }
    if (den != 1) throw DomainError("internal: denominator of j has a prime outside 6abc");
    inv.denomN = FactoredInteger::trusted(std::move(m));
    inv.closedFormAgrees = inv.denomN.value() == inv.closedFormN;
    return inv;
}

Reduction reduction_type(const CurveInvariants& inv, const Int& p) {
    if (p < 2 || !is_prime_certified(p)) throw DomainError("reduction_type: " + p.get_str() + " is not prime");
    if (mpz_fits_uint_p(p.get_mpz_t()) && inv.badPrimes.count(static_cast<unsigned>(p.get_ui())))
        return Reduction::PotentiallyBad;
    return inv.denomN.valuation(p) > 0 ? Reduction::Multiplicative : Reduction::Good;
}

}  // namespace gfe
