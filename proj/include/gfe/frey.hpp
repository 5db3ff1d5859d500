#pragma once

#include <set>
#include <string>

#include "gfe/arith.hpp"

namespace gfe {

// GeneralABC:  Y^2 + XY = X^3 + ((b-a-1)/4) X^2 - (ab/16) X,  a+b+c = 0, 4 | a+1, 16 | b
// TwoThree:    Y^2 = X^3 + 3bX + 2a,                          a^2 + b^3 = c
// ThreeRS:     Y^2 + 3cXY + aY = X^3,                          a + b = c^3
// TwoRS:       Y^2 = X^3 + 2cX^2 + aX,                         a + b = c^2
enum class FreyFamily { GeneralABC, TwoThree, ThreeRS, TwoRS };

std::string to_string(FreyFamily f);
FreyFamily parse_family(const std::string& s);  // throws ConfigError

struct AbcTriple {
    Int a, b, c;
    bool tieBroken = false;  // set when more than one permutation qualified
};

// Permutation of (u, v, w) with 16 | b and a = -1 mod 4.
AbcTriple abc_permutation(const Int& u, const Int& v, const Int& w);

struct CurveInvariants {
    FreyFamily family;
    Int a, b, c;
    Int c4;
    Rat delta;
    Rat j;
    FactoredInteger denomN;   // reduced denominator of j
    Int closedFormN;          // the family's textbook expression for N
    bool closedFormAgrees = true;
    std::set<unsigned> badPrimes;
};

void validate_triple(FreyFamily f, const Int& a, const Int& b, const Int& c);
CurveInvariants invariants(FreyFamily f, const Int& a, const Int& b, const Int& c, const FactorOptions& fo = {});

enum class Reduction { Good, Multiplicative, PotentiallyBad };
std::string to_string(Reduction r);
Reduction reduction_type(const CurveInvariants& inv, const Int& p);

}  // namespace gfe
