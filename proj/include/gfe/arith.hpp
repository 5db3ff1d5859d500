#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gfe {

using Int = mpz_class;
using Rat = mpq_class;

struct FactorOptions {
    std::uint64_t seed = 0x5eed5eed5eedULL;
    double maxSeconds = 30.0;
    std::uint64_t maxRhoIterations = 1ULL << 27;
    unsigned maxBits = 600;  // inputs wider than this are refused
};

// Positive integer as prime -> exponent. Empty map is 1.
class FactoredInteger {
public:
    using Map = std::map<Int, unsigned long>;

    FactoredInteger() = default;

    // Keys are certified prime; throws DomainError otherwise.
    static FactoredInteger fromMap(const Map& m);
    // Caller guarantees the keys are prime (used internally after certification).
    static FactoredInteger trusted(Map m);
    static FactoredInteger primePower(const Int& p, unsigned long e);

    const Map& factors() const { return f_; }
    Int value() const;
    unsigned long valuation(const Int& p) const;
    bool isOne() const { return f_.empty(); }
    std::size_t size() const { return f_.size(); }
    std::vector<Int> primes() const;

    FactoredInteger operator*(const FactoredInteger& o) const;
    FactoredInteger pow(unsigned long e) const;
    bool divides(const FactoredInteger& o) const;
    // this / d; throws DomainError when d does not divide.
    FactoredInteger quotient(const FactoredInteger& d) const;
    FactoredInteger gcd(const FactoredInteger& o) const;
    // Restriction to primes satisfying a predicate.
    template <class Pred>
    FactoredInteger filter(Pred pred) const {
        Map m;
        for (const auto& [p, e] : f_)
            if (pred(p, e)) m.emplace(p, e);
        return trusted(std::move(m));
    }

    std::string str() const;  // "{2:2, 3:1}"
    bool operator==(const FactoredInteger& o) const { return f_ == o.f_; }
    bool operator!=(const FactoredInteger& o) const { return !(*this == o); }

private:
    Map f_;
};

FactoredInteger factor(const Int& n, const FactorOptions& opt = {});
FactoredInteger radical(const FactoredInteger& n);
FactoredInteger coprime_part(const FactoredInteger& n, const Int& k);
FactoredInteger k_full_part(const FactoredInteger& n, unsigned long k);

struct NthRoot {
    Int root;
    bool exact;
};
NthRoot integer_nth_root(const Int& n, unsigned long t);

bool is_prime_certified(const Int& n, const FactorOptions& opt = {});
bool is_prime_u64(std::uint64_t n);
const std::vector<std::uint32_t>& small_primes();  // all primes below 10^6

unsigned long valuation(Int n, const Int& p);
Int ipow(const Int& b, unsigned long e);
std::uint64_t to_u64(const Int& n);  // throws DomainError when it does not fit
std::vector<std::uint64_t> prime_divisors_u64(std::uint64_t n);
std::vector<std::uint64_t> divisors_u64(std::uint64_t n);
std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);

}  // namespace gfe
