#pragma once

#include <mpfr.h>

#include <algorithm>
#include <functional>
#include <string>

#include "gfe/arith.hpp"
#include "gfe/errors.hpp"

namespace gfe {

struct PrecisionPolicy {
    unsigned initialBits = 128;
    unsigned maxBits = 1024;
};

// Closed interval [lo, hi] with outward rounding on every operation.
class Iv {
public:
    explicit Iv(unsigned prec = 128);
    Iv(const Iv& o);
    Iv(Iv&& o) noexcept;
    Iv& operator=(const Iv& o);
    Iv& operator=(Iv&& o) noexcept;
    ~Iv();

    static Iv point(const Rat& q, unsigned prec);
    static Iv point(long v, unsigned prec) { return point(Rat(v), prec); }
    static Iv hull(const Rat& lo, const Rat& hi, unsigned prec);
    static Iv log(const Rat& q, unsigned prec);  // q > 0
    static Iv log(const Int& n, unsigned prec) { return log(Rat(n), prec); }
    static Iv exp(const Iv& x);

    unsigned prec() const { return prec_; }
    double loDouble() const;  // rounded down
    double hiDouble() const;  // rounded up
    double midDouble() const;
    bool contains(const Iv& o) const;  // o inside this
    bool containsZero() const;
    Rat loRat() const;
    Rat hiRat() const;
    std::string str(int digits = 12) const;

    friend Iv operator+(const Iv& a, const Iv& b);
    friend Iv operator-(const Iv& a, const Iv& b);
    friend Iv operator*(const Iv& a, const Iv& b);
    friend Iv operator/(const Iv& a, const Iv& b);
    friend Iv operator-(const Iv& a);
    Iv& operator+=(const Iv& o) { return *this = *this + o; }
    friend Iv max(const Iv& a, const Iv& b);
    friend Iv min(const Iv& a, const Iv& b);

    mpfr_srcptr lo() const { return lo_; }
    mpfr_srcptr hi() const { return hi_; }

private:
    unsigned prec_;
    mpfr_t lo_, hi_;
};

enum class Cmp { Less, Greater, Unknown };

Cmp compare(const Iv& a, const Iv& b);
// a < b certified; throws Indeterminate when undecided.
bool certainly_less(const Iv& a, const Iv& b);
bool decide_less(const Iv& a, const Iv& b);  // true / false / throws Indeterminate
// floor of the enclosed value when both endpoints share it; else Indeterminate.
long certified_floor(const Iv& x);

// Runs f(prec) at doubling precisions until it stops throwing Indeterminate.
template <class F>
auto with_precision(const PrecisionPolicy& pol, F&& f) -> decltype(f(0u)) {
    unsigned p = pol.initialBits;
    for (;;) {
        try {
            return f(p);
        } catch (const Indeterminate& e) {
            if (p >= pol.maxBits) throw PrecisionExhausted(e.what());
            p = std::min(p * 2, pol.maxBits);
        }
    }
}

}  // namespace gfe
