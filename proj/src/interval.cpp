#include "gfe/interval.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace gfe {

Iv::Iv(unsigned prec) : prec_(prec) {
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

Iv::Iv(const Iv& o) : prec_(o.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Iv::Iv(Iv&& o) noexcept : Iv(o) {}

Iv& Iv::operator=(const Iv& o) {
    if (this == &o) return *this;
    if (prec_ != o.prec_) {
        prec_ = o.prec_;
        mpfr_set_prec(lo_, prec_);
        mpfr_set_prec(hi_, prec_);
    }
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
    return *this;
}

Iv& Iv::operator=(Iv&& o) noexcept {
    if (this != &o && prec_ == o.prec_) {
        mpfr_swap(lo_, o.lo_);
        mpfr_swap(hi_, o.hi_);
        return *this;
    }
    return *this = static_cast<const Iv&>(o);
}

Iv::~Iv() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

Iv Iv::point(const Rat& q, unsigned prec) {
    Iv r(prec);
    mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
    return r;
}

Iv Iv::hull(const Rat& lo, const Rat& hi, unsigned prec) {
    if (lo > hi) throw DomainError("interval hull with lo > hi");
    Iv r(prec);
    mpfr_set_q(r.lo_, lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, hi.get_mpq_t(), MPFR_RNDU);
    return r;
}

Iv Iv::log(const Rat& q, unsigned prec) {
    if (q <= 0) throw DomainError("log of a non-positive value");
    Iv r = point(q, prec);
    mpfr_log(r.lo_, r.lo_, MPFR_RNDD);
    mpfr_log(r.hi_, r.hi_, MPFR_RNDU);
    return r;
}

Iv Iv::exp(const Iv& x) {
    Iv r(x.prec_);
    mpfr_exp(r.lo_, x.lo_, MPFR_RNDD);
    mpfr_exp(r.hi_, x.hi_, MPFR_RNDU);
    return r;
}

double Iv::loDouble() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Iv::hiDouble() const { return mpfr_get_d(hi_, MPFR_RNDU); }
double Iv::midDouble() const { return 0.5 * (mpfr_get_d(lo_, MPFR_RNDN) + mpfr_get_d(hi_, MPFR_RNDN)); }

bool Iv::contains(const Iv& o) const {
    return mpfr_lessequal_p(lo_, o.lo_) && mpfr_greaterequal_p(hi_, o.hi_);
}

bool Iv::containsZero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }

Rat Iv::loRat() const {
    Rat q;
    mpfr_get_q(q.get_mpq_t(), lo_);
    return q;
}

Rat Iv::hiRat() const {
    Rat q;
    mpfr_get_q(q.get_mpq_t(), hi_);
    return q;
}

std::string Iv::str(int digits) const {
    std::ostringstream os;
    os.precision(digits);
    os << '[' << loDouble() << ", " << hiDouble() << ']';
    return os.str();
}

Iv operator+(const Iv& a, const Iv& b) {
    Iv r(std::max(a.prec_, b.prec_));
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

Iv operator-(const Iv& a, const Iv& b) {
    Iv r(std::max(a.prec_, b.prec_));
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
}

Iv operator-(const Iv& a) {
    Iv r(a.prec_);
    mpfr_neg(r.lo_, a.hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, a.lo_, MPFR_RNDU);
    return r;
}

namespace {

using BinOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);

Iv corners(const Iv& a, const Iv& b, BinOp op) {
    unsigned prec = std::max(a.prec(), b.prec());
    Iv r(prec);
    mpfr_t t;
    mpfr_init2(t, prec);
    bool first = true;
    mpfr_srcptr as[2] = {a.lo(), a.hi()};
    mpfr_srcptr bs[2] = {b.lo(), b.hi()};
    mpfr_ptr lo = const_cast<mpfr_ptr>(r.lo());
    mpfr_ptr hi = const_cast<mpfr_ptr>(r.hi());
    for (auto x : as) {
        for (auto y : bs) {
            op(t, x, y, MPFR_RNDD);
            if (first || mpfr_less_p(t, lo)) mpfr_set(lo, t, MPFR_RNDD);
            op(t, x, y, MPFR_RNDU);
            if (first || mpfr_greater_p(t, hi)) mpfr_set(hi, t, MPFR_RNDU);
            first = false;
        }
    }
    mpfr_clear(t);
    return r;
}

}  // namespace

Iv operator*(const Iv& a, const Iv& b) { return corners(a, b, mpfr_mul); }

Iv operator/(const Iv& a, const Iv& b) {
    if (b.containsZero()) throw Indeterminate("division by an interval containing zero");
    return corners(a, b, mpfr_div);
}

Iv max(const Iv& a, const Iv& b) {
    Iv r(std::max(a.prec_, b.prec_));
    mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

Iv min(const Iv& a, const Iv& b) {
    Iv r(std::max(a.prec_, b.prec_));
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_min(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

Cmp compare(const Iv& a, const Iv& b) {
    if (mpfr_less_p(a.hi(), b.lo())) return Cmp::Less;
    if (mpfr_greater_p(a.lo(), b.hi())) return Cmp::Greater;
    return Cmp::Unknown;
}

bool certainly_less(const Iv& a, const Iv& b) { return compare(a, b) == Cmp::Less; }

bool decide_less(const Iv& a, const Iv& b) {
    if (mpfr_less_p(a.hi(), b.lo())) return true;
    if (mpfr_greaterequal_p(a.lo(), b.hi())) return false;
    throw Indeterminate("comparison " + a.str() + " < " + b.str());
}

long certified_floor(const Iv& x) {
    mpfr_t f;
    mpfr_init2(f, x.prec());
    mpfr_floor(f, x.lo());
    long lo = mpfr_get_si(f, MPFR_RNDD);
    mpfr_floor(f, x.hi());
    long hi = mpfr_get_si(f, MPFR_RNDD);
    mpfr_clear(f);
    if (lo != hi) throw Indeterminate("floor of " + x.str());
    return lo;
}

}  // namespace gfe
