#include "gfe/arith.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>
#include <sstream>

#include "gfe/errors.hpp"

namespace gfe {

namespace {

constexpr std::uint32_t kTrialLimit = 1000000;

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 b, u64 e, u64 m) {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

bool mr_u64(u64 n, u64 a) {
    if (a % n == 0) return true;
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

bool mr_mpz(const Int& n, unsigned long a) {
    Int d = n - 1;
    unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
    d >>= s;
    Int x, base = a, nm1 = n - 1;
    mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == nm1) return true;
    for (unsigned long i = 1; i < s; ++i) {
        x = x * x % n;
        if (x == nm1) return true;
    }
    return false;
}

// first 13 primes are deterministic MR bases below this bound
const Int& mr13_bound() {
    static const Int b("3317044064679887385961981");
    return b;
}

struct Budget {
    const FactorOptions& opt;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::uint64_t iterations = 0;

    void tick(std::uint64_t n) {
        iterations += n;
        if (iterations > opt.maxRhoIterations)
            throw FactorBudgetExceeded("rho iteration cap reached");
        double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (el > opt.maxSeconds) throw FactorBudgetExceeded("time cap reached");
    }
};

bool certify(const Int& n, Budget& budget, int depth);
void split_into(const Int& m, FactoredInteger::Map& out, unsigned long mult, Budget& budget, int depth);

// Brent's variant of Pollard rho; returns a nontrivial divisor of composite m.
Int rho_split(const Int& m, Budget& budget, std::mt19937_64& rng) {
    const unsigned long batch = 128;
    for (int attempt = 0; attempt < 64; ++attempt) {
        Int c = Int(static_cast<unsigned long>(rng() % 1000003ULL + 1));
        Int y = Int(static_cast<unsigned long>(rng())) % m;
        Int x, ys, q = 1, g = 1;
        unsigned long r = 1;
        do {
            x = y;
            for (unsigned long i = 0; i < r; ++i) y = (y * y + c) % m;
            unsigned long k = 0;
            do {
                ys = y;
                unsigned long lim = std::min(batch, r - k);
                for (unsigned long i = 0; i < lim; ++i) {
                    y = (y * y + c) % m;
                    Int diff = x - y;
                    if (diff < 0) diff = -diff;
                    q = q * diff % m;
                }
                budget.tick(lim);
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), m.get_mpz_t());
                k += lim;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == m) {
            do {
                ys = (ys * ys + c) % m;
                Int diff = x - ys;
                if (diff < 0) diff = -diff;
                mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), m.get_mpz_t());
                budget.tick(1);
            } while (g == 1);
        }
        if (g != m) return g;
    }
    throw FactorBudgetExceeded("rho failed to split a composite");
}

void add_factor(FactoredInteger::Map& out, const Int& p, unsigned long e) {
    out[p] += e;
}

void split_into(const Int& m, FactoredInteger::Map& out, unsigned long mult, Budget& budget, int depth) {
    if (m == 1) return;
    if (m < Int(static_cast<unsigned long>(kTrialLimit)) * kTrialLimit) {
        // caller already removed every prime below 10^6
        add_factor(out, m, mult);
        return;
    }
    if (mpz_perfect_power_p(m.get_mpz_t())) {
        unsigned long bits = mpz_sizeinbase(m.get_mpz_t(), 2);
        for (unsigned long k = bits; k >= 2; --k) {
            Int root;
            if (mpz_root(root.get_mpz_t(), m.get_mpz_t(), k)) {
                split_into(root, out, mult * k, budget, depth);
                return;
            }
        }
    }
    if (certify(m, budget, depth)) {
        add_factor(out, m, mult);
        return;
    }
    std::mt19937_64 rng(budget.opt.seed ^ mpz_get_ui(m.get_mpz_t()));
    Int d = rho_split(m, budget, rng);
    Int e = m / d;
    Int g;
    mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), e.get_mpz_t());
    if (g == 1) {
        split_into(d, out, mult, budget, depth);
        split_into(e, out, mult, budget, depth);
        return;
    }
    // shared factors: factor d then divide them out of m
    FactoredInteger::Map sub;
    split_into(d, sub, 1, budget, depth);
    Int rest = m;
    for (const auto& [p, _] : sub) {
        unsigned long v = 0;
        while (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) {
            rest /= p;
            ++v;
        }
        add_factor(out, p, v * mult);
    }
    split_into(rest, out, mult, budget, depth);
}

FactoredInteger::Map factor_map(const Int& n, Budget& budget, int depth) {
    FactoredInteger::Map out;
    Int m = n;
    for (std::uint32_t p : small_primes()) {
        if (Int(p) * p > m) break;
        if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            unsigned long e = 0;
            while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
                mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
                ++e;
            }
            out[Int(p)] = e;
        }
    }
    if (m > 1) split_into(m, out, 1, budget, depth);
    return out;
}

// Lucas-Pocklington certificate from the complete factorization of n-1.
bool pocklington(const Int& n, Budget& budget, int depth) {
    if (depth > 40) throw FactorBudgetExceeded("certificate recursion too deep");
    FactoredInteger::Map f = factor_map(n - 1, budget, depth + 1);
    Int nm1 = n - 1;
    for (const auto& [q, _] : f) {
        bool ok = false;
        for (unsigned long a = 2; a < 500 && !ok; ++a) {
            Int A = a, x;
            mpz_powm(x.get_mpz_t(), A.get_mpz_t(), nm1.get_mpz_t(), n.get_mpz_t());
            if (x != 1) return false;
            Int e = nm1 / q, y, g;
            mpz_powm(y.get_mpz_t(), A.get_mpz_t(), e.get_mpz_t(), n.get_mpz_t());
            y -= 1;
            mpz_gcd(g.get_mpz_t(), y.get_mpz_t(), n.get_mpz_t());
            if (g == 1) ok = true;
            else if (g != n) return false;
        }
        if (!ok) throw FactorBudgetExceeded("no Pocklington witness found");
    }
    return true;
}

bool certify(const Int& n, Budget& budget, int depth) {
    if (n < 2) return false;
    if (mpz_fits_ulong_p(n.get_mpz_t())) return is_prime_u64(mpz_get_ui(n.get_mpz_t()));
    for (std::uint32_t p : small_primes()) {
        if (Int(p) * p > n) return true;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
        if (p > 1000) break;
    }
    static const unsigned long bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
    if (n < mr13_bound()) {
        for (unsigned long a : bases)
            if (!mr_mpz(n, a)) return false;
        return true;
    }
    if (mpz_probab_prime_p(n.get_mpz_t(), 25) == 0) return false;
    return pocklington(n, budget, depth);
}

}  // namespace

const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> primes = [] {
        std::vector<bool> comp(kTrialLimit, false);
        std::vector<std::uint32_t> ps;
        for (std::uint32_t i = 2; i < kTrialLimit; ++i) {
            if (comp[i]) continue;
            ps.push_back(i);
            for (std::uint64_t j = std::uint64_t(i) * i; j < kTrialLimit; j += i) comp[j] = true;
        }
        return ps;
    }();
    return primes;
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    if (n < 37 * 37) return true;
    for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37})
        if (!mr_u64(n, a)) return false;
    return true;
}

bool is_prime_certified(const Int& n, const FactorOptions& opt) {
    Budget b{opt};
    return certify(n, b, 0);
}

// ---- FactoredInteger ----

FactoredInteger FactoredInteger::fromMap(const Map& m) {
    for (const auto& [p, e] : m) {
        if (e == 0) throw DomainError("FactoredInteger: zero exponent for " + p.get_str());
        if (!is_prime_certified(p)) throw DomainError("FactoredInteger: key " + p.get_str() + " is not prime");
    }
    return trusted(m);
}

FactoredInteger FactoredInteger::trusted(Map m) {
    for (auto it = m.begin(); it != m.end();) {
        if (it->second == 0) it = m.erase(it);
        else ++it;
    }
    FactoredInteger f;
    f.f_ = std::move(m);
    return f;
}

FactoredInteger FactoredInteger::primePower(const Int& p, unsigned long e) {
    Map m;
    if (e) m.emplace(p, e);
    return trusted(std::move(m));
}

Int FactoredInteger::value() const {
    Int v = 1;
    for (const auto& [p, e] : f_) v *= ipow(p, e);
    return v;
}

unsigned long FactoredInteger::valuation(const Int& p) const {
    auto it = f_.find(p);
    return it == f_.end() ? 0 : it->second;
}

std::vector<Int> FactoredInteger::primes() const {
    std::vector<Int> v;
    for (const auto& [p, _] : f_) v.push_back(p);
    return v;
}

FactoredInteger FactoredInteger::operator*(const FactoredInteger& o) const {
    Map m = f_;
    for (const auto& [p, e] : o.f_) m[p] += e;
    return trusted(std::move(m));
}

FactoredInteger FactoredInteger::pow(unsigned long e) const {
    Map m;
    if (e == 0) return {};
    for (const auto& [p, x] : f_) m.emplace(p, x * e);
    return trusted(std::move(m));
}

bool FactoredInteger::divides(const FactoredInteger& o) const {
    for (const auto& [p, e] : f_)
        if (o.valuation(p) < e) return false;
    return true;
}

FactoredInteger FactoredInteger::quotient(const FactoredInteger& d) const {
    if (!d.divides(*this)) throw DomainError("quotient: " + d.str() + " does not divide " + str());
    Map m = f_;
    for (const auto& [p, e] : d.f_) m[p] -= e;
    return trusted(std::move(m));
}

FactoredInteger FactoredInteger::gcd(const FactoredInteger& o) const {
    Map m;
    for (const auto& [p, e] : f_) {
        unsigned long v = std::min(e, o.valuation(p));
        if (v) m.emplace(p, v);
    }
    return trusted(std::move(m));
}

std::string FactoredInteger::str() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& [p, e] : f_) {
        if (!first) os << ", ";
        first = false;
        os << p.get_str() << ':' << e;
    }
    os << '}';
    return os.str();
}

// ---- operations ----

FactoredInteger factor(const Int& n, const FactorOptions& opt) {
    if (n <= 0) throw DomainError("factor: argument must be positive, got " + n.get_str());
    if (mpz_sizeinbase(n.get_mpz_t(), 2) > opt.maxBits)
        throw FactorBudgetExceeded("input wider than " + std::to_string(opt.maxBits) + " bits");
    Budget b{opt};
    return FactoredInteger::trusted(factor_map(n, b, 0));
}

FactoredInteger radical(const FactoredInteger& n) {
    FactoredInteger::Map m;
    for (const auto& [p, _] : n.factors()) m.emplace(p, 1);
    return FactoredInteger::trusted(std::move(m));
}

FactoredInteger coprime_part(const FactoredInteger& n, const Int& k) {
    if (k < 1) throw DomainError("coprime_part: k must be positive");
    return n.filter([&](const Int& p, unsigned long) { return !mpz_divisible_p(k.get_mpz_t(), p.get_mpz_t()); });
}

FactoredInteger k_full_part(const FactoredInteger& n, unsigned long k) {
    if (k < 2) throw DomainError("k_full_part: k must be at least 2");
    return n.filter([&](const Int&, unsigned long e) { return e % k == 0; });
}

NthRoot integer_nth_root(const Int& n, unsigned long t) {
    if (n < 0) throw DomainError("integer_nth_root: negative argument");
    if (t < 2) throw DomainError("integer_nth_root: exponent must be at least 2");
    Int root, rem;
    mpz_rootrem(root.get_mpz_t(), rem.get_mpz_t(), n.get_mpz_t(), t);
    return {root, rem == 0};
}

unsigned long valuation(Int n, const Int& p) {
    if (n == 0) throw DomainError("valuation of zero");
    if (n < 0) n = -n;
    return mpz_remove(n.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t());
}

Int ipow(const Int& b, unsigned long e) {
    Int r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

std::uint64_t to_u64(const Int& n) {
    if (n < 0 || !mpz_fits_ulong_p(n.get_mpz_t())) throw DomainError("value does not fit 64 bits: " + n.get_str());
    return mpz_get_ui(n.get_mpz_t());
}

std::vector<std::uint64_t> prime_divisors_u64(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

std::vector<std::uint64_t> divisors_u64(std::uint64_t n) {
    std::vector<std::uint64_t> lo, hi;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        lo.push_back(d);
        if (d != n / d) hi.push_back(n / d);
    }
    lo.insert(lo.end(), hi.rbegin(), hi.rend());
    return lo;
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

}  // namespace gfe
