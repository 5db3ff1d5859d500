#include "gfe/bounds.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "gfe/errors.hpp"
#include "gfe/hash.hpp"

namespace gfe {

using u64 = std::uint64_t;

std::string rat_to_string(const Rat& q) {
    Rat c = q;
    c.canonicalize();
    return c.get_den() == 1 ? c.get_num().get_str() : c.get_str();
}

Rat rat_from_string(const std::string& s) {
    try {
        auto dot = s.find('.');
        if (dot == std::string::npos) {
            Rat q(s);
            q.canonicalize();
            return q;
        }
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (fp.empty() || fp.find_first_not_of("0123456789") != std::string::npos) throw std::invalid_argument(s);
        bool neg = !ip.empty() && ip[0] == '-';
        if (neg) ip = ip.substr(1);
        Int whole(ip.empty() ? "0" : ip);
        Int scale = ipow(10, fp.size());
        Rat q(whole * scale + Int(fp), scale);
        q.canonicalize();
        return neg ? Rat(-q) : q;
    } catch (const std::invalid_argument&) {
        throw ConfigError("cannot parse rational '" + s + "'");
    }
}

Int BoundConfig::kS() const {
    Int r = 1;
    for (u64 i = 0; i < k && i < S.size(); ++i) r *= S[i];
    return r;
}

Rat default_a1(u64 l, u64 e0) {
    Rat c(Int(l * l + 5 * l), Int(l * l + l - 12));
    return c * (1 - Rat(1, Int(e0 * l)));
}

Rat default_a4(u64 l, u64 e0) {
    Rat c(Int(l * l + 5 * l), Int(l * l + l - 12));
    Rat r = c * Rat(1, Int(e0)) * (1 - Rat(1, Int(l)));
    r.canonicalize();
    return r;
}

void apply_default_profile(BoundConfig& cfg) {
    cfg.defaultProfile = true;
    cfg.lambda = 6;
    for (u64 l : cfg.S) {
        auto& pl = cfg.perL[l];
        pl.a1 = default_a1(l, cfg.e0);
        pl.a4 = default_a4(l, cfg.e0);
        pl.a1.canonicalize();
    }
}

void validate(const BoundConfig& c) {
    auto bad = [](const std::string& w) { throw ConfigError("bound configuration: " + w); };
    if (c.S.size() < 2) bad("S needs at least two primes");
    for (size_t i = 0; i < c.S.size(); ++i) {
        if (c.S[i] < 5 || !is_prime_u64(c.S[i])) bad("S must contain primes >= 5");
        if (i && c.S[i] <= c.S[i - 1]) bad("S must be sorted and distinct");
    }
    if (c.k < 2 || c.k > c.S.size()) bad("need 2 <= k <= |S|");
    if (c.u0 < 1) bad("u0 must be positive");
    if (c.n0 < 1) bad("n0 must be positive");
    if (c.n1S < 1 || c.nkS < 1) bad("n1(S), nk(S) must be positive");
    if (c.pN < 2 || !is_prime_u64(c.pN)) bad("pN must be prime");
    if (c.lambda <= 0) bad("lambda must be positive");
    if (c.e0 < 1) bad("e0 must be positive");
    for (u64 p : c.S1)
        if (!is_prime_u64(p)) bad("S1 must contain primes");
    for (u64 l : c.S) {
        auto it = c.perL.find(l);
        if (it == c.perL.end()) bad("missing a1/a4 for l=" + std::to_string(l));
        if (!(it->second.a1 >= it->second.a4 && it->second.a4 > 0))
            bad("need a1(l) >= a4(l) > 0 for l=" + std::to_string(l));
        if (it->second.vol && (it->second.vol->lo < 0 || it->second.vol->hi < it->second.vol->lo))
            bad("Vol enclosure for l=" + std::to_string(l) + " is invalid");
    }
    if (c.primed) {
        if (c.primed->u0p < c.u0) bad("u0' must be >= u0");
        if (c.primed->n1Sp < c.n1S) bad("n1'(S) must be >= n1(S)");
        if (c.primed->n0p < 1) bad("n0' must be positive");
    }
}

namespace {

struct Parts {
    std::map<Int, unsigned long> v;  // v_p(N)
    std::set<Int> A, B, C, P;
};

Parts partition(const BoundConfig& c) {
    Parts pt;
    pt.v = c.N->factors();
    for (const auto& [p, e] : pt.v) {
        bool inS = p.fits_ulong_p() && std::binary_search(c.S.begin(), c.S.end(), p.get_ui());
        bool inB = false;
        for (u64 l : c.S)
            if (e % l == 0) inB = true;
        if (inS) pt.A.insert(p);
        if (inB) pt.B.insert(p);
        if (!inS && !inB) pt.C.insert(p);
    }
    if (c.primed) {
        if (c.primed->P == "all") {
            for (const auto& [p, e] : pt.v) pt.P.insert(p);
        } else {
            for (const Int& p : c.primed->primes)
                if (pt.v.count(p)) pt.P.insert(p);
        }
    }
    return pt;
}

bool in_S1(const BoundConfig& c, const Int& p) { return p.fits_ulong_p() && c.S1.count(p.get_ui()); }

}  // namespace

std::vector<std::string> hypothesis_failures(const BoundConfig& c) {
    std::vector<std::string> out;
    if (!c.N) return out;
    Parts pt = partition(c);
    for (const auto& [p, e] : pt.v) {
        unsigned long vn0 = valuation(c.n0, p);
        if (e + vn0 < c.u0) out.push_back("v_" + p.get_str() + "(n0 N) < u0");
        if (p < c.pN) out.push_back("prime " + p.get_str() + " below pN");
    }
    for (const Int& p : pt.B)
        if (!in_S1(c, p) && Int(pt.v.at(p)) < c.n1S) out.push_back("v_" + p.get_str() + "(N) < n1(S) for p in B");
    // any k of the S-primes dividing v_p(N) force v_p(N) >= nk(S)
    for (const auto& [p, e] : pt.v) {
        u64 cnt = 0;
        for (u64 l : c.S)
            if (e % l == 0) ++cnt;
        if (cnt >= c.k && Int(e) < c.nkS) out.push_back("v_" + p.get_str() + "(N) < nk(S) with k divisors in S");
    }
    if (c.primed) {
        for (const Int& p : pt.P) {
            unsigned long vn0 = valuation(c.n0, p);
            if (pt.v.at(p) + vn0 < c.primed->u0p) out.push_back("v_" + p.get_str() + "(n0 N) < u0' for p in P");
            if (pt.B.count(p) && !in_S1(c, p) && Int(pt.v.at(p)) < c.primed->n1Sp)
                out.push_back("v_" + p.get_str() + "(N) < n1'(S) for p in B'");
        }
    }
    return out;
}

std::vector<u64> missing_vol(const BoundConfig& c) {
    std::vector<u64> m;
    for (u64 l : c.S) {
        auto it = c.perL.find(l);
        if (it == c.perL.end() || !it->second.vol) m.push_back(l);
    }
    return m;
}

DerivedConstants derived_constants(const BoundConfig& c, unsigned prec) {
    validate(c);
    auto miss = missing_vol(c);
    if (!miss.empty()) throw ConfigError("Vol constant not configured for l=" + std::to_string(miss.front()));
    DerivedConstants d;
    d.precision = prec;
    Rat n(Int(c.S.size()));
    Rat sumA1 = 0, sumVol = 0;
    Rat minA4 = c.perL.at(c.S.front()).a4;
    int log2count = 0;
    Iv a3 = Iv::point(0L, prec);
    for (u64 l : c.S) {
        const PerL& pl = c.perL.at(l);
        sumA1 += pl.a1;
        sumVol += pl.vol->hi;
        if (pl.plusLog2) ++log2count;
        minA4 = std::min(minA4, pl.a4);
        a3 = a3 + Iv::log(Rat(Int(l)), prec);
    }
    d.a1 = c.lambda / n * sumA1;
    d.a1.canonicalize();
    d.a4 = c.lambda * minA4;
    d.a4.canonicalize();
    Iv a2 = Iv::point(c.lambda / n * sumVol, prec);
    if (log2count) a2 = a2 + Iv::point(c.lambda / n * log2count, prec) * Iv::log(Rat(2), prec);
    d.a2 = a2;
    d.a3 = a3;
    Iv a5 = Iv::point(0L, prec);
    for (u64 p : c.S1) a5 = a5 + Iv::log(Rat(Int(p)), prec);
    d.a5 = a5;
    Rat kn(Int(c.k), Int(c.S.size()));
    d.b1 = std::max<Rat>(d.a1 / Rat(Int(c.u0)), kn + (d.a1 - d.a4) / Rat(c.n1S));
    d.b1.canonicalize();
    if (c.primed) {
        Rat b = std::max<Rat>(d.a1 / Rat(Int(c.primed->u0p)), kn + (d.a1 - d.a4) / Rat(c.primed->n1Sp));
        b.canonicalize();
        if (b > d.b1) throw ConfigError("b1' exceeds b1; check u0' and n1'(S)");
        d.b1p = b;
    }
    Iv t1 = c.n0 == 1 ? Iv::point(0L, prec) : Iv::point(d.a1 / Rat(Int(c.u0)), prec) * Iv::log(Rat(c.n0), prec);
    d.b2 = t1 + d.a2 + Iv::point(d.a1, prec) * d.a3 + Iv::point(d.a1 - d.a4, prec) * d.a5;
    return d;
}

DerivedConstants derived_constants(const BoundConfig& c, const PrecisionPolicy& pol) {
    return derived_constants(c, pol.initialBits);
}

EliminationResult elimination(const Rat& b1, const Rat& b2, const Rat& ceiling) {
    EliminationResult r;
    r.bUsed = b1;
    r.exact = true;
    r.ceiling = Iv::point(ceiling, 128);
    if (b1 >= 1) {
        r.reason = "b1 >= 1";
        return r;
    }
    Rat lo = b2 / (1 - b1);
    lo.canonicalize();
    if (!(ceiling > lo)) {
        r.reason = "ceiling does not exceed b2/(1-b1)";
        return r;
    }
    r.applicable = true;
    r.lo = lo;
    r.hi = ceiling;
    return r;
}

EliminationResult elimination(const Rat& b1, const Iv& b2, const Iv& ceiling) {
    EliminationResult r;
    r.bUsed = b1;
    r.ceiling = ceiling;
    r.precision = std::max(b2.prec(), ceiling.prec());
    if (b1 >= 1) {
        r.reason = "b1 >= 1";
        return r;
    }
    Iv lo = b2 / Iv::point(1 - b1, r.precision);
    if (!decide_less(lo, ceiling)) {
        r.reason = "ceiling does not exceed b2/(1-b1)";
        return r;
    }
    r.applicable = true;
    r.lo = lo.hiRat();
    r.hi = ceiling.loRat();
    return r;
}

EliminationResult forbidden_interval(const BoundConfig& c, Mode mode, const PrecisionPolicy& pol) {
    return with_precision(pol, [&](unsigned prec) {
        DerivedConstants d = derived_constants(c, prec);
        Iv ceiling = Iv::point(Rat(c.nkS), prec) * Iv::log(Rat(Int(c.pN)), prec);
        if (mode == Mode::Primed) {
            if (!c.primed) throw ConfigError("primed mode needs a primed block (u0', P, n1'(S))");
            if (d.b1 > 1) {
                EliminationResult r;
                r.bUsed = *d.b1p;
                r.ceiling = ceiling;
                r.precision = prec;
                r.reason = "b1 > 1";
                return r;
            }
            return elimination(*d.b1p, d.b2, ceiling);
        }
        return elimination(d.b1, d.b2, ceiling);
    });
}

bool certainly_inside(const EliminationResult& r, const Int& value) {
    if (!r.applicable || value < 1) return false;
    if (value == 1) return r.lo < 0 && r.hi > 0;
    PrecisionPolicy pol;
    return with_precision(pol, [&](unsigned prec) {
        Iv L = Iv::log(Rat(value), prec);
        // both endpoints are rationals and log(value) is irrational, so ties cannot occur
        return decide_less(Iv::point(r.lo, prec), L) && decide_less(L, Iv::point(r.hi, prec));
    });
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Violated: return "violated";
        case Verdict::Indeterminate: return "indeterminate";
        case Verdict::NotApplicable: return "n/a";
    }
    return "?";
}

namespace {

struct LogTerm {
    Int base;
    Rat coef;
};
using LogLin = std::vector<LogTerm>;

void add(LogLin& t, const Int& base, const Rat& coef) {
    if (base > 1 && coef != 0) t.push_back({base, coef});
}

Int prod(const std::set<Int>& s) {
    Int r = 1;
    for (const Int& p : s) r *= p;
    return r;
}

// Sign of sum coef*log(base) computed exactly, or nullopt when the integers would be too large.
std::optional<int> sign_exact(const LogLin& t) {
    Int D = 1;
    for (const auto& x : t) mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), x.coef.get_den_mpz_t());
    double bits = 0;
    std::vector<std::pair<Int, Int>> ex;
    for (const auto& x : t) {
        Int e = x.coef.get_num() * (D / x.coef.get_den());
        bits += std::abs(e.get_d()) * mpz_sizeinbase(x.base.get_mpz_t(), 2);
        ex.emplace_back(x.base, e);
    }
    if (bits > double(1 << 24)) return std::nullopt;
    Int pos = 1, neg = 1;
    for (const auto& [b, e] : ex) {
        Int ae = e < 0 ? Int(-e) : e;
        Int pw;
        mpz_pow_ui(pw.get_mpz_t(), b.get_mpz_t(), ae.get_ui());
        (e > 0 ? pos : neg) *= pw;
    }
    return cmp(pos, neg) < 0 ? -1 : (cmp(pos, neg) > 0 ? 1 : 0);
}

Iv eval(const LogLin& t, unsigned prec) {
    Iv s = Iv::point(0L, prec);
    for (const auto& x : t) s = s + Iv::point(x.coef, prec) * Iv::log(Rat(x.base), prec);
    return s;
}

// lhs - rhs = terms (+ constant); holds when <= 0 (or < 0 when strict).
Verdict judge(const LogLin& t, bool strict, const PrecisionPolicy& pol,
              const std::function<Iv(unsigned)>& constant = nullptr) {
    if (!constant) {
        if (auto s = sign_exact(t)) return (strict ? *s < 0 : *s <= 0) ? Verdict::Holds : Verdict::Violated;
    }
    for (unsigned p = pol.initialBits;; p = std::min(p * 2, pol.maxBits)) {
        Iv v = eval(t, p);
        if (constant) v = v + constant(p);
        if (mpfr_sgn(v.hi()) < 0) return Verdict::Holds;
        if (mpfr_sgn(v.lo()) > 0) return Verdict::Violated;
        if (p >= pol.maxBits) return Verdict::Indeterminate;
    }
}

}  // namespace

ChainReport chain_report(const BoundConfig& c, const PrecisionPolicy& pol) {
    if (!c.N) throw DomainError("chain_report needs a concrete N");
    validate(c);
    ChainReport rep;
    Parts pt = partition(c);
    rep.A = pt.A;
    rep.B = pt.B;
    rep.C = pt.C;
    rep.definitionFailures = hypothesis_failures(c);
    for (const Int& p : pt.P) {
        if (pt.A.count(p)) rep.Ap.insert(p);
        if (pt.B.count(p)) rep.Bp.insert(p);
        if (pt.C.count(p)) rep.Cp.insert(p);
    }
    auto part = [&](const std::set<Int>& s) {
        Int r = 1;
        for (const Int& p : s) {
            Int pe;
            mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), pt.v.at(p));
            r *= pe;
        }
        return r;
    };
    Int N = c.N->value();
    Int NA = part(pt.A), NB = part(pt.B), NC = part(pt.C);
    Int NBp = part(rep.Bp), NCp = part(rep.Cp);
    std::set<Int> Pset = pt.P;
    Int Np = part(Pset);
    std::vector<Int> Nl, radNl;
    for (u64 l : c.S) {
        std::set<Int> s;
        for (const auto& [p, e] : pt.v)
            if (e % l == 0) s.insert(p);
        Nl.push_back(part(s));
        radNl.push_back(prod(s));
    }
    Int S1prod = 1;
    for (u64 p : c.S1) S1prod *= p;
    Int radB = prod(pt.B);
    const Rat n(Int(c.S.size()));
    const Rat kn(Int(c.k), Int(c.S.size()));

    {  // (i).1  sum_{l in S} v_l(N) log l = log N_A
        LogLin t;
        for (u64 l : c.S) add(t, Int(l), Rat(Int(valuation(N, Int(l)))));
        add(t, NA, -1);
        auto s = sign_exact(t);
        rep.items.push_back({"i.1", "sum_S v_l(N) log l = log N_A",
                             s && *s == 0 ? Verdict::Holds : (s ? Verdict::Violated : Verdict::Indeterminate)});
    }
    {  // (i).2
        LogLin t;
        add(t, radB, 1);
        for (const Int& r : radNl) add(t, r, -1);
        rep.items.push_back({"i.2", "sum_B log p <= sum_S log rad N_l", judge(t, false, pol)});
    }
    {  // (i).3
        LogLin t;
        add(t, prod(pt.C), 1);
        add(t, c.n0 * NC, -Rat(1, Int(c.u0)));
        rep.items.push_back({"i.3", "sum_C log p <= log(n0 N_C)/u0", judge(t, false, pol)});
    }
    {  // (i).4
        LogLin t;
        for (const Int& x : Nl) add(t, x, 1);
        add(t, NB, -Rat(Int(c.k - 1)));
        rep.items.push_back({"i.4", "sum_S log N_l <= (k-1) log N_B", judge(t, false, pol)});
    }
    {  // (i).5
        LogLin t;
        add(t, radB, 1);
        add(t, NB, -Rat(1) / Rat(c.n1S));
        add(t, S1prod, -1);
        rep.items.push_back({"i.5", "sum_B log p <= log(N_B)/n1(S) + a5", judge(t, false, pol)});
    }
    if (c.primed) {  // (i).6
        LogLin t;
        add(t, radB, 1);
        add(t, NB / NBp, -Rat(1) / Rat(c.n1S));
        add(t, NBp, -Rat(1) / Rat(c.primed->n1Sp));
        add(t, S1prod, -1);
        rep.items.push_back(
            {"i.6", "sum_B log p <= log(N_B/N'_B)/n1(S) + log(N'_B)/n1'(S) + a5", judge(t, false, pol)});
    } else {
        rep.items.push_back({"i.6", "primed B-sum bound", Verdict::NotApplicable});
    }

    // (ii)-(iv) need the local inequality for every l in S; they are reported, not relied on.
    bool volsKnown = missing_vol(c).empty();
    if (volsKnown) {
        auto consts = [&](unsigned prec) { return derived_constants(c, prec); };
        DerivedConstants d0 = consts(pol.initialBits);
        Rat c1 = kn + (d0.a1 - d0.a4) / Rat(c.n1S);
        {
            LogLin t;
            add(t, N, 1 - kn);
            add(t, radical(*c.N).value(), -d0.a1);
            add(t, radB, d0.a4);
            add(t, NC, kn);
            rep.items.push_back({"ii", "log N <= a1 log rad N - a4 sum_B log p + a2 + (k/n)(log N - log N_C)",
                                 judge(t, false, pol, [&](unsigned p) { return -consts(p).a2; }), true});
        }
        auto tail = [&](unsigned p) {
            DerivedConstants d = consts(p);
            return -(d.a2 + Iv::point(d.a1, p) * d.a3 + Iv::point(d.a1 - d.a4, p) * d.a5);
        };
        {
            LogLin t;
            add(t, N, 1 - c1);
            add(t, prod(pt.C), -d0.a1);
            add(t, NC, c1);
            rep.items.push_back({"iii", "log N <= a1 log rad N_C + c1 (log N - log N_C) + a2 + a1 a3 + (a1-a4) a5",
                                 judge(t, false, pol, tail), true});
        }
        if (c.primed) {
            Rat c1p = kn + (d0.a1 - d0.a4) / Rat(c.primed->n1Sp);
            LogLin t;
            add(t, N, 1);
            add(t, prod(pt.C), -d0.a1);
            add(t, N / Np, -c1);
            add(t, NC / NCp, c1);
            add(t, Np, -c1p);
            add(t, NCp, c1p);
            rep.items.push_back({"iv", "primed form of (iii)", judge(t, false, pol, tail), true});
        } else {
            rep.items.push_back({"iv", "primed form of (iii)", Verdict::NotApplicable, true});
        }
    } else {
        for (const char* nm : {"ii", "iii", "iv"})
            rep.items.push_back({nm, "needs Vol constants", Verdict::NotApplicable, true});
    }

    {  // hypothesis log N < nk(S) log pN
        LogLin t;
        add(t, N, 1);
        add(t, Int(c.pN), -Rat(c.nkS));
        rep.hypothesis = judge(t, true, pol);
    }
    if (rep.hypothesis == Verdict::Holds && volsKnown && N > 1) {
        rep.precision = pol.initialBits;
        auto beyond = [&](const Rat& b, const Int& X) {
            // (1-b) log X - b2 > 0 certified
            return with_precision(pol, [&](unsigned prec) {
                DerivedConstants d = derived_constants(c, prec);
                rep.precision = std::max(rep.precision, prec);
                Iv v = Iv::point(1 - b, prec) * Iv::log(Rat(X), prec) - d.b2;
                if (mpfr_sgn(v.lo()) > 0) return true;
                if (mpfr_sgn(v.hi()) <= 0) return false;
                throw Indeterminate("chain comparison");
            });
        };
        DerivedConstants d = derived_constants(c, pol.initialBits);
        rep.excluded = d.b1 < 1 && beyond(d.b1, N);
        if (c.primed && d.b1 <= 1 && *d.b1p < 1 && Np > 1) rep.excludedPrimed = beyond(*d.b1p, Np);
    }
    return rep;
}

// ---- scenarios

std::string to_string(ScenarioCase c) {
    switch (c) {
        case ScenarioCase::GeneralMu6: return "general-mu6";
        case ScenarioCase::GeneralTwoTorsion: return "general-2tor";
        case ScenarioCase::TwoThreeMu6: return "twothree-mu6";
        case ScenarioCase::TwoThreeTwoTorsion: return "twothree-2tor";
        case ScenarioCase::ThreeRSMu6: return "threers-mu6";
        case ScenarioCase::ThreeRSTwoTorsion: return "threers-2tor";
    }
    return "?";
}

ScenarioCase parse_scenario(const std::string& s) {
    for (auto c : {ScenarioCase::GeneralMu6, ScenarioCase::GeneralTwoTorsion, ScenarioCase::TwoThreeMu6,
                   ScenarioCase::TwoThreeTwoTorsion, ScenarioCase::ThreeRSMu6, ScenarioCase::ThreeRSTwoTorsion})
        if (s == to_string(c)) return c;
    throw ConfigError("unknown scenario '" + s +
                      "' (general-mu6, general-2tor, twothree-mu6, twothree-2tor, threers-mu6, threers-2tor)");
}

namespace {

[[noreturn]] void precondition(const std::string& what) { throw DomainError("scenario precondition failed: " + what); }

void need_exps(const ScenarioRequest& r, size_t n, const char* shape) {
    if (r.exps.size() != n) precondition(std::string("expected exponents ") + shape);
}

bool no_l_divides(const std::vector<u64>& S, u64 m) {
    for (u64 l : S)
        if (m % l == 0) return false;
    return true;
}

}  // namespace

BoundConfig scenario(const ScenarioRequest& req, const VolTable& vols) {
    BoundConfig c;
    c.S = req.S;
    std::sort(c.S.begin(), c.S.end());
    c.S.erase(std::unique(c.S.begin(), c.S.end()), c.S.end());
    if (c.S.size() < 2) precondition("|S| >= 2");
    for (u64 l : c.S)
        if (l < 11 || !is_prime_u64(l)) precondition("every l in S is a prime >= 11");
    c.k = req.k;
    if (c.k < 2 || c.k > c.S.size()) precondition("2 <= k <= |S|");
    const u64 p0 = c.S.front();
    const Int kS = c.kS();
    std::string sit = req.situation.empty() ? "a" : req.situation;
    c.label = to_string(req.sc) + "/" + sit;
    std::string volKind;
    bool plusLog2 = false;

    auto primed = [&](u64 u0p, Int n1p, Int n0p, std::string P) {
        if (u0p < c.u0) precondition("u0' >= u0 (choose a smaller u0)");
        c.primed = PrimedBlock{u0p, std::move(n1p), std::move(n0p), std::move(P), {}};
    };

    switch (req.sc) {
        case ScenarioCase::GeneralMu6:
        case ScenarioCase::GeneralTwoTorsion: {
            need_exps(req, 3, "(r,s,t)");
            u64 r = req.exps[0], s = req.exps[1], t = req.exps[2];
            if (r < 4 || s < 4 || t < 4) precondition("r,s,t >= 4");
            bool mu6 = req.sc == ScenarioCase::GeneralMu6;
            if (mu6) {
                c.n0 = 256;
                c.u0 = 8;
                c.pN = 2;
                c.e0 = 3;
                c.S1 = {2};
                c.n1S = 2 * p0;
                c.nkS = 2 * kS;
                volKind = "general:1:";
                c.notes.push_back("N = x^2r y^2s z^2t / 2^8");
            } else {
                if (!no_l_divides(c.S, r * s * t)) precondition("l does not divide rst for every l in S");
                c.n0 = 1;
                c.u0 = 8;
                c.pN = 3;
                c.e0 = 1;
                c.n1S = Int(8) * p0;
                c.nkS = 8 * kS;
                volKind = "general:3:";
                c.notes.push_back("N = odd part of x^2r y^2s z^2t");
            }
            Int n0p = mu6 ? Int(256) : Int(1);
            if (sit == "none") break;
            if (sit == "a") {
                primed(c.u0, std::max(Int(c.u0), Int(2 * p0)), c.n0, "all");
            } else if (sit == "c1" || sit == "c2" || sit == "c3") {
                if (!(s >= r && r >= t)) precondition("s >= r >= t for situation (c)");
                if (sit == "c1") {
                    if (mu6 && !no_l_divides(c.S, r * s * t)) precondition("l does not divide rst for every l in S");
                    primed(2 * t, Int(2 * t) * p0, n0p, "p | xyz");
                } else if (sit == "c2") {
                    if (mu6 && !no_l_divides(c.S, r * s)) precondition("l does not divide rs for every l in S");
                    primed(2 * r, Int(2 * r) * p0, n0p, "p | xy");
                } else {
                    if (mu6 && !no_l_divides(c.S, s)) precondition("l does not divide s for every l in S");
                    primed(2 * s, Int(2 * s) * p0, n0p, "p | y");
                }
            } else {
                precondition("situation must be none, a, c1, c2 or c3");
            }
            break;
        }
        case ScenarioCase::TwoThreeMu6: {
            need_exps(req, 1, "(t)");
            u64 t = req.exps[0];
            if (t < 11) precondition("t >= 11");
            for (u64 l : c.S)
                if (l == 13) precondition("13 not in S");
            c.n0 = 1728;
            c.pN = 2;
            c.e0 = 12;
            c.S1 = {2, 3};
            c.nkS = kS;
            volKind = "twothree:1:";
            c.notes.push_back("N = z^t / gcd(1728, z^t); n0 taken at its bound 1728");
            if (sit == "a" || sit == "i") {
                u64 u0 = req.u0.value_or(t);
                if (u0 < 11 || u0 > t) precondition("11 <= u0 <= t");
                c.u0 = u0;
                c.n1S = u0;
                c.label = to_string(req.sc) + "/i";
            } else if (sit == "ii") {
                if (!no_l_divides(c.S, t)) precondition("l does not divide t for every l in S");
                c.u0 = t;
                c.n1S = Int(p0) * t;
            } else {
                precondition("situation must be i or ii");
            }
            break;
        }
        case ScenarioCase::TwoThreeTwoTorsion: {
            need_exps(req, 1, "(t)");
            u64 t = req.exps[0];
            if (t < 11) precondition("t >= 11");
            if (!req.q) precondition("a prime q >= 5 with q | t is required");
            u64 q = *req.q;
            if (q < 5 || !is_prime_u64(q) || t % q) precondition("q is a prime >= 5 dividing t");
            for (u64 l : c.S) {
                if (l == 13) precondition("13 not in S");
                if ((q * (q * q - 1)) % l == 0) precondition("l does not divide q(q^2-1) for every l in S");
            }
            c.n0 = 27;
            c.u0 = t;
            c.pN = 3;
            c.e0 = 2;
            c.S1 = {3};
            c.n1S = t;
            c.nkS = kS;
            plusLog2 = true;
            volKind = "twothree:2:";
            c.notes.push_back("N = odd part of z^t / gcd(27, z^t); n0 taken at its bound 27");
            break;
        }
        case ScenarioCase::ThreeRSMu6:
        case ScenarioCase::ThreeRSTwoTorsion: {
            need_exps(req, 2, "(r,s)");
            u64 r = req.exps[0], s = req.exps[1];
            if (r < 4 || s < 7) precondition("r >= 4 and s >= 7");
            for (u64 l : c.S)
                if (l == 13) precondition("13 not in S");
            bool mu6 = req.sc == ScenarioCase::ThreeRSMu6;
            u64 m = std::min(3 * r, s);
            u64 u0 = req.u0.value_or(m);
            if (u0 < 7 || u0 > m) precondition("7 <= u0 <= min{3r, s}");
            c.n0 = 27;
            c.u0 = u0;
            c.pN = mu6 ? 2 : 3;
            c.e0 = mu6 ? 12 : 4;
            c.S1 = {3};
            c.n1S = p0;
            c.nkS = kS;
            plusLog2 = !mu6;
            volKind = mu6 ? "threers:1:" : "threers:2:";
            c.notes.push_back(mu6 ? "N = x^3r y^s / gcd(27, x^3r y^s); n0 taken at its bound 27"
                                  : "N = odd part of x^3r y^s / gcd(27, x^3r y^s); n0 taken at its bound 27");
            if (sit == "none") break;
            if (sit == "a") {
                primed(m, std::max(Int(m), Int(2 * p0)), c.n0, "all");
            } else if (sit == "c1") {
                if (!no_l_divides(c.S, r * s)) precondition("l does not divide rs for every l in S");
                primed(m, Int(m) * p0, 27, "p | xy");
            } else if (sit == "c2") {
                if (!no_l_divides(c.S, r)) precondition("l does not divide r for every l in S");
                primed(2 * r, Int(2 * r) * p0, 27, "p | x");
            } else if (sit == "c3") {
                if (!no_l_divides(c.S, s)) precondition("l does not divide s for every l in S");
                primed(s, Int(s) * p0, 27, "p | y");
            } else {
                precondition("situation must be none, a, c1, c2 or c3");
            }
            break;
        }
    }
    apply_default_profile(c);
    for (u64 l : c.S) {
        std::string id = volKind + std::to_string(l);
        if (req.sc == ScenarioCase::TwoThreeTwoTorsion) id += ":" + std::to_string(*req.q);
        auto& pl = c.perL[l];
        pl.plusLog2 = plusLog2;
        if (vols.hasRaw(id)) pl.vol = vols.raw(id);
    }
    validate(c);
    return c;
}

Rat chain_upper_bound(std::vector<EliminationResult> iv, const Rat& C0) {
    Rat cur = C0;
    bool strict = true;  // L < cur initially, L <= cur afterwards
    for (bool moved = true; moved;) {
        moved = false;
        Rat best = cur;
        for (const auto& r : iv) {
            if (!r.applicable) continue;
            bool covers = strict ? r.hi >= cur : r.hi > cur;
            if (covers && r.lo < best) best = r.lo;
        }
        if (best < cur) {
            cur = best;
            strict = false;
            moved = true;
        }
    }
    return cur;
}

// ---- JSON

namespace {

nlohmann::json enc_json(const Enclosure& e) {
    return {{"lo", rat_to_string(e.lo)}, {"hi", rat_to_string(e.hi)}, {"provenance", e.provenance}, {"strict", e.strict}};
}

nlohmann::json iv_json(const Iv& v) {
    return {{"lo", v.loDouble()}, {"hi", v.hiDouble()}};
}

std::string str_of(const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

nlohmann::json to_json(const BoundConfig& c) {
    nlohmann::json perL = nlohmann::json::object();
    for (const auto& [l, pl] : c.perL) {
        nlohmann::json e = {{"a1", rat_to_string(pl.a1)}, {"a4", rat_to_string(pl.a4)}, {"plusLog2", pl.plusLog2}};
        e["vol"] = pl.vol ? enc_json(*pl.vol) : nlohmann::json(nullptr);
        perL[std::to_string(l)] = e;
    }
    nlohmann::json j = {{"label", c.label},
                        {"n0", c.n0.get_str()},
                        {"u0", c.u0},
                        {"pN", c.pN},
                        {"S", c.S},
                        {"k", c.k},
                        {"kS", c.kS().get_str()},
                        {"S1", c.S1},
                        {"n1S", c.n1S.get_str()},
                        {"nkS", c.nkS.get_str()},
                        {"lambda", rat_to_string(c.lambda)},
                        {"e0", c.e0},
                        {"defaultProfile", c.defaultProfile},
                        {"perL", perL},
                        {"notes", c.notes}};
    if (c.N) {
        nlohmann::json f = nlohmann::json::object();
        for (const auto& [p, e] : c.N->factors()) f[p.get_str()] = e;
        j["N"] = f;
    }
    if (c.primed) {
        std::vector<std::string> ps;
        for (const Int& p : c.primed->primes) ps.push_back(p.get_str());
        j["primed"] = {{"u0p", c.primed->u0p},
                       {"n1Sp", c.primed->n1Sp.get_str()},
                       {"n0p", c.primed->n0p.get_str()},
                       {"P", c.primed->P},
                       {"primes", ps}};
    }
    return j;
}

BoundConfig bound_config_from_json(const nlohmann::json& j) {
    try {
        BoundConfig c;
        c.label = j.value("label", std::string());
        c.n0 = Int(str_of(j.at("n0")));
        c.u0 = j.at("u0").get<u64>();
        c.pN = j.at("pN").get<u64>();
        c.S = j.at("S").get<std::vector<u64>>();
        c.k = j.at("k").get<u64>();
        if (j.contains("S1")) {
            auto v = j.at("S1").get<std::vector<u64>>();
            c.S1 = std::set<u64>(v.begin(), v.end());
        }
        c.n1S = Int(str_of(j.at("n1S")));
        c.nkS = Int(str_of(j.at("nkS")));
        c.e0 = j.value("e0", u64(1));
        c.defaultProfile = j.value("defaultProfile", true);
        if (c.defaultProfile) apply_default_profile(c);
        if (j.contains("lambda")) c.lambda = rat_from_string(str_of(j.at("lambda")));
        if (j.contains("perL")) {
            for (const auto& [ls, e] : j.at("perL").items()) {
                u64 l = std::stoull(ls);
                PerL& pl = c.perL[l];
                if (!c.defaultProfile) {
                    pl.a1 = rat_from_string(str_of(e.at("a1")));
                    pl.a4 = rat_from_string(str_of(e.at("a4")));
                }
                pl.plusLog2 = e.value("plusLog2", false);
                if (e.contains("vol") && !e.at("vol").is_null()) {
                    const auto& v = e.at("vol");
                    Enclosure en;
                    if (v.is_object()) {
                        en.hi = rat_from_string(str_of(v.at("hi")));
                        en.lo = v.contains("lo") ? rat_from_string(str_of(v.at("lo"))) : Rat(0);
                        en.provenance = v.value("provenance", std::string());
                    } else {
                        en.hi = rat_from_string(str_of(v));
                    }
                    pl.vol = en;
                }
            }
        }
        if (j.contains("N")) {
            FactoredInteger::Map m;
            for (const auto& [p, e] : j.at("N").items()) m.emplace(Int(p), e.get<unsigned long>());
            c.N = FactoredInteger::fromMap(m);
        }
        if (j.contains("primed") && !j.at("primed").is_null()) {
            const auto& p = j.at("primed");
            PrimedBlock b;
            b.u0p = p.at("u0p").get<u64>();
            b.n1Sp = Int(str_of(p.at("n1Sp")));
            b.n0p = Int(str_of(p.value("n0p", nlohmann::json("1"))));
            b.P = p.value("P", std::string("all"));
            if (p.contains("primes"))
                for (const auto& x : p.at("primes")) b.primes.insert(Int(str_of(x)));
            c.primed = b;
        }
        validate(c);
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bound configuration JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bound configuration JSON: ") + e.what());
    }
}

nlohmann::json to_json(const DerivedConstants& d) {
    nlohmann::json j = {{"a1", rat_to_string(d.a1)}, {"a2", iv_json(d.a2)},         {"a3", iv_json(d.a3)},
                        {"a4", rat_to_string(d.a4)}, {"a5", iv_json(d.a5)},         {"b1", rat_to_string(d.b1)},
                        {"b2", iv_json(d.b2)},       {"precision", d.precision}};
    j["b1p"] = d.b1p ? nlohmann::json(rat_to_string(*d.b1p)) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const EliminationResult& r) {
    nlohmann::json j = {{"applicable", r.applicable}, {"b", rat_to_string(r.bUsed)}, {"ceiling", iv_json(r.ceiling)}};
    if (r.applicable) {
        j["interval"] = {{"lo", rat_to_string(r.lo)},
                         {"hi", rat_to_string(r.hi)},
                         {"loApprox", r.lo.get_d()},
                         {"hiApprox", r.hi.get_d()},
                         {"open", true},
                         {"exact", r.exact}};
    } else {
        j["interval"] = nullptr;
        j["reason"] = r.reason;
    }
    j["precision"] = r.precision;
    return j;
}

nlohmann::json to_json(const ChainReport& r) {
    auto set = [](const std::set<Int>& s) {
        std::vector<std::string> v;
        for (const Int& p : s) v.push_back(p.get_str());
        return v;
    };
    nlohmann::json items = nlohmann::json::array();
    for (const auto& it : r.items)
        items.push_back({{"name", it.name},
                         {"statement", it.statement},
                         {"verdict", to_string(it.verdict)},
                         {"informational", it.informational}});
    return {{"A", set(r.A)},
            {"B", set(r.B)},
            {"C", set(r.C)},
            {"Aprime", set(r.Ap)},
            {"Bprime", set(r.Bp)},
            {"Cprime", set(r.Cp)},
            {"items", items},
            {"definitionFailures", r.definitionFailures},
            {"hypothesis", to_string(r.hypothesis)},
            {"excluded", r.excluded},
            {"excludedPrimed", r.excludedPrimed}};
}

nlohmann::json certificate(const BoundConfig& c, const DerivedConstants& d, const EliminationResult& r) {
    nlohmann::json cj = to_json(c);
    std::string verdict = r.applicable ? "excludes" : "not-applicable";
    return {{"configHash", sha256_hex(cj.dump())},
            {"constants", to_json(d)},
            {"verdict", verdict},
            {"interval", to_json(r)["interval"]},
            {"precisionUsed", std::max(d.precision, r.precision)}};
}

}  // namespace gfe
