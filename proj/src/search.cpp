#include "gfe/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "gfe/bounds.hpp"
#include "gfe/errors.hpp"
#include "gfe/hash.hpp"

namespace gfe {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

namespace {

constexpr u64 kListLimit = 10000000;              // smooth parts materialized in one vector
constexpr u64 kStreamLimit = 1000000000000000000;  // largest smooth-part bound we accept

Int to_int(u64 v) {
    Int r;
    mpz_import(r.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
    return r;
}

Int gcd_int(const Int& a, const Int& b) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

}  // namespace

Int Decomposition::value() const {
    Int v = smooth;
    v *= ipow(2, e2);
    v *= ipow(3, e3);
    if (l) {
        v *= ipow(to_int(l), eL);
        v *= ipow(to_int(lPart), l);
    }
    return v;
}

// ---- records

bool SolutionRecord::verify() const {
    if (x <= 0 || y <= 0 || z <= 0 || (dr != 1 && dr != -1) || (ds != 1 && ds != -1)) return false;
    Int lhs = dr * ipow(x, r) + ds * ipow(y, s);
    if (lhs != ipow(z, t)) return false;
    return gcd_int(gcd_int(x, y), z) == 1;
}

std::string SolutionRecord::key() const {
    // Terms of A + B = C with all three positive.
    std::vector<std::string> side;
    auto term = [](const Int& b, u64 e) { return b.get_str() + "^" + std::to_string(e); };
    std::string X = term(x, r), Y = term(y, s), Z = term(z, t);
    std::vector<std::string> lhs;
    std::string rhs;
    if (dr > 0 && ds > 0) lhs = {X, Y}, rhs = Z;
    else if (dr > 0) lhs = {Y, Z}, rhs = X;  // x^r = y^s + z^t
    else lhs = {X, Z}, rhs = Y;
    std::sort(lhs.begin(), lhs.end());
    return lhs[0] + "+" + lhs[1] + "=" + rhs;
}

std::string SolutionRecord::str() const {
    auto term = [](const Int& b, u64 e) { return b.get_str() + "^" + std::to_string(e); };
    std::string X = term(x, r), Y = term(y, s), Z = term(z, t);
    if (dr > 0 && ds > 0) return X + " + " + Y + " = " + Z;
    if (dr > 0) return Y + " + " + Z + " = " + X;
    return X + " + " + Z + " = " + Y;
}

nlohmann::json to_json(const SolutionRecord& r) {
    return {{"x", r.x.get_str()}, {"y", r.y.get_str()}, {"z", r.z.get_str()}, {"r", r.r},
            {"s", r.s},           {"t", r.t},           {"dr", r.dr},         {"ds", r.ds},
            {"identity", r.str()}};
}

SolutionRecord record_from_json(const nlohmann::json& j) {
    SolutionRecord r;
    try {
        r.x = Int(j.at("x").get<std::string>());
        r.y = Int(j.at("y").get<std::string>());
        r.z = Int(j.at("z").get<std::string>());
        r.r = j.at("r").get<u64>();
        r.s = j.at("s").get<u64>();
        r.t = j.at("t").get<u64>();
        r.dr = j.at("dr").get<int>();
        r.ds = j.at("ds").get<int>();
    } catch (const std::exception& e) {
        throw DomainError(std::string("malformed solution record: ") + e.what());
    }
    r.verified = r.verify();
    return r;
}

// ---- enumeration

VariableProfile truncate(const VariableProfile& v, const EnumerationCaps& caps) {
    VariableProfile o = v;
    auto cap = [](std::optional<u64>& field, const std::optional<u64>& c) {
        if (c && (!field || *field > *c)) field = *c;
    };
    cap(o.e2Cap, caps.e2);
    cap(o.e3Cap, caps.e3);
    cap(o.eLCap, caps.eL);
    if (caps.maxLog && (!o.smoothLogBound || *o.smoothLogBound > *caps.maxLog)) o.smoothLogBound = caps.maxLog;
    return o;
}

bool smooth_admissible(u64 n, u64 l, bool split3, std::optional<u64> maxPrime) {
    if (n == 0 || n % 2 == 0 || (l && n % l == 0) || (split3 && n % 3 == 0)) return false;
    if (maxPrime) {
        u64 m = n;
        for (u64 p : small_primes()) {
            if (p > *maxPrime || m == 1) break;
            while (m % p == 0) m /= p;
        }
        if (m != 1) return false;
    }
    if (l) {
        // an exponent divisible by l needs p^l | n
        for (u64 p : small_primes()) {
            if (p == 2) continue;
            u64 pl = 1;
            bool big = false;
            for (u64 i = 0; i < l && !big; ++i) big = (pl > n / p) || ((pl *= p) > n);
            if (big) break;
            if (n % p) continue;
            u64 m = n, e = 0;
            while (m % p == 0) m /= p, ++e;
            if (e % l == 0) return false;
        }
    }
    return true;
}

void for_each_smooth(u64 l, bool split3, u64 maxValue, std::optional<u64> maxPrime, u64 start, u64 step,
                     const std::function<void(u64)>& fn) {
    if (step == 0) throw DomainError("for_each_smooth: step must be positive");
    for (u64 n = std::max<u64>(start, 1); n <= maxValue; n += step) {
        if (smooth_admissible(n, l, split3, maxPrime)) fn(n);
        if (n > maxValue - step) break;
    }
}

std::vector<u64> smooth_parts(u64 l, bool split3, u64 maxValue, std::optional<u64> maxPrime) {
    std::vector<u64> out;
    if (!maxPrime) {
        if (maxValue > kListLimit)
            throw DomainError("smooth-part bound " + std::to_string(maxValue) + " is too large to list; stream it instead");
        for_each_smooth(l, split3, maxValue, {}, 1, 1, [&](u64 n) { out.push_back(n); });
        return out;
    }
    const auto& primes = small_primes();
    // depth-first over primes up to maxPrime, exponents not divisible by l
    struct Frame {
        std::size_t i;
        u64 cur;
    };
    std::vector<Frame> st{{0, 1}};
    while (!st.empty()) {
        auto [i0, cur] = st.back();
        st.pop_back();
        out.push_back(cur);
        if (out.size() > kListLimit) throw DomainError("too many smooth parts to list");
        for (std::size_t i = i0; i < primes.size(); ++i) {
            u64 p = primes[i];
            if (p > *maxPrime || cur > maxValue / p) break;
            if (p == 2 || p == l || (split3 && p == 3)) continue;
            u64 v = cur;
            for (u64 e = 1; v <= maxValue / p; ++e) {
                v *= p;
                if (l == 0 || e % l != 0) st.push_back({i + 1, v});
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

u64 exp_floor(const Rat& B, const PrecisionPolicy& pol) {
    if (B < 0) return 0;
    if (B == 0) return 1;
    if (B.get_d() > std::log(static_cast<double>(kStreamLimit)))
        throw DomainError("log bound " + rat_to_string(B) + " is too large to enumerate; cap it with maxLog");
    return with_precision(pol, [&](unsigned p) {
        long f = certified_floor(Iv::exp(Iv::point(B, p)));
        return static_cast<u64>(std::max(0L, f));
    });
}

u64 smooth_limit(const VariableProfile& v, const PrecisionPolicy& pol) {
    if (v.smoothForcedOne) return 1;
    std::optional<u64> lim;
    if (v.smoothMax) lim = v.smoothMax->fits_ulong_p() ? v.smoothMax->get_ui() : kStreamLimit + 1;
    if (v.smoothLogBound) {
        u64 e = exp_floor(*v.smoothLogBound, pol);
        lim = lim ? std::min(*lim, e) : e;
    }
    if (!lim) throw DomainError("profile of " + v.name + " has no bound on its smooth part");
    if (*lim > kStreamLimit) throw DomainError("smooth-part bound of " + v.name + " exceeds the enumeration limit");
    return *lim;
}

std::vector<Candidate> expand(const Int& smooth, const VariableProfile& v, u64 l) {
    if (v.empty) return {};
    if (!v.e2Cap || !v.eLCap || !v.lPartsBounded || (v.split3 && !v.e3Cap))
        throw DomainError("profile of " + v.name + " is unbounded in its 2-, 3- or l-part");
    if (v.smoothForcedOne && smooth != 1) return {};
    std::vector<Candidate> out;
    const u64 e3Max = v.split3 ? *v.e3Cap : 0;
    for (u64 lp : v.lParts) {
        if (lp != 1 && gcd_int(smooth, to_int(lp)) != 1) continue;
        for (u64 eL = 0; eL <= *v.eLCap; ++eL)
            for (u64 e3 = 0; e3 <= e3Max; ++e3)
                for (u64 e2 = 0; e2 <= *v.e2Cap; ++e2) {
                    Decomposition d{smooth, e2, e3, eL, lp, l};
                    out.push_back({d.value(), d});
                }
    }
    return out;
}

std::vector<Candidate> enumerate_candidates(const StructureProfile& p, const std::string& var,
                                            const PrecisionPolicy& pol) {
    const auto& v = p.var(var);
    if (v.empty) return {};
    u64 lim = smooth_limit(v, pol);
    std::vector<Candidate> out;
    for_each_smooth(p.l, v.split3, lim, v.maxPrime, 1, 1, [&](u64 s) {
        auto c = expand(to_int(s), v, p.l);
        out.insert(out.end(), c.begin(), c.end());
    });
    return out;
}

// ---- perfect powers

namespace {

struct PowFilter {
    std::vector<std::pair<unsigned long, std::vector<bool>>> mods;
};

const PowFilter& filter_for(u64 t) {
    thread_local std::map<u64, PowFilter> cache;
    auto it = cache.find(t);
    if (it != cache.end()) return it->second;
    PowFilter f;
    for (u64 p : small_primes()) {
        if (p == 2 || (p - 1) % t) continue;
        std::vector<bool> res(p, false);
        for (u64 x = 0; x < p; ++x) {
            u64 v = 1;
            u64 b = x, e = t;
            while (e) {
                if (e & 1) v = v * b % p;
                b = b * b % p;
                e >>= 1;
            }
            res[v] = true;
        }
        f.mods.emplace_back(p, std::move(res));
        if (f.mods.size() >= 8) break;
    }
    return cache.emplace(t, std::move(f)).first->second;
}

}  // namespace

std::optional<Int> perfect_root(const Int& n, u64 t) {
    if (n < 0) return std::nullopt;
    if (n <= 1) return n;
    for (const auto& [p, res] : filter_for(t).mods)
        if (!res[mpz_fdiv_ui(n.get_mpz_t(), p)]) return std::nullopt;
    Int root;
    if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), t)) return root;
    return std::nullopt;
}

// ---- checks

std::vector<SolutionRecord> check_values(const std::vector<Int>& xs, u64 r, const std::vector<Int>& ys, u64 s,
                                         const std::set<u64>& tSet, const SearchOptions& opt, u64* checked) {
    std::vector<SolutionRecord> out;
    std::vector<Int> ypow;
    ypow.reserve(ys.size());
    for (const auto& y : ys) ypow.push_back(ipow(y, s));
    u64 n = 0;
    Int D;
    for (const auto& x : xs) {
        if (opt.catalanFloor && x < 2) continue;
        const Int A = ipow(x, r);
        const bool xEven = mpz_even_p(x.get_mpz_t());
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const Int& y = ys[j];
            if (opt.catalanFloor && y < 2) continue;
            if (xEven && mpz_even_p(y.get_mpz_t())) continue;
            if (gcd_int(x, y) != 1) continue;
            ++n;
            const Int& B = ypow[j];
            for (int variant = 0; variant < 3; ++variant) {
                int dr = 1, ds = 1;
                if (variant == 0) D = A + B;
                else if (variant == 1) D = A - B, ds = -1;
                else D = B - A, dr = -1;
                if (D <= 0) continue;
                for (u64 t : tSet) {
                    auto z = perfect_root(D, t);
                    if (!z) continue;
                    if (opt.catalanFloor && *z < 2) continue;
                    SolutionRecord rec{x, y, *z, r, s, t, dr, ds};
                    rec.verified = rec.verify();
                    if (!rec.verified) throw DomainError("internal: emitted record fails verification: " + rec.str());
                    out.push_back(rec);
                }
            }
        }
    }
    if (checked) *checked += n;
    return out;
}

namespace {
std::vector<Int> values_of(const std::vector<Candidate>& c) {
    std::vector<Int> v;
    v.reserve(c.size());
    for (const auto& x : c) v.push_back(x.value);
    return v;
}
}  // namespace

std::vector<SolutionRecord> check_pair(const Int& x1, u64 r, const Int& y1, u64 s, u64 l, const std::set<u64>& tSet,
                                       const VariableProfile& px, const VariableProfile& py, const SearchOptions& opt,
                                       u64* checked) {
    if (gcd_int(x1, y1) != 1) return {};
    return check_values(values_of(expand(x1, px, l)), r, values_of(expand(y1, py, l)), s, tSet, opt, checked);
}

std::vector<SolutionRecord> check_power_tail(const Int& y1, u64 s, u64 l, const std::set<u64>& rSet, u64 mLo, u64 mHi,
                                             const VariableProfile& py, const SearchOptions& opt, u64* checked) {
    std::vector<SolutionRecord> out;
    if (mpz_even_p(y1.get_mpz_t())) return out;  // coprime to z = 2^k
    u64 n = 0;
    for (const auto& c : expand(y1, py, l)) {
        const Int& y = c.value;
        if (mpz_even_p(y.get_mpz_t())) continue;
        if (opt.catalanFloor && y < 2) continue;
        const Int B = ipow(y, s);
        for (u64 m = mLo; m <= mHi; ++m) {
            ++n;
            const Int P = ipow(2, m);
            // x^r = y^s + 2^m, or x^r = |y^s - 2^m|
            const Int sums[3] = {B + P, B - P, P - B};
            for (int v = 0; v < 3; ++v) {
                if (sums[v] <= 0) continue;
                for (u64 r : rSet) {
                    auto x = perfect_root(sums[v], r);
                    if (!x || (opt.catalanFloor && *x < 2)) continue;
                    SolutionRecord rec;
                    rec.x = *x;
                    rec.r = r;
                    rec.y = y;
                    rec.s = s;
                    rec.z = 2;
                    rec.t = m;
                    // v=0: y^s + 2^m = x^r, v=1: x^r + 2^m = y^s, v=2: x^r + y^s = 2^m
                    if (v == 0) rec.dr = 1, rec.ds = -1;
                    else if (v == 1) rec.dr = -1, rec.ds = 1;
                    else rec.dr = 1, rec.ds = 1;
                    rec.verified = rec.verify();
                    if (!rec.verified) throw DomainError("internal: emitted record fails verification: " + rec.str());
                    out.push_back(rec);
                }
            }
        }
    }
    if (checked) *checked += n;
    return out;
}

// ---- small z1

namespace {

bool square_u64(u64 n, u64& root) {
    static const bool* qr64 = [] {
        static bool t[64] = {};
        for (u64 i = 0; i < 64; ++i) t[i * i % 64] = true;
        return t;
    }();
    static const bool* qr63 = [] {
        static bool t[63] = {};
        for (u64 i = 0; i < 63; ++i) t[i * i % 63] = true;
        return t;
    }();
    static const bool* qr65 = [] {
        static bool t[65] = {};
        for (u64 i = 0; i < 65; ++i) t[i * i % 65] = true;
        return t;
    }();
    if (!qr64[n & 63] || !qr63[n % 63] || !qr65[n % 65]) return false;
    u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
    while (static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    root = r;
    return static_cast<u128>(r) * r == n;
}

}  // namespace

std::vector<SolutionRecord> small_z1_scan(const SmallZ1Options& o) {
    if (o.heightBound > 1000000000000000000ULL) throw DomainError("small_z1_scan: heightBound above 10^18");
    if (o.yBound > 2000000) throw DomainError("small_z1_scan: yBound above 2*10^6");
    if (o.tMin < 2 || o.tMax < o.tMin) throw DomainError("small_z1_scan: need 2 <= tMin <= tMax");

    std::vector<u64> z1s{1};
    for (u64 z1 = 5; z1 < o.z1Bound; ++z1)
        if (z1 % 2 && z1 % 3) z1s.push_back(z1);

    struct Target {
        u64 C, z, t;
    };
    std::map<u64, Target> targets;  // by C, smallest z kept
    for (u64 z1 : z1s)
        for (u128 p2 = 1; p2 * z1 <= o.heightBound; p2 *= 2)
            for (u128 p3 = 1; p2 * p3 * z1 <= o.heightBound; p3 *= 3) {
                const u64 z = static_cast<u64>(p2 * p3 * z1);
                u128 C = 1;
                for (u64 i = 0; i < o.tMin && C <= o.heightBound; ++i) C *= z;
                for (u64 t = o.tMin; t <= o.tMax && C <= o.heightBound; ++t, C *= z) {
                    auto it = targets.find(static_cast<u64>(C));
                    if (it == targets.end() || z < it->second.z) targets[static_cast<u64>(C)] = {static_cast<u64>(C), z, t};
                    if (z == 1) break;
                }
                if (z == 1) {
                    if (p2 != 1 || p3 != 1) break;
                }
            }

    std::map<std::string, SolutionRecord> found;
    for (const auto& [C, tg] : targets) {
        for (u64 y = 1; y <= o.yBound; ++y) {
            const u64 y3 = y * y * y;
            u64 x;
            auto emit = [&](int dx, int dy) {
                if (x == 0 || gcd_u64(y, tg.z) != 1) return;
                SolutionRecord rec{to_int(x), to_int(y), to_int(tg.z), 2, 3, tg.t, dx, dy};
                rec.verified = rec.verify();
                if (!rec.verified) throw DomainError("internal: small-z1 record fails verification");
                found.emplace(rec.key(), rec);
            };
            if (y3 < C && square_u64(C - y3, x)) emit(1, 1);    // x^2 + y^3 = C
            if (y3 > C && square_u64(y3 - C, x)) emit(-1, 1);   // -x^2 + y^3 = C
            if (square_u64(C + y3, x)) emit(1, -1);             // x^2 - y^3 = C
        }
    }
    std::vector<SolutionRecord> out;
    for (auto& [k, v] : found) out.push_back(v);
    std::sort(out.begin(), out.end(), [](const SolutionRecord& a, const SolutionRecord& b) {
        Int ca = ipow(a.z, a.t), cb = ipow(b.z, b.t);
        if (ca != cb) return ca < cb;
        return a.y < b.y;
    });
    return out;
}

// ---- campaigns

namespace {

Rat rat_json(const nlohmann::json& v) { return rat_from_string(v.is_string() ? v.get<std::string>() : v.dump()); }

std::vector<std::string> branches_of(const std::string& kind) {
    if (kind == "plain") return {"xy"};
    if (kind == "P1") return {"x", "y"};
    if (kind == "P2") return {"xz", "yz"};
    if (kind == "P3") return {"xy", "xz", "yz"};
    throw ConfigError("unknown box kind: " + kind + " (P1, P2, P3, plain)");
}

struct TaskSpec {
    std::size_t index, box;
    std::string branch;
    u64 residue;
};

std::vector<TaskSpec> tasks_of(const CampaignPlan& plan) {
    std::vector<TaskSpec> out;
    for (std::size_t b = 0; b < plan.boxes.size(); ++b)
        for (const auto& br : branches_of(plan.boxes[b].kind))
            for (u64 k = 0; k < plan.modulus; ++k) out.push_back({out.size(), b, br, k});
    return out;
}

int var_index(char c) { return c - 'x'; }

// Everything a box's tasks need, built once before the workers start.
struct BoxContext {
    const BoxSpec* spec = nullptr;
    std::vector<VariableProfile> vars;
    std::vector<u64> exps;
    u64 l = 0;
    Rat a2;            // joint a2(l)
    Rat branchBound;   // log bound of the branch quantity (P1: single, P3: pair)
    std::vector<Rat> primes;  // r', s', t'
    u64 mHi = 0;       // P1
    std::vector<Int> xs, ys;  // plain
    std::vector<std::string> notes;
    nlohmann::json truncations = nlohmann::json::array();
};

BoxContext build_box(const BoxSpec& b, std::size_t bi, const StructureConfig& cfg, const PrecisionPolicy& pol) {
    BoxContext c;
    c.spec = &b;
    if (b.kind == "plain") {
        if (b.sig.size() != 3) throw ConfigError("plain box needs a signature (r, s, t)");
        for (u64 v = 1; v <= b.xMax; ++v) c.xs.push_back(to_int(v));
        for (u64 v = 1; v <= b.yMax; ++v) c.ys.push_back(to_int(v));
        c.notes.push_back("t set as given by the box");
        return c;
    }
    std::vector<u64> e = b.sig;
    std::sort(e.begin(), e.end());
    c.exps = e;
    c.l = b.l;
    const std::size_t need = b.kind == "P1" ? 2 : 3;
    if (e.size() != need) throw ConfigError(b.kind + " box needs " + std::to_string(need) + " exponents");
    auto prof = structure_profile(StructureFamily::General, e, b.l, cfg, pol);
    for (const auto& v : prof.vars) c.vars.push_back(truncate(v, b.caps));
    if (b.caps.e2 || b.caps.e3 || b.caps.eL)
        c.truncations.push_back({{"box", bi}, {"what", "2-, 3- or l-exponent caps lowered below the profile"},
                                 {"e2", b.caps.e2 ? nlohmann::json(*b.caps.e2) : nlohmann::json(nullptr)},
                                 {"eL", b.caps.eL ? nlohmann::json(*b.caps.eL) : nlohmann::json(nullptr)}});
    if (!cfg.vols.hasAggregate(tables::GeneralJoint, b.l))
        throw ConfigError("Vol constant not configured: " + std::string(tables::GeneralJoint) + "@" + std::to_string(b.l));
    c.a2 = cfg.vols.aggregate(tables::GeneralJoint, b.l).hi;
    const Rat a1 = structure_a1(3, 1, b.l);
    for (u64 x : e) c.primes.push_back(Rat(static_cast<unsigned long>(x)) - a1);
    if (b.kind == "P1") {
        c.branchBound = c.a2 / (c.primes[0] + c.primes[1]);
        c.mHi = general_constants(cfg, pol).twoAdic;
        c.notes.push_back("z = 2^k with 70 <= k <= " + std::to_string(c.mHi));
    } else if (b.kind == "P2") {
        if (c.primes[2] < c.primes[0] + c.primes[1]) throw ConfigError("P2 box needs t' >= r' + s'");
        c.branchBound = c.a2 / (c.primes[0] + c.primes[1]);
        c.notes.push_back("t fixed by the box signature");
    } else {
        if (c.primes[2] > c.primes[0] + c.primes[1]) throw ConfigError("P3 box needs t' <= r' + s'");
        c.branchBound = 2 * c.a2 / (c.primes[0] + c.primes[1] + c.primes[2]);
        c.notes.push_back("t fixed by the box signature");
    }
    if (b.caps.maxLog && *b.caps.maxLog < c.branchBound) {
        c.truncations.push_back({{"box", bi},
                                 {"what", "branch log bound"},
                                 {"from", rat_to_string(c.branchBound)},
                                 {"to", rat_to_string(*b.caps.maxLog)}});
        c.branchBound = *b.caps.maxLog;
    }
    // the per-variable maxLog only matters through the branch bound here
    for (auto& v : c.vars) v.smoothLogBound.reset(), v.smoothMax.reset();
    return c;
}

struct Outcome {
    std::size_t index = 0;
    u64 checked = 0;
    std::vector<SolutionRecord> records;
};

nlohmann::json outcome_json(const Outcome& o, const TaskSpec& t, const CampaignPlan& plan) {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : o.records) recs.push_back(to_json(r));
    return {{"index", o.index}, {"box", t.box}, {"kind", plan.boxes[t.box].kind}, {"branch", t.branch},
            {"residue", t.residue}, {"checked", o.checked}, {"records", recs}};
}

// Thrown inside a task when the campaign's time budget runs out; the task is dropped and rerun on resume.
struct TaskAbandoned {};

Outcome run_task(const TaskSpec& t, const BoxContext& c, const CampaignPlan& plan, const PrecisionPolicy& pol,
                 const std::function<bool()>& expired) {
    Outcome o;
    o.index = t.index;
    SearchOptions opt{plan.catalanFloor};
    const BoxSpec& b = *c.spec;
    const u64 M = plan.modulus;
    if (b.kind == "plain") {
        std::vector<Int> xs;
        for (std::size_t i = 0; i < c.xs.size(); ++i)
            if (mpz_fdiv_ui(c.xs[i].get_mpz_t(), M) == t.residue) xs.push_back(c.xs[i]);
        std::set<u64> tSet = b.tSet.empty() ? std::set<u64>{b.sig[2]} : b.tSet;
        o.records = check_values(xs, b.sig[0], c.ys, b.sig[1], tSet, opt, &o.checked);
        return o;
    }
    const u64 N = exp_floor(c.branchBound, pol);
    if (b.kind == "P1") {
        const int i = var_index(t.branch[0]);
        const auto& v = c.vars[i];
        const u64 other = c.exps[1 - i];
        for_each_smooth(c.l, false, N, {}, t.residue ? t.residue : M, M, [&](u64 u) {
            if (expired()) throw TaskAbandoned{};
            auto recs = check_power_tail(to_int(u), c.exps[i], c.l, {other}, 70, c.mHi, v, opt, &o.checked);
            o.records.insert(o.records.end(), recs.begin(), recs.end());
        });
        return o;
    }
    const int i = var_index(t.branch[0]), j = var_index(t.branch[1]);
    const int k = 3 - i - j;
    const auto& vi = c.vars[i];
    const auto& vj = c.vars[j];
    const std::set<u64> tSet{c.exps[k]};
    for_each_smooth(c.l, false, N, {}, t.residue ? t.residue : M, M, [&](u64 u) {
        if (expired()) throw TaskAbandoned{};
        u64 vmax;
        if (b.kind == "P3") {
            vmax = N / u;  // log(u v) <= B
        } else {
            // (r'+s') log u + t' log v <= a2
            Rat rest = c.a2 - (c.primes[0] + c.primes[1]) * with_precision(pol, [&](unsigned p) {
                           return Iv::log(Rat(static_cast<unsigned long>(u)), p).loRat();
                       });
            vmax = rest < 0 ? 0 : exp_floor(std::min<Rat>(rest / c.primes[2], c.spec->caps.maxLog ? *c.spec->caps.maxLog : rest / c.primes[2]), pol);
        }
        for_each_smooth(c.l, false, vmax, {}, 1, 1, [&](u64 v) {
            if (gcd_u64(u, v) != 1) return;
            if (expired()) throw TaskAbandoned{};
            auto recs = check_pair(to_int(u), c.exps[i], to_int(v), c.exps[j], c.l, tSet, vi, vj, opt, &o.checked);
            o.records.insert(o.records.end(), recs.begin(), recs.end());
        });
    });
    return o;
}

// ---- checkpoint

struct Checkpoint {
    std::string path;
    std::string head;  // hash of the last line
    std::ofstream out;

    static std::string line_hash(const std::string& prev, const nlohmann::json& payload) {
        return sha256_hex(prev + "\n" + payload.dump());
    }

    void append(const nlohmann::json& payload) {
        std::string h = line_hash(head, payload);
        nlohmann::json line = {{"payload", payload}, {"prev", head}, {"hash", h}};
        out << line.dump() << "\n";
        out.flush();
        head = h;
    }
};

// Reads a checkpoint; returns completed outcomes by task index.
std::map<std::size_t, nlohmann::json> load_checkpoint(const std::string& path, const std::string& planHash,
                                                      std::string& head, std::streamoff& goodSize) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();
    std::map<std::size_t, nlohmann::json> done;
    head.clear();
    goodSize = 0;
    std::size_t pos = 0;
    bool first = true;
    while (pos < data.size()) {
        std::size_t nl = data.find('\n', pos);
        if (nl == std::string::npos) break;  // torn final line: dropped
        const std::string text = data.substr(pos, nl - pos);
        nlohmann::json line;
        try {
            line = nlohmann::json::parse(text);
        } catch (const std::exception&) {
            throw CheckpointError("checkpoint corrupt at byte " + std::to_string(pos));
        }
        if (!line.contains("payload") || !line.contains("prev") || !line.contains("hash"))
            throw CheckpointError("checkpoint corrupt at byte " + std::to_string(pos));
        const auto& payload = line.at("payload");
        if (line.at("prev").get<std::string>() != head || Checkpoint::line_hash(head, payload) != line.at("hash").get<std::string>())
            throw CheckpointError("checkpoint hash chain broken at byte " + std::to_string(pos));
        if (first) {
            if (payload.value("planHash", std::string()) != planHash)
                throw CheckpointError("checkpoint was written for a different plan");
            first = false;
        } else {
            done[payload.at("index").get<std::size_t>()] = payload;
        }
        head = line.at("hash").get<std::string>();
        pos = nl + 1;
        goodSize = static_cast<std::streamoff>(pos);
    }
    if (first) throw CheckpointError("checkpoint has no header");
    return done;
}

}  // namespace

std::string CampaignPlan::hash() const { return sha256_hex(source.dump()); }

CampaignPlan CampaignPlan::fromJson(const nlohmann::json& j) {
    CampaignPlan p;
    try {
        p.name = j.value("name", std::string("campaign"));
        p.modulus = j.value("modulus", static_cast<u64>(1));
        if (p.modulus == 0) throw ConfigError("plan modulus must be >= 1");
        p.catalanFloor = j.value("catalanFloor", true);
        for (const auto& b : j.at("boxes")) {
            BoxSpec s;
            s.kind = b.at("kind").get<std::string>();
            branches_of(s.kind);
            s.sig = b.at("signature").get<std::vector<u64>>();
            s.l = b.value("l", static_cast<u64>(0));
            s.label = b.value("label", std::string());
            if (b.contains("maxLog")) s.caps.maxLog = rat_json(b.at("maxLog"));
            if (b.contains("maxE2")) s.caps.e2 = b.at("maxE2").get<u64>();
            if (b.contains("maxE3")) s.caps.e3 = b.at("maxE3").get<u64>();
            if (b.contains("maxEL")) s.caps.eL = b.at("maxEL").get<u64>();
            s.xMax = b.value("xMax", static_cast<u64>(0));
            s.yMax = b.value("yMax", static_cast<u64>(0));
            if (b.contains("tSet")) {
                auto v = b.at("tSet").get<std::vector<u64>>();
                s.tSet = {v.begin(), v.end()};
            }
            if (s.kind != "plain" && s.l == 0) throw ConfigError(s.kind + " box needs l");
            p.boxes.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad campaign plan: ") + e.what());
    }
    p.source = j;
    return p;
}

std::size_t campaign_task_count(const CampaignPlan& plan) { return tasks_of(plan).size(); }

nlohmann::json CampaignReport::toJson() const {
    nlohmann::json j = body;
    j["hash"] = hash;
    return j;
}

CampaignReport run_campaign(const CampaignPlan& plan, const StructureConfig& cfg, const CampaignOptions& opt,
                            const PrecisionPolicy& pol) {
    const auto tasks = tasks_of(plan);
    const std::string planHash = plan.hash();
    std::vector<BoxContext> boxes;
    for (std::size_t b = 0; b < plan.boxes.size(); ++b) boxes.push_back(build_box(plan.boxes[b], b, cfg, pol));

    std::vector<std::optional<nlohmann::json>> results(tasks.size());
    Checkpoint ck;
    if (!opt.checkpointPath.empty()) {
        std::streamoff good = 0;
        if (opt.resume) {
            auto done = load_checkpoint(opt.checkpointPath, planHash, ck.head, good);
            for (auto& [i, payload] : done) {
                if (i >= tasks.size()) throw CheckpointError("checkpoint task index out of range");
                for (const auto& r : payload.at("records"))
                    if (!record_from_json(r).verified) throw CheckpointError("checkpoint record fails verification");
                results[i] = payload;
            }
            std::ofstream trim(opt.checkpointPath, std::ios::in | std::ios::out | std::ios::binary);
            trim.close();
            std::filesystem::resize_file(opt.checkpointPath, static_cast<std::uintmax_t>(good));
            ck.out.open(opt.checkpointPath, std::ios::app | std::ios::binary);
        } else {
            ck.out.open(opt.checkpointPath, std::ios::trunc | std::ios::binary);
            if (!ck.out) throw ConfigError("cannot write checkpoint " + opt.checkpointPath);
            ck.append({{"planHash", planHash}, {"plan", plan.name}, {"tasks", tasks.size()}});
        }
    }

    std::mutex mu;
    std::atomic<std::size_t> next{0};
    std::atomic<u64> fresh{0};
    std::atomic<bool> stop{false};
    std::exception_ptr failure;
    const auto t0 = std::chrono::steady_clock::now();
    auto expired = [&] {
        return stop || (opt.maxSeconds > 0 &&
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() > opt.maxSeconds);
    };
    auto worker = [&] {
        for (;;) {
            if (stop) return;
            std::size_t i = next++;
            if (i >= tasks.size()) return;
            if (results[i]) continue;
            if (opt.maxTasks && fresh >= opt.maxTasks) {
                stop = true;
                return;
            }
            if (opt.maxSeconds > 0 &&
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() > opt.maxSeconds) {
                stop = true;
                return;
            }
            try {
                Outcome o = run_task(tasks[i], boxes[tasks[i].box], plan, pol, expired);
                auto j = outcome_json(o, tasks[i], plan);
                std::lock_guard<std::mutex> g(mu);
                if (opt.maxTasks && fresh >= opt.maxTasks) {
                    stop = true;
                    return;
                }
                results[i] = j;
                ++fresh;
                if (ck.out.is_open()) ck.append(j);
            } catch (const TaskAbandoned&) {
                stop = true;
                return;
            } catch (...) {
                std::lock_guard<std::mutex> g(mu);
                if (!failure) failure = std::current_exception();
                stop = true;
                return;
            }
        }
    };
    const unsigned n = std::max(1u, opt.threads);
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    CampaignReport rep;
    nlohmann::json taskArr = nlohmann::json::array(), truncs = nlohmann::json::array(), notes = nlohmann::json::array();
    std::map<std::string, SolutionRecord> uniq;
    std::size_t completed = 0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!results[i]) continue;
        ++completed;
        taskArr.push_back(*results[i]);
        for (const auto& r : results[i]->at("records")) {
            auto rec = record_from_json(r);
            uniq.emplace(rec.key(), rec);
        }
    }
    for (std::size_t b = 0; b < boxes.size(); ++b) {
        for (const auto& t : boxes[b].truncations) truncs.push_back(t);
        for (const auto& s : boxes[b].notes) notes.push_back({{"box", b}, {"tSet", s}});
    }
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& [k, r] : uniq) {
        recs.push_back(to_json(r));
        rep.records.push_back(r);
    }
    rep.complete = completed == tasks.size();
    rep.body = {{"plan", plan.name},
                {"planHash", planHash},
                {"modulus", plan.modulus},
                {"catalanFloor", plan.catalanFloor},
                {"taskCount", tasks.size()},
                {"completedTasks", completed},
                {"complete", rep.complete},
                {"tasks", taskArr},
                {"records", recs},
                {"truncations", truncs},
                {"tDerivation", notes},
                {"verdict", !rep.complete ? "incomplete"
                             : recs.empty() ? "no solutions in the searched boxes"
                                            : "solutions found"}};
    rep.hash = sha256_hex(rep.body.dump());
    return rep;
}

bool verify_report(const nlohmann::json& report, std::string* why) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (!report.contains("hash")) return fail("no hash");
    nlohmann::json body = report;
    body.erase("hash");
    if (sha256_hex(body.dump()) != report.at("hash").get<std::string>()) return fail("hash mismatch");
    for (const auto& r : report.value("records", nlohmann::json::array()))
        if (!record_from_json(r).verified) return fail("record fails verification");
    return true;
}

}  // namespace gfe
