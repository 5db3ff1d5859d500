#include "gfe/structure.hpp"

#include <algorithm>

#include "gfe/bounds.hpp"
#include "gfe/errors.hpp"

namespace gfe {

using u64 = std::uint64_t;

namespace {

const Rat kThreeRSA1Cap(38, 5);  // a1(p) < 7.6 for the (3,r,s) profiles

u64 next_prime(u64 p) {
    do ++p;
    while (!is_prime_u64(p));
    return p;
}

// Primes >= from, skipping excluded, the k-th one (k counted from 0).
u64 kth_prime_avoiding(u64 from, const std::set<u64>& excluded, std::size_t k) {
    u64 p = from;
    if (!is_prime_u64(p)) p = next_prime(p);
    for (;;) {
        if (!excluded.count(p)) {
            if (k == 0) return p;
            --k;
        }
        p = next_prime(p);
    }
}

std::set<u64> primes_at_least(u64 n, u64 floor) {
    std::set<u64> out;
    if (n == 0) return out;
    for (u64 p : prime_divisors_u64(n))
        if (p >= floor) out.insert(p);
    return out;
}

Rat agg_hi(const StructureConfig& c, const char* table, u64 l) { return c.vols.aggregate(table, l).hi; }

Iv riv(const Rat& q, unsigned prec) { return Iv::point(q, prec); }
Iv logv(u64 n, unsigned prec) { return Iv::log(Rat(static_cast<unsigned long>(n)), prec); }

// a > b certified; false when a <= b certified; Indeterminate otherwise.
bool greater(const Iv& a, const Iv& b) { return decide_less(b, a); }

Rat rat_u(u64 v) { return Rat(static_cast<unsigned long>(v)); }

// Largest m >= 0 with m * logb <= rhs not refuted, i.e. floor(rhs / log b) with certification.
u64 floor_div_log(const Rat& rhs, u64 base, const PrecisionPolicy& pol) {
    return with_precision(pol, [&](unsigned p) {
        long f = certified_floor(riv(rhs, p) / logv(base, p));
        return static_cast<u64>(std::max(0L, f));
    });
}

std::vector<u64> table_primes(const StructureConfig& c, const char* table) {
    auto s = c.vols.aggregatePrimes(table);
    if (s.empty()) throw ConfigError(std::string("Vol constant not configured: aggregate table ") + table);
    return {s.begin(), s.end()};
}

}  // namespace

std::string to_string(StructureFamily f) {
    switch (f) {
        case StructureFamily::General: return "general";
        case StructureFamily::ThreeRS: return "threers";
        case StructureFamily::TwoThree: return "twothree";
    }
    return "?";
}

StructureFamily parse_structure_family(const std::string& s) {
    if (s == "general") return StructureFamily::General;
    if (s == "threers") return StructureFamily::ThreeRS;
    if (s == "twothree") return StructureFamily::TwoThree;
    throw ConfigError("unknown structure family: " + s + " (general, threers, twothree)");
}

Rat structure_a1(u64 c, u64 d, u64 p) {
    Rat pp = rat_u(p);
    Rat v = rat_u(c) * (pp * pp + 5 * pp) / (pp * pp + pp - 12) * (1 - 1 / (rat_u(d) * pp));
    v.canonicalize();
    return v;
}

std::optional<u64> TwoThreeCaps::primeCap(u64 t) const {
    std::optional<u64> best;
    for (const auto& c : primeCaps)
        if (t >= c.tMin && !c.except.count(t)) best = best ? std::min(*best, c.maxPrime) : c.maxPrime;
    return best;
}

std::optional<u64> TwoThreeCaps::smoothCap(u64 t) const {
    std::optional<u64> best;
    for (const auto& c : smoothCaps)
        if (t >= c.tMin) best = best ? std::min(*best, c.below) : c.below;
    return best;
}

Rat StructureConfig::h(const std::string& key) const {
    auto it = hBounds.find(key);
    if (it == hBounds.end()) throw ConfigError("height bound not configured: " + key);
    return it->second;
}

namespace {
Rat rat_of(const nlohmann::json& v) {
    return rat_from_string(v.is_string() ? v.get<std::string>() : v.dump());
}
std::set<u64> u64_set(const nlohmann::json& j) {
    std::set<u64> s;
    for (const auto& v : j) s.insert(v.get<u64>());
    return s;
}
}  // namespace

StructureConfig StructureConfig::fromJson(const nlohmann::json& j) {
    StructureConfig c;
    try {
        if (j.contains("hBounds"))
            for (const auto& [k, v] : j.at("hBounds").items()) c.hBounds[k] = rat_of(v.is_object() ? v.at("value") : v);
        if (j.contains("twothreeCaps")) {
            const auto& t = j.at("twothreeCaps");
            auto& caps = c.twothree;
            for (const auto& e : t.value("primeCaps", nlohmann::json::array())) {
                TwoThreeCaps::PrimeCap pc;
                pc.tMin = e.at("tMin").get<u64>();
                pc.maxPrime = e.at("maxPrime").get<u64>();
                if (e.contains("except")) pc.except = u64_set(e.at("except"));
                caps.primeCaps.push_back(pc);
            }
            for (const auto& e : t.value("smoothCaps", nlohmann::json::array()))
                caps.smoothCaps.push_back({e.at("tMin").get<u64>(), e.at("below").get<u64>()});
            if (t.contains("solvedDivisors")) caps.solvedDivisors = u64_set(t.at("solvedDivisors"));
            if (t.contains("excludedPowerBases")) caps.excludedPowerBases = u64_set(t.at("excludedPowerBases"));
            caps.tMin = t.value("tMin", caps.tMin);
            caps.tMax = t.value("tMax", caps.tMax);
            caps.z6Floor = t.value("z6Floor", caps.z6Floor);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad structure configuration: ") + e.what());
    }
    return c;
}

nlohmann::json StructureConfig::toJson() const {
    nlohmann::json h = nlohmann::json::object();
    for (const auto& [k, v] : hBounds) h[k] = rat_to_string(v);
    nlohmann::json pcs = nlohmann::json::array(), scs = nlohmann::json::array();
    for (const auto& p : twothree.primeCaps) pcs.push_back({{"tMin", p.tMin}, {"maxPrime", p.maxPrime}, {"except", p.except}});
    for (const auto& s : twothree.smoothCaps) scs.push_back({{"tMin", s.tMin}, {"below", s.below}});
    return {{"hBounds", h},
            {"twothreeCaps",
             {{"primeCaps", pcs},
              {"smoothCaps", scs},
              {"solvedDivisors", twothree.solvedDivisors},
              {"excludedPowerBases", twothree.excludedPowerBases},
              {"tMin", twothree.tMin},
              {"tMax", twothree.tMax},
              {"z6Floor", twothree.z6Floor}}}};
}

bool VariableProfile::finite() const {
    if (empty) return true;
    if (!e2Cap || !eLCap || !lPartsBounded) return false;
    if (split3 && !e3Cap) return false;
    return smoothForcedOne || smoothLogBound || smoothMax;
}

const VariableProfile& StructureProfile::var(const std::string& name) const {
    for (const auto& v : vars)
        if (v.name == name) return v;
    throw DomainError("profile has no variable " + name);
}

// ---- general family

std::set<u64> general_xl_candidates(u64 r, u64 l, const StructureConfig& cfg, const PrecisionPolicy& pol) {
    if (r < 4 || l < 11 || !is_prime_u64(l) || r % l == 0) throw DomainError("x_l candidates need r >= 4, prime l >= 11, l not dividing r");
    const Rat hOdd = cfg.h("general.odd.s0>=7");
    const u64 rl = r * l;
    // Largest x with r l log x <= hOdd.
    u64 X = with_precision(pol, [&](unsigned p) {
        long f = certified_floor(Iv::exp(riv(hOdd / rat_u(rl), p)));
        return static_cast<u64>(std::max(1L, f));
    });
    std::set<u64> out{1};
    for (u64 x = 3; x <= X; x += 2) {
        if (x % l == 0) continue;
        u64 q = 11;
        while (q == l || r % q == 0 || x % q == 0) q = next_prime(q);
        if (!cfg.vols.hasAggregate(tables::GeneralOdd, q)) {
            out.insert(x);  // nothing to exclude it with
            continue;
        }
        Rat a2 = agg_hi(cfg, tables::GeneralOdd, q);
        bool excluded = with_precision(pol, [&](unsigned p) {
            return greater(riv(rat_u(rl - 4), p) * logv(x, p), riv(a2, p));
        });
        if (!excluded) out.insert(x);
    }
    return out;
}

GeneralConstants general_constants(const StructureConfig& cfg, const PrecisionPolicy& pol) {
    GeneralConstants g;
    const Rat hOdd = cfg.h("general.odd.s0>=7");
    g.rMax = floor_div_log(cfg.h("general.total.s0>=600"), 2, pol);

    // x_l table
    for (u64 r = 4; r <= g.rMax; ++r) {
        for (u64 l = 11;; l = next_prime(l)) {
            bool any = with_precision(pol, [&](unsigned p) {
                return !greater(riv(rat_u(r * l), p) * logv(3, p), riv(hOdd, p));
            });
            if (!any) break;
            if (r % l == 0) continue;
            auto c = general_xl_candidates(r, l, cfg, pol);
            if (c != std::set<u64>{1}) g.xlTable[{r, l}] = c;
        }
    }

    // r r_l <= a2(q)/log l + 4, q the smallest prime >= 11 with q != l, q not dividing r;
    // the max runs over the (r, l) where this still allows r_l >= 1
    const auto oddPrimes = table_primes(cfg, tables::GeneralOdd);
    Rat a2max = 0;
    for (u64 q : oddPrimes) a2max = std::max<Rat>(a2max, agg_hi(cfg, tables::GeneralOdd, q));
    g.rl = with_precision(pol, [&](unsigned p) {
        std::optional<Iv> best;
        for (u64 r = 4; r <= g.rMax; ++r) {
            for (u64 l = 11;; l = next_prime(l)) {
                Iv cap = riv(a2max, p) / logv(l, p) + riv(4, p);
                if (best && decide_less(cap, *best)) break;
                if (r % l == 0) continue;
                u64 q = 11;
                while (q == l || r % q == 0) q = next_prime(q);
                Iv v = riv(agg_hi(cfg, tables::GeneralOdd, q), p) / logv(l, p) + riv(4, p);
                if (decide_less(v, riv(rat_u(r), p))) continue;  // r_l = 0 already
                best = best ? max(*best, v) : v;
            }
        }
        return static_cast<u64>(certified_floor(*best));
    });
    g.rlZero = g.rl + 1;

    // r r_2 <= twoAdic. The l-part slack uses the largest x_l left for l.
    const Rat hTotal = cfg.h("general.total.s0=4");
    const u64 mLimit = floor_div_log(hTotal, 2, pol);
    std::map<u64, u64> mMax;
    for (u64 l : table_primes(cfg, tables::GeneralTwoAdic)) {
        u64 slack = 1;
        for (const auto& [key, c] : g.xlTable)
            if (key.second == l) slack = std::max(slack, *c.rbegin());
        mMax[l] = with_precision(pol, [&](unsigned p) {
            Iv num = riv(agg_hi(cfg, tables::GeneralTwoAdic, l), p) + riv(4, p) * logv(slack, p);
            return static_cast<u64>(certified_floor(num / logv(2, p))) + 4;
        });
    }
    auto feasible = [&](u64 d, u64 m) {
        std::set<u64> ex = primes_at_least(d, 17);
        if (m > 4)
            for (u64 p : primes_at_least(m - 4, 17)) ex.insert(p);
        u64 l = kth_prime_avoiding(17, ex, 2);  // s and t may each rule out one more prime
        auto it = mMax.find(l);
        return it == mMax.end() || m <= it->second;
    };
    for (u64 r = 4; r <= mLimit; ++r) {
        std::vector<u64> ds;
        for (u64 d : divisors_u64(r))
            if (d >= 4) ds.push_back(d);
        for (u64 m = r; m <= mLimit; m += r) {
            if (!std::all_of(ds.begin(), ds.end(), [&](u64 d) { return feasible(d, m); })) continue;
            g.twoAdic = std::max(g.twoAdic, m);
            g.twoAdicR = std::max(g.twoAdicR, r);
        }
    }

    // x_1 = 1 once a2(p)/(r-4) < log 3, p the smallest prime >= 11 not dividing r
    u64 lastFail = 0;
    for (u64 r = 5; r <= g.rMax; ++r) {
        u64 p0 = 11;
        while (r % p0 == 0) p0 = next_prime(p0);
        bool ok = cfg.vols.hasAggregate(tables::GeneralOdd, p0) && with_precision(pol, [&](unsigned p) {
                      return decide_less(riv(agg_hi(cfg, tables::GeneralOdd, p0), p),
                                         riv(rat_u(r - 4), p) * logv(3, p));
                  });
        if (!ok) lastFail = r;
    }
    g.x1Collapse = std::max(lastFail + 1, g.rlZero);
    return g;
}

// ---- (3,r,s)

ThreeRSConstants threers_constants(const StructureConfig& cfg, const PrecisionPolicy& pol) {
    ThreeRSConstants c;
    const auto odd = table_primes(cfg, tables::ThreeRSOdd);
    const auto two = table_primes(cfg, tables::ThreeRSTwoAdic);
    // l, one prime of r and one of s may be excluded, so q is among the first four.
    const std::size_t window = 4;
    if (odd.size() < window || two.size() < window)
        throw ConfigError("the (3,r,s) tables need at least four primes");

    c.rl = with_precision(pol, [&](unsigned p) {
        std::optional<Iv> best;
        for (std::size_t i = 0; i < window; ++i) {
            u64 q = odd[i];
            Iv v = (riv(agg_hi(cfg, tables::ThreeRSOdd, q), p) / logv(q, p) + riv(kThreeRSA1Cap, p)) / riv(3, p);
            best = best ? max(*best, v) : v;
        }
        return static_cast<u64>(certified_floor(*best));
    });
    c.twoAdic = with_precision(pol, [&](unsigned p) {
        std::optional<Iv> best;
        for (std::size_t i = 0; i < window; ++i) {
            Iv v = riv(agg_hi(cfg, tables::ThreeRSTwoAdic, two[i]), p) / logv(2, p) / riv(3, p);
            best = best ? max(*best, v) : v;
        }
        return static_cast<u64>(certified_floor(*best));
    });

    // r r_3 = m with (3m - 3 - 7.6) log 3 < a2(l)
    const u64 mLimit = floor_div_log(cfg.h("threers.odd"), 3, pol);
    std::map<std::pair<u64, u64>, bool> memo;
    auto bounded = [&](u64 l, u64 m) {
        auto key = std::make_pair(l, m);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;
        bool ok = !with_precision(pol, [&](unsigned p) {
            Iv lhs = riv(Rat(3 * static_cast<long>(m) - 3) - kThreeRSA1Cap, p) * logv(3, p);
            return !decide_less(lhs, riv(agg_hi(cfg, tables::ThreeRSOdd, l), p));
        });
        return memo[key] = ok;
    };
    auto feasible = [&](u64 d, u64 m) {
        std::set<u64> ex = primes_at_least(d, 17);
        for (u64 p : primes_at_least(3 * m - 3, 17)) ex.insert(p);
        u64 l = kth_prime_avoiding(17, ex, 1);  // s may rule out one more prime
        if (!cfg.vols.hasAggregate(tables::ThreeRSOdd, l)) return true;
        return bounded(l, m);
    };
    for (u64 r = 7; r <= mLimit; ++r) {
        if (r % 3 == 0) continue;
        std::vector<u64> ds;
        for (u64 d : divisors_u64(r))
            if (d >= 7 && d % 3) ds.push_back(d);
        for (u64 m = r; m <= mLimit; m += r) {
            if (!std::all_of(ds.begin(), ds.end(), [&](u64 d) { return feasible(d, m); })) continue;
            c.threeAdic = std::max(c.threeAdic, m);
            c.threeAdicR = std::max(c.threeAdicR, r);
        }
    }

    // x_1 = 1 once a2/(3r - 7.6) < log 4 for the worst of the first three table primes
    Rat a2 = 0;
    for (std::size_t i = 0; i < 3; ++i) a2 = std::max<Rat>(a2, agg_hi(cfg, tables::ThreeRSOdd, odd[i]));
    u64 r1 = 7;
    while (!with_precision(pol, [&](unsigned p) {
        return decide_less(riv(a2, p), (riv(rat_u(3 * r1), p) - riv(kThreeRSA1Cap, p)) * logv(4, p));
    }))
        ++r1;
    c.collapse = std::max({c.threeAdicR + 1, c.rl + 1, r1});
    return c;
}

// ---- (2,3,t)

bool twothree_admissible(u64 t, const TwoThreeCaps& caps) {
    for (u64 d : caps.solvedDivisors)
        if (t % d == 0) return false;
    auto sc = caps.smoothCap(t);
    if (!sc) return true;
    auto pc = caps.primeCap(t);
    for (u64 z = caps.z6Floor; z < *sc; ++z) {
        if (z % 2 == 0 || z % 3 == 0) continue;
        auto ps = prime_divisors_u64(z);
        if (ps.size() == 1 && caps.excludedPowerBases.count(ps[0])) continue;
        if (pc && ps.back() > *pc) continue;
        return true;
    }
    return false;
}

TwoThreeConstants twothree_constants(const StructureConfig& cfg) {
    TwoThreeConstants c;
    for (u64 t = cfg.twothree.tMin; t <= cfg.twothree.tMax; ++t)
        if (twothree_admissible(t, cfg.twothree)) c.admissibleT.insert(t);
    return c;
}

// ---- profiles

namespace {

void need(bool ok, const std::string& what) {
    if (!ok) throw DomainError("structure profile precondition failed: " + what);
}

const char* var_name(std::size_t i) { return i == 0 ? "x" : i == 1 ? "y" : "z"; }

StructureProfile general_profile(const std::vector<u64>& exps, u64 l, const StructureConfig& cfg,
                                 const PrecisionPolicy& pol) {
    need(!exps.empty() && exps.size() <= 3, "one to three exponents");
    need(l >= 11 && is_prime_u64(l), "l is a prime >= 11");
    for (u64 e : exps) {
        need(e >= 4, "exponents >= 4");
        need(e % l != 0, "l does not divide " + std::to_string(e));
    }
    StructureProfile sp;
    sp.family = StructureFamily::General;
    sp.exps = exps;
    sp.l = l;
    const GeneralConstants g = general_constants(cfg, pol);
    const Rat a1 = structure_a1(3, 1, l);
    for (std::size_t i = 0; i < exps.size(); ++i) {
        const u64 e = exps[i];
        VariableProfile v;
        v.name = var_name(i);
        v.exponent = e;
        if (e > g.twoAdicR) {
            v.empty = true;
            v.emptyReason = "r_2 = 0 and x_1 = 1 force the value 1, excluded by the Catalan floor";
        }
        v.e2Cap = g.twoAdic / e;
        v.eLCap = g.rl / e;
        v.lParts = e >= g.rlZero ? std::set<u64>{1} : general_xl_candidates(e, l, cfg, pol);
        if (e >= g.x1Collapse) {
            v.smoothForcedOne = true;
        } else if (cfg.vols.hasAggregate(tables::GeneralOdd, l) && Rat(static_cast<unsigned long>(e)) > a1) {
            v.smoothLogBound = agg_hi(cfg, tables::GeneralOdd, l) / (rat_u(e) - a1);
        } else {
            v.notes.push_back("no single-variable bound on the smooth part for this (r, l)");
        }
        sp.vars.push_back(std::move(v));
    }
    if (exps.size() >= 2 && cfg.vols.hasAggregate(tables::GeneralJoint, l)) {
        const auto& enc = cfg.vols.aggregate(tables::GeneralJoint, l);
        const Rat a2 = enc.hi;
        std::vector<Rat> pr;
        for (u64 e : exps) pr.push_back(rat_u(e) - a1);
        JointBound lin;
        lin.kind = JointBound::Kind::Linear;
        lin.rhs = a2;
        lin.source = "joint smooth-part inequality";
        for (std::size_t i = 0; i < exps.size(); ++i) lin.terms.push_back({{var_name(i)}, pr[i]});
        sp.joints.push_back(lin);
        if (exps.size() == 2) {
            JointBound mn;
            mn.kind = JointBound::Kind::MinOf;
            mn.terms = {{{"x"}, 1}, {{"y"}, 1}};
            mn.rhs = a2 / (pr[0] + pr[1]);
            mn.source = "min{log x1, log y1} from the pair inequality";
            sp.joints.push_back(mn);
        } else {
            std::vector<std::size_t> idx{0, 1, 2};
            std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return exps[a] < exps[b]; });
            if (pr[idx[2]] <= pr[idx[0]] + pr[idx[1]]) {
                JointBound mn;
                mn.kind = JointBound::Kind::MinOf;
                mn.terms = {{{"x", "y"}, 1}, {{"x", "z"}, 1}, {{"y", "z"}, 1}};
                mn.rhs = 2 * a2 / (pr[0] + pr[1] + pr[2]);
                mn.source = "min over pairs of log(u1 v1), largest exponent at most the sum of the others";
                sp.joints.push_back(mn);
            } else {
                sp.notes.push_back("largest t' exceeds r' + s': use the (r'+s') min form with t' log z1");
            }
        }
    }
    if (exps.size() >= 2) sp.notes.push_back("at most one l-part among the variables differs from 1");
    return sp;
}

StructureProfile threers_profile(const std::vector<u64>& exps, u64 l, const StructureConfig& cfg,
                                 const PrecisionPolicy& pol) {
    need(exps.size() == 2, "exponents (r, s)");
    u64 r = exps[0], s = exps[1];
    need(r >= 7 && s >= 8, "r >= 7 and s >= 8");
    need(r % 3 && s % 3, "3 does not divide rs");
    need(l >= 17 && is_prime_u64(l), "l is a prime >= 17");
    need(r % l && s % l, "l does not divide rs");
    const ThreeRSConstants c = threers_constants(cfg, pol);
    StructureProfile sp;
    sp.family = StructureFamily::ThreeRS;
    sp.exps = exps;
    sp.l = l;
    const bool haveA2 = cfg.vols.hasAggregate(tables::ThreeRSOdd, l);
    const Rat a2 = haveA2 ? agg_hi(cfg, tables::ThreeRSOdd, l) : Rat(0);
    for (std::size_t i = 0; i < 2; ++i) {
        const u64 e = exps[i];
        VariableProfile v;
        v.name = var_name(i);
        v.exponent = e;
        v.split3 = true;
        v.lParts = {1};
        v.eLCap = c.rl / e;
        v.e3Cap = e > c.threeAdicR ? 0 : c.threeAdic / e;
        v.e2Cap = c.twoAdic / e;
        if (e > c.twoAdic) {
            v.empty = true;
            v.emptyReason = "r_2 = 0 and x = 1, excluded by the Catalan floor";
        }
        if (e >= c.collapse) {
            v.smoothForcedOne = true;
        } else if (haveA2) {
            // (3r - 7.6) for x, (20s/7 - 7.6) for y
            Rat coef = i == 0 ? Rat(3 * static_cast<long>(e)) - kThreeRSA1Cap : Rat(20 * static_cast<long>(e), 7) - kThreeRSA1Cap;
            coef.canonicalize();
            v.smoothLogBound = a2 / coef;
        } else {
            v.notes.push_back("no a2 value for this l");
        }
        sp.vars.push_back(std::move(v));
    }
    if (haveA2) {
        const Rat a1 = structure_a1(6, 4, l);
        const Rat R = rat_u(r), S = rat_u(s);
        JointBound j1{JointBound::Kind::Linear, {{{"x"}, 3 * R - a1}, {{"y"}, S - a1}}, a2, true, "joint inequality, x weighted 3r"};
        JointBound j2{JointBound::Kind::Linear, {{{"x"}, R - a1}, {{"y"}, 3 * S - a1}}, a2, true, "joint inequality, y weighted 3s"};
        sp.joints.push_back(j1);
        sp.joints.push_back(j2);
        u64 lo = std::min(r, s), hi = std::max(r, s);
        if (3 * lo >= hi) {
            Rat coef = 4 * R * S / (R + S) - a1;
            coef.canonicalize();
            JointBound j3{JointBound::Kind::Linear, {{{"x"}, coef}, {{"y"}, coef}}, a2, true, "log(x1 y1) from the averaged inequalities"};
            sp.joints.push_back(j3);
        }
    }
    return sp;
}

StructureProfile twothree_profile(const std::vector<u64>& exps, u64 l, const StructureConfig& cfg) {
    need(exps.size() == 1, "exponent t");
    u64 t = exps[0];
    need(t >= 7, "t >= 7");
    need(l >= 11 && l != 13 && is_prime_u64(l), "l is a prime >= 11, l != 13");
    need(t % l != 0, "l does not divide t");
    StructureProfile sp;
    sp.family = StructureFamily::TwoThree;
    sp.exps = exps;
    sp.l = l;
    sp.admissible = t < cfg.twothree.tMin || twothree_admissible(t, cfg.twothree);
    if (t > cfg.twothree.tMax) sp.admissible = false;
    VariableProfile v;
    v.name = "z";
    v.exponent = t;
    v.split3 = true;
    if (!sp.admissible) {
        v.empty = true;
        v.emptyReason = "t excluded by the published caps";
    }
    if (t >= 60) {
        v.lParts = {1};
        v.eLCap = 0;
    } else {
        v.lPartsBounded = false;
        v.notes.push_back("z_l = 1 needs t >= 60");
    }
    if (auto pc = cfg.twothree.primeCap(t)) v.maxPrime = pc;
    if (auto sc = cfg.twothree.smoothCap(t)) v.smoothMax = Int(static_cast<unsigned long>(*sc - 1));
    if (cfg.vols.hasAggregate(tables::TwoThreeOdd, l)) {
        Rat a1 = structure_a1(6, 2, l);
        if (rat_u(t) > a1) v.smoothLogBound = agg_hi(cfg, tables::TwoThreeOdd, l) / (rat_u(t) - a1);
    } else {
        v.notes.push_back("no a2 table for the (2,3,t) smooth part; only the published caps apply");
    }
    sp.vars.push_back(std::move(v));
    return sp;
}

}  // namespace

StructureProfile structure_profile(StructureFamily f, const std::vector<u64>& exps, u64 l, const StructureConfig& cfg,
                                   const PrecisionPolicy& pol) {
    switch (f) {
        case StructureFamily::General: return general_profile(exps, l, cfg, pol);
        case StructureFamily::ThreeRS: return threers_profile(exps, l, cfg, pol);
        case StructureFamily::TwoThree: return twothree_profile(exps, l, cfg);
    }
    throw DomainError("unknown structure family");
}

// ---- json

namespace {
template <class T>
nlohmann::json opt(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
}  // namespace

nlohmann::json to_json(const VariableProfile& v) {
    nlohmann::json j = {{"name", v.name},
                        {"exponent", v.exponent},
                        {"empty", v.empty},
                        {"e2Cap", opt(v.e2Cap)},
                        {"eLCap", opt(v.eLCap)},
                        {"lParts", v.lPartsBounded ? nlohmann::json(v.lParts) : nlohmann::json(nullptr)},
                        {"smoothForcedOne", v.smoothForcedOne},
                        {"smoothLogBound", v.smoothLogBound ? nlohmann::json(rat_to_string(*v.smoothLogBound)) : nlohmann::json(nullptr)},
                        {"finite", v.finite()}};
    if (v.split3) j["e3Cap"] = opt(v.e3Cap);
    if (v.smoothMax) j["smoothMax"] = v.smoothMax->get_str();
    if (v.maxPrime) j["maxPrime"] = *v.maxPrime;
    if (v.empty) j["emptyReason"] = v.emptyReason;
    if (!v.notes.empty()) j["notes"] = v.notes;
    return j;
}

nlohmann::json to_json(const JointBound& b) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& [vars, coef] : b.terms) terms.push_back({{"vars", vars}, {"coef", rat_to_string(coef)}});
    return {{"kind", b.kind == JointBound::Kind::Linear ? "linear" : "min"},
            {"terms", terms},
            {"rhs", rat_to_string(b.rhs)},
            {"strict", b.strict},
            {"source", b.source}};
}

nlohmann::json to_json(const StructureProfile& p) {
    nlohmann::json vars = nlohmann::json::array(), joints = nlohmann::json::array();
    for (const auto& v : p.vars) vars.push_back(to_json(v));
    for (const auto& b : p.joints) joints.push_back(to_json(b));
    nlohmann::json j = {{"family", to_string(p.family)}, {"exponents", p.exps}, {"l", p.l},
                        {"admissible", p.admissible}, {"variables", vars}, {"joint", joints}};
    if (!p.notes.empty()) j["notes"] = p.notes;
    return j;
}

nlohmann::json to_json(const GeneralConstants& c) {
    nlohmann::json xl = nlohmann::json::array();
    for (const auto& [k, v] : c.xlTable) xl.push_back({{"r", k.first}, {"l", k.second}, {"xl", v}});
    return {{"xlTable", xl},     {"rMax", c.rMax},         {"rl", c.rl},
            {"rlZero", c.rlZero}, {"twoAdic", c.twoAdic},   {"twoAdicR", c.twoAdicR},
            {"x1Collapse", c.x1Collapse}};
}

nlohmann::json to_json(const ThreeRSConstants& c) {
    return {{"rl", c.rl},
            {"threeAdic", c.threeAdic},
            {"threeAdicR", c.threeAdicR},
            {"twoAdic", c.twoAdic},
            {"collapse", c.collapse}};
}

}  // namespace gfe
