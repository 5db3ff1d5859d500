#include "gfe/catalog.hpp"

#include <algorithm>
#include <fstream>

#include "gfe/errors.hpp"
#include "gfe/hash.hpp"

namespace gfe {

using u64 = std::uint64_t;

std::array<u64, 3> Signature::canonical() const {
    std::array<u64, 3> c{r, s, t};
    std::sort(c.begin(), c.end());
    return c;
}

std::string Signature::str() const {
    return "(" + std::to_string(r) + "," + std::to_string(s) + "," + std::to_string(t) + ")";
}

std::string to_string(Chi c) {
    switch (c) {
        case Chi::Spherical: return "Spherical";
        case Chi::Euclidean: return "Euclidean";
        case Chi::Hyperbolic: return "Hyperbolic";
    }
    return "?";
}

Chi classify_chi(const Signature& sig) {
    if (sig.r < 2 || sig.s < 2 || sig.t < 2) throw DomainError("signature exponents must be >= 2");
    Rat chi = Rat(1, sig.r) + Rat(1, sig.s) + Rat(1, sig.t) - 1;
    chi.canonicalize();
    if (chi > 0) return Chi::Spherical;
    if (chi == 0) return Chi::Euclidean;
    return Chi::Hyperbolic;
}

// ---- known solutions

bool KnownSolution::verify() const {
    if (!catalanFamily) return rec.verify();
    for (u64 n = 2; n <= 64; ++n) {
        SolutionRecord r = rec;
        r.r = n;
        if (!r.verify()) return false;
    }
    return true;
}

std::string KnownSolution::str() const {
    if (catalanFamily) return "1^n + 2^3 = 3^2";
    return rec.str();
}

bool KnownSolution::matches(const Signature& sig) const {
    if (!catalanFamily) return sig == Signature{rec.r, rec.s, rec.t};
    auto c = sig.canonical();
    // (n, 3, 2) for any n >= 2
    return c[0] == 2 && (c[1] == 3 || c[2] == 3);
}

const std::vector<KnownSolution>& known_solutions() {
    static const std::vector<KnownSolution> list = [] {
        auto mk = [](const char* x, u64 r, const char* y, u64 s, const char* z, u64 t) {
            SolutionRecord rec{Int(x), Int(y), Int(z), r, s, t, 1, 1};
            rec.verified = rec.verify();
            return KnownSolution{rec, false};
        };
        std::vector<KnownSolution> v;
        SolutionRecord cat{Int(1), Int(2), Int(3), 0, 3, 2, 1, 1};
        v.push_back({cat, true});
        v.push_back(mk("2", 5, "7", 2, "3", 4));
        v.push_back(mk("7", 3, "13", 2, "2", 9));
        v.push_back(mk("2", 7, "17", 3, "71", 2));
        v.push_back(mk("3", 5, "11", 4, "122", 2));
        v.push_back(mk("17", 7, "76271", 3, "21063928", 2));
        v.push_back(mk("1414", 3, "2213459", 2, "65", 7));
        v.push_back(mk("9262", 3, "15312283", 2, "113", 7));
        v.push_back(mk("43", 8, "96222", 3, "30042907", 2));
        v.push_back(mk("33", 8, "1549034", 2, "15613", 3));
        v[0].rec.verified = v[0].verify();
        return v;
    }();
    return list;
}

// ---- patterns

namespace {

bool is_const(const std::string& slot) { return !slot.empty() && std::isdigit(static_cast<unsigned char>(slot[0])); }

bool var_ok(const SigPattern::Var& v, u64 x) {
    if (x < v.min) return false;
    if (v.max && x > *v.max) return false;
    if (!v.only.empty() && !v.only.count(x)) return false;
    if (v.prime && !is_prime_u64(x)) return false;
    return true;
}

}  // namespace

std::vector<std::map<std::string, u64>> SigPattern::assignments(const Signature& sig) const {
    std::vector<std::map<std::string, u64>> out;
    auto c = sig.canonical();
    std::array<int, 3> perm{0, 1, 2};
    do {
        std::map<std::string, u64> a;
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i) {
            const u64 x = c[perm[i]];
            const auto& slot = slots[i];
            if (is_const(slot)) {
                ok = std::stoull(slot) == x;
                continue;
            }
            auto it = a.find(slot);
            if (it != a.end()) ok = it->second == x;
            else if (!var_ok(vars.at(slot), x)) ok = false;
            else a[slot] = x;
        }
        for (const auto& [p, q] : less)
            if (ok && !(a.at(p) < a.at(q))) ok = false;
        if (ok && std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

SigPattern SigPattern::fromJson(const nlohmann::json& j) {
    SigPattern p;
    try {
        auto slots = j.at("slots");
        if (slots.size() != 3) throw ConfigError("pattern needs three slots");
        for (int i = 0; i < 3; ++i) p.slots[i] = slots[i].get<std::string>();
        const auto vars = j.value("vars", nlohmann::json::object());
        for (const auto& slot : p.slots) {
            if (is_const(slot) || p.vars.count(slot)) continue;
            Var v;
            if (vars.contains(slot)) {
                const auto& d = vars.at(slot);
                v.min = d.value("min", static_cast<u64>(2));
                if (d.contains("max")) v.max = d.at("max").get<u64>();
                if (d.contains("in"))
                    for (u64 x : d.at("in").get<std::vector<u64>>()) v.only.insert(x);
                if (d.contains("ranges"))
                    for (const auto& rg : d.at("ranges"))
                        for (u64 x = rg.at(0).get<u64>(); x <= rg.at(1).get<u64>(); ++x) v.only.insert(x);
                v.prime = d.value("prime", false);
            }
            p.vars[slot] = v;
        }
        for (const auto& pr : j.value("less", nlohmann::json::array()))
            p.less.emplace_back(pr.at(0).get<std::string>(), pr.at(1).get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad signature pattern: ") + e.what());
    }
    return p;
}

bool SigPattern::finite() const {
    for (const auto& [name, v] : vars)
        if (!v.max && v.only.empty()) return false;
    return true;
}

std::vector<Signature> SigPattern::members() const {
    if (!finite()) throw DomainError("pattern has infinitely many members");
    std::vector<std::string> names;
    std::vector<std::vector<u64>> values;
    for (const auto& [name, v] : vars) {
        names.push_back(name);
        std::vector<u64> xs;
        if (!v.only.empty()) {
            for (u64 x : v.only)
                if (var_ok(v, x)) xs.push_back(x);
        } else {
            for (u64 x = v.min; x <= *v.max; ++x)
                if (var_ok(v, x)) xs.push_back(x);
        }
        values.push_back(std::move(xs));
    }
    std::set<std::array<u64, 3>> seen;
    std::vector<std::size_t> idx(names.size(), 0);
    for (const auto& xs : values)
        if (xs.empty()) return {};
    for (;;) {
        std::map<std::string, u64> a;
        for (std::size_t i = 0; i < names.size(); ++i) a[names[i]] = values[i][idx[i]];
        bool ok = true;
        for (const auto& [p, q] : less) ok = ok && a.at(p) < a.at(q);
        if (ok) {
            std::array<u64, 3> c;
            for (int i = 0; i < 3; ++i) c[i] = is_const(slots[i]) ? std::stoull(slots[i]) : a.at(slots[i]);
            std::sort(c.begin(), c.end());
            seen.insert(c);
        }
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == values[k].size()) idx[k++] = 0;
        if (k == idx.size()) break;
    }
    std::vector<Signature> out;
    for (const auto& c : seen) out.push_back({c[0], c[1], c[2]});
    return out;
}

// ---- registry

std::string to_string(SigState s) {
    switch (s) {
        case SigState::Solved: return "Solved";
        case SigState::Remaining: return "Remaining";
        case SigState::OutOfScope: return "OutOfScope";
    }
    return "?";
}

CountMode parse_count_mode(const std::string& s) {
    if (s == "ge4") return CountMode::GE4;
    if (s == "beal") return CountMode::Beal;
    throw ConfigError("unknown count mode: " + s + " (ge4, beal)");
}

Registry Registry::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open registry " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("registry " + path + " is not valid JSON: " + e.what());
    }
    return fromJson(j);
}

Registry Registry::fromJson(const nlohmann::json& j) {
    Registry r;
    try {
        r.version_ = j.at("schemaVersion").get<int>();
        if (r.version_ != 1) throw ConfigError("unsupported registry schemaVersion " + std::to_string(r.version_));
        r.closure_ = j.value("divisorClosure", true);
        for (const auto& e : j.at("rules"))
            r.rules_.push_back({e.at("id").get<std::string>(), SigPattern::fromJson(e), e.at("citation").get<std::string>(),
                                e.value("propagates", true)});
        for (const auto& e : j.value("exclusions", nlohmann::json::array())) {
            ExclusionRule x;
            x.id = e.at("id").get<std::string>();
            x.family = SigPattern::fromJson(e);
            x.var = e.value("var", std::string("n"));
            for (u64 m : e.at("moduli").get<std::vector<u64>>()) x.moduli.insert(m);
            x.citation = e.at("citation").get<std::string>();
            r.exclusions_.push_back(std::move(x));
        }
        for (const auto& e : j.at("clauses")) {
            OpenClause c;
            c.id = e.at("id").get<std::string>();
            c.label = e.at("label").get<std::string>();
            c.pattern = SigPattern::fromJson(e);
            c.note = e.value("note", std::string());
            if (e.contains("alternative"))
                c.alternative = {e["alternative"].at("var").get<std::string>(), e["alternative"].at("max").get<u64>()};
            r.clauses_.push_back(std::move(c));
        }
        const auto expected = j.value("expectedCounts", nlohmann::json::object());
        for (const auto& [k, v] : expected.items()) r.expected_[k] = v.get<u64>();
        for (const auto& h : j.value("hypotheses", nlohmann::json::array())) {
            Hypothesis hy{h.at("id").get<std::string>(), h.value("description", std::string()), {}};
            for (const auto& s : h.at("withhold")) {
                Signature sig{s.at(0).get<u64>(), s.at(1).get<u64>(), s.at(2).get<u64>()};
                hy.withhold.insert(sig.canonical());
            }
            r.hypotheses_.push_back(std::move(hy));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad registry: ") + e.what());
    }
    return r;
}

const RegistryRule* Registry::direct(const Signature& sig) const {
    for (const auto& r : rules_)
        if (r.pattern.matches(sig)) return &r;
    return nullptr;
}

SignatureStatus Registry::status(const Signature& sig, bool exclusions) const { return status_with(sig, exclusions, {}); }

SignatureStatus Registry::status_with(const Signature& sig, bool exclusions, const std::set<Canon>& withheld) const {
    SignatureStatus st;
    for (const auto& k : known_solutions())
        if (k.matches(sig)) st.knownSolutions.push_back(k.str());

    if (classify_chi(sig) == Chi::Spherical) {
        st.state = SigState::OutOfScope;
        st.provenance = "spherical signature (1/r + 1/s + 1/t > 1)";
        return st;
    }
    if (const auto* r = direct(sig)) {
        st.provenance = r->citation;
        return st;
    }
    // a solution of sig yields one of every signature dividing it
    auto closure = [&]() -> std::optional<std::string> {
        const auto c = sig.canonical();
        const auto dr = divisors_u64(c[0]), ds = divisors_u64(c[1]), dt = divisors_u64(c[2]);
        for (u64 a : dr)
            for (u64 b : ds)
                for (u64 d : dt) {
                    if (a < 2 || b < 2 || d < 2) continue;
                    Signature s{a, b, d};
                    if (s == sig || withheld.count(s.canonical())) continue;
                    const auto* r = direct(s);
                    if (r && r->propagates) return s.str() + " divides it: " + r->citation;
                }
        return std::nullopt;
    };
    if (exclusions) {
        for (const auto& x : exclusions_)
            for (const auto& a : x.family.assignments(sig)) {
                const u64 n = a.at(x.var);
                for (u64 m : x.moduli)
                    if (n % m == 0) {
                        st.provenance = x.citation;
                        if (auto w = closure()) st.provenance += "; " + *w;
                        return st;
                    }
            }
        if (closure_)
            if (auto w = closure()) {
                st.provenance = "divisor signature " + *w;
                return st;
            }
    }
    for (const auto& c : clauses_)
        if (c.pattern.matches(sig)) {
            st.state = SigState::Remaining;
            st.clause = c.id;
            st.provenance = "open family " + c.label;
            return st;
        }
    st.provenance = "hyperbolic or euclidean signature outside every open family";
    return st;
}

std::vector<Signature> Registry::remaining(CountMode mode, bool exclusions, const std::set<Canon>& withheld) const {
    const u64 floor = mode == CountMode::GE4 ? 4 : 3;
    std::set<Signature> cand;
    for (const auto& c : clauses_) {
        u64 minConst = ~0ULL;
        for (const auto& s : c.pattern.slots)
            if (is_const(s)) minConst = std::min<u64>(minConst, std::stoull(s));
        if (minConst < floor) continue;  // every member falls below the floor
        for (const auto& s : c.pattern.members()) {
            if (s.canonical()[0] >= floor) cand.insert(s);
        }
    }
    std::vector<Signature> out;
    for (const auto& s : cand)
        if (status_with(s, exclusions, withheld).state == SigState::Remaining) out.push_back(s);
    return out;
}

nlohmann::json CountLedger::toJson() const {
    nlohmann::json sigs = nlohmann::json::array();
    for (const auto& s : signatures) {
        auto c = s.canonical();
        sigs.push_back({c[0], c[1], c[2]});
    }
    nlohmann::json j = {{"mode", mode == CountMode::GE4 ? "ge4" : "beal"},
                        {"floor", floor},
                        {"exclusions", exclusions},
                        {"count", count()},
                        {"byClause", byClause},
                        {"expected", expected ? nlohmann::json(*expected) : nlohmann::json(nullptr)},
                        {"discrepancy", discrepancy},
                        {"notes", notes},
                        {"signatures", sigs}};
    if (!hash.empty()) j["hash"] = hash;
    return j;
}

CountLedger Registry::count_remaining(CountMode mode, bool exclusions) const {
    CountLedger L;
    L.mode = mode;
    L.floor = mode == CountMode::GE4 ? 4 : 3;
    L.exclusions = exclusions;
    L.signatures = remaining(mode, exclusions, {});
    for (const auto& s : L.signatures) ++L.byClause[status(s, exclusions).clause];
    L.notes = nlohmann::json::array();
    for (const auto& c : clauses_) {
        if (!c.alternative) continue;
        nlohmann::json beyond = nlohmann::json::array();
        for (const auto& s : L.signatures) {
            if (status(s, exclusions).clause != c.id) continue;
            for (const auto& a : c.pattern.assignments(s))
                if (a.at(c.alternative->first) > c.alternative->second) {
                    auto k = s.canonical();
                    beyond.push_back({k[0], k[1], k[2]});
                    break;
                }
        }
        L.notes.push_back({{"clause", c.id},
                           {"note", c.note},
                           {"alternativeMax", c.alternative->second},
                           {"countedOnlyUnderStatedBound", beyond},
                           {"countUnderAlternative", L.count() - beyond.size()}});
    }
    const std::string key = mode == CountMode::GE4 ? "ge4" : "beal";
    if (exclusions && expected_.count(key)) L.expected = expected_.at(key);
    if (L.expected && *L.expected != L.count()) {
        nlohmann::json hyps = nlohmann::json::array();
        std::set<Signature> base(L.signatures.begin(), L.signatures.end());
        for (const auto& h : hypotheses_) {
            auto alt = remaining(mode, exclusions, h.withhold);
            std::set<Signature> altSet(alt.begin(), alt.end());
            nlohmann::json added = nlohmann::json::array(), removed = nlohmann::json::array();
            for (const auto& s : altSet)
                if (!base.count(s)) {
                    auto k = s.canonical();
                    added.push_back({{"signature", {k[0], k[1], k[2]}}, {"shippedStatus", status(s).provenance},
                                     {"clause", status_with(s, exclusions, h.withhold).clause}});
                }
            for (const auto& s : base)
                if (!altSet.count(s)) {
                    auto k = s.canonical();
                    removed.push_back({{"signature", {k[0], k[1], k[2]}}, {"hypothesisStatus", status_with(s, exclusions, h.withhold).provenance}});
                }
            nlohmann::json withheld = nlohmann::json::array();
            for (const auto& w : h.withhold) withheld.push_back({w[0], w[1], w[2]});
            hyps.push_back({{"id", h.id},
                            {"description", h.description},
                            {"withhold", withheld},
                            {"count", alt.size()},
                            {"matchesExpected", alt.size() == *L.expected},
                            {"remainingOnlyUnderHypothesis", added},
                            {"solvedOnlyUnderHypothesis", removed}});
        }
        L.discrepancy = {{"expected", *L.expected},
                         {"computed", L.count()},
                         {"delta", static_cast<long long>(L.count()) - static_cast<long long>(*L.expected)},
                         {"ruleSet", "registry rules, exclusion records and full divisor closure"},
                         {"hypotheses", hyps}};
    }
    L.hash = sha256_hex(L.toJson().dump());
    return L;
}

}  // namespace gfe
