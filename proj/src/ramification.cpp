#include "gfe/ramification.hpp"

#include <sstream>

#include "gfe/errors.hpp"

namespace gfe {

namespace {

using u64 = std::uint64_t;

IndexSet divisors_of(u64 n) {
    auto d = divisors_u64(n);
    return IndexSet(d.begin(), d.end());
}

IndexSet even_divisors_of(u64 n) {
    IndexSet s;
    for (u64 d : divisors_u64(n))
        if (d % 2 == 0) s.insert(d);
    return s;
}

IndexSet scaled(u64 k, const IndexSet& s) {
    IndexSet r;
    for (u64 e : s) r.insert(k * e);
    return r;
}

IndexSet l_good(u64 l) { return {l - 1, l * (l - 1), l * l - 1}; }

void require_prime(u64 v, u64 min, const char* what) {
    if (v < min || !is_prime_u64(v))
        throw DomainError(std::string(what) + " must be a prime >= " + std::to_string(min) + ", got " +
                          std::to_string(v));
}

[[noreturn]] void no_dataset(FreyFamily f, int kind, const std::string& why = "") {
    throw DomainError("no such dataset in catalog: " + to_string(f) + " kind " + std::to_string(kind) +
                      (why.empty() ? "" : " (" + why + ")"));
}

}  // namespace

std::string RamificationDataset::id() const {
    std::string s = to_string(family) + ":" + std::to_string(kind) + ":" + std::to_string(l);
    if (q) s += ":" + std::to_string(q);
    return s;
}

RamificationDataset dataset(FreyFamily f, int kind, u64 l, std::optional<u64> q) {
    RamificationDataset d;
    d.family = f;
    d.kind = kind;
    d.l = d.l0 = l;
    bool wantsQ = f == FreyFamily::TwoThree && kind == 2;
    if (q && !wantsQ) no_dataset(f, kind, "q is only taken by the twothree kind-2 dataset");
    if (!q && wantsQ) no_dataset(f, kind, "q is required");
    require_prime(l, 11, "l");

    switch (f) {
        case FreyFamily::GeneralABC: {
            if (kind == 1 || kind == 2) {
                d.e0 = 3;
                d.S0 = {2, 3, l};
                d.genMult = {1, 3, l, 3 * l};
                d.perPrime[2] = {{2}, {2, 6, 2 * l, 6 * l}};
                d.perPrime[3] = {{2, 6, 8}, {2, 6, 2 * l, 6 * l}};
                d.perPrime[l] = {kind == 1 ? l_good(l) : IndexSet{},
                                 {l - 1, 3 * (l - 1), l * (l - 1), 3 * l * (l - 1)}};
            } else if (kind == 3 || kind == 4) {
                d.e0 = 1;
                d.S0 = {2, l};
                d.genMult = {1, l};
                d.perPrime[2] = {{2}, {2, 2 * l}};
                d.perPrime[l] = {kind == 3 ? l_good(l) : IndexSet{}, {l - 1, l * (l - 1)}};
            } else {
                no_dataset(f, kind);
            }
            break;
        }
        case FreyFamily::TwoThree: {
            if (l == 13) no_dataset(f, kind, "l = 13 is excluded");
            if (kind == 1) {
                d.e0 = 12;
                d.S0 = {2, 3, l};
                d.genMult = divisors_of(12 * l);
                d.perPrime[2] = {even_divisors_of(256 * 9), even_divisors_of(24 * l)};
                d.perPrime[3] = {even_divisors_of(64 * 9), even_divisors_of(48 * l)};
                d.perPrime[l] = {l_good(l), scaled(l - 1, divisors_of(12 * l))};
            } else if (kind == 2) {
                u64 qq = *q;
                require_prime(qq, 5, "q");
                if (qq == l) no_dataset(f, kind, "q = l");
                if ((qq * (qq * qq - 1)) % l == 0) no_dataset(f, kind, "l divides q(q^2-1)");
                d.q = qq;
                d.e0 = 2;
                d.S0 = {2, 3, qq, l};
                d.genMult = {1, 2, l, 2 * l};
                d.perPrime[2] = {even_divisors_of(32 * 9), even_divisors_of(8 * qq * l)};
                d.perPrime[3] = {{1}, even_divisors_of(2 * qq * l)};
                d.perPrime[qq] = {l_good(qq), scaled(qq - 1, divisors_of(2 * l))};
                d.perPrime[l] = {l_good(l), scaled(l - 1, divisors_of(2 * l))};
            } else {
                no_dataset(f, kind);
            }
            break;
        }
        case FreyFamily::ThreeRS: {
            if (l == 13) no_dataset(f, kind, "l = 13 is excluded");
            if (kind == 1) {
                d.e0 = 12;
                d.S0 = {2, 3, l};
                d.genMult = divisors_of(12 * l);
                d.perPrime[2] = {even_divisors_of(256 * 9), even_divisors_of(24 * l)};
                d.perPrime[3] = {even_divisors_of(64 * 9), even_divisors_of(48 * l)};
                d.perPrime[l] = {l_good(l), scaled(l - 1, divisors_of(12 * l))};
            } else if (kind == 2 || kind == 3) {
                d.e0 = 4;
                d.S0 = {2, 3, l};
                d.genMult = divisors_of(4 * l);
                d.perPrime[2] = {even_divisors_of(96), even_divisors_of(8 * l)};
                d.perPrime[3] = {even_divisors_of(12), even_divisors_of(8 * l)};
                d.perPrime[l] = {kind == 2 ? l_good(l) : IndexSet{}, scaled(l - 1, divisors_of(4 * l))};
            } else {
                no_dataset(f, kind);
            }
            break;
        }
        case FreyFamily::TwoRS:
            no_dataset(f, kind, "no dataset is listed for this family");
    }
    return d;
}

std::string to_string(TorsionField f) {
    switch (f) {
        case TorsionField::QE12: return "Q(E[12])";
        case TorsionField::QiE3: return "Q(i,E[3])";
        case TorsionField::Qi: return "Q(i)";
        case TorsionField::QiE2q: return "Q(i,E[2q])";
        case TorsionField::QE4: return "Q(E[4])";
        case TorsionField::QiE6: return "Q(i,E[6])";
    }
    return "?";
}

TorsionField parse_field(const std::string& s) {
    for (auto f : {TorsionField::QE12, TorsionField::QiE3, TorsionField::Qi, TorsionField::QiE2q, TorsionField::QE4,
                   TorsionField::QiE6})
        if (s == to_string(f)) return f;
    if (s == "QE12") return TorsionField::QE12;
    if (s == "QiE3") return TorsionField::QiE3;
    if (s == "Qi") return TorsionField::Qi;
    if (s == "QiE2q") return TorsionField::QiE2q;
    if (s == "QE4") return TorsionField::QE4;
    if (s == "QiE6") return TorsionField::QiE6;
    throw ConfigError("unknown torsion field '" + s + "' (QE12, QiE3, Qi, QiE2q, QE4, QiE6)");
}

TorsionField default_field(FreyFamily f, bool haveQ) {
    switch (f) {
        case FreyFamily::GeneralABC: return TorsionField::QiE3;
        case FreyFamily::TwoThree: return haveQ ? TorsionField::QiE2q : TorsionField::QE12;
        case FreyFamily::ThreeRS: return TorsionField::QE4;
        case FreyFamily::TwoRS: return TorsionField::QiE6;
    }
    return TorsionField::QE12;
}

RamIndexBound ram_index_bound(FreyFamily f, TorsionField field, u64 p, LocalReduction red, u64 l,
                              std::optional<u64> q) {
    require_prime(p, 2, "p");
    require_prime(l, 5, "l");
    RamIndexBound b;
    b.p = p;
    bool good = red == LocalReduction::Good;
    std::ostringstream ctx;
    ctx << to_string(f) << ", F=" << to_string(field) << ", " << (good ? "good" : "multiplicative") << ", l=" << l;
    if (q) ctx << ", q=" << *q;
    b.context = ctx.str();

    auto exact = [&](IndexSet s) {
        b.exact = true;
        b.candidates = std::move(s);
        return b;
    };
    auto divides = [&](u64 D) {
        b.exact = false;
        b.divisor = D;
        return b;
    };
    auto uncovered = [&](const std::string& why) -> RamIndexBound {
        throw DomainError("ram_index_bound: combination not covered (" + b.context + "): " + why);
    };

    switch (field) {
        case TorsionField::QE12:
            // any elliptic curve over Q with the stated reduction at p
            if (good) {
                if (p == 2) return divides(256 * 9);
                if (p == 3) return divides(64 * 9);
                if (p == l) return exact(l_good(l));
                return exact({1});
            }
            if (p == 2) return divides(24 * l);
            if (p == 3) return divides(48 * l);
            if (p == l) return divides(12 * l * (l - 1));
            return divides(12 * l);
        case TorsionField::QiE3:
            if (f != FreyFamily::GeneralABC) return uncovered("field used for the general family only");
            if (good) {
                if (p == 2) return exact({2});
                if (p == 3) return exact({2, 6, 8});
                if (p == l) return exact(l_good(l));
                return exact({1});
            }
            if (p == 2 || p == 3) return divides(6 * l);
            if (p == l) return divides(3 * l * (l - 1));
            return divides(3 * l);
        case TorsionField::Qi:
            if (f != FreyFamily::GeneralABC) return uncovered("field used for the general family only");
            if (good) {
                if (p == 2) return exact({2});
                if (p == l) return exact(l_good(l));
                return exact({1});
            }
            if (p == 2) return divides(2 * l);
            if (p == l) return divides(l * (l - 1));
            return divides(l);
        case TorsionField::QiE2q: {
            if (f != FreyFamily::TwoThree) return uncovered("field used for the twothree family only");
            if (!q) return uncovered("q is required");
            u64 qq = *q;
            require_prime(qq, 5, "q");
            if (qq == l) return uncovered("q = l");
            if (good) {
                if (p == 2) return divides(32 * 9);
                if (p == qq) return exact(l_good(qq));
                if (p == l) return exact(l_good(l));
                return exact({1});
            }
            if (p == 2) return divides(8 * qq * l);
            if (p == qq) return divides(2 * qq * l * (qq - 1));
            if (p == l) return divides(2 * l * (l - 1));
            return divides(2 * qq * l);
        }
        case TorsionField::QE4:
            if (f != FreyFamily::ThreeRS) return uncovered("field used for the threers family only");
            if (good) {
                if (p == 2) return divides(96);
                if (p == 3) return divides(12);
                if (p == l) return exact(l_good(l));
                return exact({1});
            }
            if (p == 2 || p == 3) return divides(8 * l);
            if (p == l) return divides(4 * l * (l - 1));
            return divides(4 * l);
        case TorsionField::QiE6:
            if (f != FreyFamily::TwoRS) return uncovered("field used for the twors family only");
            if (good) {
                if (p == 2) return divides(32 * 9);
                if (p == 3) return divides(64 * 9);
                if (p == l) return exact(l_good(l));
                return exact({1});
            }
            if (p == 2) return divides(24 * l);
            if (p == 3) return divides(12 * l);
            if (p == l) return divides(6 * l * (l - 1));
            return divides(6 * l);
    }
    return uncovered("unknown field");
}

// ---- VolTable

void VolTable::setRaw(const std::string& id, Enclosure e) {
    if (e.hi < e.lo || e.lo < 0) throw ConfigError("Vol enclosure for " + id + " is not a valid nonnegative interval");
    raw_[id] = std::move(e);
}

void VolTable::setAggregate(const std::string& tableId, u64 l, Enclosure e) {
    if (e.hi < e.lo || e.lo < 0)
        throw ConfigError("a2 enclosure " + tableId + "@" + std::to_string(l) + " is not a valid nonnegative interval");
    agg_[tableId][l] = std::move(e);
}

bool VolTable::hasRaw(const std::string& id) const { return raw_.count(id) > 0; }

bool VolTable::hasAggregate(const std::string& tableId, u64 l) const {
    auto it = agg_.find(tableId);
    return it != agg_.end() && it->second.count(l) > 0;
}

const Enclosure& VolTable::raw(const std::string& id) const {
    auto it = raw_.find(id);
    if (it == raw_.end()) throw ConfigError("Vol constant not configured: " + id);
    return it->second;
}

const Enclosure& VolTable::aggregate(const std::string& tableId, u64 l) const {
    auto it = agg_.find(tableId);
    if (it == agg_.end() || !it->second.count(l))
        throw ConfigError("Vol constant not configured: " + tableId + "@" + std::to_string(l));
    return it->second.at(l);
}

std::set<u64> VolTable::aggregatePrimes(const std::string& tableId) const {
    std::set<u64> s;
    auto it = agg_.find(tableId);
    if (it != agg_.end())
        for (const auto& [l, e] : it->second) s.insert(l);
    return s;
}

namespace {

// Accepts 71, 91.1, "403", "1/3"; decimals are read exactly.
Rat parse_rat(const nlohmann::json& v, const std::string& where) {
    std::string s;
    if (v.is_number_integer()) return Rat(Int(v.dump()));
    if (v.is_number_float() || v.is_string()) s = v.is_string() ? v.get<std::string>() : v.dump();
    else throw ConfigError(where + ": expected a number");
    auto dot = s.find('.');
    try {
        if (dot == std::string::npos) {
            Rat q(s);
            q.canonicalize();
            return q;
        }
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (fp.find_first_not_of("0123456789") != std::string::npos) throw std::invalid_argument(s);
        bool neg = !ip.empty() && ip[0] == '-';
        Int num(ip.empty() || ip == "-" ? "0" : ip);
        Int scale = ipow(10, fp.size());
        Int frac = fp.empty() ? Int(0) : Int(fp);
        Rat q(neg ? Int(num * scale - frac) : Int(num * scale + frac), scale);
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw ConfigError(where + ": cannot parse number '" + s + "'");
    }
}

Enclosure parse_enclosure(const nlohmann::json& v, const std::string& where) {
    Enclosure e;
    if (v.is_object()) {
        if (!v.contains("hi")) throw ConfigError(where + ": missing 'hi'");
        e.hi = parse_rat(v.at("hi"), where);
        e.lo = v.contains("lo") ? parse_rat(v.at("lo"), where) : Rat(0);
        e.provenance = v.value("provenance", std::string());
        e.strict = v.value("strict", false);
    } else {
        e.hi = parse_rat(v, where);
    }
    return e;
}

std::string rat_str(const Rat& q) { return q.get_den() == 1 ? q.get_num().get_str() : q.get_str(); }

}  // namespace

VolTable VolTable::fromJson(const nlohmann::json& j) {
    VolTable t;
    if (j.is_null()) return t;
    if (!j.is_object()) throw ConfigError("volTables: expected an object");
    if (j.contains("raw")) {
        for (const auto& [id, v] : j.at("raw").items()) t.setRaw(id, parse_enclosure(v, "volTables.raw." + id));
    }
    if (j.contains("aggregate")) {
        for (const auto& [tid, tab] : j.at("aggregate").items()) {
            std::string prov = tab.value("provenance", std::string());
            bool strict = tab.value("strict", false);
            if (!tab.contains("values")) throw ConfigError("volTables.aggregate." + tid + ": missing 'values'");
            for (const auto& [ls, v] : tab.at("values").items()) {
                u64 l = 0;
                try {
                    l = std::stoull(ls);
                } catch (const std::exception&) {
                    throw ConfigError("volTables.aggregate." + tid + ": bad prime key '" + ls + "'");
                }
                Enclosure e = parse_enclosure(v, "volTables.aggregate." + tid + "." + ls);
                if (e.provenance.empty()) e.provenance = prov;
                if (!v.is_object()) e.strict = strict;
                t.setAggregate(tid, l, std::move(e));
            }
        }
    }
    return t;
}

nlohmann::json VolTable::toJson() const {
    auto enc = [](const Enclosure& e) {
        return nlohmann::json{{"lo", rat_str(e.lo)}, {"hi", rat_str(e.hi)}, {"provenance", e.provenance},
                              {"strict", e.strict}};
    };
    nlohmann::json j = {{"raw", nlohmann::json::object()}, {"aggregate", nlohmann::json::object()}};
    for (const auto& [id, e] : raw_) j["raw"][id] = enc(e);
    for (const auto& [tid, m] : agg_) {
        nlohmann::json vals = nlohmann::json::object();
        for (const auto& [l, e] : m) vals[std::to_string(l)] = enc(e);
        j["aggregate"][tid] = {{"values", vals}};
    }
    return j;
}

Enclosure vol_lookup(const RamificationDataset& ds, const VolTable& t) { return t.raw(ds.id()); }

Enclosure vol_lookup(const std::string& key, const VolTable& t) {
    auto at = key.find('@');
    if (at == std::string::npos) return t.raw(key);
    u64 l = 0;
    try {
        l = std::stoull(key.substr(at + 1));
    } catch (const std::exception&) {
        throw ConfigError("bad Vol key '" + key + "' (expected table@prime)");
    }
    return t.aggregate(key.substr(0, at), l);
}

nlohmann::json to_json(const RamificationDataset& d) {
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [p, s] : d.perPrime) per[std::to_string(p)] = {{"good", s.good}, {"mult", s.mult}};
    nlohmann::json j = {{"id", d.id()},   {"family", to_string(d.family)}, {"kind", d.kind}, {"l", d.l},
                        {"l0", d.l0},     {"e0", d.e0},                    {"S0", d.S0},     {"genMult", d.genMult},
                        {"perPrime", per}};
    if (d.q) j["q"] = d.q;
    return j;
}

nlohmann::json to_json(const RamIndexBound& b) {
    nlohmann::json j = {{"p", b.p}, {"context", b.context}};
    if (b.exact) {
        j["kind"] = "exact";
        j["candidates"] = b.candidates;
    } else {
        j["kind"] = "divides";
        j["divisor"] = b.divisor;
    }
    return j;
}

}  // namespace gfe
