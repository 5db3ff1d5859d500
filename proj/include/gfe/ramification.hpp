#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"

#include "gfe/arith.hpp"
#include "gfe/frey.hpp"

namespace gfe {

using IndexSet = std::set<std::uint64_t>;

struct PrimeIndexSets {
    IndexSet good;
    IndexSet mult;
};

struct RamificationDataset {
    FreyFamily family;
    int kind = 0;
    std::uint64_t l = 0;
    std::uint64_t q = 0;  // 0 when the dataset has no auxiliary prime
    std::uint64_t l0 = 0;
    std::uint64_t e0 = 0;
    IndexSet S0;
    IndexSet genMult;
    std::map<std::uint64_t, PrimeIndexSets> perPrime;

    std::string id() const;  // "general:1:11", "twothree:2:11:5"
};

// Catalog: general kinds 1-4, twothree kinds 1-2 (kind 2 needs q), threers kinds 1-3.
RamificationDataset dataset(FreyFamily f, int kind, std::uint64_t l, std::optional<std::uint64_t> q = {});

// Torsion field F in e_p(E, F, l).
enum class TorsionField {
    QE12,   // Q(E[12]), any family
    QiE3,   // Q(sqrt(-1), E[3]), general
    Qi,     // Q(sqrt(-1)), general
    QiE2q,  // Q(sqrt(-1), E[2q]), twothree
    QE4,    // Q(E[4]), threers
    QiE6,   // Q(sqrt(-1), E[6]), twors
};
std::string to_string(TorsionField f);
TorsionField parse_field(const std::string& s);
TorsionField default_field(FreyFamily f, bool haveQ);

enum class LocalReduction { Good, Multiplicative };

struct RamIndexBound {
    std::uint64_t p = 0;
    std::string context;
    bool exact = false;       // exact candidate set vs divisibility bound
    IndexSet candidates;      // when exact
    std::uint64_t divisor = 0;  // when !exact: e_p divides this
};

RamIndexBound ram_index_bound(FreyFamily f, TorsionField field, std::uint64_t p, LocalReduction red,
                              std::uint64_t l, std::optional<std::uint64_t> q = {});

// Upper enclosure of a log-volume constant, with where it came from.
struct Enclosure {
    Rat lo = 0;
    Rat hi = 0;
    std::string provenance;
    bool strict = false;  // published as "<" rather than "<="
};

// Raw Vol entries keyed by dataset id, and aggregate a2 tables keyed by a
// descriptive table id ("general/2tor", "threers/mu6", ...). The two are
// never substituted for each other.
class VolTable {
public:
    void setRaw(const std::string& datasetId, Enclosure e);
    void setAggregate(const std::string& tableId, std::uint64_t l, Enclosure e);

    bool hasRaw(const std::string& datasetId) const;
    bool hasAggregate(const std::string& tableId, std::uint64_t l) const;
    const Enclosure& raw(const std::string& datasetId) const;  // ConfigError when missing
    const Enclosure& aggregate(const std::string& tableId, std::uint64_t l) const;
    std::set<std::uint64_t> aggregatePrimes(const std::string& tableId) const;
    std::size_t rawCount() const { return raw_.size(); }

    static VolTable fromJson(const nlohmann::json& j);
    nlohmann::json toJson() const;

private:
    std::map<std::string, Enclosure> raw_;
    std::map<std::string, std::map<std::uint64_t, Enclosure>> agg_;
};

Enclosure vol_lookup(const RamificationDataset& ds, const VolTable& t);
Enclosure vol_lookup(const std::string& key, const VolTable& t);  // raw id or "table@l"

nlohmann::json to_json(const RamificationDataset& d);
nlohmann::json to_json(const RamIndexBound& b);

}  // namespace gfe
