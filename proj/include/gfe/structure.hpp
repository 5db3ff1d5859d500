#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gfe/arith.hpp"
#include "gfe/interval.hpp"
#include "gfe/ramification.hpp"

namespace gfe {

enum class StructureFamily {
    General,   // x^r +- y^s = z^t, r,s,t >= 4; split off 2 and l
    ThreeRS,   // x^r +- y^s = z^3; split off 2, 3 and l
    TwoThree,  // x^2 +- y^3 = z^t; z split off 2, 3 and l
};
std::string to_string(StructureFamily f);
StructureFamily parse_structure_family(const std::string& s);

// Published caps on z for x^2 +- y^3 = z^t.
struct TwoThreeCaps {
    struct PrimeCap {
        std::uint64_t tMin = 0;
        std::uint64_t maxPrime = 0;
        std::set<std::uint64_t> except;  // t values the cap does not cover
    };
    struct SmoothCap {
        std::uint64_t tMin = 0;
        std::uint64_t below = 0;  // z_(6) < below
    };
    std::vector<PrimeCap> primeCaps;
    std::vector<SmoothCap> smoothCaps;
    std::set<std::uint64_t> solvedDivisors;  // t divisible by one of these is solved
    std::uint64_t tMin = 11;
    std::uint64_t tMax = 399;
    std::uint64_t z6Floor = 19;                    // smallest z_(6) left by the small-z1 classification
    std::set<std::uint64_t> excludedPowerBases;    // z_(6) may not be a power of these

    std::optional<std::uint64_t> primeCap(std::uint64_t t) const;
    std::optional<std::uint64_t> smoothCap(std::uint64_t t) const;
};

// Inputs of the structure calculators: a2 tables plus the height bounds they start from.
struct StructureConfig {
    VolTable vols;
    std::map<std::string, Rat> hBounds;
    TwoThreeCaps twothree;

    Rat h(const std::string& key) const;  // ConfigError when missing
    static StructureConfig fromJson(const nlohmann::json& j);  // {"hBounds":..., "twothreeCaps":...}
    nlohmann::json toJson() const;
};

// Table ids used by the calculators.
namespace tables {
inline const char* GeneralOdd = "general/odd";
inline const char* GeneralJoint = "general/joint";
inline const char* GeneralTwoAdic = "general/two-adic";
inline const char* ThreeRSOdd = "threers/odd";
inline const char* ThreeRSTwoAdic = "threers/two-adic";
inline const char* TwoThreeOdd = "twothree/odd";
}  // namespace tables

// c * (p^2+5p)/(p^2+p-12) * (1 - 1/(d p))
Rat structure_a1(std::uint64_t c, std::uint64_t d, std::uint64_t p);

struct VariableProfile {
    std::string name;
    std::uint64_t exponent = 0;
    bool split3 = false;
    bool empty = false;  // no admissible value at all
    std::string emptyReason;
    std::optional<std::uint64_t> e2Cap, e3Cap, eLCap;  // unset: unbounded
    std::set<std::uint64_t> lParts{1};
    bool lPartsBounded = true;
    bool smoothForcedOne = false;
    std::optional<Rat> smoothLogBound;  // log(smooth part) <= this
    std::optional<Int> smoothMax;       // smooth part <= this
    std::optional<std::uint64_t> maxPrime;
    std::vector<std::string> notes;

    bool finite() const;
};

struct JointBound {
    enum class Kind { Linear, MinOf };
    Kind kind = Kind::Linear;
    // Linear: sum coef * log(var) <= rhs, one variable per term.
    // MinOf: min over groups of log(prod of group) <= rhs; coef is 1.
    std::vector<std::pair<std::vector<std::string>, Rat>> terms;
    Rat rhs;
    bool strict = false;
    std::string source;
};

struct StructureProfile {
    StructureFamily family = StructureFamily::General;
    std::vector<std::uint64_t> exps;
    std::uint64_t l = 0;
    std::vector<VariableProfile> vars;
    std::vector<JointBound> joints;
    bool admissible = true;  // false when the exponents themselves are excluded
    std::vector<std::string> notes;

    const VariableProfile& var(const std::string& name) const;
};

StructureProfile structure_profile(StructureFamily f, const std::vector<std::uint64_t>& exps, std::uint64_t l,
                                   const StructureConfig& cfg, const PrecisionPolicy& pol = {});

// ---- uniform constants

struct GeneralConstants {
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::set<std::uint64_t>> xlTable;  // (r,l) with x_l != {1}
    std::uint64_t rMax = 616;       // exponent range covered
    std::uint64_t rl = 0;           // r * r_l <= rl
    std::uint64_t rlZero = 0;       // r >= rlZero gives r_l = 0, x_l = 1
    std::uint64_t twoAdic = 0;      // r * r_2 <= twoAdic
    std::uint64_t twoAdicR = 0;     // largest r with r_2 > 0 possible
    std::uint64_t x1Collapse = 0;   // r >= x1Collapse gives x = 2^r2
};

struct ThreeRSConstants {
    std::uint64_t rl = 0;          // r * r_l <= rl
    std::uint64_t threeAdic = 0;   // r * r_3 <= threeAdic
    std::uint64_t threeAdicR = 0;  // r_3 = 0 beyond this
    std::uint64_t twoAdic = 0;     // r * r_2 <= twoAdic, hence r <= twoAdic
    std::uint64_t collapse = 0;    // r >= collapse gives x = 2^r2
};

struct TwoThreeConstants {
    std::set<std::uint64_t> admissibleT;  // t in [tMin, tMax] not excluded
};

std::set<std::uint64_t> general_xl_candidates(std::uint64_t r, std::uint64_t l, const StructureConfig& cfg,
                                              const PrecisionPolicy& pol = {});
GeneralConstants general_constants(const StructureConfig& cfg, const PrecisionPolicy& pol = {});
ThreeRSConstants threers_constants(const StructureConfig& cfg, const PrecisionPolicy& pol = {});
TwoThreeConstants twothree_constants(const StructureConfig& cfg);
bool twothree_admissible(std::uint64_t t, const TwoThreeCaps& caps);

nlohmann::json to_json(const VariableProfile& v);
nlohmann::json to_json(const JointBound& b);
nlohmann::json to_json(const StructureProfile& p);
nlohmann::json to_json(const GeneralConstants& c);
nlohmann::json to_json(const ThreeRSConstants& c);

}  // namespace gfe
