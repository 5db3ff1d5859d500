#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "gfe/arith.hpp"
#include "gfe/interval.hpp"
#include "gfe/ramification.hpp"

namespace gfe {

struct PerL {
    Rat a1;
    Rat a4;
    std::optional<Enclosure> vol;  // unset until a Vol constant is supplied
    bool plusLog2 = false;         // Vol(l) is the dataset volume plus log 2
};

struct PrimedBlock {
    std::uint64_t u0p = 0;
    Int n1Sp = 0;
    Int n0p = 1;
    std::string P = "all";  // "all" (every p | N), or a description such as "p | xy"
    std::set<Int> primes;   // explicit P for concrete configurations; empty with P="all"
};

struct BoundConfig {
    std::optional<FactoredInteger> N;  // concrete N; absent for symbolic scenarios
    Int n0 = 1;
    std::uint64_t u0 = 1;
    std::uint64_t pN = 2;
    std::vector<std::uint64_t> S;  // sorted, distinct primes >= 5
    std::uint64_t k = 2;
    std::set<std::uint64_t> S1;
    Int n1S = 1;
    Int nkS = 1;
    Rat lambda = 6;
    std::uint64_t e0 = 1;
    bool defaultProfile = true;
    std::map<std::uint64_t, PerL> perL;
    std::optional<PrimedBlock> primed;
    std::string label;
    std::vector<std::string> notes;

    std::uint64_t p0() const { return S.front(); }
    Int kS() const;  // product of the k smallest primes of S
};

Rat default_a1(std::uint64_t l, std::uint64_t e0);
Rat default_a4(std::uint64_t l, std::uint64_t e0);

// Fills perL with the default a1/a4 for e0 (Vol left as is).
void apply_default_profile(BoundConfig& cfg);

// Structural checks; with a concrete N also Def-(a) and the n1/nk hypotheses.
void validate(const BoundConfig& cfg);
std::vector<std::string> hypothesis_failures(const BoundConfig& cfg);  // empty when N satisfies them

struct DerivedConstants {
    Rat a1, a4;  // exact
    Iv a2, a3, a5;
    Rat b1;
    std::optional<Rat> b1p;
    Iv b2;
    unsigned precision = 0;
};

DerivedConstants derived_constants(const BoundConfig& cfg, unsigned prec);
DerivedConstants derived_constants(const BoundConfig& cfg, const PrecisionPolicy& pol = {});

enum class Mode { Unprimed, Primed };

struct EliminationResult {
    bool applicable = false;
    std::string reason;
    // Certified open interval: lo bounds b2/(1-b) from above, hi bounds the ceiling from below.
    Rat lo, hi;
    bool exact = false;  // lo/hi are the exact values, no rounding involved
    Rat bUsed;
    Iv ceiling;  // n_k(S) log p_N
    unsigned precision = 0;
};

// Core step: b < 1 and ceiling > b2/(1-b) give the interval (b2/(1-b), ceiling).
EliminationResult elimination(const Rat& b1, const Rat& b2, const Rat& ceiling);
EliminationResult elimination(const Rat& b1, const Iv& b2, const Iv& ceiling);

EliminationResult forbidden_interval(const BoundConfig& cfg, Mode mode, const PrecisionPolicy& pol = {});

// Verdict of an interval for a concrete log value: true only when certified inside.
bool certainly_inside(const EliminationResult& r, const Int& value);

enum class Verdict { Holds, Violated, Indeterminate, NotApplicable };
std::string to_string(Verdict v);

struct ChainItem {
    std::string name;
    std::string statement;
    Verdict verdict = Verdict::Indeterminate;
    bool informational = false;
};

struct ChainReport {
    std::set<Int> A, B, C, Ap, Bp, Cp;
    std::vector<ChainItem> items;
    std::vector<std::string> definitionFailures;  // conditions on N the configuration promises
    Verdict hypothesis = Verdict::Indeterminate;  // log N < n_k(S) log p_N
    bool excluded = false;        // hypothesis certified and log N > b1 log N + b2 certified
    bool excludedPrimed = false;  // same for N' with b1'
    unsigned precision = 0;
};

// Partition and inequality replay for a concrete N.
ChainReport chain_report(const BoundConfig& cfg, const PrecisionPolicy& pol = {});

// ---- scenario builders

enum class ScenarioCase {
    GeneralMu6,
    GeneralTwoTorsion,
    TwoThreeMu6,
    TwoThreeTwoTorsion,
    ThreeRSMu6,
    ThreeRSTwoTorsion,
};
std::string to_string(ScenarioCase c);
ScenarioCase parse_scenario(const std::string& s);

struct ScenarioRequest {
    ScenarioCase sc = ScenarioCase::GeneralMu6;
    std::vector<std::uint64_t> exps;  // (r,s,t), (t), or (r,s)
    std::string situation;            // "a", "c1".."c3", "none"; "i"/"ii" for the (2,3,t) mu6 case
    std::vector<std::uint64_t> S;
    std::uint64_t k = 2;
    std::optional<std::uint64_t> q;
    std::optional<std::uint64_t> u0;  // where the case leaves u0 to the caller
};

// Builds the configuration; Vol entries are filled from the table when present.
BoundConfig scenario(const ScenarioRequest& req, const VolTable& vols);
std::vector<std::uint64_t> missing_vol(const BoundConfig& cfg);

// Given exclusion intervals for one quantity L and a starting ceiling C0 (L < C0),
// the least C with (C, C0) covered; returns C0 when nothing chains down.
Rat chain_upper_bound(std::vector<EliminationResult> intervals, const Rat& C0);

nlohmann::json to_json(const BoundConfig& c);
BoundConfig bound_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DerivedConstants& d);
nlohmann::json to_json(const EliminationResult& r);
nlohmann::json to_json(const ChainReport& r);
// One JSON-lines certificate record.
nlohmann::json certificate(const BoundConfig& c, const DerivedConstants& d, const EliminationResult& r);

std::string rat_to_string(const Rat& q);
Rat rat_from_string(const std::string& s);  // "p/q", integer or finite decimal

}  // namespace gfe
