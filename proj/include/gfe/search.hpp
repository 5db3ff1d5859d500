#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "gfe/arith.hpp"
#include "gfe/structure.hpp"

namespace gfe {

// x = smooth * 2^e2 * 3^e3 * l^eL * lPart^l
struct Decomposition {
    Int smooth = 1;
    std::uint64_t e2 = 0, e3 = 0, eL = 0;
    std::uint64_t lPart = 1;
    std::uint64_t l = 0;

    Int value() const;
};

struct Candidate {
    Int value;
    Decomposition d;
};

// dr x^r + ds y^s = z^t
struct SolutionRecord {
    Int x, y, z;
    std::uint64_t r = 0, s = 0, t = 0;
    int dr = 1, ds = 1;
    bool verified = false;

    bool verify() const;      // exact identity and gcd(x, y, z) = 1
    std::string key() const;  // identity up to reordering of the three terms
    std::string str() const;  // "7^3 + 13^2 = 2^9"
};

nlohmann::json to_json(const SolutionRecord& r);
SolutionRecord record_from_json(const nlohmann::json& j);

struct SearchOptions {
    bool catalanFloor = true;  // require x, y, z >= 2
};

// Explicit truncation of a profile for desk-scale runs; always reported.
struct EnumerationCaps {
    std::optional<std::uint64_t> e2, e3, eL;
    std::optional<Rat> maxLog;  // on each smooth part
    bool any() const { return e2 || e3 || eL || maxLog; }
};
VariableProfile truncate(const VariableProfile& v, const EnumerationCaps& caps);

// Values <= maxValue coprime to 2, l (and 3 when split3) with no exponent divisible by l,
// optionally with every prime <= maxPrime.
bool smooth_admissible(std::uint64_t n, std::uint64_t l, bool split3, std::optional<std::uint64_t> maxPrime = {});
// Streams admissible n = start, start + step, ... <= maxValue.
void for_each_smooth(std::uint64_t l, bool split3, std::uint64_t maxValue, std::optional<std::uint64_t> maxPrime,
                     std::uint64_t start, std::uint64_t step, const std::function<void(std::uint64_t)>& fn);
std::vector<std::uint64_t> smooth_parts(std::uint64_t l, bool split3, std::uint64_t maxValue,
                                        std::optional<std::uint64_t> maxPrime = {});
// Largest smooth part the profile admits; DomainError when unbounded or too large to enumerate.
std::uint64_t smooth_limit(const VariableProfile& v, const PrecisionPolicy& pol = {});
// floor(exp(B)) for B >= 0, certified, capped at the enumeration limit.
std::uint64_t exp_floor(const Rat& B, const PrecisionPolicy& pol = {});

std::vector<Candidate> expand(const Int& smooth, const VariableProfile& v, std::uint64_t l);
std::vector<Candidate> enumerate_candidates(const StructureProfile& p, const std::string& var,
                                            const PrecisionPolicy& pol = {});

// Exact t-th root when n is a perfect t-th power.
std::optional<Int> perfect_root(const Int& n, std::uint64_t t);

// All records dr x^r + ds y^s = z^t with x in xs, y in ys, t in tSet.
std::vector<SolutionRecord> check_values(const std::vector<Int>& xs, std::uint64_t r, const std::vector<Int>& ys,
                                         std::uint64_t s, const std::set<std::uint64_t>& tSet,
                                         const SearchOptions& opt, std::uint64_t* checked = nullptr);

std::vector<SolutionRecord> check_pair(const Int& x1, std::uint64_t r, const Int& y1, std::uint64_t s, std::uint64_t l,
                                       const std::set<std::uint64_t>& tSet, const VariableProfile& px,
                                       const VariableProfile& py, const SearchOptions& opt = {},
                                       std::uint64_t* checked = nullptr);

// x^r = |y^s +- 2^m| for y expanded from y1, r in rSet, mLo <= m <= mHi. z is recorded as 2, t as m.
std::vector<SolutionRecord> check_power_tail(const Int& y1, std::uint64_t s, std::uint64_t l,
                                             const std::set<std::uint64_t>& rSet, std::uint64_t mLo, std::uint64_t mHi,
                                             const VariableProfile& py, const SearchOptions& opt = {},
                                             std::uint64_t* checked = nullptr);

struct SmallZ1Options {
    std::uint64_t z1Bound = 19;  // z1 < z1Bound; z1 = 1 is always scanned
    std::uint64_t tMin = 7;
    std::uint64_t tMax = 9;
    std::uint64_t heightBound = 10000000000ULL;  // z^t <= heightBound
    std::uint64_t yBound = 1000000;
};

// dx x^2 + dy y^3 = z^t with z_(6) < z1Bound; records use r=2, s=3.
std::vector<SolutionRecord> small_z1_scan(const SmallZ1Options& o);

// ---- campaigns

struct BoxSpec {
    std::string kind;  // "P1", "P2", "P3", "plain"
    std::vector<std::uint64_t> sig;
    std::uint64_t l = 0;
    EnumerationCaps caps;
    std::uint64_t xMax = 0, yMax = 0;  // plain boxes
    std::set<std::uint64_t> tSet;      // plain boxes; defaults to {sig[2]}
    std::string label;
};

struct CampaignPlan {
    std::string name;
    std::uint64_t modulus = 1;
    bool catalanFloor = true;
    std::vector<BoxSpec> boxes;
    nlohmann::json source;

    std::string hash() const;  // of the canonical plan JSON
    static CampaignPlan fromJson(const nlohmann::json& j);
};

struct CampaignOptions {
    unsigned threads = 1;
    std::string checkpointPath;  // empty: no checkpoint
    bool resume = false;
    std::uint64_t maxTasks = 0;  // 0: unlimited
    double maxSeconds = 0;       // 0: unlimited
};

struct CampaignReport {
    nlohmann::json body;  // everything but the hash
    std::string hash;
    bool complete = false;
    std::vector<SolutionRecord> records;

    nlohmann::json toJson() const;
};

// Raised for a corrupt checkpoint or one written for another plan.
struct CheckpointError : DomainError {
    using DomainError::DomainError;
};

std::size_t campaign_task_count(const CampaignPlan& plan);
CampaignReport run_campaign(const CampaignPlan& plan, const StructureConfig& cfg, const CampaignOptions& opt,
                            const PrecisionPolicy& pol = {});
// Re-verifies every record and the hash of a saved report.
bool verify_report(const nlohmann::json& report, std::string* why = nullptr);

}  // namespace gfe
