#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "gfe/search.hpp"

namespace gfe {

struct Signature {
    std::uint64_t r = 2, s = 2, t = 2;

    std::array<std::uint64_t, 3> canonical() const;
    std::string str() const;  // "(r,s,t)"
    bool operator==(const Signature& o) const { return canonical() == o.canonical(); }
    bool operator<(const Signature& o) const { return canonical() < o.canonical(); }
};

enum class Chi { Spherical, Euclidean, Hyperbolic };
std::string to_string(Chi c);
Chi classify_chi(const Signature& sig);  // sign of 1/r + 1/s + 1/t - 1

// The Catalan solution 1^n + 2^3 = 3^2 is a family in n; rec holds n = 0 as a placeholder.
struct KnownSolution {
    SolutionRecord rec;
    bool catalanFamily = false;

    bool verify() const;  // the family is checked for n = 2..64
    std::string str() const;
    bool matches(const Signature& sig) const;
};
const std::vector<KnownSolution>& known_solutions();

// Pattern over signatures up to permutation: each slot is a constant or a named variable.
struct SigPattern {
    struct Var {
        std::uint64_t min = 2;
        std::optional<std::uint64_t> max;
        std::set<std::uint64_t> only;  // non-empty: value must be one of these
        bool prime = false;
    };
    std::array<std::string, 3> slots;  // "5" or "n"
    std::map<std::string, Var> vars;
    std::vector<std::pair<std::string, std::string>> less;  // var a < var b
    bool matches(const Signature& sig) const { return !assignments(sig).empty(); }
    std::vector<std::map<std::string, std::uint64_t>> assignments(const Signature& sig) const;

    static SigPattern fromJson(const nlohmann::json& j);
    bool finite() const;
    std::vector<Signature> members() const;  // canonical, sorted; throws for infinite patterns
};

struct RegistryRule {
    std::string id;
    SigPattern pattern;
    std::string citation;
    bool propagates = true;  // usable through divisor closure
};

// A family with n restricted to multiples of some modulus, solved through a divisor signature.
struct ExclusionRule {
    std::string id;
    SigPattern family;
    std::string var = "n";
    std::set<std::uint64_t> moduli;
    std::string citation;
};

struct OpenClause {
    std::string id;
    std::string label;
    SigPattern pattern;
    std::string note;
    std::optional<std::pair<std::string, std::uint64_t>> alternative;  // var <= max under a competing statement
};

enum class SigState { Solved, Remaining, OutOfScope };
std::string to_string(SigState s);

struct SignatureStatus {
    SigState state = SigState::Solved;
    std::string provenance;
    std::string clause;                   // Remaining: open clause id
    std::vector<std::string> knownSolutions;  // identities with this signature
};

enum class CountMode { GE4, Beal };
CountMode parse_count_mode(const std::string& s);

struct CountLedger {
    CountMode mode = CountMode::GE4;
    std::uint64_t floor = 4;
    bool exclusions = true;
    std::vector<Signature> signatures;
    std::map<std::string, std::uint64_t> byClause;
    std::optional<std::uint64_t> expected;
    nlohmann::json discrepancy;  // null when the count matches the expected value
    nlohmann::json notes;
    std::string hash;  // sha256 of toJson() without the hash field

    std::uint64_t count() const { return signatures.size(); }
    nlohmann::json toJson() const;
};

class Registry {
  public:
    static Registry load(const std::string& path);
    static Registry fromJson(const nlohmann::json& j);

    SignatureStatus status(const Signature& sig, bool exclusions = true) const;
    CountLedger count_remaining(CountMode mode, bool exclusions = true) const;

    const std::vector<RegistryRule>& rules() const { return rules_; }
    const std::vector<ExclusionRule>& exclusionRules() const { return exclusions_; }
    const std::vector<OpenClause>& clauses() const { return clauses_; }
    int version() const { return version_; }

    using Canon = std::array<std::uint64_t, 3>;
    // withheld: signatures that stay solved but are not used through divisor closure
    SignatureStatus status_with(const Signature& sig, bool exclusions, const std::set<Canon>& withheld) const;
    std::vector<Signature> remaining(CountMode mode, bool exclusions, const std::set<Canon>& withheld) const;

  private:
    struct Hypothesis {
        std::string id, description;
        std::set<Canon> withhold;
    };
    const RegistryRule* direct(const Signature& sig) const;

    int version_ = 0;
    bool closure_ = true;
    std::vector<RegistryRule> rules_;
    std::vector<ExclusionRule> exclusions_;
    std::vector<OpenClause> clauses_;
    std::map<std::string, std::uint64_t> expected_;
    std::vector<Hypothesis> hypotheses_;
    nlohmann::json notes_;
};

}  // namespace gfe
