#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "gfe/config.hpp"
#include "gfe/errors.hpp"
#include "gfe/search.hpp"
#include "oracles.hpp"

using namespace gfe;
namespace fs = std::filesystem;

namespace {

const ToolConfig& shipped() {
    static const ToolConfig cfg = ToolConfig::load(ToolConfig::default_path());
    return cfg;
}

CampaignPlan load_plan(const std::string& name) {
    std::ifstream in(std::string(GFE_DATA_DIR) + "/plans/" + name);
    REQUIRE(in);
    return CampaignPlan::fromJson(nlohmann::json::parse(in));
}

VariableProfile fixed(std::uint64_t e2) {
    VariableProfile v;
    v.e2Cap = e2;
    v.eLCap = 0;
    return v;
}

std::set<std::string> strs(const std::vector<SolutionRecord>& rs) {
    std::set<std::string> out;
    for (const auto& r : rs) out.insert(r.str());
    return out;
}

std::string tmp_path(const std::string& tag) {
    return (fs::temp_directory_path() / ("gfe_test_" + tag + "_" + std::to_string(::getpid()))).string();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string s; std::getline(in, s);) out.push_back(s);
    return out;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::trunc);
    for (const auto& s : lines) out << s << "\n";
}

}  // namespace

TEST_CASE("solution records") {
    SolutionRecord r{7, 13, 2, 3, 2, 9, 1, 1};
    CHECK(r.verify());
    CHECK(r.str() == "7^3 + 13^2 = 2^9");
    SolutionRecord bad{7, 13, 2, 3, 2, 8, 1, 1};
    CHECK_FALSE(bad.verify());
    SolutionRecord shared{2, 2, 2, 3, 3, 4, 1, 1};  // 8 + 8 = 16, not primitive
    CHECK_FALSE(shared.verify());
    auto back = record_from_json(to_json(r));
    CHECK(back.key() == r.key());
    CHECK(back.verified);
}

TEST_CASE("expansion examples") {
    auto v = fixed(2);
    v.smoothForcedOne = true;
    std::set<std::string> vals;
    for (const auto& c : expand(1, v, 11)) vals.insert(c.value.get_str());
    CHECK(vals == std::set<std::string>{"1", "2", "4"});
    CHECK(expand(3, v, 11).empty());

    VariableProfile w = fixed(0);
    w.lParts = {1, 3, 5};
    auto cs = expand(1, w, 11);
    REQUIRE(cs.size() == 3);
    std::set<Int> got;
    for (const auto& c : cs) got.insert(c.value);
    CHECK(got == std::set<Int>{1, ipow(3, 11), ipow(5, 11)});

    VariableProfile open;
    CHECK_THROWS_AS(expand(1, open, 11), DomainError);
}

TEST_CASE("smooth parts") {
    CHECK(smooth_parts(11, false, 7) == std::vector<std::uint64_t>{1, 3, 5, 7});
    CHECK(smooth_parts(11, true, 7) == std::vector<std::uint64_t>{1, 5, 7});
    CHECK(smooth_parts(5, false, 30) == std::vector<std::uint64_t>{1, 3, 7, 9, 11, 13, 17, 19, 21, 23, 27, 29});
    // 3^11 has an exponent divisible by l, 3^12 * 5 does not
    CHECK_FALSE(smooth_admissible(177147, 11, false));
    CHECK(smooth_admissible(531441 * 5, 11, false));
    CHECK(smooth_parts(11, false, 30, 5) == std::vector<std::uint64_t>{1, 3, 5, 9, 15, 25, 27});
}

TEST_CASE("enumeration from a profile is duplicate-free and recomposes") {
    StructureProfile p;
    p.l = 11;
    VariableProfile v = fixed(3);
    v.name = "x";
    v.eLCap = 1;
    v.lParts = {1, 3};
    v.smoothMax = Int(7);
    p.vars.push_back(v);
    auto cs = enumerate_candidates(p, "x");
    std::set<Int> seen;
    for (const auto& c : cs) {
        CHECK(c.d.value() == c.value);
        CHECK(seen.insert(c.value).second);
    }
    // smooth parts {1,3,5,7}, l-part 3 only with smooth coprime to 3
    CHECK(cs.size() == (4 + 3) * 4 * 2);
}

TEST_CASE("enumeration matches a direct factor-based filter") {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
        StructureProfile p;
        p.l = (rng() % 2) ? 11 : 13;
        VariableProfile v = fixed(rng() % 4);
        v.name = "x";
        v.eLCap = rng() % 2;
        v.split3 = rng() % 2;
        v.e3Cap = rng() % 3;
        v.smoothMax = Int(static_cast<unsigned long>(1 + rng() % 3000));
        p.vars.push_back(v);
        std::set<Int> got;
        for (const auto& c : enumerate_candidates(p, "x")) got.insert(c.value);
        std::set<Int> want;
        const unsigned long lim = v.smoothMax->get_ui();
        for (unsigned long s = 1; s <= lim; s += 2) {
            auto f = factor(Int(s));
            bool ok = !f.valuation(p.l) && !(v.split3 && f.valuation(3));
            for (const auto& [q, e] : f.factors())
                if (e % p.l == 0) ok = false;
            if (!ok) continue;
            for (const auto& x : oracle::naive_expand(Int(s), v, p.l)) want.insert(x);
        }
        CHECK(got == want);
    }
}

TEST_CASE("perfect roots") {
    CHECK(perfect_root(512, 9) == Int(2));
    CHECK(perfect_root(5041, 2) == Int(71));
    CHECK_FALSE(perfect_root(5042, 2));
    CHECK(perfect_root(ipow(65, 7), 7) == Int(65));
    CHECK_FALSE(perfect_root(ipow(65, 7) + 1, 7));
}

TEST_CASE("check_pair finds the known identities") {
    auto a = check_pair(7, 3, 13, 2, 11, {9}, fixed(0), fixed(0));
    CHECK(strs(a) == std::set<std::string>{"7^3 + 13^2 = 2^9"});
    auto b = check_pair(707, 3, 2213459, 2, 11, {7}, fixed(2), fixed(0));
    REQUIRE(b.size() == 1);
    CHECK(b[0].x == 1414);
    CHECK(b[0].z == 65);
    CHECK(b[0].verified);
    CHECK(check_pair(3, 5, 3, 7, 11, {2, 3}, fixed(3), fixed(3)).empty());  // gcd(x1, y1) > 1
}

TEST_CASE("check_pair agrees with a naive double loop") {
    std::mt19937_64 rng(2718);
    int withHits = 0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        auto b = oracle::random_box(rng, i);
        auto got = oracle::keys_of(check_pair(b.x1, b.r, b.y1, b.s, b.l, b.tSet, b.px, b.py));
        auto want = oracle::naive_pair(b.x1, b.r, b.y1, b.s, b.l, b.tSet, b.px, b.py);
        CAPTURE(i);
        CHECK(got == want);
        if (!want.empty()) ++withHits;
    }
    CHECK(withHits >= 3);
}

TEST_CASE("power tail") {
    VariableProfile one = fixed(0);
    CHECK(check_power_tail(1, 5, 11, {4}, 7, 7, one).empty());
    CHECK(check_power_tail(2, 5, 11, {4}, 7, 40, one).empty());
    // 3^2 = 1 + 2^3 and 1 = 3^2 - 2^3 with the floor disabled
    SearchOptions loose{false};
    auto r = check_power_tail(1, 3, 11, {2}, 3, 3, one, loose);
    CHECK_FALSE(r.empty());
    for (const auto& x : r) CHECK(x.verified);
    // 71^2 = 17^3 + 2^7
    auto s = check_power_tail(17, 3, 11, {2}, 5, 10, one);
    CHECK(strs(s).size() == 1);
}

TEST_CASE("small z1 scan examples") {
    SmallZ1Options tiny;
    tiny.heightBound = 1000;
    auto a = small_z1_scan(tiny);
    std::set<std::string> keys;
    for (const auto& r : a) keys.insert(r.str());
    CHECK(a.size() == 3);
    for (const auto& r : a) CHECK(r.verified);

    SmallZ1Options only1;
    only1.z1Bound = 1;
    only1.heightBound = 1000000;
    auto b = small_z1_scan(only1);
    CHECK(b.size() == 3);

    SmallZ1Options full;
    full.heightBound = 10000000000ULL;
    auto c = small_z1_scan(full);
    CHECK(c.size() == 4);  // the 33^8 identity needs the larger height
}

TEST_CASE("small z1 scan is monotone in its bounds") {
    auto key_set = [](const std::vector<SolutionRecord>& v) {
        std::set<std::string> s;
        for (const auto& r : v) s.insert(r.key());
        return s;
    };
    SmallZ1Options o;
    o.heightBound = 100000;
    o.z1Bound = 7;
    auto base = key_set(small_z1_scan(o));
    for (int k = 0; k < 3; ++k) {
        SmallZ1Options big = o;
        if (k == 0) big.heightBound = 100000000;
        if (k == 1) big.z1Bound = 19;
        if (k == 2) big.tMax = 11;
        auto more = key_set(small_z1_scan(big));
        for (const auto& s : base) CHECK(more.count(s));
    }
}

TEST_CASE("empty plan gives an empty complete report") {
    auto plan = CampaignPlan::fromJson({{"name", "empty"}, {"modulus", 1}, {"boxes", nlohmann::json::array()}});
    auto rep = run_campaign(plan, shipped().structure, {});
    CHECK(rep.complete);
    CHECK(rep.records.empty());
    CHECK(rep.body["verdict"] == "no solutions in the searched boxes");
}

TEST_CASE("desk campaign is deterministic across threads and resume") {
    auto plan = load_plan("desk.json");
    std::string ref;
    for (unsigned th : {1u, 4u, 8u}) {
        CampaignOptions o;
        o.threads = th;
        auto rep = run_campaign(plan, shipped().structure, o);
        CHECK(rep.complete);
        REQUIRE(rep.records.size() == 1);
        CHECK(rep.records[0].str() == "7^3 + 13^2 = 2^9");
        CHECK_FALSE(rep.body["truncations"].empty());
        if (ref.empty()) ref = rep.hash;
        CHECK(rep.hash == ref);
        nlohmann::json saved = rep.toJson();
        CHECK(verify_report(saved));
        saved["records"][0]["z"] = "3";
        std::string why;
        CHECK_FALSE(verify_report(saved, &why));
    }

    const std::string ck = tmp_path("ck");
    CampaignOptions part;
    part.checkpointPath = ck;
    part.maxTasks = 5;
    auto first = run_campaign(plan, shipped().structure, part);
    CHECK_FALSE(first.complete);
    CHECK(first.body["verdict"] == "incomplete");
    CampaignOptions resume;
    resume.checkpointPath = ck;
    resume.resume = true;
    resume.threads = 3;
    auto second = run_campaign(plan, shipped().structure, resume);
    CHECK(second.complete);
    CHECK(second.hash == ref);

    // a torn final line is dropped and rerun
    auto lines = read_lines(ck);
    REQUIRE(lines.size() > 3);
    {
        std::ofstream out(ck, std::ios::trunc);
        for (std::size_t i = 0; i + 1 < lines.size(); ++i) out << lines[i] << "\n";
        out << lines.back().substr(0, lines.back().size() / 2);
    }
    auto third = run_campaign(plan, shipped().structure, resume);
    CHECK(third.hash == ref);

    // tampering breaks the hash chain
    lines = read_lines(ck);
    auto edited = lines;
    auto j = nlohmann::json::parse(edited[2]);
    j["payload"]["checked"] = 0;
    edited[2] = j.dump();
    write_lines(ck, edited);
    CHECK_THROWS_AS(run_campaign(plan, shipped().structure, resume), CheckpointError);
    write_lines(ck, {"not json"});
    CHECK_THROWS_AS(run_campaign(plan, shipped().structure, resume), CheckpointError);

    // a checkpoint written for another plan is refused
    write_lines(ck, lines);
    auto other = plan.source;
    other["name"] = "desk-copy";
    CHECK_THROWS_AS(run_campaign(CampaignPlan::fromJson(other), shipped().structure, resume), CheckpointError);
    fs::remove(ck);
}

TEST_CASE("plan validation") {
    CHECK_THROWS_AS(CampaignPlan::fromJson({{"modulus", 0}, {"boxes", nlohmann::json::array()}}), ConfigError);
    CHECK_THROWS_AS(CampaignPlan::fromJson({{"boxes", {{{"kind", "P9"}, {"signature", {4, 5, 6}}, {"l", 11}}}}}),
                    ConfigError);
    auto full = load_plan("general-5-6-7.json");
    CHECK(campaign_task_count(full) >= 3);
}
