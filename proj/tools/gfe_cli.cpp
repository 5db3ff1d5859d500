#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gfe/bounds.hpp"
#include "gfe/catalog.hpp"
#include "gfe/config.hpp"
#include "gfe/errors.hpp"
#include "gfe/frey.hpp"
#include "gfe/ramification.hpp"
#include "gfe/search.hpp"
#include "gfe/structure.hpp"

using namespace gfe;
using nlohmann::json;
using u64 = std::uint64_t;

namespace {

struct Globals {
    std::string configPath;
    bool json = false;
    u64 seed = FactorOptions{}.seed;
};

ToolConfig load_config(const Globals& g) {
    return ToolConfig::load(g.configPath.empty() ? ToolConfig::default_path() : g.configPath);
}

void emit(const Globals& g, const json& j, const std::string& human) {
    if (g.json) std::cout << j.dump() << "\n";
    else std::cout << human << (human.empty() || human.back() == '\n' ? "" : "\n");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path + " is not valid JSON: " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << "\n";
}

Int parse_int(const std::string& s) {
    Int v;
    if (s.empty() || v.set_str(s, 10) != 0) throw DomainError("not an integer: " + s);
    return v;
}

int cmd_classify(const Globals& g, const std::vector<u64>& e) {
    Signature sig{e[0], e[1], e[2]};
    Chi c = classify_chi(sig);
    auto cfg = load_config(g);
    auto st = Registry::load(cfg.registryPath).status(sig);
    json j = {{"signature", e},          {"chi", to_string(c)},          {"status", to_string(st.state)},
              {"provenance", st.provenance}, {"clause", st.clause}, {"knownSolutions", st.knownSolutions}};
    std::string h = to_string(c) + "\n" + to_string(st.state) + ": " + st.provenance;
    for (const auto& k : st.knownSolutions) h += "\nknown solution: " + k;
    emit(g, j, h);
    return 0;
}

int cmd_curve(const Globals& g, const std::string& fam, const std::vector<std::string>& abc) {
    FactorOptions fo;
    fo.seed = g.seed;
    auto inv = invariants(parse_family(fam), parse_int(abc[0]), parse_int(abc[1]), parse_int(abc[2]), fo);
    json bad = json::array();
    for (unsigned p : inv.badPrimes) bad.push_back(p);
    json j = {{"family", to_string(inv.family)},
              {"a", inv.a.get_str()},
              {"b", inv.b.get_str()},
              {"c", inv.c.get_str()},
              {"c4", inv.c4.get_str()},
              {"delta", inv.delta.get_str()},
              {"j", inv.j.get_str()},
              {"N", inv.denomN.value().get_str()},
              {"N_factored", inv.denomN.str()},
              {"closedFormN", inv.closedFormN.get_str()},
              {"closedFormAgrees", inv.closedFormAgrees},
              {"badPrimes", bad}};
    std::ostringstream h;
    h << "family " << to_string(inv.family) << " (a,b,c) = (" << inv.a << ", " << inv.b << ", " << inv.c << ")\n"
      << "c4 = " << inv.c4 << "\nDelta = " << inv.delta << "\nj = " << inv.j << "\nN = " << inv.denomN.value() << " "
      << inv.denomN.str() << "\nclosed-form N " << (inv.closedFormAgrees ? "agrees" : "differs: " + inv.closedFormN.get_str());
    emit(g, j, h.str());
    return 0;
}

int cmd_dataset(const Globals& g, const std::string& fam, int kind, u64 l, std::optional<u64> q) {
    auto ds = dataset(parse_family(fam), kind, l, q);
    auto j = to_json(ds);
    emit(g, j, j.dump(2));
    return 0;
}

struct BoundsArgs {
    std::string scenario;
    std::vector<u64> exps;
    std::string situation;
    std::vector<u64> S;
    u64 k = 2;
    std::optional<u64> q, u0;
    std::string file;
};

int cmd_bounds(const Globals& g, const BoundsArgs& a) {
    auto cfg = load_config(g);
    BoundConfig bc;
    if (!a.file.empty()) {
        bc = bound_config_from_json(read_json_file(a.file));
    } else {
        ScenarioRequest req;
        req.sc = parse_scenario(a.scenario);
        req.exps = a.exps;
        req.situation = a.situation;
        req.S = a.S;
        req.k = a.k;
        req.q = a.q;
        req.u0 = a.u0;
        bc = scenario(req, cfg.structure.vols);
    }
    auto missing = missing_vol(bc);
    if (!missing.empty()) {
        std::string m;
        for (u64 l : missing) m += (m.empty() ? "" : ", ") + std::to_string(l);
        throw ConfigError("Vol constant not configured for l in {" + m + "}");
    }
    auto d = derived_constants(bc, cfg.precision);
    auto e = forbidden_interval(bc, Mode::Unprimed, cfg.precision);
    json out = {{"config", to_json(bc)}, {"derived", to_json(d)}, {"elimination", to_json(e)}};
    std::string h = "derived: " + to_json(d).dump() + "\nelimination: " + to_json(e).dump();
    if (g.json) std::cout << certificate(bc, d, e).dump() << "\n";
    if (bc.primed) {
        auto ep = forbidden_interval(bc, Mode::Primed, cfg.precision);
        out["eliminationPrimed"] = to_json(ep);
        h += "\nelimination (primed): " + to_json(ep).dump();
        if (g.json) std::cout << certificate(bc, d, ep).dump() << "\n";
    }
    if (!g.json) std::cout << h << "\n";
    return 0;
}

int cmd_profile(const Globals& g, const std::string& fam, const std::vector<u64>& nums) {
    auto cfg = load_config(g);
    std::vector<u64> exps(nums.begin(), nums.end() - 1);
    auto p = structure_profile(parse_structure_family(fam), exps, nums.back(), cfg.structure, cfg.precision);
    auto j = to_json(p);
    emit(g, j, j.dump(2));
    return 0;
}

struct SearchArgs {
    std::string plan;
    std::string resume;
    std::string checkpoint;
    std::string report;
    unsigned shards = 1;
    std::optional<u64> maxTasks;
    std::optional<double> maxSeconds;
};

int cmd_search(const Globals& g, const SearchArgs& a) {
    auto cfg = load_config(g);
    auto plan = CampaignPlan::fromJson(read_json_file(a.plan));
    CampaignOptions opt;
    opt.threads = std::max(1u, a.shards);
    opt.maxTasks = a.maxTasks.value_or(cfg.maxTasks);
    opt.maxSeconds = a.maxSeconds.value_or(cfg.maxSeconds);
    if (!a.resume.empty()) {
        opt.checkpointPath = a.resume;
        opt.resume = true;
    } else {
        opt.checkpointPath = a.checkpoint;
    }
    auto rep = run_campaign(plan, cfg.structure, opt, cfg.precision);
    std::string reportPath = !a.report.empty() ? a.report : cfg.outputPath;
    if (!reportPath.empty()) write_json_file(reportPath, rep.toJson());
    if (g.json) {
        for (const auto& t : rep.body.at("tasks")) std::cout << t.dump() << "\n";
        json summary = rep.body;
        summary.erase("tasks");
        summary["hash"] = rep.hash;
        std::cout << summary.dump() << "\n";
        return 0;
    }
    std::cout << "plan " << plan.name << ": " << rep.body["completedTasks"] << "/" << rep.body["taskCount"] << " tasks"
              << (rep.complete ? "" : " (incomplete; resume from the checkpoint)") << "\n";
    for (const auto& t : rep.body["truncations"]) std::cout << "truncation: " << t.dump() << "\n";
    for (const auto& r : rep.records) std::cout << "found: " << r.str() << "\n";
    std::cout << rep.body["verdict"].get<std::string>() << "\nreport hash " << rep.hash << "\n";
    return 0;
}

int cmd_scan(const Globals& g, const SmallZ1Options& o) {
    auto recs = small_z1_scan(o);
    json arr = json::array();
    std::string h;
    for (const auto& r : recs) {
        arr.push_back(to_json(r));
        h += r.str() + "\n";
    }
    if (g.json) {
        for (const auto& r : arr) std::cout << r.dump() << "\n";
        return 0;
    }
    std::cout << h << recs.size() << " solutions\n";
    return 0;
}

int cmd_verify_known(const Globals& g) {
    int bad = 0;
    for (const auto& k : known_solutions()) {
        bool ok = k.verify();
        bad += !ok;
        json j = {{"identity", k.str()}, {"verified", ok}, {"family", k.catalanFamily}};
        emit(g, j, k.str() + (ok ? "  verified" : "  FAILED"));
    }
    return bad ? 1 : 0;
}

int cmd_count(const Globals& g, const std::string& mode, const std::string& ledgerPath, bool noExclusions) {
    auto cfg = load_config(g);
    auto reg = Registry::load(cfg.registryPath);
    auto L = reg.count_remaining(parse_count_mode(mode), !noExclusions);
    if (!ledgerPath.empty()) write_json_file(ledgerPath, L.toJson());
    json j = {{"mode", mode}, {"count", L.count()}, {"hash", L.hash}, {"discrepancy", L.discrepancy}};
    std::string h = std::to_string(L.count());
    if (!L.discrepancy.is_null()) {
        h += "\ndiscrepancy: expected " + L.discrepancy["expected"].dump() + ", computed " + std::to_string(L.count());
        for (const auto& hy : L.discrepancy["hypotheses"])
            h += "\n  hypothesis " + hy["id"].get<std::string>() + " gives " + hy["count"].dump() +
                 (hy["matchesExpected"].get<bool>() ? " (matches)" : "");
        h += "\n  full report in the ledger (--ledger FILE)";
    }
    emit(g, j, h);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized Fermat equation toolkit"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.configPath, "Config JSON (default $GFE_CONFIG or the shipped data/gfe_config.json)");
    app.add_flag("--json", g.json, "JSON-lines output");
    app.add_option("--seed", g.seed, "Seed for randomized factorization");

    std::vector<u64> sig;
    auto* classify = app.add_subcommand("classify", "Euler-characteristic class and registry status of (r,s,t)");
    classify->add_option("exps", sig, "R S T")->expected(3)->required()->check(CLI::Range(2ULL, ~0ULL));

    std::string fam;
    std::vector<std::string> abc;
    auto* curve = app.add_subcommand("curve", "Frey curve invariants");
    curve->add_option("family", fam, "general | twothree | threers | twors")->required();
    curve->add_option("abc", abc, "A B C")->expected(3)->required();

    int kind = 0;
    u64 l = 0;
    std::optional<u64> q;
    auto* ds = app.add_subcommand("dataset", "Ramification dataset");
    ds->add_option("family", fam)->required();
    ds->add_option("kind", kind)->required();
    ds->add_option("l", l)->required();
    ds->add_option("q", q);

    BoundsArgs ba;
    auto* bounds = app.add_subcommand("bounds", "Derived constants and forbidden interval of a scenario");
    bounds->add_option("scenario", ba.scenario, "general-mu6, general-2tor, twothree-mu6, ... or 'file'")->required();
    bounds->add_option("exps", ba.exps, "Exponents of the case");
    bounds->add_option("--situation", ba.situation);
    bounds->add_option("--S", ba.S, "Primes of S")->delimiter(',');
    bounds->add_option("--k", ba.k);
    bounds->add_option("--q", ba.q);
    bounds->add_option("--u0", ba.u0);
    bounds->add_option("--file", ba.file, "BoundConfig JSON (scenario 'file')");

    std::vector<u64> pnums;
    auto* profile = app.add_subcommand("profile", "Structure profile: FAMILY R S [T] L");
    profile->add_option("family", fam, "general | threers | twothree")->required();
    profile->add_option("numbers", pnums, "exponents then l")->required()->expected(2, 4);

    SearchArgs sa;
    auto* search = app.add_subcommand("search", "Run a campaign plan");
    search->add_option("plan", sa.plan)->required();
    search->add_option("--resume", sa.resume, "Resume from this checkpoint");
    search->add_option("--checkpoint", sa.checkpoint, "Write a checkpoint here");
    search->add_option("--shards", sa.shards, "Worker threads")->check(CLI::PositiveNumber);
    search->add_option("--report", sa.report, "Write the full report JSON here");
    search->add_option("--max-tasks", sa.maxTasks);
    search->add_option("--max-seconds", sa.maxSeconds);

    SmallZ1Options so;
    auto* scan = app.add_subcommand("scan-small-z1", "Brute-force x^2 +- y^3 = z^t with small z1");
    scan->add_option("--z1-bound", so.z1Bound);
    scan->add_option("--t-min", so.tMin);
    scan->add_option("--t-max", so.tMax);
    scan->add_option("--height", so.heightBound);
    scan->add_option("--y-bound", so.yBound);

    auto* vk = app.add_subcommand("verify-known", "Re-verify the known solutions");

    std::string mode, ledger;
    bool noExcl = false;
    auto* count = app.add_subcommand("count", "Remaining signatures");
    count->add_option("mode", mode, "ge4 | beal")->required()->check(CLI::IsMember({"ge4", "beal"}));
    count->add_option("--ledger", ledger, "Write the ledger JSON here");
    count->add_flag("--no-exclusions", noExcl, "Disable exclusion rules and divisor closure");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*classify) return cmd_classify(g, sig);
        if (*curve) return cmd_curve(g, fam, abc);
        if (*ds) return cmd_dataset(g, fam, kind, l, q);
        if (*bounds) return cmd_bounds(g, ba);
        if (*profile) return cmd_profile(g, fam, pnums);
        if (*search) return cmd_search(g, sa);
        if (*scan) return cmd_scan(g, so);
        if (*vk) return cmd_verify_known(g);
        if (*count) return cmd_count(g, mode, ledger, noExcl);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
