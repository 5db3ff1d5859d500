#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "gfe/arith.hpp"
#include "gfe/bounds.hpp"
#include "gfe/catalog.hpp"
#include "gfe/config.hpp"
#include "gfe/frey.hpp"
#include "gfe/search.hpp"

namespace py = pybind11;
using namespace gfe;
using u64 = std::uint64_t;

namespace {

// Python ints cross the boundary as decimal strings; the package wrapper converts.
Int to_int(const std::string& s) {
    Int v;
    if (s.empty() || v.set_str(s, 10) != 0) throw DomainError("not an integer: " + s);
    return v;
}

const ToolConfig& config() {
    static const ToolConfig cfg = ToolConfig::load(ToolConfig::default_path());
    return cfg;
}

const Registry& registry() {
    static const Registry r = Registry::load(config().registryPath);
    return r;
}

std::map<std::string, u64> factor_str(const std::string& n) {
    std::map<std::string, u64> out;
    auto f = factor(to_int(n));
    for (const auto& [p, e] : f.factors()) out[p.get_str()] = e;
    return out;
}

std::string radical_str(const std::string& n) { return radical(factor(to_int(n))).value().get_str(); }

std::pair<std::string, bool> nth_root_str(const std::string& n, unsigned long t) {
    auto r = integer_nth_root(to_int(n), t);
    return {r.root.get_str(), r.exact};
}

std::string curve_json(const std::string& fam, const std::string& a, const std::string& b, const std::string& c) {
    auto inv = invariants(parse_family(fam), to_int(a), to_int(b), to_int(c));
    nlohmann::json bad = nlohmann::json::array();
    for (unsigned p : inv.badPrimes) bad.push_back(p);
    return nlohmann::json{{"family", to_string(inv.family)},
                          {"c4", inv.c4.get_str()},
                          {"delta", rat_to_string(inv.delta)},
                          {"j", rat_to_string(inv.j)},
                          {"N", inv.denomN.value().get_str()},
                          {"badPrimes", bad}}
        .dump();
}

std::string status_json(u64 r, u64 s, u64 t, bool exclusions) {
    auto st = registry().status({r, s, t}, exclusions);
    return nlohmann::json{{"chi", to_string(classify_chi({r, s, t}))},
                          {"status", to_string(st.state)},
                          {"provenance", st.provenance},
                          {"clause", st.clause},
                          {"knownSolutions", st.knownSolutions}}
        .dump();
}

std::string count_json(const std::string& mode, bool exclusions) {
    return registry().count_remaining(parse_count_mode(mode), exclusions).toJson().dump();
}

std::vector<std::pair<std::string, bool>> known() {
    std::vector<std::pair<std::string, bool>> out;
    for (const auto& k : known_solutions()) out.emplace_back(k.str(), k.verify());
    return out;
}

std::pair<std::string, std::string> interval(const std::string& b1, const std::string& b2, const std::string& ceiling) {
    auto r = elimination(rat_from_string(b1), rat_from_string(b2), rat_from_string(ceiling));
    if (!r.applicable) throw DomainError("no forbidden interval: " + r.reason);
    return {rat_to_string(r.lo), rat_to_string(r.hi)};
}

std::vector<std::string> scan(u64 z1Bound, u64 tMin, u64 tMax, u64 height) {
    SmallZ1Options o;
    o.z1Bound = z1Bound;
    o.tMin = tMin;
    o.tMax = tMax;
    o.heightBound = height;
    std::vector<std::string> out;
    {
        py::gil_scoped_release nogil;
        for (const auto& r : small_z1_scan(o)) out.push_back(r.str());
    }
    return out;
}

std::string campaign_json(const std::string& plan, unsigned threads) {
    auto p = CampaignPlan::fromJson(nlohmann::json::parse(plan));
    CampaignOptions o;
    o.threads = threads;
    py::gil_scoped_release nogil;
    return run_campaign(p, config().structure, o).toJson().dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_RuntimeError);

    m.def("factor", &factor_str, py::arg("n"));
    m.def("radical", &radical_str, py::arg("n"));
    m.def("nth_root", &nth_root_str, py::arg("n"), py::arg("t"));
    m.def("curve", &curve_json, py::arg("family"), py::arg("a"), py::arg("b"), py::arg("c"));
    m.def("status", &status_json, py::arg("r"), py::arg("s"), py::arg("t"), py::arg("exclusions") = true);
    m.def("count", &count_json, py::arg("mode"), py::arg("exclusions") = true);
    m.def("known_solutions", &known);
    m.def("forbidden_interval", &interval, py::arg("b1"), py::arg("b2"), py::arg("ceiling"));
    m.def("scan_small_z1", &scan, py::arg("z1_bound"), py::arg("t_min"), py::arg("t_max"), py::arg("height"));
    m.def("run_campaign", &campaign_json, py::arg("plan"), py::arg("threads") = 1);
    m.def("config_path", &ToolConfig::default_path);
}
