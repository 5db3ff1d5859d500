#include "gfe/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gfe/errors.hpp"
#include "gfe/hash.hpp"

#ifndef GFE_DATA_DIR
#define GFE_DATA_DIR "data"
#endif

namespace gfe {

ToolConfig ToolConfig::fromJson(const nlohmann::json& j, const std::string& baseDir) {
    ToolConfig c;
    try {
        c.schemaVersion = j.at("schemaVersion").get<int>();
        if (c.schemaVersion != 1) throw ConfigError("unsupported config schemaVersion " + std::to_string(c.schemaVersion));
        if (j.contains("precision")) {
            const auto& p = j.at("precision");
            c.precision.initialBits = p.value("initial", c.precision.initialBits);
            c.precision.maxBits = p.value("max", c.precision.maxBits);
            if (c.precision.initialBits < 64 || c.precision.maxBits < c.precision.initialBits)
                throw ConfigError("precision needs 64 <= initial <= max");
        }
        if (j.contains("searchBudget")) {
            c.maxTasks = j["searchBudget"].value("maxTasks", static_cast<std::uint64_t>(0));
            c.maxSeconds = j["searchBudget"].value("maxSeconds", 0.0);
        }
        std::string reg = j.value("registryPath", std::string("registry.json"));
        std::filesystem::path rp(reg);
        c.registryPath = rp.is_absolute() ? reg : (std::filesystem::path(baseDir) / rp).string();
        c.outputPath = j.value("outputPath", std::string());
        c.structure = StructureConfig::fromJson(j);
        if (j.contains("volTables")) c.structure.vols = VolTable::fromJson(j.at("volTables"));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config: ") + e.what());
    }
    return c;
}

ToolConfig ToolConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    auto c = fromJson(j, std::filesystem::path(path).parent_path().string());
    c.path = path;
    c.hash = sha256_hex(ss.str());
    return c;
}

std::string ToolConfig::default_path() {
    if (const char* env = std::getenv("GFE_CONFIG"); env && *env) return env;
    return std::string(GFE_DATA_DIR) + "/gfe_config.json";
}

}  // namespace gfe
