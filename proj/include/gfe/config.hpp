#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "gfe/interval.hpp"
#include "gfe/structure.hpp"

namespace gfe {

struct ToolConfig {
    int schemaVersion = 1;
    PrecisionPolicy precision;
    std::uint64_t maxTasks = 0;
    double maxSeconds = 0;
    std::string registryPath;  // resolved against the config file's directory
    std::string outputPath;
    StructureConfig structure;  // vols, hBounds, twothree caps
    std::string path;
    std::string hash;  // sha256 of the file contents

    static ToolConfig fromJson(const nlohmann::json& j, const std::string& baseDir = ".");
    static ToolConfig load(const std::string& path);
    // $GFE_CONFIG, else the shipped data/gfe_config.json
    static std::string default_path();
};

}  // namespace gfe
