#pragma once

#include <string>

namespace gfe {

std::string sha256_hex(const std::string& data);

}  // namespace gfe
