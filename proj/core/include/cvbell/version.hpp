#pragma once

#include <string_view>

namespace cvbell {

/// Library version, e.g. "0.3.0".
std::string_view version_string();

}  // namespace cvbell
