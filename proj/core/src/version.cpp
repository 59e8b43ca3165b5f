#include "cvbell/version.hpp"

namespace cvbell {

std::string_view version_string() { return CVBELL_VERSION_STRING; }

}  // namespace cvbell
