#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cvbell/bell.hpp"

namespace cvbell::cli {

/// Malformed flag values; reported with exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Range {
    double min = 0.0;
    double max = 0.0;
    double step = 0.0;
};

struct Axis {
    double min = 0.0;
    double max = 0.0;
    int points = 0;
};

double parse_real(const std::string& text, const std::string& flag);

/// "a:b:step" with a <= b and step > 0.
Range parse_range(const std::string& text);

/// "min:max:points" with min < max and points >= 2.
Axis parse_axis(const std::string& text);

/// Comma-separated reals.
std::vector<double> parse_list(const std::string& text, const std::string& flag);

/// "paper" or "theta,phi,theta_p,phi_p" in radians.
BellAngles parse_angles(const std::string& text);

/// Non-negative integer; scientific notation such as 1e6 is accepted when exact.
std::uint64_t parse_count(const std::string& text, const std::string& flag);

}  // namespace cvbell::cli
