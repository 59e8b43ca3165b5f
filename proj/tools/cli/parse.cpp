#include "cli/parse.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace cvbell::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, sep)) parts.push_back(part);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

}  // namespace

double parse_real(const std::string& text, const std::string& flag) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size() || !std::isfinite(value)) {
        throw UsageError(flag + ": '" + text + "' is not a finite number");
    }
    return value;
}

Range parse_range(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("--r0: expected start:stop:step, got '" + text + "'");
    Range r{parse_real(parts[0], "--r0"), parse_real(parts[1], "--r0"), parse_real(parts[2], "--r0")};
    if (!(r.step > 0.0)) throw UsageError("--r0: step must be positive");
    if (r.min > r.max) throw UsageError("--r0: empty range (start > stop)");
    if (r.min < 0.0) throw UsageError("--r0: amplitudes must be non-negative");
    return r;
}

Axis parse_axis(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("--grid: expected min:max:points, got '" + text + "'");
    Axis a{parse_real(parts[0], "--grid"), parse_real(parts[1], "--grid"), 0};
    const double points = parse_real(parts[2], "--grid");
    if (points != std::floor(points) || points < 2 || points > 100001) {
        throw UsageError("--grid: point count must be an integer in [2, 100001]");
    }
    a.points = static_cast<int>(points);
    if (!(a.min < a.max)) throw UsageError("--grid: min must be below max");
    return a;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    for (const std::string& p : split(text, ',')) out.push_back(parse_real(p, flag));
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

BellAngles parse_angles(const std::string& text) {
    if (trim(text) == "paper") return BellAngles::paper();
    const std::vector<double> v = parse_list(text, "--angles");
    if (v.size() != 4) {
        throw UsageError("--angles: expected 'paper' or theta,phi,theta_p,phi_p");
    }
    BellAngles a;
    a.theta = v[0];
    a.phi = v[1];
    a.theta_p = v[2];
    a.phi_p = v[3];
    return a;
}

std::uint64_t parse_count(const std::string& text, const std::string& flag) {
    const double v = parse_real(text, flag);
    if (v < 0.0 || v != std::floor(v) || v > 9.0e15) {
        throw UsageError(flag + ": '" + text + "' is not a non-negative integer");
    }
    return static_cast<std::uint64_t>(v);
}

}  // namespace cvbell::cli
