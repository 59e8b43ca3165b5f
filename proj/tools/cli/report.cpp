#include "cli/report.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <ostream>
#include <stdexcept>

#include "cvbell/version.hpp"

namespace cvbell::cli {

void Report::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw std::logic_error("report row width does not match the column schema");
    }
    rows.push_back(std::move(row));
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

std::string csv_cell(const Cell& c) {
    struct Visitor {
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, c);
}

nlohmann::json json_cell(const Cell& c) {
    return std::visit([](const auto& v) { return nlohmann::json(v); }, c);
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ',';
        out += parts[i];
    }
    return out;
}

}  // namespace

void write_csv(const Report& report, std::ostream& out, bool timestamp) {
    out << "# cvbell " << version_string() << '\n';
    out << "# command: " << report.command << '\n';
    out << "# config: " << report.config.dump() << '\n';
    if (timestamp) out << "# generated: " << utc_timestamp() << '\n';
    if (!report.summary.empty()) out << "# summary: " << report.summary.dump() << '\n';
    out << "# columns: " << report.columns.size() << '\n';
    out << join(report.columns) << '\n';
    for (const auto& row : report.rows) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (const Cell& c : row) cells.push_back(csv_cell(c));
        out << join(cells) << '\n';
    }
}

void write_json(const Report& report, std::ostream& out, bool timestamp) {
    nlohmann::json doc;
    doc["program"] = "cvbell";
    doc["version"] = version_string();
    doc["command"] = report.command;
    doc["config"] = report.config;
    if (timestamp) doc["generated"] = utc_timestamp();
    doc["summary"] = report.summary;
    doc["columns"] = report.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (const Cell& c : row) r.push_back(json_cell(c));
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << '\n';
}

void write_report(const Report& report, std::ostream& out, const WriteOptions& opts) {
    if (opts.format == Format::json) {
        write_json(report, out, opts.timestamp);
    } else {
        write_csv(report, out, opts.timestamp);
    }
}

}  // namespace cvbell::cli
