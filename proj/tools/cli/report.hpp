#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace cvbell::cli {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

/// One emitted data set: provenance (command, config, summary) plus a table.
struct Report {
    std::string command;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json summary = nlohmann::json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

enum class Format { csv, json };

struct WriteOptions {
    Format format = Format::csv;
    bool timestamp = true;
};

/// CSV: '#' provenance lines, then a single header line and the rows.
void write_csv(const Report& report, std::ostream& out, bool timestamp);

/// JSON object mirroring the CSV content.
void write_json(const Report& report, std::ostream& out, bool timestamp);

void write_report(const Report& report, std::ostream& out, const WriteOptions& opts);

/// Shortest round-trip decimal text of a double.
std::string format_double(double v);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace cvbell::cli
