#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nonlocal/stats.hpp"

namespace nonlocal::io {

using Json = nlohmann::ordered_json;

// Writes to a sibling temp file then renames over the target; creates parent
// directories as needed.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Shortest round-trip decimal representation ("nan", "inf" for non-finite).
std::string format_double(double v);

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(const std::vector<std::string>& cells);
    void add_row(const std::vector<double>& values);
    std::size_t rows() const { return rows_.size(); }
    // Comma separated, LF terminated, header first.
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// point_x, point_y, estimate, ci_half_width, n, horizon_exhausted_fraction
CsvTable estimate_table();
void add_estimate_row(CsvTable& t, double x, double y, const Estimate& e, double exhausted_fraction);

Json to_json(const Estimate& e);
// Non-finite values are written as strings so the output stays valid JSON.
Json number(double v);
Json numbers(const std::vector<double>& v);

}  // namespace nonlocal::io
