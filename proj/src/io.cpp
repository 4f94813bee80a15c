#include "nonlocal/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nonlocal/errors.hpp"

namespace nonlocal::io {

namespace fs = std::filesystem;

void write_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + target.parent_path().string() + ": " + ec.message());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw IoError("csv header is mandatory");
}

void CsvTable::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size()) throw IoError("csv row width does not match header");
    rows_.push_back(cells);
}

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_double(v));
    add_row(cells);
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

CsvTable estimate_table() {
    return CsvTable({"point_x", "point_y", "estimate", "ci_half_width", "n", "horizon_exhausted_fraction"});
}

void add_estimate_row(CsvTable& t, double x, double y, const Estimate& e, double exhausted_fraction) {
    t.add_row({format_double(x), format_double(y), format_double(e.mean), format_double(e.half_width_95),
               std::to_string(e.n), format_double(exhausted_fraction)});
}

Json number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

Json numbers(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

Json to_json(const Estimate& e) {
    return Json{{"mean", number(e.mean)},   {"half_width_95", number(e.half_width_95)},
                {"n", e.n},                 {"lower", number(e.lower)},
                {"upper", number(e.upper)}, {"exact_interval", e.exact}};
}

}  // namespace nonlocal::io
