#include "fpgp/error.hpp"
#include "fpgp/minutiae.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fpgp {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw ParseError("csv line " + std::to_string(line) + ": " + msg, line, ParseError::Unit::Line);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) return cells;
        start = comma + 1;
    }
}

struct Row {
    std::size_t line;
    std::vector<std::string_view> cells;
};

struct Table {
    std::map<std::string, std::size_t, std::less<>> columns;
    std::vector<Row> rows;
};

Table read_table(std::string_view text) {
    Table t;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header = true;
    while (pos < text.size()) {
        const auto eol = text.find('\n', pos);
        const auto line = trim(text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        ++line_no;
        if (line.empty()) continue;
        auto cells = split(line);
        if (header) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (!t.columns.emplace(std::string(cells[i]), i).second) {
                    fail(line_no, "duplicate column '" + std::string(cells[i]) + "'");
                }
            }
            header = false;
            continue;
        }
        if (cells.size() != t.columns.size()) {
            fail(line_no, "row has " + std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(t.columns.size()));
        }
        t.rows.push_back({line_no, std::move(cells)});
    }
    if (header) fail(1, "missing header row");
    return t;
}

double parse_number(std::string_view cell, const Row& row, std::string_view column) {
    // Accepts a leading-dot form such as ".52" and "-.52" as well.
    std::string text(cell);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (text.empty() || used != text.size() || !std::isfinite(v)) {
        fail(row.line, "column '" + std::string(column) + "': '" + text + "' is not a number");
    }
    return v;
}

int parse_pixel(std::string_view cell, const Row& row, std::string_view column) {
    const double v = parse_number(cell, row, column);
    if (v != std::floor(v) || std::fabs(v) > 1e9) {
        fail(row.line, "column '" + std::string(column) + "': '" + std::string(cell) + "' is not a pixel coordinate");
    }
    return static_cast<int>(v);
}

double parse_angle(std::string_view cell, const Row& row, std::string_view column) {
    const double v = round_angle(parse_number(cell, row, column));
    if (!(v > -3.15 && v <= 3.15)) {
        fail(row.line, "column '" + std::string(column) + "': angle " + std::string(cell) + " outside (-pi, pi]");
    }
    return v;
}

std::string format_angle(double a) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", round_angle(a));
    return buf;
}

std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

MinutiaeSet parse_minutiae_csv(std::string_view text) {
    const auto table = read_table(text);
    const auto has = [&](std::string_view c) { return table.columns.find(c) != table.columns.end(); };
    const bool bifurcation = has("angle1") || has("angle2") || has("angle3");
    const std::vector<std::string_view> required = bifurcation
                                                       ? std::vector<std::string_view>{"x", "angle1", "angle2", "angle3"}
                                                       : std::vector<std::string_view>{"x", "angle"};
    for (const auto c : required) {
        if (!has(c)) fail(1, "missing column '" + std::string(c) + "'");
    }
    for (const auto& [name, index] : table.columns) {
        if (name != "y" && std::find(required.begin(), required.end(), name) == required.end()) {
            fail(1, "unexpected column '" + name + "'");
        }
    }

    const auto col = [&](std::string_view name) { return table.columns.find(name)->second; };
    MinutiaeSet set;
    for (const auto& row : table.rows) {
        const int x = parse_pixel(row.cells[col("x")], row, "x");
        std::optional<int> y;
        if (has("y") && !row.cells[col("y")].empty()) y = parse_pixel(row.cells[col("y")], row, "y");
        if (bifurcation) {
            set.bifurcations.push_back({x, y, parse_angle(row.cells[col("angle1")], row, "angle1"),
                                        parse_angle(row.cells[col("angle2")], row, "angle2"),
                                        parse_angle(row.cells[col("angle3")], row, "angle3")});
        } else {
            set.endings.push_back({x, y, parse_angle(row.cells[col("angle")], row, "angle")});
        }
    }
    set.canonicalize();
    return set;
}

MinutiaeSet load_minutiae_csv(const std::filesystem::path& path) { return parse_minutiae_csv(read_file(path)); }

std::string format_minutiae_csv(const MinutiaeSet& set, MinutiaKind kind, bool always_y) {
    const auto y_cell = [](const std::optional<int>& y) { return y ? std::to_string(*y) : std::string(); };
    std::string out;
    if (kind == MinutiaKind::Ending) {
        const bool with_y =
            always_y || std::any_of(set.endings.begin(), set.endings.end(), [](const auto& e) { return e.y.has_value(); });
        out = with_y ? "x,angle,y\n" : "x,angle\n";
        for (const auto& e : set.endings) {
            out += std::to_string(e.x) + "," + format_angle(e.angle);
            if (with_y) out += "," + y_cell(e.y);
            out += "\n";
        }
    } else {
        const bool with_y =
            always_y ||
            std::any_of(set.bifurcations.begin(), set.bifurcations.end(), [](const auto& b) { return b.y.has_value(); });
        out = with_y ? "x,angle1,angle2,angle3,y\n" : "x,angle1,angle2,angle3\n";
        for (const auto& b : set.bifurcations) {
            out += std::to_string(b.x) + "," + format_angle(b.angle1) + "," + format_angle(b.angle2) + "," +
                   format_angle(b.angle3);
            if (with_y) out += "," + y_cell(b.y);
            out += "\n";
        }
    }
    return out;
}

void save_minutiae_csv(const MinutiaeSet& set, MinutiaKind kind, const std::filesystem::path& path, bool always_y) {
    write_file(path, format_minutiae_csv(set, kind, always_y));
}

std::vector<double> parse_targets_csv(std::string_view text) {
    const auto table = read_table(text);
    const auto it = table.columns.find("y");
    if (it == table.columns.end()) fail(1, "missing column 'y'");
    if (table.columns.size() != 1) fail(1, "targets file must hold the single column 'y'");
    std::vector<double> targets;
    for (const auto& row : table.rows) targets.push_back(parse_number(row.cells[it->second], row, "y"));
    return targets;
}

std::vector<double> load_targets_csv(const std::filesystem::path& path) { return parse_targets_csv(read_file(path)); }

std::string format_targets_csv(const std::vector<double>& targets) {
    std::string out = "y\n";
    for (const double t : targets) out += format_real(t) + "\n";
    return out;
}

} // namespace fpgp
