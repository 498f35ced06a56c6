#include "fpgp/error.hpp"
#include "fpgp/match.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <sstream>

namespace fpgp {

namespace {

constexpr std::string_view kTargetVariableLine = "target_variable: included";

// Shortest text that reads back to the same double.
std::string real(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string real_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += real(values[i]);
    }
    return out;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw ParseError("template line " + std::to_string(line) + ": " + msg, line, ParseError::Unit::Line);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

// Value after `key:` on line `index` (0-based).
std::string_view field(const std::vector<std::string_view>& lines, std::size_t index, std::string_view key) {
    if (index >= lines.size()) fail(index + 1, "missing '" + std::string(key) + ":' line");
    const auto line = lines[index];
    if (!line.starts_with(key) || line.size() <= key.size() || line[key.size()] != ':') {
        fail(index + 1, "expected '" + std::string(key) + ":'");
    }
    return trim(line.substr(key.size() + 1));
}

double parse_real(std::string_view text, std::size_t line) {
    std::string s(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (s.empty() || used != s.size() || !std::isfinite(v)) fail(line, "'" + s + "' is not a number");
    return v;
}

std::vector<double> parse_real_list(std::string_view text, std::size_t line) {
    std::vector<double> out;
    if (text.empty()) return out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        out.push_back(parse_real(trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start)), line));
        if (comma == std::string_view::npos) return out;
        start = comma + 1;
    }
}

std::optional<ProgramTree> parse_formula(std::string_view text, const TerminalSet& terminals, std::size_t line) {
    if (text == "-") return std::nullopt;
    try {
        return parse_prefix(text, terminals);
    } catch (const ParseError& e) {
        fail(line, e.what());
    }
}

} // namespace

std::string format_template(const Template& t) {
    const TerminalSet constants({});
    std::string out;
    out += "end: " + (t.end_formula ? serialize_prefix(*t.end_formula, ending_terminals(constants, t.uses_target_variable)) : "-") + "\n";
    out += "bif: " + (t.bif_formula ? serialize_prefix(*t.bif_formula, bifurcation_terminals(constants, t.uses_target_variable)) : "-") + "\n";
    out += "end_targets: " + real_list(t.end_targets) + "\n";
    out += "bif_targets: " + real_list(t.bif_targets) + "\n";
    out += "end_training_rmse: " + real(t.end_training_rmse) + "\n";
    out += "bif_training_rmse: " + real(t.bif_training_rmse) + "\n";
    if (t.uses_target_variable) out += std::string(kTargetVariableLine) + "\n";
    return out;
}

Template parse_template(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto eol = text.find('\n', pos);
        lines.push_back(trim(text.substr(pos, eol == std::string_view::npos ? eol : eol - pos)));
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();

    Template t;
    if (lines.size() > 6) {
        if (lines.size() > 7 || lines[6] != kTargetVariableLine) fail(7, "unexpected trailing content");
        t.uses_target_variable = true;
    }
    const TerminalSet constants({});
    t.end_formula = parse_formula(field(lines, 0, "end"), ending_terminals(constants, t.uses_target_variable), 1);
    t.bif_formula = parse_formula(field(lines, 1, "bif"), bifurcation_terminals(constants, t.uses_target_variable), 2);
    t.end_targets = parse_real_list(field(lines, 2, "end_targets"), 3);
    t.bif_targets = parse_real_list(field(lines, 3, "bif_targets"), 4);
    t.end_training_rmse = parse_real(field(lines, 4, "end_training_rmse"), 5);
    t.bif_training_rmse = parse_real(field(lines, 5, "bif_training_rmse"), 6);

    if (t.end_formula.has_value() != !t.end_targets.empty()) fail(3, "end targets must accompany an end formula");
    if (t.bif_formula.has_value() != !t.bif_targets.empty()) fail(4, "bif targets must accompany a bif formula");
    if (!t.end_formula && !t.bif_formula) fail(1, "template has no formula");
    if (t.end_training_rmse < 0.0) fail(5, "negative training rmse");
    if (t.bif_training_rmse < 0.0) fail(6, "negative training rmse");
    return t;
}

void save_template(const Template& tmpl, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write template " + path.string());
    out << format_template(tmpl);
    if (!out) throw std::runtime_error("failed writing template " + path.string());
}

Template load_template(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open template " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_template(buffer.str());
}

} // namespace fpgp
