#include "fpgp/error.hpp"
#include "fpgp/evolve.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

namespace fpgp {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
    throw ParseError("config line " + std::to_string(line) + ": " + msg, line, ParseError::Unit::Line);
}

template <typename T>
T parse_integer(std::string_view value, std::size_t line) {
    T out{};
    int base = 10;
    if (value.starts_with("0x") || value.starts_with("0X")) {
        value.remove_prefix(2);
        base = 16;
    }
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out, base);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
        fail(line, "expected an integer, got '" + std::string(value) + "'");
    }
    return out;
}

double parse_real(std::string_view value, std::size_t line) {
    // std::from_chars for double is missing on older toolchains.
    std::string text(value);
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(text, &used);
    } catch (const std::exception&) {
        fail(line, "expected a number, got '" + text + "'");
    }
    if (used != text.size()) fail(line, "expected a number, got '" + text + "'");
    return out;
}

std::vector<std::string> split_names(std::string_view value) {
    std::vector<std::string> names;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto comma = value.find(',', start);
        const auto end = comma == std::string_view::npos ? value.size() : comma;
        names.emplace_back(trim(value.substr(start, end - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return names;
}

} // namespace

EvolutionConfig parse_config(std::string_view text, EvolutionConfig base) {
    EvolutionConfig c = std::move(base);
    auto names = c.terminals.variable_names();
    auto const_min = c.terminals.const_min();
    auto const_max = c.terminals.const_max();

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto eol = text.find('\n', pos);
        auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() : eol + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail(line_no, "expected key=value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));

        if (key == "population_size") c.population_size = parse_integer<std::size_t>(value, line_no);
        else if (key == "max_generations") c.max_generations = parse_integer<std::size_t>(value, line_no);
        else if (key == "p_clone") c.p_clone = parse_real(value, line_no);
        else if (key == "p_crossover") c.p_crossover = parse_real(value, line_no);
        else if (key == "p_mutation") c.p_mutation = parse_real(value, line_no);
        else if (key == "max_depth_initial") c.max_depth_initial = parse_integer<std::size_t>(value, line_no);
        else if (key == "max_depth_overall") c.max_depth_overall = parse_integer<std::size_t>(value, line_no);
        else if (key == "mutation_subtree_depth") c.mutation_subtree_depth = parse_integer<std::size_t>(value, line_no);
        else if (key == "tournament_size") c.tournament_size = parse_integer<std::size_t>(value, line_no);
        else if (key == "target_fitness") c.target_fitness = parse_real(value, line_no);
        else if (key == "rng_seed") c.rng_seed = parse_integer<std::uint64_t>(value, line_no);
        else if (key == "const_min") const_min = parse_integer<std::int32_t>(value, line_no);
        else if (key == "const_max") const_max = parse_integer<std::int32_t>(value, line_no);
        else if (key == "variable_names") names = split_names(value);
        else fail(line_no, "unknown key '" + std::string(key) + "'");
    }

    try {
        c.terminals = TerminalSet(std::move(names), const_min, const_max);
        validate(c);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("config: ") + e.what(), line_no, ParseError::Unit::Line);
    }
    return c;
}

EvolutionConfig load_config(const std::filesystem::path& path, EvolutionConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), std::move(base));
}

} // namespace fpgp
