#pragma once

// Fingerprint templates (one evolved formula per minutia kind) and
// mean-squared-error matching of candidate minutiae against them.

#include "fpgp/evolve.hpp"
#include "fpgp/minutiae.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpgp {

struct TemplateOptions {
    // Admit the target y itself as a formula input. Off by default: with y
    // available the exact formula `y` is trivially found and every candidate
    // carrying the same y values matches.
    bool include_target_variable = false;
};

TerminalSet ending_terminals(const TerminalSet& constants_from, bool include_target_variable = false);
TerminalSet bifurcation_terminals(const TerminalSet& constants_from, bool include_target_variable = false);

InputBinding ending_inputs(const EndPoint& p, bool include_target_variable = false);
InputBinding bifurcation_inputs(const BifurcationPoint& p, bool include_target_variable = false);

struct Template {
    std::optional<ProgramTree> end_formula;
    std::optional<ProgramTree> bif_formula;
    std::vector<double> end_targets; // query y values, canonical order
    std::vector<double> bif_targets;
    double end_training_rmse = 0.0;
    double bif_training_rmse = 0.0;
    bool uses_target_variable = false;

    friend bool operator==(const Template&, const Template&) = default;
};

// One GP run per minutia kind present in `query` (seed and seed + 1).
// Throws std::invalid_argument for an empty query or a query point without y.
Template build_template(const MinutiaeSet& query, const EvolutionConfig& evo, const TemplateOptions& options = {});

struct Predictions {
    std::vector<double> end;
    std::vector<double> bif;
};

// Formula outputs for the candidate's minutiae in canonical order. Throws
// MissingFormulaError if the candidate has a kind the template does not cover.
Predictions evaluate_candidate(const Template& tmpl, const MinutiaeSet& candidate);

// Mean squared difference. Throws std::invalid_argument on empty input or
// unequal lengths.
double mse(std::span<const double> predictions, std::span<const double> targets);

enum class CountPolicy { Strict, PairPrefix };
enum class ComparisonMode { QueryTargets, OwnY };
enum class Decision { Match, NonMatch };

struct MatchConfig {
    double mse_threshold = 25.0; // pixels^2
    CountPolicy count_policy = CountPolicy::Strict;
    ComparisonMode comparison_mode = ComparisonMode::QueryTargets;
};

struct KindReport {
    bool covered = false; // the template has a formula for this kind
    std::size_t query_count = 0;
    std::size_t candidate_count = 0;
    // Empty when the kind failed on point counts alone (STRICT).
    std::optional<double> mse;
    bool passed = true;
};

struct MatchReport {
    Predictions predictions;
    std::vector<double> end_reference; // what predictions were compared against
    std::vector<double> bif_reference;
    KindReport end;
    KindReport bif;
    Decision decision = Decision::NonMatch;
};

MatchReport decide(const Template& tmpl, const MinutiaeSet& candidate, const MatchConfig& config = {});

std::string_view to_string(Decision d) noexcept;
std::string_view to_string(CountPolicy p) noexcept;
std::optional<CountPolicy> parse_count_policy(std::string_view text) noexcept;
std::optional<ComparisonMode> parse_comparison_mode(std::string_view text) noexcept;

// Line-oriented template file:
//   end: <prefix formula | ->
//   bif: <prefix formula | ->
//   end_targets: <comma separated reals>
//   bif_targets: <comma separated reals>
//   end_training_rmse: <real>
//   bif_training_rmse: <real>
// Reals are written in their shortest exact form. Parse failures throw ParseError with the
// 1-based line number.
std::string format_template(const Template& tmpl);
Template parse_template(std::string_view text);
void save_template(const Template& tmpl, const std::filesystem::path& path);
Template load_template(const std::filesystem::path& path);

} // namespace fpgp
