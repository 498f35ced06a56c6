#include "fpgp/match.hpp"

#include "fpgp/error.hpp"

#include <cmath>
#include <stdexcept>

namespace fpgp {

TerminalSet ending_terminals(const TerminalSet& constants_from, bool include_target_variable) {
    std::vector<std::string> names = include_target_variable ? std::vector<std::string>{"x", "y", "angle"}
                                                             : std::vector<std::string>{"x", "angle"};
    return TerminalSet(std::move(names), constants_from.const_min(), constants_from.const_max());
}

TerminalSet bifurcation_terminals(const TerminalSet& constants_from, bool include_target_variable) {
    std::vector<std::string> names = include_target_variable
                                         ? std::vector<std::string>{"x", "y", "angle1", "angle2", "angle3"}
                                         : std::vector<std::string>{"x", "angle1", "angle2", "angle3"};
    return TerminalSet(std::move(names), constants_from.const_min(), constants_from.const_max());
}

namespace {

double require_y(const std::optional<int>& y, std::string_view what) {
    if (!y) throw std::invalid_argument(std::string(what) + " lacks a y coordinate");
    return static_cast<double>(*y);
}

} // namespace

InputBinding ending_inputs(const EndPoint& p, bool include_target_variable) {
    if (include_target_variable) return {{static_cast<double>(p.x), require_y(p.y, "ending"), p.angle}};
    return {{static_cast<double>(p.x), p.angle}};
}

InputBinding bifurcation_inputs(const BifurcationPoint& p, bool include_target_variable) {
    if (include_target_variable) {
        return {{static_cast<double>(p.x), require_y(p.y, "bifurcation"), p.angle1, p.angle2, p.angle3}};
    }
    return {{static_cast<double>(p.x), p.angle1, p.angle2, p.angle3}};
}

// --- enrolment -------------------------------------------------------------

namespace {

template <typename Point, typename Inputs>
void train_kind(const std::vector<Point>& points, Inputs inputs, EvolutionConfig config,
                std::optional<ProgramTree>& formula, std::vector<double>& targets, double& rmse) {
    if (points.empty()) return;
    std::vector<FitnessCase> cases;
    cases.reserve(points.size());
    for (const auto& p : points) {
        const double y = require_y(p.y, "query minutia");
        cases.push_back({inputs(p), y});
        targets.push_back(y);
    }
    const auto result = run(cases, config);
    formula = result.best.tree;
    rmse = std::sqrt(fitness(result.best.tree, cases) / static_cast<double>(cases.size()));
}

} // namespace

Template build_template(const MinutiaeSet& query, const EvolutionConfig& evo, const TemplateOptions& options) {
    if (query.empty()) throw std::invalid_argument("build_template: query has no minutiae");
    MinutiaeSet q = query;
    q.canonicalize();
    const bool with_y = options.include_target_variable;

    Template t;
    t.uses_target_variable = with_y;

    EvolutionConfig end_cfg = evo;
    end_cfg.terminals = ending_terminals(evo.terminals, with_y);
    train_kind(q.endings, [with_y](const EndPoint& p) { return ending_inputs(p, with_y); }, end_cfg, t.end_formula,
               t.end_targets, t.end_training_rmse);

    EvolutionConfig bif_cfg = evo;
    bif_cfg.terminals = bifurcation_terminals(evo.terminals, with_y);
    bif_cfg.rng_seed = evo.rng_seed + 1;
    train_kind(q.bifurcations, [with_y](const BifurcationPoint& p) { return bifurcation_inputs(p, with_y); },
               bif_cfg, t.bif_formula, t.bif_targets, t.bif_training_rmse);
    return t;
}

// --- matching --------------------------------------------------------------

Predictions evaluate_candidate(const Template& tmpl, const MinutiaeSet& candidate) {
    MinutiaeSet c = candidate;
    c.canonicalize();
    const bool with_y = tmpl.uses_target_variable;
    Predictions out;
    if (!c.endings.empty()) {
        if (!tmpl.end_formula) throw MissingFormulaError("candidate has endings but the template has no ending formula");
        for (const auto& p : c.endings) out.end.push_back(evaluate(*tmpl.end_formula, ending_inputs(p, with_y)));
    }
    if (!c.bifurcations.empty()) {
        if (!tmpl.bif_formula) {
            throw MissingFormulaError("candidate has bifurcations but the template has no bifurcation formula");
        }
        for (const auto& p : c.bifurcations) {
            out.bif.push_back(evaluate(*tmpl.bif_formula, bifurcation_inputs(p, with_y)));
        }
    }
    return out;
}

double mse(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size()) throw std::invalid_argument("mse: length mismatch");
    if (predictions.empty()) throw std::invalid_argument("mse: no values");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - targets[i];
        sum += e * e;
    }
    return sum / static_cast<double>(predictions.size());
}

namespace {

template <typename Point>
std::vector<double> own_y(const std::vector<Point>& points) {
    std::vector<double> ys;
    for (const auto& p : points) ys.push_back(require_y(p.y, "candidate minutia"));
    return ys;
}

KindReport judge(bool covered, std::size_t query_count, std::span<const double> predictions,
                 std::span<const double> reference, const MatchConfig& config) {
    KindReport r;
    r.covered = covered;
    r.query_count = query_count;
    r.candidate_count = predictions.size();
    if (!covered) return r;

    const auto n = query_count;
    const auto m = predictions.size();
    if (config.count_policy == CountPolicy::Strict) {
        if (n != m) {
            r.passed = false;
            return r;
        }
        r.mse = mse(predictions, reference);
    } else {
        const auto pairs = std::min(predictions.size(), reference.size());
        const double gap = static_cast<double>(n > m ? n - m : m - n);
        r.mse = (pairs > 0 ? mse(predictions.first(pairs), reference.first(pairs)) : 0.0) + gap * config.mse_threshold;
    }
    r.passed = *r.mse <= config.mse_threshold;
    return r;
}

} // namespace

MatchReport decide(const Template& tmpl, const MinutiaeSet& candidate, const MatchConfig& config) {
    if (!(config.mse_threshold >= 0.0)) throw std::invalid_argument("mse_threshold must be non-negative");
    MinutiaeSet c = candidate;
    c.canonicalize();

    MatchReport report;
    report.predictions = evaluate_candidate(tmpl, c);
    if (config.comparison_mode == ComparisonMode::QueryTargets) {
        report.end_reference = tmpl.end_targets;
        report.bif_reference = tmpl.bif_targets;
    } else {
        report.end_reference = own_y(c.endings);
        report.bif_reference = own_y(c.bifurcations);
    }
    report.end = judge(tmpl.end_formula.has_value(), tmpl.end_targets.size(), report.predictions.end,
                       report.end_reference, config);
    report.bif = judge(tmpl.bif_formula.has_value(), tmpl.bif_targets.size(), report.predictions.bif,
                       report.bif_reference, config);
    report.decision = report.end.passed && report.bif.passed ? Decision::Match : Decision::NonMatch;
    return report;
}

std::string_view to_string(Decision d) noexcept { return d == Decision::Match ? "MATCH" : "NON_MATCH"; }

std::string_view to_string(CountPolicy p) noexcept { return p == CountPolicy::Strict ? "strict" : "pair-prefix"; }

std::optional<CountPolicy> parse_count_policy(std::string_view text) noexcept {
    if (text == "strict" || text == "STRICT") return CountPolicy::Strict;
    if (text == "pair-prefix" || text == "PAIR_PREFIX") return CountPolicy::PairPrefix;
    return std::nullopt;
}

std::optional<ComparisonMode> parse_comparison_mode(std::string_view text) noexcept {
    if (text == "query-targets" || text == "QUERY_TARGETS") return ComparisonMode::QueryTargets;
    if (text == "own-y" || text == "OWN_Y") return ComparisonMode::OwnY;
    return std::nullopt;
}

} // namespace fpgp
