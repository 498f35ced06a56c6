#pragma once

// Generational tree-based genetic programming: ramped half-and-half
// initialization, tournament selection, and cloning / subtree crossover /
// subtree mutation applied until the offspring population is full.

#include "fpgp/expr.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace fpgp {

struct EvolutionConfig {
    std::size_t population_size = 1000;
    std::size_t max_generations = 500;
    double p_clone = 0.05;
    double p_crossover = 0.8;
    double p_mutation = 0.15;
    std::size_t max_depth_initial = 6;
    std::size_t max_depth_overall = 17;
    std::size_t mutation_subtree_depth = 4;
    std::size_t tournament_size = 3;
    double target_fitness = 0.0;
    std::uint64_t rng_seed = 1;
    TerminalSet terminals{{"x"}};
};

// Throws std::invalid_argument describing the first violated constraint.
void validate(const EvolutionConfig& config);

// Flat `key = value` file; keys are the EvolutionConfig field names plus
// `const_min`, `const_max` and `variable_names` (comma separated) for the
// terminal set. `#` starts a comment. Unlisted keys keep their values from
// `base`. Throws ParseError with the 1-based line number.
EvolutionConfig load_config(const std::filesystem::path& path, EvolutionConfig base = {});
EvolutionConfig parse_config(std::string_view text, EvolutionConfig base = {});

struct FitnessCase {
    InputBinding inputs;
    double target = 0.0;
};

struct Individual {
    ProgramTree tree;
    double fitness = 0.0;
};

struct GenerationStats {
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
};

struct RunResult {
    Individual best;
    std::size_t generations_run = 0;
    // Entry 0 describes the initial population, entry g the population after
    // g rounds of breeding.
    std::vector<GenerationStats> history;
};

constexpr double kFitnessCeiling = 1e18;

// Sum of squared errors over `cases`, capped at kFitnessCeiling.
double fitness(const ProgramTree& tree, std::span<const FitnessCase> cases);

// Fitness cases repacked column-major for repeated scoring of many trees.
class FitnessCases {
public:
    explicit FitnessCases(std::span<const FitnessCase> cases);

    std::size_t size() const noexcept { return targets_.size(); }
    std::size_t arity() const noexcept { return arity_; }
    double score(const ProgramTree& tree) const;

private:
    std::size_t arity_ = 0;
    std::vector<double> columns_;
    std::vector<double> targets_;
    mutable std::vector<double> scratch_;
};

std::vector<Individual> init_population(const EvolutionConfig& config, const FitnessCases& cases,
                                        Rng& rng);

// Subtree mutation. Returns `parent` unchanged if the child would exceed
// config.max_depth_overall.
ProgramTree mutate(const ProgramTree& parent, const EvolutionConfig& config, Rng& rng);

// Subtree crossover producing both children. A child deeper than
// `max_depth_overall` is replaced by its own parent.
std::pair<ProgramTree, ProgramTree> crossover(const ProgramTree& first, const ProgramTree& second,
                                              std::size_t max_depth_overall, Rng& rng);

// Tournament of `k` draws with replacement; lowest fitness wins, then fewer
// nodes, then the lower population index. Returns the winner's index.
std::size_t select_index(std::span<const Individual> population, std::size_t k, Rng& rng);
const Individual& select(std::span<const Individual> population, std::size_t k, Rng& rng);

// Called once for the initial population (generation 0) and after every
// replacement.
using GenerationObserver = std::function<void(std::size_t generation, std::span<const Individual>)>;

RunResult run(std::span<const FitnessCase> cases, const EvolutionConfig& config,
              const GenerationObserver& observer = {});

} // namespace fpgp
