#include "fpgp/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fpgp {

void validate(const EvolutionConfig& c) {
    if (c.population_size == 0) throw std::invalid_argument("population_size must be positive");
    for (const double p : {c.p_clone, c.p_crossover, c.p_mutation}) {
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("operator probabilities must lie in [0, 1]");
    }
    if (std::fabs(c.p_clone + c.p_crossover + c.p_mutation - 1.0) > 1e-12) {
        throw std::invalid_argument("p_clone + p_crossover + p_mutation must equal 1");
    }
    if (c.max_depth_initial == 0) throw std::invalid_argument("max_depth_initial must be positive");
    if (c.max_depth_overall == 0) throw std::invalid_argument("max_depth_overall must be positive");
    if (c.mutation_subtree_depth == 0) throw std::invalid_argument("mutation_subtree_depth must be positive");
    if (c.max_depth_initial > c.max_depth_overall) {
        throw std::invalid_argument("max_depth_initial exceeds max_depth_overall");
    }
    if (c.tournament_size == 0) throw std::invalid_argument("tournament_size must be positive");
    if (c.tournament_size > c.population_size) {
        throw std::invalid_argument("tournament_size exceeds population_size");
    }
    if (!(c.target_fitness >= 0.0)) throw std::invalid_argument("target_fitness must be non-negative");
}

// --- fitness ---------------------------------------------------------------

FitnessCases::FitnessCases(std::span<const FitnessCase> cases) {
    if (cases.empty()) throw std::invalid_argument("fitness needs at least one case");
    arity_ = cases.front().inputs.values.size();
    const auto n = cases.size();
    columns_.resize(arity_ * n);
    targets_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (cases[i].inputs.values.size() != arity_) {
            throw std::invalid_argument("fitness cases disagree on input arity");
        }
        for (std::size_t v = 0; v < arity_; ++v) columns_[v * n + i] = cases[i].inputs.values[v];
        targets_.push_back(cases[i].target);
    }
    scratch_.resize(n);
}

double FitnessCases::score(const ProgramTree& tree) const {
    evaluate_columns(tree, columns_, targets_.size(), scratch_);
    double sse = 0.0;
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        const double e = scratch_[i] - targets_[i];
        sse += e * e;
    }
    if (!std::isfinite(sse) || sse > kFitnessCeiling) return kFitnessCeiling;
    return sse;
}

double fitness(const ProgramTree& tree, std::span<const FitnessCase> cases) {
    return FitnessCases(cases).score(tree);
}

// --- population ------------------------------------------------------------

std::vector<Individual> init_population(const EvolutionConfig& config, const FitnessCases& cases,
                                        Rng& rng) {
    if (config.population_size == 0) throw std::invalid_argument("population_size must be positive");
    const std::size_t low = std::min<std::size_t>(2, config.max_depth_initial);
    const std::size_t span = config.max_depth_initial - low + 1;

    std::vector<Individual> population;
    population.reserve(config.population_size);
    for (std::size_t i = 0; i < config.population_size; ++i) {
        const std::size_t depth = low + i % span;
        const auto method = (i / span) % 2 == 0 ? InitMethod::Grow : InitMethod::Full;
        auto tree = random_tree(depth, method, config.terminals, rng);
        const double f = cases.score(tree);
        population.push_back({std::move(tree), f});
    }
    return population;
}

// --- operators -------------------------------------------------------------

ProgramTree mutate(const ProgramTree& parent, const EvolutionConfig& config, Rng& rng) {
    const auto point = select_random_node(parent, rng);
    const auto graft = random_tree(config.mutation_subtree_depth, InitMethod::Grow, config.terminals, rng);
    auto child = parent.replace_subtree(point.index, graft);
    if (child.depth() > config.max_depth_overall) return parent;
    return child;
}

std::pair<ProgramTree, ProgramTree> crossover(const ProgramTree& first, const ProgramTree& second,
                                              std::size_t max_depth_overall, Rng& rng) {
    const auto a = select_random_node(first, rng).index;
    const auto b = select_random_node(second, rng).index;
    auto child1 = first.replace_subtree(a, second.subtree(b));
    auto child2 = second.replace_subtree(b, first.subtree(a));
    if (child1.depth() > max_depth_overall) child1 = first;
    if (child2.depth() > max_depth_overall) child2 = second;
    return {std::move(child1), std::move(child2)};
}

namespace {

// Strictly better: lower fitness, then fewer nodes.
bool fitter(const Individual& a, const Individual& b) noexcept {
    if (a.fitness != b.fitness) return a.fitness < b.fitness;
    return a.tree.size() < b.tree.size();
}

} // namespace

std::size_t select_index(std::span<const Individual> population, std::size_t k, Rng& rng) {
    if (population.empty()) throw std::invalid_argument("select: empty population");
    if (k == 0) throw std::invalid_argument("select: tournament size must be positive");
    std::uniform_int_distribution<std::size_t> pick(0, population.size() - 1);
    std::size_t best = pick(rng);
    for (std::size_t i = 1; i < k; ++i) {
        const auto challenger = pick(rng);
        const auto& c = population[challenger];
        const auto& b = population[best];
        if (fitter(c, b) || (!fitter(b, c) && challenger < best)) best = challenger;
    }
    return best;
}

const Individual& select(std::span<const Individual> population, std::size_t k, Rng& rng) {
    return population[select_index(population, k, rng)];
}

// --- run -------------------------------------------------------------------

namespace {

GenerationStats summarize(std::span<const Individual> population) {
    GenerationStats s{population.front().fitness, 0.0};
    for (const auto& ind : population) {
        s.best_fitness = std::min(s.best_fitness, ind.fitness);
        s.mean_fitness += ind.fitness;
    }
    s.mean_fitness /= static_cast<double>(population.size());
    return s;
}

void track_best(std::span<const Individual> population, Individual& best) {
    for (const auto& ind : population) {
        if (fitter(ind, best)) best = ind;
    }
}

} // namespace

RunResult run(std::span<const FitnessCase> cases, const EvolutionConfig& config,
              const GenerationObserver& observer) {
    validate(config);
    const FitnessCases scored(cases);
    if (scored.arity() != config.terminals.arity()) {
        throw std::invalid_argument("fitness case arity " + std::to_string(scored.arity()) +
                                    " does not match the terminal set arity " +
                                    std::to_string(config.terminals.arity()));
    }

    Rng rng(config.rng_seed);
    auto population = init_population(config, scored, rng);
    const auto n = config.population_size;

    RunResult result{population.front(), 0, {}};
    track_best(population, result.best);
    result.history.push_back(summarize(population));
    if (observer) observer(0, population);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Individual> offspring;
    std::vector<bool> needs_score;
    offspring.reserve(n);

    while (result.generations_run < config.max_generations &&
           result.best.fitness > config.target_fitness) {
        offspring.clear();
        needs_score.clear();
        while (offspring.size() < n) {
            const double r = unit(rng);
            if (r < config.p_clone) {
                offspring.push_back(population[select_index(population, config.tournament_size, rng)]);
                needs_score.push_back(false);
            } else if (r < config.p_clone + config.p_crossover) {
                const auto& a = population[select_index(population, config.tournament_size, rng)];
                const auto& b = population[select_index(population, config.tournament_size, rng)];
                auto [first, second] = crossover(a.tree, b.tree, config.max_depth_overall, rng);
                offspring.push_back({std::move(first), 0.0});
                needs_score.push_back(true);
                if (offspring.size() < n) {
                    offspring.push_back({std::move(second), 0.0});
                    needs_score.push_back(true);
                }
            } else {
                const auto& parent = population[select_index(population, config.tournament_size, rng)];
                offspring.push_back({mutate(parent.tree, config, rng), 0.0});
                needs_score.push_back(true);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (needs_score[i]) offspring[i].fitness = scored.score(offspring[i].tree);
        }
        population.swap(offspring);
        ++result.generations_run;
        track_best(population, result.best);
        result.history.push_back(summarize(population));
        if (observer) observer(result.generations_run, population);
    }
    return result;
}

} // namespace fpgp
