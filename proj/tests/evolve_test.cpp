#include "fpgp/error.hpp"
#include "fpgp/evolve.hpp"
#include "fpgp/fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace fpgp;

namespace {

const TerminalSet kX{{"x"}};

ProgramTree parse(std::string_view s, const TerminalSet& t = kX) { return parse_prefix(s, t); }

std::vector<FitnessCase> line_cases(double slope, double offset) {
    std::vector<FitnessCase> cases;
    for (int x = 1; x <= 10; ++x) cases.push_back({InputBinding{{double(x)}}, slope * x + offset});
    return cases;
}

EvolutionConfig small_config(std::uint64_t seed) {
    EvolutionConfig c;
    c.population_size = 200;
    c.max_generations = 50;
    c.rng_seed = seed;
    return c;
}

} // namespace

TEST(Fitness, Examples) {
    const auto cases = line_cases(1.0, 3.0);
    EXPECT_EQ(fitness(parse("(+ x 3)"), cases), 0.0);

    const std::vector<FitnessCase> one{{InputBinding{{2.0}}, 5.0}};
    EXPECT_EQ(fitness(parse("x"), one), 9.0);

    EXPECT_THROW(fitness(parse("x"), std::vector<FitnessCase>{}), std::invalid_argument);
}

TEST(Fitness, ZeroTreeOnQueryTargets) {
    std::vector<FitnessCase> cases;
    double oracle = 0.0;
    for (const auto& e : fixtures::query_endings().endings) {
        cases.push_back({InputBinding{{double(e.x)}}, double(*e.y)});
        oracle += double(*e.y) * double(*e.y);
    }
    ASSERT_EQ(cases.size(), 10u);
    EXPECT_EQ(fitness(parse("0"), cases), oracle);
    EXPECT_EQ(oracle, 139954.0);
}

TEST(Fitness, Ceiling) {
    const std::vector<FitnessCase> cases(20, FitnessCase{InputBinding{{1e12}}, -1e12});
    EXPECT_EQ(fitness(parse("x"), cases), kFitnessCeiling);
}

TEST(Population, SizeDepthAndDeterminism) {
    auto c = small_config(9);
    c.population_size = 10;
    const auto cases = line_cases(2, 1);
    const FitnessCases scored(cases);
    Rng a(4), b(4);
    const auto p = init_population(c, scored, a);
    const auto q = init_population(c, scored, b);
    ASSERT_EQ(p.size(), 10u);
    for (std::size_t i = 0; i < p.size(); ++i) {
        EXPECT_LE(p[i].tree.depth(), c.max_depth_initial);
        EXPECT_EQ(p[i].tree, q[i].tree);
        EXPECT_EQ(p[i].fitness, fitness(p[i].tree, cases));
    }
    c.population_size = 0;
    EXPECT_THROW(init_population(c, scored, a), std::invalid_argument);
}

TEST(Population, RampedHalfAndHalf) {
    auto c = small_config(1);
    c.population_size = 100;
    const auto cases = line_cases(1, 0);
    Rng rng(12);
    const auto p = init_population(c, FitnessCases(cases), rng);
    std::vector<int> full_at(c.max_depth_initial + 1, 0);
    for (const auto& ind : p) {
        // a full binary tree of depth d has 2^d - 1 nodes
        const auto d = ind.tree.depth();
        if (ind.tree.size() == (std::size_t{1} << d) - 1) ++full_at[d];
    }
    for (std::size_t d = 2; d <= c.max_depth_initial; ++d) EXPECT_GE(full_at[d], 5) << d;
}

TEST(Mutate, MatchesManualSplice) {
    const auto c = small_config(1);
    const auto parent = parse("(+ (* x 2) (- x 7))");
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Rng rng(seed);
        Rng copy = rng;
        const auto child = mutate(parent, c, rng);
        const auto point = select_random_node(parent, copy);
        const auto graft = random_tree(c.mutation_subtree_depth, InitMethod::Grow, c.terminals, copy);
        EXPECT_EQ(child, parent.replace_subtree(point.index, graft));
        EXPECT_LE(graft.depth(), 4u);
        // nodes before the point are untouched
        for (std::size_t i = 0; i < point.index; ++i) EXPECT_EQ(child.nodes()[i], parent.nodes()[i]);
    }
}

TEST(Mutate, LeafParentBecomesGraft) {
    const auto c = small_config(1);
    Rng rng(77), copy(77);
    const auto child = mutate(parse("x"), c, rng);
    select_random_node(parse("x"), copy);
    EXPECT_EQ(child, random_tree(4, InitMethod::Grow, c.terminals, copy));
}

TEST(Mutate, DepthFallback) {
    auto c = small_config(1);
    c.max_depth_initial = 2;
    c.max_depth_overall = 2;
    c.mutation_subtree_depth = 4;
    const auto parent = parse("(+ x 1)");
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Rng rng(seed);
        const auto child = mutate(parent, c, rng);
        EXPECT_LE(child.depth(), 2u);
    }
}

TEST(Mutate, Golden) {
    const auto c = small_config(1);
    Rng rng(42);
    EXPECT_EQ(serialize_prefix(mutate(parse("(+ x 1)"), c, rng), kX), "(+ x (/ (/ (* x x) (+ 4 7)) -1))");
}

TEST(Crossover, RootSwap) {
    Rng rng(3);
    const auto [a, b] = crossover(parse("x"), parse("7"), 17, rng);
    EXPECT_EQ(a, parse("7"));
    EXPECT_EQ(b, parse("x"));
}

TEST(Crossover, SelfSwapAndConservation) {
    const auto p1 = parse("(+ (* x 2) (- x (/ 7 x)))");
    const auto p2 = parse("(- 3 (* x x))");
    int self_hits = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        Rng rng(seed), copy(seed);
        const auto [c1, c2] = crossover(p1, p2, 17, rng);
        EXPECT_EQ(c1.size() + c2.size(), p1.size() + p2.size());
        const auto a = select_random_node(p1, copy).index;
        const auto b = select_random_node(p2, copy).index;
        EXPECT_EQ(c1, p1.replace_subtree(a, p2.subtree(b)));
        EXPECT_EQ(c2, p2.replace_subtree(b, p1.subtree(a)));

        Rng r2(seed), peek(seed);
        const auto [s1, s2] = crossover(p1, p1, 17, r2);
        if (select_random_node(p1, peek) == select_random_node(p1, peek)) {
            ++self_hits;
            EXPECT_EQ(s1, p1);
            EXPECT_EQ(s2, p1);
        }
    }
    EXPECT_GT(self_hits, 0);
}

TEST(Crossover, DepthCap) {
    const auto deep = parse("(+ (+ (+ (+ x 1) 1) 1) 1)");
    const auto shallow = parse("(- x 2)");
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        Rng rng(seed);
        const auto [c1, c2] = crossover(shallow, deep, 3, rng);
        EXPECT_TRUE(c1.depth() <= 3 || c1 == shallow);
        EXPECT_TRUE(c2.depth() <= 3 || c2 == deep);
        EXPECT_NE(c1.depth(), 4u);
    }
}

TEST(Select, PopulationOfOne) {
    const std::vector<Individual> pop{{parse("x"), 4.0}};
    Rng rng(1);
    EXPECT_EQ(&select(pop, 5, rng), &pop[0]);
    EXPECT_THROW(select_index(std::vector<Individual>{}, 3, rng), std::invalid_argument);
    EXPECT_THROW(select_index(pop, 0, rng), std::invalid_argument);
}

TEST(Select, ParsimonyTieBreak) {
    const std::vector<Individual> pop{{parse("(+ (* x 2) (- x 1))"), 1.0}, {parse("(+ x 1)"), 1.0}};
    ASSERT_EQ(pop[0].tree.size(), 7u);
    ASSERT_EQ(pop[1].tree.size(), 3u);
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        Rng copy = rng;
        std::uniform_int_distribution<std::size_t> pick(0, 1);
        const bool both = pick(copy) != pick(copy);
        const auto w = select_index(pop, 2, rng);
        if (both) {
            EXPECT_EQ(w, 1u);
        }
    }
}

TEST(Select, IndexTieBreak) {
    const std::vector<Individual> pop{{parse("x"), 2.0}, {parse("1"), 2.0}, {parse("x"), 9.0}};
    Rng rng(5);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(select_index(pop, 40, rng), 0u);
}

TEST(Select, FullSizeTournamentFrequency) {
    std::vector<Individual> pop;
    for (int i = 0; i < 10; ++i) pop.push_back({parse("x"), double(10 - i)});
    Rng rng(31337);
    const int trials = 100000;
    int best = 0;
    for (int i = 0; i < trials; ++i) best += select_index(pop, 10, rng) == 9;
    const double oracle = 1.0 - std::pow(0.9, 10);
    EXPECT_NEAR(best / double(trials), oracle, 0.02);
}

TEST(Run, ZeroGenerations) {
    auto c = small_config(6);
    c.max_generations = 0;
    const auto cases = line_cases(3, -2);
    const auto r = run(cases, c);
    EXPECT_EQ(r.generations_run, 0u);
    ASSERT_EQ(r.history.size(), 1u);

    Rng rng(c.rng_seed);
    const auto pop = init_population(c, FitnessCases(cases), rng);
    const auto min = std::min_element(pop.begin(), pop.end(),
                                      [](const auto& a, const auto& b) { return a.fitness < b.fitness; });
    EXPECT_EQ(r.best.fitness, min->fitness);
    EXPECT_EQ(r.history[0].best_fitness, min->fitness);
}

TEST(Run, Invariants) {
    const auto c = small_config(21);
    auto cases = line_cases(0.5, 0);
    cases[3].inputs.values[0] = 0.0;
    std::size_t calls = 0;
    const auto r = run(cases, c, [&](std::size_t g, std::span<const Individual> pop) {
        EXPECT_EQ(g, calls++);
        ASSERT_EQ(pop.size(), c.population_size);
        for (const auto& ind : pop) {
            ASSERT_LE(ind.tree.depth(), c.max_depth_overall);
            ASSERT_TRUE(std::isfinite(ind.fitness));
            ASSERT_EQ(ind.fitness, fitness(ind.tree, cases));
        }
    });
    EXPECT_EQ(calls, r.generations_run + 1);
    EXPECT_EQ(r.history.size(), r.generations_run + 1);
    double so_far = INFINITY;
    for (const auto& h : r.history) {
        EXPECT_LE(h.best_fitness, h.mean_fitness);
        so_far = std::min(so_far, h.best_fitness);
    }
    EXPECT_EQ(r.best.fitness, so_far);
    EXPECT_EQ(r.best.fitness, fitness(r.best.tree, cases));
}

TEST(Run, Determinism) {
    const auto cases = line_cases(1.5, 4);
    const auto a = run(cases, small_config(13));
    const auto b = run(cases, small_config(13));
    EXPECT_EQ(a.best.tree, b.best.tree);
    EXPECT_EQ(a.best.fitness, b.best.fitness);
    EXPECT_EQ(a.generations_run, b.generations_run);
    ASSERT_EQ(a.history.size(), b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        EXPECT_EQ(a.history[i].best_fitness, b.history[i].best_fitness);
        EXPECT_EQ(a.history[i].mean_fitness, b.history[i].mean_fitness);
    }
}

TEST(Run, StopsAtTarget) {
    auto c = small_config(2);
    c.target_fitness = 1e9;
    const auto r = run(line_cases(1, 0), c);
    EXPECT_EQ(r.generations_run, 0u);
}

TEST(Run, PlantedFormula) {
    const auto cases = line_cases(1, 3);
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto c = small_config(seed);
        c.population_size = 500;
        hits += run(cases, c).best.fitness < 1e-6;
    }
    EXPECT_GE(hits, 4);
}

TEST(Run, RejectsBadInput) {
    auto c = small_config(1);
    EXPECT_THROW(run(std::vector<FitnessCase>{}, c), std::invalid_argument);
    const std::vector<FitnessCase> two{{InputBinding{{1.0, 2.0}}, 0.0}};
    EXPECT_THROW(run(two, c), std::invalid_argument);
    c.p_clone = 0.5;
    EXPECT_THROW(run(line_cases(1, 0), c), std::invalid_argument);
}

TEST(Config, ParsesKeys) {
    const auto c = parse_config("# tuned\n"
                                "population_size = 64\n"
                                "max_generations=7  # short\n"
                                "p_clone = 0.1\np_crossover = 0.7\np_mutation = 0.2\n"
                                "tournament_size = 4\n"
                                "rng_seed = 0x1F\n"
                                "variable_names = x, angle\n"
                                "const_min = -3\nconst_max = 5\n");
    EXPECT_EQ(c.population_size, 64u);
    EXPECT_EQ(c.max_generations, 7u);
    EXPECT_EQ(c.p_clone, 0.1);
    EXPECT_EQ(c.tournament_size, 4u);
    EXPECT_EQ(c.rng_seed, 31u);
    EXPECT_EQ(c.terminals, TerminalSet({"x", "angle"}, -3, 5));
    EXPECT_EQ(c.max_depth_overall, 17u);
}

TEST(Config, KeepsBase) {
    EvolutionConfig base;
    base.tournament_size = 7;
    EXPECT_EQ(parse_config("rng_seed = 5", base).tournament_size, 7u);
}

TEST(Config, Errors) {
    const auto line = [](std::string_view text) -> std::size_t {
        try {
            parse_config(text);
        } catch (const ParseError& e) {
            EXPECT_EQ(e.unit(), ParseError::Unit::Line);
            return e.position();
        }
        ADD_FAILURE() << text;
        return 0;
    };
    EXPECT_EQ(line("population_size = 5\nbogus = 1\n"), 2u);
    EXPECT_EQ(line("\n\nmax_generations = ten\n"), 3u);
    EXPECT_EQ(line("tournament_size\n"), 1u);
    EXPECT_GT(line("p_clone = 0.5\n"), 0u);
    EXPECT_GT(line("max_depth_initial = 20\n"), 0u);
}
