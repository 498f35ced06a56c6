#include "fpgp/experiment.hpp"

namespace fpgp {

EvolutionConfig reproduction_config(std::uint64_t seed) {
    EvolutionConfig c;
    c.population_size = 1000;
    c.max_generations = 500;
    c.tournament_size = 7;
    c.rng_seed = seed;
    return c;
}

Reproduction reproduce(const EvolutionConfig& evo, const MatchConfig& match) {
    Reproduction r{build_template(fixtures::query_minutiae(), evo), {}};
    for (int i = 1; i <= fixtures::kImageCount; ++i) {
        r.images[static_cast<std::size_t>(i - 1)] = decide(r.tmpl, fixtures::image_minutiae(i), match);
    }
    return r;
}

bool matches_published_verdicts(const Reproduction& r) {
    return r.images[0].decision == Decision::NonMatch && r.images[1].decision == Decision::Match &&
           r.images[2].decision == Decision::NonMatch;
}

bool training_usable(const Template& tmpl, double mse_threshold) {
    const auto ok = [mse_threshold](bool trained, double rmse) { return !trained || rmse * rmse <= mse_threshold; };
    return ok(tmpl.end_formula.has_value(), tmpl.end_training_rmse) &&
           ok(tmpl.bif_formula.has_value(), tmpl.bif_training_rmse);
}

} // namespace fpgp
