#pragma once

// End-to-end reproduction: enrol the query fixture, then match candidate
// images 1..3 against the resulting template.

#include "fpgp/fixtures.hpp"
#include "fpgp/match.hpp"

#include <array>
#include <cstdint>

namespace fpgp {

// Population 1000, 500 generations, tournament size 7; everything else at
// the EvolutionConfig defaults.
EvolutionConfig reproduction_config(std::uint64_t seed);

struct Reproduction {
    Template tmpl;
    std::array<MatchReport, fixtures::kImageCount> images; // images 1..3
};

Reproduction reproduce(const EvolutionConfig& evo, const MatchConfig& match = {});

// image1 NON_MATCH, image2 MATCH, image3 NON_MATCH.
bool matches_published_verdicts(const Reproduction& r);

// A template is usable when its own query could pass the threshold, i.e.
// every trained kind has training MSE within `threshold`.
bool training_usable(const Template& tmpl, double mse_threshold);

} // namespace fpgp
