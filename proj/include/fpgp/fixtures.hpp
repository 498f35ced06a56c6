#pragma once

// Minutiae tables of the published query fingerprint and the three
// candidate fingerprints, as used for the reproduction experiment.

#include "fpgp/minutiae.hpp"

#include <string>
#include <vector>

namespace fpgp::fixtures {

constexpr int kImageCount = 3;

// Query end points with their y coordinates (10 rows).
MinutiaeSet query_endings();
// End points of candidate image 1..3, inputs only (10, 10, 15 rows).
MinutiaeSet image_endings(int image);
// Bifurcations of candidate image 1..3, inputs only (10, 15, 14 rows).
MinutiaeSet image_bifurcations(int image);
// y values the query's bifurcation formula reproduces (15 values).
std::vector<double> query_bifurcation_targets();

// The query's bifurcations are not tabulated on their own; they are taken to
// be image 2's bifurcation inputs paired row by row with the targets above.
MinutiaeSet query_minutiae();
MinutiaeSet image_minutiae(int image);

struct FixtureFile {
    std::string name;
    std::string content;
};

// The eight CSV files, in a fixed order.
std::vector<FixtureFile> files();

} // namespace fpgp::fixtures
