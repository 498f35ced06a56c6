#include "fpgp/fixtures.hpp"

#include <array>
#include <span>
#include <stdexcept>

namespace fpgp::fixtures {

namespace {

struct EndRow {
    int x;
    double angle;
};

struct BifRow {
    int x;
    double angle1, angle2, angle3;
};

constexpr std::array<EndRow, 10> kQueryEnd{{{147, -1.05}, {40, 1.57}, {133, -1.57}, {50, 1.57}, {63, 1.57},
                                           {49, -2.09}, {67, 2.36}, {119, -2.09}, {88, 1.05}, {126, 1.05}}};
constexpr std::array<int, 10> kQueryEndY{48, 101, 111, 112, 115, 117, 124, 127, 143, 154};

constexpr std::array<EndRow, 10> kImage1End{{{86, -2.62}, {158, -.52}, {156, -.52}, {93, .52}, {111, .79},
                                            {24, -2.36}, {112, .52}, {161, -2.09}, {103, .52}, {151, .52}}};
constexpr std::array<EndRow, 10> kImage2End = kQueryEnd;
constexpr std::array<EndRow, 15> kImage3End{{{104, 3.14}, {98, 0}, {121, 2.09}, {65, 2.36}, {130, -2.09},
                                            {133, 1.57}, {88, -2.09}, {107, 1.05}, {128, -1.57}, {144, -1.57},
                                            {69, 1.57}, {99, -2.62}, {73, -2.09}, {62, 0.79}, {120, 2.62}}};

constexpr std::array<BifRow, 10> kImage1Bif{{{109, 3.14, .79, -.52},
                                            {96, 2.62, -2.09, 0},
                                            {149, 2.62, -1.57, 0},
                                            {110, 2.62, -2.09, 0},
                                            {122, 2.62, -1.57, 0},
                                            {80, 3.14, -1.57, 1.05},
                                            {116, 2.36, -2.62, -.79},
                                            {171, 2.36, -2.36, -.79},
                                            {154, -2.62, 1.57, -1.05},
                                            {167, -2.62, 1.05, -.52}}};
constexpr std::array<BifRow, 15> kImage2Bif{{{109, 3.14, -1.05, .52},
                                            {74, 2.09, -2.09, .52},
                                            {98, -2.62, 1.05, -.52},
                                            {100, 3.14, 1.57, -1.05},
                                            {107, -2.36, 1.57, -.79},
                                            {39, -2.36, 1.05, -.79},
                                            {45, -2.09, 1.57, 0},
                                            {92, -2.36, 1.05, -.79},
                                            {39, 3.14, -1.57, 1.05},
                                            {71, -2.36, -1.05, .79},
                                            {64, 3.14, 1.05, -1.05},
                                            {128, -2.36, 1.05, -1.05},
                                            {92, -2.36, 1.05, -1.05},
                                            {48, 2.09, -2.09, 0},
                                            {59, -2.36, 1.57, 0}}};
constexpr std::array<BifRow, 14> kImage3Bif{{{52, 2.09, -2.09, .79},
                                            {88, -2.62, 1.05, 0},
                                            {132, -2.36, 2.09, -1.05},
                                            {75, -2.62, 1.05, -1.05},
                                            {106, -2.36, 1.57, -.79},
                                            {123, 2.09, -1.57, 1.05},
                                            {115, 3.14, 1.05, -.79},
                                            {108, -2.62, -1.05, .79},
                                            {66, -2.62, 1.05, -1.05},
                                            {62, -2.62, -1.05, .79},
                                            {137, 2.36, .79, -.79},
                                            {77, 2.09, -2.09, 0},
                                            {75, -2.09, 1.57, 0},
                                            {78, -2.62, -1.05, .79}}};

constexpr std::array<int, 15> kQueryBifTargets{50, 55, 60, 82, 89, 94, 101, 103, 110, 119, 120, 135, 138, 152, 179};

MinutiaeSet endings(std::span<const EndRow> rows) {
    MinutiaeSet s;
    for (const auto& r : rows) s.endings.push_back({r.x, std::nullopt, round_angle(r.angle)});
    return s;
}

MinutiaeSet bifurcations(std::span<const BifRow> rows) {
    MinutiaeSet s;
    for (const auto& r : rows) {
        s.bifurcations.push_back({r.x, std::nullopt, round_angle(r.angle1), round_angle(r.angle2), round_angle(r.angle3)});
    }
    return s;
}

void check_image(int image) {
    if (image < 1 || image > kImageCount) throw std::out_of_range("fixture image index must be 1..3");
}

} // namespace

MinutiaeSet query_endings() {
    auto s = endings(kQueryEnd);
    for (std::size_t i = 0; i < s.endings.size(); ++i) s.endings[i].y = kQueryEndY[i];
    return s;
}

MinutiaeSet image_endings(int image) {
    check_image(image);
    switch (image) {
    case 1: return endings(kImage1End);
    case 2: return endings(kImage2End);
    default: return endings(kImage3End);
    }
}

MinutiaeSet image_bifurcations(int image) {
    check_image(image);
    switch (image) {
    case 1: return bifurcations(kImage1Bif);
    case 2: return bifurcations(kImage2Bif);
    default: return bifurcations(kImage3Bif);
    }
}

std::vector<double> query_bifurcation_targets() { return {kQueryBifTargets.begin(), kQueryBifTargets.end()}; }

MinutiaeSet query_minutiae() {
    auto s = query_endings();
    s.bifurcations = bifurcations(kImage2Bif).bifurcations;
    for (std::size_t i = 0; i < s.bifurcations.size(); ++i) s.bifurcations[i].y = kQueryBifTargets[i];
    s.canonicalize();
    return s;
}

MinutiaeSet image_minutiae(int image) {
    auto s = image_endings(image);
    s.bifurcations = image_bifurcations(image).bifurcations;
    return s;
}

std::vector<FixtureFile> files() {
    std::vector<FixtureFile> out;
    out.push_back({"query_end.csv", format_minutiae_csv(query_endings(), MinutiaKind::Ending)});
    for (int i = 1; i <= kImageCount; ++i) {
        out.push_back({"image" + std::to_string(i) + "_end.csv", format_minutiae_csv(image_endings(i), MinutiaKind::Ending)});
    }
    for (int i = 1; i <= kImageCount; ++i) {
        out.push_back({"image" + std::to_string(i) + "_bif.csv",
                       format_minutiae_csv(image_bifurcations(i), MinutiaKind::Bifurcation)});
    }
    out.push_back({"query_bif_targets.csv", format_targets_csv(query_bifurcation_targets())});
    return out;
}

} // namespace fpgp::fixtures
