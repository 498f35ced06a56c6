#pragma once

// Crossing-number minutiae extraction from skeleton images and the minutiae
// CSV format.

#include "fpgp/image.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpgp {

struct Pixel {
    int x = 0; // column
    int y = 0; // row, growing downward
    friend bool operator==(const Pixel&, const Pixel&) = default;
};

// The 8-neighbour ring, clockwise on screen starting east.
enum class Direction : std::uint8_t { East, SouthEast, South, SouthWest, West, NorthWest, North, NorthEast };

constexpr std::array<Pixel, 8> kRingOffsets{{{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

constexpr Pixel step(Pixel p, Direction d) noexcept {
    const auto o = kRingOffsets[static_cast<std::size_t>(d)];
    return {p.x + o.x, p.y + o.y};
}

// Angles are radians in (-pi, pi], measured counter-clockwise from east with
// the y axis pointing up, rounded to 2 decimals. `y` is absent for minutiae
// tables that list only the formula inputs.
struct EndPoint {
    int x = 0;
    std::optional<int> y;
    double angle = 0.0;
    friend bool operator==(const EndPoint&, const EndPoint&) = default;
};

// Branch angles sorted descending: angle1 >= angle2 >= angle3.
struct BifurcationPoint {
    int x = 0;
    std::optional<int> y;
    double angle1 = 0.0;
    double angle2 = 0.0;
    double angle3 = 0.0;
    friend bool operator==(const BifurcationPoint&, const BifurcationPoint&) = default;
};

enum class MinutiaKind : std::uint8_t { Ending, Bifurcation };

struct MinutiaeSet {
    std::vector<EndPoint> endings;
    std::vector<BifurcationPoint> bifurcations;

    bool empty() const noexcept { return endings.empty() && bifurcations.empty(); }
    // Stable sort of each list by (y, x). A list in which some record lacks
    // y keeps its given order.
    void canonicalize();

    friend bool operator==(const MinutiaeSet&, const MinutiaeSet&) = default;
};

constexpr int kAngleTraceLength = 5;
constexpr int kDefaultBorderMargin = 10;

double round_angle(double radians) noexcept;

// Half the number of value changes around the 8-neighbour ring of (x, y).
// Throws std::out_of_range for pixels on the image border.
int crossing_number(const SkeletonImage& image, int x, int y);

// Direction of the branch leaving `start` through `first_step`, traced over
// at most kAngleTraceLength pixels. Throws std::invalid_argument if the first
// step is not a ridge pixel.
double estimate_angle(const SkeletonImage& image, Pixel start, Direction first_step);

// CN = 1 pixels become endings and CN = 3 pixels bifurcations, skipping
// pixels closer than `border_margin` to any edge. Output is canonical.
MinutiaeSet extract_minutiae(const SkeletonImage& image, int border_margin = kDefaultBorderMargin);

// --- CSV -------------------------------------------------------------------
//
// Endings:      header x,angle[,y]
// Bifurcations: header x,angle1,angle2,angle3[,y]
// Integer pixel coordinates, angles with 2 decimals, LF line endings. Column
// order is free on input. The kind is taken from the header.

MinutiaeSet parse_minutiae_csv(std::string_view text);
MinutiaeSet load_minutiae_csv(const std::filesystem::path& path);
// The y column is written when some record has y, or always with `always_y`.
std::string format_minutiae_csv(const MinutiaeSet& set, MinutiaKind kind, bool always_y = false);
void save_minutiae_csv(const MinutiaeSet& set, MinutiaKind kind, const std::filesystem::path& path,
                       bool always_y = false);

// Single-column `y` file of target values.
std::vector<double> parse_targets_csv(std::string_view text);
std::vector<double> load_targets_csv(const std::filesystem::path& path);
std::string format_targets_csv(const std::vector<double>& targets);

} // namespace fpgp
