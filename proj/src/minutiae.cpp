#include "fpgp/minutiae.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fpgp {

namespace {

bool interior(const SkeletonImage& img, Pixel p) noexcept {
    return p.x >= 1 && p.y >= 1 && p.x < img.width() - 1 && p.y < img.height() - 1;
}

std::array<std::uint8_t, 8> ring(const SkeletonImage& img, Pixel p) {
    std::array<std::uint8_t, 8> r{};
    for (std::size_t i = 0; i < 8; ++i) r[i] = img.image().get_or_zero(p.x + kRingOffsets[i].x, p.y + kRingOffsets[i].y);
    return r;
}

constexpr bool orthogonal(std::size_t ring_index) noexcept { return ring_index % 2 == 0; }

// Ridge neighbours of `p` not yet in `visited`, 4-neighbours first.
std::optional<Pixel> next_on_branch(const SkeletonImage& img, Pixel p, const std::vector<Pixel>& visited) {
    const auto seen = [&](Pixel q) { return std::find(visited.begin(), visited.end(), q) != visited.end(); };
    for (const bool want_orthogonal : {true, false}) {
        for (std::size_t i = 0; i < 8; ++i) {
            if (orthogonal(i) != want_orthogonal) continue;
            const Pixel q{p.x + kRingOffsets[i].x, p.y + kRingOffsets[i].y};
            if (img.image().get_or_zero(q.x, q.y) && !seen(q)) return q;
        }
    }
    return std::nullopt;
}

// One representative direction per run of adjacent ridge pixels in the ring,
// preferring a 4-neighbour within the run.
std::vector<Direction> branch_directions(const std::array<std::uint8_t, 8>& r) {
    std::vector<Direction> out;
    // Start scanning just after a background pixel so no run wraps around.
    std::size_t start = 0;
    while (start < 8 && r[start]) ++start;
    if (start == 8) return out;
    for (std::size_t k = 1; k <= 8;) {
        const auto i = (start + k) % 8;
        if (!r[i]) {
            ++k;
            continue;
        }
        std::optional<std::size_t> pick;
        std::size_t first = i;
        while (k <= 8 && r[(start + k) % 8]) {
            const auto j = (start + k) % 8;
            if (!pick && orthogonal(j)) pick = j;
            ++k;
        }
        out.push_back(static_cast<Direction>(pick.value_or(first)));
    }
    return out;
}

} // namespace

double round_angle(double radians) noexcept { return std::round(radians * 100.0) / 100.0 + 0.0; }

void MinutiaeSet::canonicalize() {
    const auto sort_list = [](auto& list) {
        if (!std::all_of(list.begin(), list.end(), [](const auto& m) { return m.y.has_value(); })) return;
        std::stable_sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
            return std::pair(*a.y, a.x) < std::pair(*b.y, b.x);
        });
    };
    sort_list(endings);
    sort_list(bifurcations);
}

int crossing_number(const SkeletonImage& img, int x, int y) {
    if (!interior(img, {x, y})) {
        throw std::out_of_range("crossing number needs an interior pixel, got (" + std::to_string(x) + ", " +
                                std::to_string(y) + ")");
    }
    const auto r = ring(img, {x, y});
    int changes = 0;
    for (std::size_t i = 0; i < 8; ++i) changes += std::abs(int{r[i]} - int{r[(i + 1) % 8]});
    return changes / 2;
}

double estimate_angle(const SkeletonImage& img, Pixel start, Direction first_step) {
    const Pixel first = step(start, first_step);
    if (!img.image().contains(start.x, start.y) || !img.image().get_or_zero(first.x, first.y)) {
        throw std::invalid_argument("estimate_angle: first step is not a ridge pixel");
    }
    // The start pixel and its whole ring are off limits so the trace cannot
    // slip into a sibling branch.
    std::vector<Pixel> visited{start};
    for (const auto& o : kRingOffsets) {
        const Pixel q{start.x + o.x, start.y + o.y};
        if (q != first && img.image().get_or_zero(q.x, q.y)) visited.push_back(q);
    }
    visited.push_back(first);

    Pixel at = first;
    for (int steps = 1; steps < kAngleTraceLength; ++steps) {
        if (!interior(img, at) || crossing_number(img, at.x, at.y) != 2) break; // reached another minutia
        const auto next = next_on_branch(img, at, visited);
        if (!next) break;
        at = *next;
        visited.push_back(at);
    }
    const double dx = static_cast<double>(at.x - start.x);
    const double dy = static_cast<double>(start.y - at.y); // y axis up
    return round_angle(std::atan2(dy, dx));
}

MinutiaeSet extract_minutiae(const SkeletonImage& img, int border_margin) {
    if (border_margin < 0) throw std::invalid_argument("border margin must be non-negative");
    const int needed = 2 * border_margin + 3;
    if (img.width() < needed || img.height() < needed) {
        throw std::invalid_argument("image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                    " is smaller than " + std::to_string(needed) + " pixels for margin " +
                                    std::to_string(border_margin));
    }
    const int m = std::max(border_margin, 1);

    MinutiaeSet out;
    for (int y = m; y < img.height() - m; ++y) {
        for (int x = m; x < img.width() - m; ++x) {
            if (!img.at(x, y)) continue;
            const int cn = crossing_number(img, x, y);
            if (cn != 1 && cn != 3) continue;
            const auto dirs = branch_directions(ring(img, {x, y}));
            if (cn == 1) {
                out.endings.push_back({x, y, estimate_angle(img, {x, y}, dirs.front())});
                continue;
            }
            std::array<double, 3> angles{};
            for (std::size_t i = 0; i < 3; ++i) angles[i] = estimate_angle(img, {x, y}, dirs[i]);
            std::sort(angles.begin(), angles.end(), std::greater<>());
            out.bifurcations.push_back({x, y, angles[0], angles[1], angles[2]});
        }
    }
    out.canonicalize();
    return out;
}

} // namespace fpgp
