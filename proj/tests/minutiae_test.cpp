#include "fpgp/error.hpp"
#include "fpgp/fixtures.hpp"
#include "fpgp/minutiae.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace fpgp;

namespace {

BinaryImage draw(int w, int h, const std::vector<Pixel>& on) {
    BinaryImage img(w, h);
    for (auto p : on) img.set(p.x, p.y, true);
    return img;
}

// 3x3 canvas whose ring (E, SE, S, SW, W, NW, N, NE) follows the bits of `mask`
SkeletonImage ring_image(unsigned mask) {
    BinaryImage img(3, 3);
    for (std::size_t i = 0; i < 8; ++i) img.set(1 + kRingOffsets[i].x, 1 + kRingOffsets[i].y, (mask >> i) & 1u);
    return SkeletonImage(img);
}

int transitions_01(unsigned mask) {
    int n = 0;
    for (int i = 0; i < 8; ++i) n += !((mask >> i) & 1u) && ((mask >> ((i + 1) % 8)) & 1u);
    return n;
}

// three arms meeting at (20, 18): north, south-west and south-east, 10 px each
std::vector<Pixel> y_pixels() {
    std::vector<Pixel> px{{20, 18}};
    for (int k = 1; k <= 10; ++k) {
        px.push_back({20, 18 - k});
        px.push_back({20 - k, 18 + k});
        px.push_back({20 + k, 18 + k});
    }
    return px;
}

double oracle_angle(Pixel from, Pixel to) {
    return std::round(std::atan2(double(from.y - to.y), double(to.x - from.x)) * 100.0) / 100.0;
}

// Plain Zhang-Suen, written from the textbook P2..P9 formulation.
BinaryImage reference_thin(BinaryImage img) {
    const auto px = [&](int x, int y) -> int { return img.get_or_zero(x, y); };
    bool changed = true;
    while (changed) {
        changed = false;
        for (int sub = 0; sub < 2; ++sub) {
            std::vector<Pixel> del;
            for (int y = 0; y < img.height(); ++y) {
                for (int x = 0; x < img.width(); ++x) {
                    if (!px(x, y)) continue;
                    const int p2 = px(x, y - 1), p3 = px(x + 1, y - 1), p4 = px(x + 1, y), p5 = px(x + 1, y + 1);
                    const int p6 = px(x, y + 1), p7 = px(x - 1, y + 1), p8 = px(x - 1, y), p9 = px(x - 1, y - 1);
                    const int seq[9] = {p2, p3, p4, p5, p6, p7, p8, p9, p2};
                    int a = 0;
                    for (int i = 0; i < 8; ++i) a += seq[i] == 0 && seq[i + 1] == 1;
                    const int b = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
                    const bool c = sub == 0 ? p2 * p4 * p6 == 0 : p2 * p4 * p8 == 0;
                    const bool d = sub == 0 ? p4 * p6 * p8 == 0 : p2 * p6 * p8 == 0;
                    if (b >= 2 && b <= 6 && a == 1 && c && d) del.push_back({x, y});
                }
            }
            for (auto p : del) img.set(p.x, p.y, false);
            changed = changed || !del.empty();
        }
    }
    return img;
}

BinaryImage random_blobs(int w, int h, std::mt19937& rng) {
    BinaryImage img(w, h);
    std::uniform_int_distribution<int> cx(0, w - 1), cy(0, h - 1), r(1, 4);
    for (int k = 0; k < 6; ++k) {
        const int x0 = cx(rng), y0 = cy(rng), rad = r(rng);
        for (int y = y0 - rad; y <= y0 + rad; ++y)
            for (int x = x0 - rad; x <= x0 + rad; ++x)
                if (img.contains(x, y)) img.set(x, y, true);
    }
    return img;
}

} // namespace

TEST(CrossingNumber, Examples) {
    EXPECT_EQ(crossing_number(ring_image(0), 1, 1), 0);
    EXPECT_EQ(crossing_number(ring_image(1u << 4), 1, 1), 1);
    // E, SW, NW: pairwise non-adjacent
    EXPECT_EQ(crossing_number(ring_image((1u << 0) | (1u << 3) | (1u << 5)), 1, 1), 3);
    EXPECT_EQ(crossing_number(ring_image(0xFF), 1, 1), 0);
    EXPECT_EQ(crossing_number(ring_image(0x55), 1, 1), 4);
}

TEST(CrossingNumber, AllRings) {
    for (unsigned mask = 0; mask < 256; ++mask) {
        const int cn = crossing_number(ring_image(mask), 1, 1);
        ASSERT_EQ(cn, transitions_01(mask)) << mask;
        ASSERT_GE(cn, 0);
        ASSERT_LE(cn, 4);
    }
}

TEST(CrossingNumber, BorderRejected) {
    const SkeletonImage img(BinaryImage(5, 5));
    EXPECT_THROW(crossing_number(img, 0, 2), std::out_of_range);
    EXPECT_THROW(crossing_number(img, 2, 4), std::out_of_range);
    EXPECT_THROW(crossing_number(img, -1, 2), std::out_of_range);
    EXPECT_NO_THROW(crossing_number(img, 1, 3));
}

TEST(Extract, BlankImage) { EXPECT_TRUE(extract_minutiae(SkeletonImage(BinaryImage(40, 40))).empty()); }

TEST(Extract, HorizontalSegment) {
    std::vector<Pixel> px;
    for (int x = 10; x < 30; ++x) px.push_back({x, 20});
    const auto m = extract_minutiae(SkeletonImage(draw(40, 40, px)), 5);
    ASSERT_EQ(m.endings.size(), 2u);
    EXPECT_TRUE(m.bifurcations.empty());
    EXPECT_EQ(m.endings[0], (EndPoint{10, 20, 0.00}));
    EXPECT_EQ(m.endings[1], (EndPoint{29, 20, 3.14}));
}

TEST(Extract, MarginExcludesTips) {
    std::vector<Pixel> px;
    for (int x = 3; x < 37; ++x) px.push_back({x, 20});
    EXPECT_TRUE(extract_minutiae(SkeletonImage(draw(40, 40, px)), 10).empty());
    EXPECT_EQ(extract_minutiae(SkeletonImage(draw(40, 40, px)), 3).endings.size(), 2u);
}

TEST(Extract, YSkeleton) {
    const SkeletonImage img(draw(41, 41, y_pixels()));
    const auto m = extract_minutiae(img, 5);
    ASSERT_EQ(m.endings.size(), 3u);
    ASSERT_EQ(m.bifurcations.size(), 1u);

    const Pixel c{20, 18};
    const auto arm = [](Pixel from, int dx, int dy) { return Pixel{from.x + 5 * dx, from.y + 5 * dy}; };
    std::vector<double> b{oracle_angle(c, arm(c, 0, -1)), oracle_angle(c, arm(c, -1, 1)),
                          oracle_angle(c, arm(c, 1, 1))};
    std::sort(b.rbegin(), b.rend());
    EXPECT_EQ(m.bifurcations[0], (BifurcationPoint{20, 18, b[0], b[1], b[2]}));

    const Pixel north{20, 8}, sw{10, 28}, se{30, 28};
    EXPECT_EQ(m.endings[0], (EndPoint{20, 8, oracle_angle(north, arm(north, 0, 1))}));
    EXPECT_EQ(m.endings[1], (EndPoint{10, 28, oracle_angle(sw, arm(sw, 1, -1))}));
    EXPECT_EQ(m.endings[2], (EndPoint{30, 28, oracle_angle(se, arm(se, -1, -1))}));
}

TEST(Extract, SoundAndCanonical) {
    std::mt19937 rng(4);
    std::size_t found = 0;
    for (int i = 0; i < 50; ++i) {
        const auto sk = thin(random_blobs(48, 40, rng));
        const auto m = extract_minutiae(sk, 2);
        found += m.endings.size() + m.bifurcations.size();
        for (const auto& e : m.endings) {
            EXPECT_TRUE(sk.at(e.x, *e.y));
            EXPECT_EQ(crossing_number(sk, e.x, *e.y), 1);
        }
        for (const auto& b : m.bifurcations) {
            EXPECT_TRUE(sk.at(b.x, *b.y));
            EXPECT_EQ(crossing_number(sk, b.x, *b.y), 3);
            EXPECT_GE(b.angle1, b.angle2);
            EXPECT_GE(b.angle2, b.angle3);
        }
        auto again = m;
        again.canonicalize();
        EXPECT_EQ(again, m);
        std::size_t ones = 0, threes = 0;
        for (int y = 2; y < 38; ++y)
            for (int x = 2; x < 46; ++x) {
                if (!sk.at(x, y)) continue;
                ones += crossing_number(sk, x, y) == 1;
                threes += crossing_number(sk, x, y) == 3;
            }
        EXPECT_EQ(ones, m.endings.size());
        EXPECT_EQ(threes, m.bifurcations.size());
    }
    EXPECT_GT(found, 50u);
}

TEST(Extract, TooSmall) {
    EXPECT_THROW(extract_minutiae(SkeletonImage(BinaryImage(22, 40)), 10), std::invalid_argument);
    EXPECT_NO_THROW(extract_minutiae(SkeletonImage(BinaryImage(23, 23)), 10));
}

TEST(EstimateAngle, Directions) {
    std::vector<Pixel> east, up, diag;
    for (int k = 0; k <= 8; ++k) {
        east.push_back({5 + k, 10});
        up.push_back({10, 15 - k});
        diag.push_back({5 + k, 15 - k});
    }
    EXPECT_EQ(estimate_angle(SkeletonImage(draw(20, 20, east)), {5, 10}, Direction::East), 0.00);
    EXPECT_EQ(estimate_angle(SkeletonImage(draw(20, 20, up)), {10, 15}, Direction::North), 1.57);
    EXPECT_EQ(estimate_angle(SkeletonImage(draw(20, 20, diag)), {5, 15}, Direction::NorthEast), 0.79);
    EXPECT_EQ(0.79, std::round(std::atan2(5.0, 5.0) * 100) / 100);
}

TEST(EstimateAngle, ShortBranchStops) {
    const auto img = SkeletonImage(draw(20, 20, {{5, 10}, {6, 10}, {7, 10}}));
    EXPECT_EQ(estimate_angle(img, {5, 10}, Direction::East), 0.00);
    EXPECT_EQ(estimate_angle(img, {7, 10}, Direction::West), 3.14);
}

TEST(EstimateAngle, FirstStepMustBeRidge) {
    const auto img = SkeletonImage(draw(20, 20, {{5, 10}, {6, 10}}));
    EXPECT_THROW(estimate_angle(img, {5, 10}, Direction::North), std::invalid_argument);
}

TEST(Thin, Examples) {
    EXPECT_EQ(thin(BinaryImage(10, 10)).image(), BinaryImage(10, 10));

    BinaryImage bar(30, 9);
    for (int y = 3; y <= 5; ++y)
        for (int x = 4; x < 26; ++x) bar.set(x, y, true);
    const auto t = thin(bar);
    EXPECT_EQ(t.image(), reference_thin(bar));
    for (int x = 0; x < 30; ++x) {
        int col = 0;
        for (int y = 0; y < 9; ++y) col += t.at(x, y);
        EXPECT_LE(col, 1) << x;
    }
    EXPECT_GT(t.image().ridge_count(), 15u);

    std::vector<Pixel> diag;
    for (int k = 0; k < 12; ++k) diag.push_back({3 + k, 3 + k});
    const auto line = draw(20, 20, diag);
    const auto d = thin(line);
    EXPECT_EQ(d.image(), reference_thin(line));
    EXPECT_GE(d.image().ridge_count(), diag.size() - 2);
}

TEST(Thin, MatchesReferenceAndIsSafe) {
    std::mt19937 rng(99);
    for (int i = 0; i < 200; ++i) {
        const auto img = random_blobs(32, 24, rng);
        const auto t = thin(img);
        ASSERT_EQ(t.image(), reference_thin(img));
        for (std::size_t k = 0; k < img.pixels().size(); ++k) ASSERT_LE(t.image().pixels()[k], img.pixels()[k]);
        ASSERT_EQ(thin(t.image()), t);
    }
}

TEST(Csv, QueryTableRoundTrip) {
    const auto q = fixtures::query_endings();
    const auto text = format_minutiae_csv(q, MinutiaKind::Ending);
    EXPECT_EQ(text.substr(0, text.find('\n', 10) + 1), "x,angle,y\n147,-1.05,48\n");
    EXPECT_EQ(parse_minutiae_csv(text), q);
    EXPECT_EQ(format_minutiae_csv(parse_minutiae_csv(text), MinutiaKind::Ending), text);
}

TEST(Csv, FixturesRoundTrip) {
    for (int i = 1; i <= fixtures::kImageCount; ++i) {
        const auto m = fixtures::image_minutiae(i);
        EXPECT_EQ(parse_minutiae_csv(format_minutiae_csv(m, MinutiaKind::Ending)).endings, m.endings);
        EXPECT_EQ(parse_minutiae_csv(format_minutiae_csv(m, MinutiaKind::Bifurcation)).bifurcations, m.bifurcations);
    }
    const auto t = fixtures::query_bifurcation_targets();
    EXPECT_EQ(parse_targets_csv(format_targets_csv(t)), t);
}

TEST(Csv, ColumnOrderFreeAndHeaderOnly) {
    const auto m = parse_minutiae_csv("y,angle,x\n48,-1.05,147\n");
    EXPECT_EQ(m.endings, (std::vector<EndPoint>{{147, 48, -1.05}}));
    EXPECT_TRUE(parse_minutiae_csv("x,angle,y\n").empty());
    EXPECT_TRUE(parse_minutiae_csv("x,angle1,angle2,angle3\n").empty());
}

TEST(Csv, Errors) {
    const auto line = [](std::string_view text) -> std::size_t {
        try {
            parse_minutiae_csv(text);
        } catch (const ParseError& e) {
            return e.position();
        }
        ADD_FAILURE() << text;
        return 0;
    };
    EXPECT_EQ(line("x,angle,y\n147,-1.05,48\n101,abc,50\n"), 3u);
    EXPECT_EQ(line("x,y\n1,2\n"), 1u);
    EXPECT_EQ(line("x,angle,y,z\n1,0.5,2,3\n"), 1u);
    EXPECT_EQ(line("x,angle\n1\n"), 2u);
    EXPECT_EQ(line("x,angle\n1,9.5\n"), 2u);
}

TEST(Csv, OrderWithoutYIsKept) {
    MinutiaeSet m;
    m.endings = {{50, std::nullopt, 0.1}, {10, std::nullopt, 0.2}};
    auto c = m;
    c.canonicalize();
    EXPECT_EQ(c, m);
    m.endings = {{50, 3, 0.1}, {10, 3, 0.2}, {70, 1, 0.3}};
    m.canonicalize();
    EXPECT_EQ(m.endings[0].x, 70);
    EXPECT_EQ(m.endings[1].x, 10);
}
