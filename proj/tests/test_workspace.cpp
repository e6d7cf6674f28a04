#include <gtest/gtest.h>

#include <random>

#include "mrltl/workspace.hpp"

using namespace mrltl;

namespace {

Workspace experiment_grid() { return Workspace(5.0, 6.0, 5, 6); }

}  // namespace

TEST(RegionOf, BottomLeftCorner) { EXPECT_EQ(experiment_grid().region_of({0.5, 0.5}), 1); }

TEST(RegionOf, TopRightCorner) { EXPECT_EQ(experiment_grid().region_of({4.5, 5.5}), 30); }

TEST(RegionOf, SharedEdgeGoesToLargerIndex) {
    const auto w = experiment_grid();
    EXPECT_EQ(w.region_of({1.0, 0.5}), 2);
    EXPECT_EQ(w.region_of({0.5, 1.0}), 6);
    EXPECT_EQ(w.region_of({1.0, 1.0}), 7);
}

TEST(RegionOf, OuterBoundaryStaysInside) {
    const auto w = experiment_grid();
    EXPECT_EQ(w.region_of({5.0, 6.0}), 30);
    EXPECT_EQ(w.region_of({0.0, 0.0}), 1);
}

TEST(RegionOf, OutOfBoundsThrows) {
    const auto w = experiment_grid();
    EXPECT_THROW(w.region_of({-0.01, 1.0}), OutOfBounds);
    EXPECT_THROW(w.region_of({1.0, 6.01}), OutOfBounds);
}

TEST(RegionOf, NamedCellCentres) {
    const auto w = experiment_grid();
    for (RegionId id : {8, 17, 20, 21}) EXPECT_EQ(w.region_of(w.region(id).bounds.center()), id);
    EXPECT_EQ(w.region(8).bounds.center(), (Vec2{2.5, 1.5}));
    EXPECT_EQ(w.region(20).bounds.center(), (Vec2{4.5, 3.5}));
    EXPECT_EQ(w.region(17).bounds.center(), (Vec2{1.5, 3.5}));
    EXPECT_EQ(w.region(21).bounds.center(), (Vec2{0.5, 4.5}));
    EXPECT_EQ(w.region(21).name, "R21");
}

TEST(Workspace, RejectsNonSquareCells) { EXPECT_THROW(Workspace(5.0, 6.0, 5, 5), std::invalid_argument); }

TEST(LabelOf, LabelledAndTransitCells) {
    PropositionTable props{"R8"};
    auto w = experiment_grid();
    w.add_label(8, props.find("R8"));
    EXPECT_EQ(w.label_of({2.5, 1.5}), prop_bit(0));
    EXPECT_EQ(w.label_of({0.5, 0.5}), LabelSet{0});
    EXPECT_EQ(w.label_of({2.1, 1.1}), w.label_of({2.9, 1.9}));
}

TEST(Partition, EveryPointInExactlyOneCellAndAreasSum) {
    const auto w = experiment_grid();
    double area = 0.0;
    for (const auto& r : w.regions()) area += r.bounds.area();
    EXPECT_NEAR(area, 30.0, 1e-12);
    // 1 cm raster: the containing cell's rectangle holds the point and the
    // point lies in the interior of no other cell.
    for (int i = 0; i <= 500; ++i)
        for (int j = 0; j <= 600; ++j) {
            const Vec2 p{i * 0.01, j * 0.01};
            const RegionId id = w.region_of(p);
            ASSERT_TRUE(w.region(id).bounds.contains(p));
            for (const auto& r : w.regions()) {
                if (r.id == id) continue;
                const auto& b = r.bounds;
                ASSERT_FALSE(p.x > b.x0 && p.x < b.x1 && p.y > b.y0 && p.y < b.y1);
            }
        }
}

TEST(BuildCts, TwoByTwoFourConnected) {
    const auto cts = build_cts(Workspace(2.0, 2.0, 2, 2), 1, 4);
    EXPECT_EQ(cts.num_regions, 4);
    EXPECT_EQ(cts.num_transitions(), 8u + 4u);
}

TEST(BuildCts, TwoByTwoEightConnected) {
    const auto cts = build_cts(Workspace(2.0, 2.0, 2, 2), 1, 8);
    EXPECT_EQ(cts.num_transitions(), 12u + 4u);
}

TEST(BuildCts, SingleCell) {
    const auto cts = build_cts(Workspace(1.0, 1.0, 1, 1), 1);
    EXPECT_EQ(cts.num_regions, 1);
    EXPECT_EQ(cts.succ(1), std::vector<RegionId>{1});
}

TEST(BuildCts, CorridorWithBlockedMiddle) {
    Workspace w(3.0, 1.0, 3, 1);
    w.set_obstacle(2);
    const auto cts = build_cts(w, 1);
    EXPECT_EQ(cts.succ(1), std::vector<RegionId>{1});
    EXPECT_EQ(cts.succ(3), std::vector<RegionId>{3});
    EXPECT_TRUE(cts.succ(2).empty());
    EXPECT_FALSE(cts.reachable[2]);
}

TEST(BuildCts, StartInObstacleRejected) {
    Workspace w(3.0, 1.0, 3, 1);
    w.set_obstacle(1);
    EXPECT_THROW(build_cts(w, 1), std::invalid_argument);
    EXPECT_THROW(build_cts(w, 2, 6), std::invalid_argument);
}

TEST(BuildCts, SymmetricAndGeometricallyAdjacent) {
    auto w = experiment_grid();
    for (RegionId id : {7, 13, 24}) w.set_obstacle(id);
    for (int conn : {4, 8}) {
        const auto cts = build_cts(w, 1, conn);
        for (RegionId a = 1; a <= w.num_regions(); ++a) {
            if (w.is_obstacle(a)) EXPECT_TRUE(cts.succ(a).empty());
            EXPECT_TRUE(std::find(cts.succ(a).begin(), cts.succ(a).end(), a) != cts.succ(a).end() ||
                        w.is_obstacle(a));
            for (RegionId b : cts.succ(a)) {
                const auto& s = cts.succ(b);
                EXPECT_TRUE(std::find(s.begin(), s.end(), a) != s.end());
                EXPECT_FALSE(w.is_obstacle(b));
                // rectangles touch: share an edge (4) or at least a corner (8)
                const Rect ra = w.region(a).bounds, rb = w.region(b).bounds;
                const double gx = std::max(ra.x0, rb.x0) - std::min(ra.x1, rb.x1);
                const double gy = std::max(ra.y0, rb.y0) - std::min(ra.y1, rb.y1);
                EXPECT_LE(gx, 1e-12);
                EXPECT_LE(gy, 1e-12);
                if (conn == 4 && a != b) EXPECT_TRUE(gx < -1e-9 || gy < -1e-9);
            }
        }
    }
}

TEST(SegmentRegions, StraightAcrossRow) {
    const auto w = experiment_grid();
    EXPECT_EQ(w.segment_regions({0.5, 0.5}, {3.5, 0.5}), (std::vector<RegionId>{1, 2, 3, 4}));
    EXPECT_EQ(w.segment_regions({0.5, 0.5}, {0.6, 0.5}), (std::vector<RegionId>{1}));
}

TEST(SegmentRegions, MatchesFineRaster) {
    // 1 mm resampling oracle; segments are chosen so no sample lands within
    // 1 mm of a grid line crossing except at the crossings themselves.
    const auto w = experiment_grid();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ux(0.0, 5.0), uy(0.0, 6.0);
    for (int i = 0; i < 300; ++i) {
        const Vec2 a{ux(rng), uy(rng)}, b{ux(rng), uy(rng)};
        const double len = distance(a, b);
        const int n = std::max(1, static_cast<int>(len / 0.001));
        std::vector<RegionId> raster;
        for (int k = 0; k <= n; ++k) {
            const RegionId id = w.region_of(a + (static_cast<double>(k) / n) * (b - a));
            if (raster.empty() || raster.back() != id) raster.push_back(id);
        }
        const auto exact = w.segment_regions(a, b);
        // the exact traversal may additionally report corner-touch cells the
        // raster steps over; every raster cell must appear in order
        std::size_t j = 0;
        for (RegionId id : exact)
            if (j < raster.size() && raster[j] == id) ++j;
        EXPECT_EQ(j, raster.size());
        EXPECT_LE(exact.size(), raster.size() + 2);
    }
}
