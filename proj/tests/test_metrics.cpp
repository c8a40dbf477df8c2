#include <cmath>

#include <gtest/gtest.h>

#include "nntrack/metrics.hpp"
#include "nntrack/numerics.hpp"

using namespace nntrack;

TEST(Mse, IdenticalTracksGiveZero) {
    const std::vector<CartesianPoint> a{{1, 2}, {3, 4}};
    EXPECT_EQ(mse(a, a), 0.0);
    EXPECT_EQ(track_distance_sum(a, a).distance_sum, 0.0);
}

TEST(Mse, AveragesOverBothCoordinates) {
    // Errors (1, 0) and (0, 3): squared components 1, 0, 0, 9 over four terms.
    const std::vector<CartesianPoint> p{{1, 0}, {0, 3}};
    const std::vector<CartesianPoint> t{{0, 0}, {0, 0}};
    EXPECT_DOUBLE_EQ(mse(p, t), 2.5);
}

TEST(Mse, RejectsLengthMismatchAndEmpty) {
    EXPECT_THROW(mse({{0, 0}}, {}), Error);
    EXPECT_THROW(mse({}, {}), Error);
    EXPECT_THROW(track_distance_sum({{0, 0}}, {{0, 0}, {1, 1}}), Error);
}

TEST(Euclidean, PythagoreanTriple) { EXPECT_EQ(euclidean({0, 0}, {3, 4}), 5.0); }

TEST(TrackDistanceSum, PerStepAndRms) {
    const std::vector<CartesianPoint> p{{3, 4}, {0, 0}, {0, 1}};
    const std::vector<CartesianPoint> t{{0, 0}, {0, 0}, {0, 0}};
    const TrackComparison c = track_distance_sum(p, t);
    ASSERT_EQ(c.n_steps(), 3u);
    EXPECT_EQ(c.per_step, (std::vector<double>{5, 0, 1}));
    EXPECT_DOUBLE_EQ(c.distance_sum, 6.0);
    EXPECT_DOUBLE_EQ(c.rms_per_step, std::sqrt(26.0 / 3.0));
    EXPECT_DOUBLE_EQ(c.mse, mse(p, t));
}

TEST(TrackDistanceSum, SymmetricAndTriangleInequality) {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<CartesianPoint> a, b, c;
        for (int i = 0; i < 5; ++i) {
            a.push_back({rng.uniform(-10, 10), rng.uniform(-10, 10)});
            b.push_back({rng.uniform(-10, 10), rng.uniform(-10, 10)});
            c.push_back({rng.uniform(-10, 10), rng.uniform(-10, 10)});
        }
        const double ab = track_distance_sum(a, b).distance_sum;
        EXPECT_EQ(ab, track_distance_sum(b, a).distance_sum);
        EXPECT_LE(track_distance_sum(a, c).distance_sum,
                  ab + track_distance_sum(b, c).distance_sum + 1e-12);
        EXPECT_GE(ab, 0.0);
    }
}
