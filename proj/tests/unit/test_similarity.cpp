#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fcsel/similarity.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace fcsel;

namespace {

NormalizedSeries raw(std::string id, std::vector<double> v) {
    NormalizedSeries s;
    s.product_id = std::move(id);
    s.values = std::move(v);
    return s;
}

std::vector<NormalizedSeries> random_normalized(std::size_t count, std::size_t len, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0, 1);
    std::vector<NormalizedSeries> out;
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> v(len);
        for (auto& x : v) x = 20 + 5 * g(rng);
        char id[16];
        std::snprintf(id, sizeof id, "S%03zu", i);
        out.push_back(z_normalize(id, v));
    }
    return out;
}

}  // namespace

TEST(ZNormalize, Example) {
    std::vector<double> v{2, 4, 6};
    auto z = z_normalize("p", v);
    auto [mean, sd] = oracle::mean_std(v);
    EXPECT_NEAR(z.values[0], (2 - mean) / sd, 1e-12);
    EXPECT_NEAR(z.values[0], -1.224745, 1e-6);
    EXPECT_NEAR(z.values[1], 0.0, 1e-12);
    EXPECT_NEAR(z.values[2], 1.224745, 1e-6);
    EXPECT_FALSE(z.degenerate);
}

TEST(ZNormalize, ConstantIsDegenerate) {
    std::vector<double> v(12, 7.0);
    auto z = z_normalize("p", v);
    EXPECT_TRUE(z.degenerate);
    for (double x : z.values) EXPECT_EQ(x, 0.0);
    EXPECT_THROW(z_normalize("e", std::vector<double>{}), Error);
}

TEST(ZNormalize, MomentsAndIdempotence) {
    for (const auto& s : random_normalized(20, 30, 3)) {
        auto [mean, sd] = oracle::mean_std(s.values);
        EXPECT_NEAR(mean, 0.0, 1e-12);
        EXPECT_NEAR(sd, 1.0, 1e-12);
        auto again = z_normalize(s.product_id, s.values);
        for (std::size_t i = 0; i < s.values.size(); ++i) EXPECT_NEAR(again.values[i], s.values[i], 1e-12);
    }
}

TEST(Distance, ExampleAndSymmetry) {
    EXPECT_DOUBLE_EQ(euclidean_distance(raw("a", {0, 0}), raw("b", {3, 4})), 5.0);
    auto set = random_normalized(10, 24, 5);
    for (const auto& a : set)
        for (const auto& b : set) {
            EXPECT_EQ(euclidean_distance(a, b), euclidean_distance(b, a));
            if (a.product_id == b.product_id) {
                EXPECT_EQ(euclidean_distance(a, b), 0.0);
            }
        }
}

TEST(Distance, TrailingAlignment) {
    std::vector<double> tail(12);
    for (std::size_t i = 0; i < tail.size(); ++i) tail[i] = static_cast<double>(i);
    std::vector<double> longer{99, 98, 97};
    longer.insert(longer.end(), tail.begin(), tail.end());
    EXPECT_EQ(euclidean_distance(raw("a", tail), raw("b", longer)), 0.0);
    std::vector<double> eleven(tail.begin() + 1, tail.end());
    EXPECT_THROW(euclidean_distance(raw("a", eleven), raw("b", longer)), Error);
}

TEST(DistanceMatrix, TriangleInequalityAndDiagonal) {
    auto set = random_normalized(50, 36, 9);
    auto dm = distance_matrix(set);
    ASSERT_EQ(dm.size(), 50u);
    for (Eigen::Index i = 0; i < 50; ++i) {
        EXPECT_EQ(dm.d(i, i), 0.0);
        for (Eigen::Index j = 0; j < 50; ++j) {
            EXPECT_EQ(dm.d(i, j), dm.d(j, i));
            for (Eigen::Index k = 0; k < 50; k += 7) EXPECT_LE(dm.d(i, j), dm.d(i, k) + dm.d(k, j) + 1e-12);
        }
    }
}

TEST(DistanceMatrix, ShortSeriesRejected) {
    std::vector<NormalizedSeries> set{raw("a", std::vector<double>(24, 1.0)), raw("b", std::vector<double>(5, 1.0))};
    EXPECT_THROW(distance_matrix(set), Error);
}

TEST(BuildUniverse, ExcludesShortSeriesWithEveryPair) {
    std::vector<NormalizedSeries> all{raw("a", std::vector<double>(24, 0.0)), raw("b", std::vector<double>(30, 0.0)),
                                      raw("c", std::vector<double>(6, 0.0))};
    auto u = build_universe(all);
    ASSERT_EQ(u.members.size(), 2u);
    EXPECT_EQ(u.excluded.size(), 2u);
    for (const auto& p : u.excluded) EXPECT_TRUE(p.id_a == "c" || p.id_b == "c");
}

TEST(Mds, TwoPoints) {
    DistanceMatrix dm{{"a", "b"}, Eigen::MatrixXd(2, 2)};
    dm.d << 0, 4, 4, 0;
    auto pts = mds_project(dm);
    EXPECT_NEAR(std::abs(pts[0].x - pts[1].x), 4.0, 1e-12);
    EXPECT_NEAR(pts[0].y, 0.0, 1e-12);
    EXPECT_NEAR(pts[1].y, 0.0, 1e-12);
    EXPECT_NEAR(pts[0].x + pts[1].x, 0.0, 1e-12);
}

TEST(Mds, CollinearPointsUseOneAxis) {
    // Points at 0, 1 and 3 on a line: d = (1, 3, 2).
    DistanceMatrix dm{{"a", "b", "c"}, Eigen::MatrixXd(3, 3)};
    dm.d << 0, 1, 3, 1, 0, 2, 3, 2, 0;
    auto pts = mds_project(dm);
    for (const auto& p : pts) EXPECT_NEAR(p.y, 0.0, 1e-7);
    EXPECT_NEAR(std::abs(pts[0].x - pts[1].x), 1.0, 1e-9);
    EXPECT_NEAR(std::abs(pts[0].x - pts[2].x), 3.0, 1e-9);
}

TEST(Mds, RecoversPlanarConfiguration) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-10, 10);
    std::vector<oracle::Point> ref(50);
    for (auto& p : ref) p = {u(rng), u(rng)};
    DistanceMatrix dm;
    dm.d.resize(50, 50);
    for (int i = 0; i < 50; ++i) {
        dm.ids.push_back("p" + std::to_string(i));
        for (int j = 0; j < 50; ++j) dm.d(i, j) = std::hypot(ref[i].x - ref[j].x, ref[i].y - ref[j].y);
    }
    auto pts = mds_project(dm);
    std::vector<oracle::Point> emb;
    for (const auto& p : pts) emb.push_back({p.x, p.y});
    EXPECT_LT(oracle::procrustes_rms(ref, emb), 1e-6);
}

TEST(Mds, DeterministicAndIdentical) {
    auto set = random_normalized(12, 24, 4);
    set.push_back(set[3]);
    set.back().product_id = "copy";
    auto a = mds_project(distance_matrix(set));
    auto b = mds_project(distance_matrix(set));
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].x, b[i].x);
        EXPECT_EQ(a[i].y, b[i].y);
    }
    EXPECT_NEAR(a[3].x, a.back().x, 1e-9);
    EXPECT_NEAR(a[3].y, a.back().y, 1e-9);
}

TEST(Mds, Errors) {
    DistanceMatrix one{{"a"}, Eigen::MatrixXd::Zero(1, 1)};
    EXPECT_THROW(mds_project(one), Error);
}

TEST(NearestSimilar, SaturatesAndExcludesTarget) {
    auto set = random_normalized(6, 24, 8);
    auto r = nearest_similar("S000", set, 10);
    EXPECT_EQ(r.size(), 5u);
    for (const auto& [id, d] : r) EXPECT_NE(id, "S000");
    EXPECT_THROW(nearest_similar("nope", set, 3), Error);
    EXPECT_THROW(nearest_similar("S000", set, 0), Error);
}

TEST(NearestSimilar, IdenticalSeriesFirst) {
    auto set = random_normalized(30, 24, 12);
    auto twin = set[7];
    twin.product_id = "ZZZ";
    set.push_back(twin);
    auto r = nearest_similar("S007", set, 3);
    EXPECT_EQ(r[0].first, "ZZZ");
    EXPECT_EQ(r[0].second, 0.0);
}

TEST(NearestSimilar, MatchesBruteForceOrder) {
    auto set = random_normalized(40, 30, 31);
    auto r = nearest_similar("S010", set, 10);
    std::vector<std::pair<double, std::string>> brute;
    for (const auto& s : set) {
        if (s.product_id == "S010") continue;
        double ss = 0;
        for (std::size_t i = 0; i < s.values.size(); ++i) ss += std::pow(s.values[i] - set[10].values[i], 2);
        brute.emplace_back(std::sqrt(ss), s.product_id);
    }
    std::sort(brute.begin(), brute.end());
    ASSERT_EQ(r.size(), 10u);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_EQ(r[i].first, brute[i].second);
        EXPECT_NEAR(r[i].second, brute[i].first, 1e-12);
    }
}

TEST(NearestSimilar, InvariantToScaleAndShiftOfInputs) {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g(0, 1);
    std::vector<std::vector<double>> base(15, std::vector<double>(24));
    for (auto& v : base)
        for (auto& x : v) x = 50 + 10 * g(rng);
    std::vector<NormalizedSeries> a, b;
    for (std::size_t i = 0; i < base.size(); ++i) {
        std::string id = "q" + std::to_string(i);
        a.push_back(z_normalize(id, base[i]));
        std::vector<double> t = base[i];
        for (auto& x : t) x = 3.5 * x + 200;
        b.push_back(z_normalize(id, t));
    }
    auto ra = nearest_similar("q0", a, 5);
    auto rb = nearest_similar("q0", b, 5);
    for (std::size_t i = 0; i < ra.size(); ++i) {
        EXPECT_EQ(ra[i].first, rb[i].first);
        EXPECT_NEAR(ra[i].second, rb[i].second, 1e-9);
    }
}
