#include "mbuniq/mbuniq.hpp"
#include "support/models.hpp"
#include "support/reference.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mbuniq;

namespace {

Dataset coins(std::size_t n, std::uint64_t seed, State cz = 3) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<State>> cols(3, std::vector<State>(n));
    for (std::size_t r = 0; r < n; ++r) {
        cols[0][r] = rng() & 1;
        cols[1][r] = rng() & 1;
        cols[2][r] = static_cast<State>(rng() % cz);
    }
    return Dataset({{"X", 2}, {"Y", 2}, {"Z", cz}}, cols);
}

Dataset identical(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<State> x(n);
    for (auto& v : x) v = rng() & 1;
    return Dataset({{"X", 2}, {"Y", 2}}, {x, x});
}

}  // namespace

TEST(Contingency, CountsObservedCells) {
    const Dataset ds({{"A", 2}}, {{0, 1, 1}});
    const auto c = contingency(ds, {0});
    EXPECT_EQ(c.counts, (std::vector<std::uint64_t>{1, 2}));
    const auto all = contingency(ds, {});
    ASSERT_EQ(all.counts.size(), 1u);
    EXPECT_EQ(all.counts[0], 3u);
    EXPECT_THROW(contingency(ds, {4}), std::invalid_argument);
}

TEST(Contingency, SettingOneSourceAgreement) {
    const auto ds = sample({SettingId::S1, {}, 17}, 5000);
    const auto c = contingency(ds, {0, detail::kY});
    const double agree = static_cast<double>(c.counts[0] + c.counts[3]) / 5000.0;
    EXPECT_NEAR(agree, 0.9, 0.02);
}

TEST(G2, IdenticalColumnsAreDependent) {
    const auto r = g2_ci_test(identical(500, 3), 0, 1, {});
    EXPECT_FALSE(r.independent);
    EXPECT_LT(r.p_value, 1e-10);
    EXPECT_EQ(r.dof, 1u);
}

TEST(G2, ConstantColumnHasNoDegreesOfFreedom) {
    const Dataset ds({{"X", 2}, {"Y", 2}}, {{0, 0, 0, 0}, {0, 1, 0, 1}});
    const auto r = g2_ci_test(ds, 0, 1, {});
    EXPECT_EQ(r.dof, 0u);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0);
    EXPECT_TRUE(r.independent);
}

TEST(G2, DegreesOfFreedomCountObservedStatesPerStratum) {
    // Stratum Z=0 sees X in {0,1}, Y in {0,1,2}; stratum Z=1 sees one X state.
    const Dataset ds({{"X", 3}, {"Y", 3}, {"Z", 2}},
                     {{0, 1, 0, 1, 0, 2, 2}, {0, 1, 2, 0, 1, 0, 1}, {0, 0, 0, 0, 0, 1, 1}});
    EXPECT_EQ(g2_ci_test(ds, 0, 1, {2}).dof, 2u);
}

TEST(G2, WilliamsFactorOnASingleTable) {
    // X Y counts [[10, 20], [30, 5]].
    std::vector<State> x, y;
    const int counts[2][2] = {{10, 20}, {30, 5}};
    for (State a = 0; a < 2; ++a)
        for (State b = 0; b < 2; ++b)
            for (int k = 0; k < counts[a][b]; ++k) {
                x.push_back(a);
                y.push_back(b);
            }
    const Dataset ds({{"X", 2}, {"Y", 2}}, {x, y});
    const double m = 65.0, rows[2] = {30, 35}, cols[2] = {40, 25};
    double g = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) g += 2.0 * counts[a][b] * std::log(counts[a][b] * m / (rows[a] * cols[b]));
    const double q = 1.0 + (m * (1 / rows[0] + 1 / rows[1]) - 1) * (m * (1 / cols[0] + 1 / cols[1]) - 1) / (6.0 * m);
    const auto r = g2_ci_test(ds, 0, 1, {});
    EXPECT_NEAR(r.statistic, g, 1e-9);
    EXPECT_NEAR(r.corrected_statistic, g / q, 1e-9);
    EXPECT_NEAR(g2_ci_test(ds, 0, 1, {}, 0.05, G2Correction::None).corrected_statistic, g, 1e-9);
    EXPECT_NEAR(r.p_value, std::erfc(std::sqrt(g / q / 2.0)), 1e-12);  // chi-square upper tail, 1 dof
}

TEST(G2, CalibratedUnderIndependence) {
    int rejections = 0;
    const int reps = 500;
    for (int t = 0; t < reps; ++t)
        if (!g2_ci_test(coins(10000, 1000 + t), 0, 1, {}).independent) ++rejections;
    EXPECT_NEAR(static_cast<double>(rejections) / reps, 0.05, 0.02);
}

TEST(G2, CalibratedWithinStrata) {
    int rejections = 0;
    const int reps = 2000;
    for (int t = 0; t < reps; ++t)
        if (!g2_ci_test(coins(2000, 5000 + t, 4), 0, 1, {2}).independent) ++rejections;
    EXPECT_NEAR(static_cast<double>(rejections) / reps, 0.05, 0.02);
}

TEST(G2, SettingThreeColliderPair) {
    const auto es = build_exact({SettingId::S3, {}, 0});
    const VarIndex x1 = 0, x2 = 1, y = es.target;
    ASSERT_TRUE(is_ci_exact(es.distribution, {x1}, {y}, {}));
    ASSERT_FALSE(is_ci_exact(es.distribution, {x1}, {y}, {x2}));
    const auto ds = sample({SettingId::S3, {}, 23}, 5000);
    EXPECT_TRUE(g2_ci_test(ds, x1, y, {}).independent);
    EXPECT_FALSE(g2_ci_test(ds, x1, y, {x2}).independent);
}

TEST(G2, RejectsBadQueries) {
    const auto ds = coins(50, 1);
    EXPECT_THROW(g2_ci_test(ds, 0, 0, {}), std::invalid_argument);
    EXPECT_THROW(g2_ci_test(ds, 0, 1, {0}), std::invalid_argument);
    EXPECT_THROW(g2_ci_test(ds, 0, 7, {}), std::invalid_argument);
}

TEST(PluginCmi, IdenticalFairColumnsApproachLogTwo) {
    EXPECT_NEAR(cmi_plugin(identical(20000, 5), {0}, {1}, {}), std::log(2.0), 1e-3);
}

TEST(PluginCmi, EqualsExactCmiOfTheEmpiricalLaw) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 60; ++t) {
        const auto d = models::mixed(rng, t);
        const auto ds = sample_distribution(d, 300, 500 + t);
        const auto emp = empirical_distribution(ds);
        const VarSet z = d.num_variables() > 3 ? VarSet{2, 3} : VarSet{2};
        const double plug = cmi_plugin(ds, {0}, {1}, z);
        EXPECT_NEAR(plug, ref::cmi(emp, {0}, {1}, z), 1e-12) << "law " << t;
        const auto r = g2_ci_test_sets(ds, {0}, {1}, z);
        EXPECT_NEAR(r.statistic, 2.0 * 300 * plug, 1e-9);
        EXPECT_LE(r.corrected_statistic, r.statistic + 1e-12);
    }
}

TEST(PluginCmi, ConvergesOnSettingOne) {
    const auto es = build_exact({SettingId::S1, {}, 0});
    const auto ds = sample({SettingId::S1, {}, 29}, 20000);
    for (VarIndex x : {0u, 1u, 3u})
        EXPECT_NEAR(cmi_plugin(ds, {x}, {es.target}, {}), cmi_exact(es.distribution, x, es.target, {}).value(), 0.01);
}

TEST(Permutation, IdenticalColumnsHitTheFloor) {
    const auto r = permutation_ci_test(identical(200, 7), 0, 1, {}, 0.05, 199, 1);
    EXPECT_DOUBLE_EQ(r.p_value, 1.0 / 200.0);
    EXPECT_FALSE(r.independent);
}

TEST(Permutation, ValidUnderIndependence) {
    int rejections = 0;
    const int reps = 500;
    for (int t = 0; t < reps; ++t)
        if (!permutation_ci_test(coins(300, 2000 + t), 0, 1, {2}, 0.05, 99, t).independent) ++rejections;
    EXPECT_LE(static_cast<double>(rejections) / reps, 0.07);
}

TEST(Permutation, AgreesWithG2OnLargeSamples) {
    const auto ds = sample({SettingId::S1, {}, 31}, 2000);
    const VarIndex y = detail::kY;
    int agree = 0, total = 0;
    std::mt19937_64 rng(5);
    for (int t = 0; t < 60; ++t) {
        const VarIndex x = static_cast<VarIndex>(rng() % 10);
        VarSet z;
        for (VarIndex v = 0; v < 10; ++v)
            if (v != x && rng() % 4 == 0 && z.size() < 3) z.push_back(v);
        const bool a = g2_ci_test(ds, x, y, z).independent;
        const bool b = permutation_ci_test(ds, x, y, z, 0.05, 199, t).independent;
        agree += a == b;
        ++total;
    }
    EXPECT_GE(static_cast<double>(agree) / total, 0.95);
}

TEST(Permutation, DeterministicForASeed) {
    const auto ds = coins(400, 9);
    const auto a = permutation_ci_test(ds, 0, 1, {2}, 0.05, 199, 77);
    const auto b = permutation_ci_test(ds, 0, 1, {2}, 0.05, 199, 77);
    EXPECT_EQ(a.p_value, b.p_value);
    EXPECT_THROW(permutation_ci_test(ds, 0, 1, {2}, 0.05, 10, 77), std::invalid_argument);
}

TEST(TestDecider, PermutationAnswersIgnoreQueryOrder) {
    const auto ds = std::make_shared<const Dataset>(coins(300, 11));
    const TestDecider a(ds, CITestKind::Permutation, 0.05, 3), b(ds, CITestKind::Permutation, 0.05, 3);
    const double first = a.test({0}, {1}, {2}).p_value;
    (void)b.test({0}, {2}, {});
    EXPECT_EQ(b.test({0}, {1}, {2}).p_value, first);
}
