#include "mbuniq/mbuniq.hpp"
#include "support/models.hpp"
#include "support/reference.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace mbuniq;

namespace {

DiscreteDistribution two_coins() {
    DistributionBuilder b({{"A", 2}, {"B", 2}});
    for (State a = 0; a < 2; ++a)
        for (State c = 0; c < 2; ++c) b.add({a, c}, 0.25);
    return b.build();
}

DiscreteDistribution point_mass(State a, State c) {
    DistributionBuilder b({{"A", 2}, {"B", 2}});
    b.add({a, c}, 1.0);
    return b.build();
}

}  // namespace

TEST(VarSetOps, SortedUniqueAlgebra) {
    const VarSet a = make_varset({3, 1, 1, 2});
    EXPECT_EQ(a, (VarSet{1, 2, 3}));
    EXPECT_EQ(set_union(a, VarSet{0, 3}), (VarSet{0, 1, 2, 3}));
    EXPECT_EQ(set_minus(a, VarSet{2}), (VarSet{1, 3}));
    EXPECT_EQ(set_minus(a, 1), (VarSet{2, 3}));
    EXPECT_EQ(set_intersection(a, VarSet{2, 3, 4}), (VarSet{2, 3}));
    EXPECT_TRUE(is_subset(VarSet{1, 3}, a));
    EXPECT_FALSE(is_subset(VarSet{0}, a));
    EXPECT_TRUE(disjoint(a, VarSet{0, 4}));
}

TEST(SubsetCoder, MixedRadixFirstMemberFastest) {
    const std::vector<VariableMeta> vars{{"A", 2}, {"B", 3}, {"C", 4}};
    const SubsetCoder c(vars, VarSet{0, 2});
    EXPECT_EQ(c.size(), 8u);
    const std::vector<State> s{1, 2, 3};
    EXPECT_EQ(c.encode([&](VarIndex v) { return s[v]; }), 1u + 2u * 3u);
}

TEST(SubsetCoder, RejectsOverflowingSpace) {
    std::vector<VariableMeta> vars;
    VarSet all;
    for (int i = 0; i < 70; ++i) {
        vars.push_back({"V" + std::to_string(i), 2});
        all.push_back(static_cast<VarIndex>(i));
    }
    EXPECT_THROW(SubsetCoder(vars, all), std::invalid_argument);
}

TEST(DiscreteDistribution, RejectsInvalidTables) {
    EXPECT_THROW(DiscreteDistribution({{"A", 2}}, {{0, 0.5}, {1, 0.6}}), std::invalid_argument);
    EXPECT_THROW(DiscreteDistribution({{"A", 2}}, {{0, -0.1}, {1, 1.1}}), std::invalid_argument);
    EXPECT_THROW(DiscreteDistribution({{"A", 2}}, {{5, 1.0}}), std::invalid_argument);
    EXPECT_THROW(DiscreteDistribution({{"A", 2}, {"A", 2}}, {{0, 1.0}}), std::invalid_argument);
    EXPECT_THROW(DiscreteDistribution({{"A", 0}}, {{0, 1.0}}), std::invalid_argument);
}

TEST(DiscreteDistribution, StoresOnlyPositiveCells) {
    DistributionBuilder b({{"A", 2}, {"B", 2}});
    b.add({0, 0}, 0.5);
    b.add({1, 1}, 0.5);
    b.add({0, 1}, 0.0);
    const auto d = b.build();
    EXPECT_EQ(d.table().size(), 2u);
    EXPECT_DOUBLE_EQ(d.probability({0, 1}), 0.0);
    EXPECT_DOUBLE_EQ(d.probability_of({{0, 0}}), 0.5);
}

TEST(Marginal, AllVariablesIsIdentity) {
    std::mt19937_64 rng(11);
    const auto d = models::full_support(rng, {2, 3, 2});
    const auto m = marginal(d, d.all_vars());
    EXPECT_LT(total_variation(d, m), 1e-15);
    EXPECT_EQ(m.variables(), d.variables());
}

TEST(Marginal, IndependentCoinsGiveFairCoin) {
    const auto m = marginal(two_coins(), std::vector<std::string>{"A"});
    ASSERT_EQ(m.num_variables(), 1u);
    EXPECT_DOUBLE_EQ(m.probability({0}), 0.5);
    EXPECT_DOUBLE_EQ(m.probability({1}), 0.5);
}

TEST(Marginal, FourVariableLawTargetMarginal) {
    const auto d = fig1_distribution();
    const auto m = marginal(d, std::vector<std::string>{"Y"});
    const auto r = ref::dense_marginal(d, {d.index_of("Y")});
    ASSERT_EQ(r.p.size(), 3u);
    for (State y = 0; y < 3; ++y) EXPECT_NEAR(m.probability({y}), r.p[y], 1e-15);
    EXPECT_NEAR(m.probability({0}), 0.8, 1e-12);
    EXPECT_NEAR(m.probability({1}), 0.1, 1e-12);
    EXPECT_NEAR(m.probability({2}), 0.1, 1e-12);
}

TEST(Marginal, MatchesDenseSummationOnRandomLaws) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 30; ++t) {
        const auto d = models::mixed(rng, t);
        const VarSet keep{0, d.num_variables() - 1};
        const auto m = marginal(d, keep);
        const auto r = ref::dense_marginal(d, keep);
        models::for_each_state(r.cards, [&](const std::vector<State>& s) { EXPECT_NEAR(m.probability(s), r.at(s), 1e-14); });
    }
}

TEST(TotalVariation, Basics) {
    const auto d = two_coins();
    EXPECT_DOUBLE_EQ(total_variation(d, d), 0.0);
    EXPECT_DOUBLE_EQ(total_variation(point_mass(0, 0), point_mass(1, 1)), 1.0);
    EXPECT_DOUBLE_EQ(total_variation(point_mass(0, 0), d), 0.75);
}

TEST(TotalVariation, RequiresSameVariables) {
    DistributionBuilder b({{"A", 2}});
    b.add({0}, 1.0);
    EXPECT_THROW(total_variation(two_coins(), b.build()), std::invalid_argument);
}

TEST(DistributionJson, RoundTrip) {
    const auto d = fig1_distribution();
    const auto e = distribution_from_json(to_json(d));
    EXPECT_EQ(e.variables(), d.variables());
    EXPECT_EQ(e.table(), d.table());
}

TEST(DistributionJson, OmittedEntriesAreZero) {
    const auto j = nlohmann::json::parse(R"({"variables":[{"id":"X","card":3}],"table":[{"a":{"X":2},"p":1.0}]})");
    const auto d = distribution_from_json(j);
    EXPECT_DOUBLE_EQ(d.probability({2}), 1.0);
    EXPECT_DOUBLE_EQ(d.probability({0}), 0.0);
}

TEST(DistributionJson, RejectsMalformedInput) {
    auto bad = [](const char* text) { return distribution_from_json(nlohmann::json::parse(text)); };
    EXPECT_THROW(bad(R"({"variables":[{"id":"X","card":2}],"table":[{"a":{"X":0},"p":0.4}]})"), std::invalid_argument);
    EXPECT_THROW(bad(R"({"variables":[{"id":"X","card":2}],"table":[{"a":{"Q":0},"p":1.0}]})"), std::exception);
    EXPECT_THROW(bad(R"({"variables":[{"id":"X","card":2}],"table":[{"a":{"X":4},"p":1.0}]})"), std::invalid_argument);
    EXPECT_THROW(bad(R"({"variables":[{"id":"X","card":2}],"table":[{"a":{},"p":1.0}]})"), std::exception);
}

TEST(Dataset, ValidatesShape) {
    EXPECT_THROW(Dataset({{"A", 2}}, {{}}), std::invalid_argument);
    EXPECT_THROW(Dataset({{"A", 2}}, {{0, 2}}), std::invalid_argument);
    EXPECT_THROW(Dataset({{"A", 2}, {"B", 2}}, {{0, 1}, {0}}), std::invalid_argument);
}

TEST(Dataset, CsvRoundTripKeepsDeclaredCardinality) {
    const Dataset ds({{"A", 3}, {"B", 2}}, {{0, 1, 1}, {1, 0, 1}});
    std::stringstream ss;
    write_dataset_csv(ds, ss);
    const auto inferred = parse_dataset_csv(ss);
    EXPECT_EQ(inferred.variables()[0].cardinality, 2u);
    std::stringstream again;
    write_dataset_csv(ds, again);
    EXPECT_EQ(parse_dataset_csv(again, ds.variables()), ds);
}

TEST(Dataset, CsvRejectsGarbage) {
    std::stringstream a("A,B\n0,x\n");
    EXPECT_THROW(parse_dataset_csv(a), std::invalid_argument);
    std::stringstream b("A,B\n0\n");
    EXPECT_THROW(parse_dataset_csv(b), std::invalid_argument);
    std::stringstream c("");
    EXPECT_THROW(parse_dataset_csv(c), std::invalid_argument);
}

TEST(Dataset, EmpiricalDistributionCounts) {
    const Dataset ds({{"A", 2}}, {{0, 1, 1, 1}});
    const auto d = empirical_distribution(ds);
    EXPECT_DOUBLE_EQ(d.probability({0}), 0.25);
    EXPECT_DOUBLE_EQ(d.probability({1}), 0.75);
}
