#pragma once

#include "mbuniq/ci_test.hpp"
#include "mbuniq/measures.hpp"

#include <concepts>
#include <memory>
#include <stdexcept>
#include <string>

namespace mbuniq {

/// Answers "X ⫫ Y | Z?" and supplies the association measure Δ used to rank candidates.
template <class D>
concept CIDecider = requires(const D& d, VarIndex v, const VarSet& s) {
    { d.independent(s, s, s) } -> std::convertible_to<bool>;
    { d.association(v, v, s) } -> std::convertible_to<double>;
    { d.variables() } -> std::convertible_to<const std::vector<VariableMeta>&>;
};

/// Decides from an exact law: independent iff CMI <= tol. Δ is exact CMI.
class ExactDecider {
public:
    explicit ExactDecider(std::shared_ptr<const DiscreteDistribution> d, double tol = kDefaultCITolerance)
        : d_(std::move(d)), tol_(tol) {
        if (!d_) throw std::invalid_argument("ExactDecider needs a distribution");
    }
    explicit ExactDecider(DiscreteDistribution d, double tol = kDefaultCITolerance)
        : ExactDecider(std::make_shared<const DiscreteDistribution>(std::move(d)), tol) {}

    bool independent(const VarSet& x, const VarSet& y, const VarSet& z) const { return is_ci_exact(*d_, x, y, z, tol_); }
    double association(VarIndex x, VarIndex y, const VarSet& z) const { return cmi_sets(*d_, VarSet{x}, VarSet{y}, z); }
    const std::vector<VariableMeta>& variables() const { return d_->variables(); }
    const DiscreteDistribution& distribution() const { return *d_; }
    double tolerance() const { return tol_; }

private:
    std::shared_ptr<const DiscreteDistribution> d_;
    double tol_;
};

/// G2 applies the Williams correction; G2Raw refers raw G² to the chi-square law.
enum class CITestKind { G2, G2Raw, Permutation };

inline CITestKind parse_test_kind(const std::string& s) {
    if (s == "g2") return CITestKind::G2;
    if (s == "g2-raw") return CITestKind::G2Raw;
    if (s == "permutation" || s == "perm") return CITestKind::Permutation;
    throw std::invalid_argument("unknown CI test kind: " + s);
}

inline std::string to_string(CITestKind k) {
    switch (k) {
        case CITestKind::G2: return "g2";
        case CITestKind::G2Raw: return "g2-raw";
        case CITestKind::Permutation: return "permutation";
    }
    return "?";
}

/// Decides from a sample with a statistical test at level alpha. Δ is plug-in CMI.
///
/// Permutation seeds are derived from (seed, query), so answers do not depend
/// on the order in which an algorithm asks them.
class TestDecider {
public:
    TestDecider(std::shared_ptr<const Dataset> ds, CITestKind kind = CITestKind::G2, double alpha = kDefaultAlpha,
                std::uint64_t seed = 0, std::size_t permutations = 199)
        : ds_(std::move(ds)), kind_(kind), alpha_(alpha), seed_(seed), permutations_(permutations) {
        if (!ds_) throw std::invalid_argument("TestDecider needs a dataset");
        if (!(alpha_ > 0.0 && alpha_ < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    }
    explicit TestDecider(Dataset ds, CITestKind kind = CITestKind::G2, double alpha = kDefaultAlpha,
                         std::uint64_t seed = 0, std::size_t permutations = 199)
        : TestDecider(std::make_shared<const Dataset>(std::move(ds)), kind, alpha, seed, permutations) {}

    CITestResult test(const VarSet& x, const VarSet& y, const VarSet& z) const {
        if (kind_ == CITestKind::G2) return g2_ci_test_sets(*ds_, x, y, z, alpha_, G2Correction::Williams);
        if (kind_ == CITestKind::G2Raw) return g2_ci_test_sets(*ds_, x, y, z, alpha_, G2Correction::None);
        return permutation_ci_test_sets(*ds_, x, y, z, alpha_, permutations_,
                                        derive_seed(seed_, {detail::query_hash(x, y, z)}));
    }
    bool independent(const VarSet& x, const VarSet& y, const VarSet& z) const { return test(x, y, z).independent; }
    double association(VarIndex x, VarIndex y, const VarSet& z) const { return cmi_plugin(*ds_, VarSet{x}, VarSet{y}, z); }
    const std::vector<VariableMeta>& variables() const { return ds_->variables(); }
    const Dataset& dataset() const { return *ds_; }
    double alpha() const { return alpha_; }
    CITestKind kind() const { return kind_; }

private:
    std::shared_ptr<const Dataset> ds_;
    CITestKind kind_;
    double alpha_;
    std::uint64_t seed_;
    std::size_t permutations_;
};

static_assert(CIDecider<ExactDecider>);
static_assert(CIDecider<TestDecider>);

}  // namespace mbuniq
