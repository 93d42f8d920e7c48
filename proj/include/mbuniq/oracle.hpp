#pragma once

#include "mbuniq/measures.hpp"
#include "mbuniq/perturbation.hpp"

#include <algorithm>
#include <bit>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mbuniq {

inline constexpr std::size_t kOracleMaxScope = 20;

/// All Markov boundaries of `target` within `scope`, smallest first.
struct BoundarySet {
    VarIndex target = 0;
    VarSet scope;
    std::vector<VarSet> boundaries;

    bool contains_boundary(const VarSet& m) const {
        return std::find(boundaries.begin(), boundaries.end(), m) != boundaries.end();
    }
    VarSet intersection() const {
        VarSet acc = scope;
        for (const auto& b : boundaries) acc = set_intersection(acc, b);
        return acc;
    }
    VarSet union_all() const {
        VarSet acc;
        for (const auto& b : boundaries) acc = set_union(acc, b);
        return acc;
    }
};

struct EssentialSet {
    VarSet members;
};

struct UniquenessExact {
    bool unique = false;
    VarSet essential;
    /// Every boundary when the scope is small enough to enumerate, else empty.
    std::vector<VarSet> boundaries;
};

/// x_state and k_states (aligned with the K set) with f(x) > 0, f(k) > 0 and f(x, k) = 0.
struct VariationWitness {
    State x_state = 0;
    std::vector<State> k_states;
};

namespace detail {

inline void require_target_outside(VarIndex y, const VarSet& scope, const DiscreteDistribution& d) {
    if (y >= d.num_variables()) throw std::invalid_argument("unknown target variable");
    require_in_range(d, scope);
    if (contains(scope, y)) throw std::invalid_argument("target must not belong to the scope");
}

}  // namespace detail

/// True iff `m` is a Markov blanket of y within scope: Y ⫫ scope∖m | m.
inline bool is_markov_blanket(const DiscreteDistribution& d, VarIndex y, const VarSet& scope, const VarSet& m,
                              double tol = kDefaultCITolerance) {
    return is_ci_exact(d, VarSet{y}, set_minus(scope, m), m, tol);
}

inline BoundarySet enumerate_markov_boundaries(const DiscreteDistribution& d, VarIndex y, const VarSet& scope,
                                               double tol = kDefaultCITolerance) {
    detail::require_target_outside(y, scope, d);
    if (scope.size() > kOracleMaxScope)
        throw std::invalid_argument("oracle scope limited to " + std::to_string(kOracleMaxScope) + " variables");
    const std::size_t k = scope.size();
    std::vector<std::uint32_t> masks(std::size_t{1} << k);
    for (std::uint32_t m = 0; m < masks.size(); ++m) masks[m] = m;
    std::stable_sort(masks.begin(), masks.end(),
                     [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });

    BoundarySet out{y, scope, {}};
    std::vector<std::uint32_t> found;
    for (std::uint32_t mask : masks) {
        VarSet m;
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (1u << i)) m.push_back(scope[i]);
        if (!is_markov_blanket(d, y, scope, m, tol)) continue;
        const bool minimal =
            std::none_of(found.begin(), found.end(), [&](std::uint32_t f) { return (f & mask) == f; });
        if (minimal) {
            found.push_back(mask);
            out.boundaries.push_back(std::move(m));
        }
    }
    return out;
}

inline EssentialSet essential_set_exact(const DiscreteDistribution& d, VarIndex y, const VarSet& scope,
                                        double tol = kDefaultCITolerance) {
    detail::require_target_outside(y, scope, d);
    EssentialSet e;
    for (VarIndex w : scope)
        if (!is_ci_exact(d, VarSet{y}, VarSet{w}, set_minus(scope, w), tol)) e.members.push_back(w);
    return e;
}

/// Unique iff the essential set is itself a blanket.
inline UniquenessExact uniqueness_exact(const DiscreteDistribution& d, VarIndex y, const VarSet& scope,
                                        double tol = kDefaultCITolerance) {
    UniquenessExact out;
    out.essential = essential_set_exact(d, y, scope, tol).members;
    out.unique = is_markov_blanket(d, y, scope, out.essential, tol);
    if (scope.size() <= kOracleMaxScope) out.boundaries = enumerate_markov_boundaries(d, y, scope, tol).boundaries;
    return out;
}

inline std::optional<VariationWitness> variation_dependence_witness(const DiscreteDistribution& d, VarIndex x,
                                                                    const VarSet& k) {
    if (x >= d.num_variables()) throw std::invalid_argument("unknown variable index");
    detail::require_in_range(d, k);
    if (contains(k, x)) throw std::invalid_argument("x must not belong to K");
    const SubsetCoder kc(d.variables(), k);
    const State x_card = d.variables()[x].cardinality;
    std::vector<double> fx(x_card, 0.0);
    std::unordered_map<std::uint64_t, double> fk, fxk;
    for (const auto& [key, p] : d.table()) {
        const State xs = d.state(key, x);
        const std::uint64_t kk = kc.encode([&](VarIndex v) { return d.state(key, v); });
        fx[xs] += p;
        fk[kk] += p;
        fxk[kk * x_card + xs] += p;
    }
    std::vector<std::uint64_t> ks;
    for (const auto& [kk, p] : fk)
        if (p > kZeroThreshold) ks.push_back(kk);
    std::sort(ks.begin(), ks.end());
    for (std::uint64_t kk : ks)
        for (State xs = 0; xs < x_card; ++xs) {
            if (fx[xs] <= kZeroThreshold) continue;
            auto it = fxk.find(kk * x_card + xs);
            if (it == fxk.end() || it->second <= kZeroThreshold) {
                VariationWitness w{xs, {}};
                for (std::size_t i = 0; i < k.size(); ++i)
                    w.k_states.push_back(static_cast<State>((kk / kc.strides()[i]) % d.variables()[k[i]].cardinality));
                return w;
            }
        }
    return std::nullopt;
}

/// Noises every scope variable outside `m0` and checks that `m0` becomes the only boundary.
inline bool lemma4_check(const DiscreteDistribution& d, VarIndex y, const VarSet& scope, const VarSet& m0, double eps,
                         double tol = kDefaultCITolerance) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
    if (!enumerate_markov_boundaries(d, y, scope, tol).contains_boundary(m0))
        throw std::invalid_argument("m0 is not a Markov boundary");
    const auto noised = epsilon_noise_all(d, set_minus(scope, m0), eps);
    const auto after = enumerate_markov_boundaries(noised, y, scope, tol);
    return after.boundaries.size() == 1 && after.boundaries.front() == m0;
}

}  // namespace mbuniq
