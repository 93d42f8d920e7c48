#pragma once

#include "mbuniq/decider.hpp"
#include "mbuniq/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

namespace mbuniq {

/// Two Δ values closer than this are treated as tied; ties go to the lowest variable index.
inline constexpr double kTieSlack = 1e-12;
inline constexpr double kDefaultKiambK = 0.8;

struct TraceStep {
    std::string phase;  // "eliminate", "grow" or "shrink"
    VarIndex candidate = 0;
    double delta = 0.0;
    bool independent = false;
};

struct MBResult {
    VarSet boundary;
    VarIndex target = 0;
    VarSet scope;
    std::vector<TraceStep> trace;
};

struct UniquenessWitness {
    /// Variable whose leave-one-out check fired (absent for the essential-set benchmark).
    std::optional<VarIndex> variable;
    /// M_i for the leave-one-out check, scope∖{X_i} for the direct check, E for the benchmark.
    VarSet set;
};

struct UniquenessVerdict {
    bool unique = true;
    std::optional<UniquenessWitness> witness;
    VarSet m0;
    /// Filled by the essential-set benchmark only.
    VarSet essential;
    bool has_essential = false;
};

namespace detail {

inline void require_valid_scope(const std::vector<VariableMeta>& vars, const VarSet& scope, VarIndex y) {
    if (y >= vars.size()) throw std::invalid_argument("unknown target variable");
    for (VarIndex v : scope)
        if (v >= vars.size()) throw std::invalid_argument("unknown scope variable");
    if (contains(scope, y)) throw std::invalid_argument("target must not belong to the scope");
}

}  // namespace detail

/// Backward elimination: repeatedly drop the scope member least associated with
/// the target given the others, while the decider accepts its independence.
template <CIDecider D, class Delta>
MBResult alg1_backward_elimination(const D& ci, const VarSet& scope, VarIndex y, Delta&& delta) {
    detail::require_valid_scope(ci.variables(), scope, y);
    MBResult out{scope, y, scope, {}};
    VarSet& m0 = out.boundary;
    while (!m0.empty()) {
        VarIndex best = m0.front();
        double best_delta = INFINITY;
        for (VarIndex x : m0) {
            const double dv = delta(x, y, set_minus(m0, x));
            if (dv < best_delta - kTieSlack) {
                best = x;
                best_delta = dv;
            }
        }
        const bool indep = ci.independent(VarSet{best}, VarSet{y}, set_minus(m0, best));
        out.trace.push_back({"eliminate", best, best_delta, indep});
        if (!indep) break;
        m0 = set_minus(m0, best);
    }
    return out;
}

template <CIDecider D>
MBResult alg1_backward_elimination(const D& ci, const VarSet& scope, VarIndex y) {
    return alg1_backward_elimination(ci, scope, y,
                                     [&ci](VarIndex a, VarIndex b, const VarSet& z) { return ci.association(a, b, z); });
}

/// KIAMB grow-shrink. Each grow step draws a random max(1, floor(k |CanMB|)) subset of the
/// currently dependent candidates and adds its most associated member; k = 1 is IAMB.
template <CIDecider D>
MBResult kiamb(const D& ci, const VarSet& scope, VarIndex y, double k, std::uint64_t seed) {
    detail::require_valid_scope(ci.variables(), scope, y);
    if (!(k >= 0.0 && k <= 1.0)) throw std::invalid_argument("KIAMB k must lie in [0,1]");
    std::mt19937_64 rng(seed);
    MBResult out{{}, y, scope, {}};
    VarSet& mb = out.boundary;
    for (;;) {
        std::vector<VarIndex> candidates;
        for (VarIndex x : set_minus(scope, mb))
            if (!ci.independent(VarSet{x}, VarSet{y}, mb)) candidates.push_back(x);
        if (candidates.empty()) break;
        const auto take = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(k * candidates.size())));
        std::shuffle(candidates.begin(), candidates.end(), rng);
        candidates.resize(take);
        std::sort(candidates.begin(), candidates.end());
        VarIndex best = candidates.front();
        double best_delta = -INFINITY;
        for (VarIndex x : candidates) {
            const double dv = ci.association(x, y, mb);
            if (dv > best_delta + kTieSlack) {
                best = x;
                best_delta = dv;
            }
        }
        out.trace.push_back({"grow", best, best_delta, false});
        mb = set_union(mb, VarSet{best});
    }
    for (VarIndex x : VarSet(mb)) {
        const VarSet rest = set_minus(mb, x);
        const bool indep = ci.independent(VarSet{x}, VarSet{y}, rest);
        out.trace.push_back({"shrink", x, ci.association(x, y, rest), indep});
        if (indep) mb = rest;
    }
    return out;
}

/// Boundary-producing procedure over a restricted scope.
using BoundaryProducer = std::function<MBResult(const VarSet&)>;

template <CIDecider D>
BoundaryProducer alg1_producer(const D& ci, VarIndex y) {
    return [&ci, y](const VarSet& scope) { return alg1_backward_elimination(ci, scope, y); };
}

/// KIAMB with a per-scope seed, so each leave-one-out rerun is reproducible in isolation.
template <CIDecider D>
BoundaryProducer kiamb_producer(const D& ci, VarIndex y, double k, std::uint64_t seed) {
    return [&ci, y, k, seed](const VarSet& scope) {
        std::uint64_t h = scope.size();
        for (VarIndex v : scope) h = splitmix64(h ^ v);
        return kiamb(ci, scope, y, k, derive_seed(seed, {h}));
    };
}

/// Leave-one-out uniqueness check: Multiple as soon as Y ⫫ M0 | M_i for some X_i in M0.
template <CIDecider D>
UniquenessVerdict alg2_uniqueness(const D& ci, const VarSet& scope, VarIndex y, const BoundaryProducer& omega) {
    detail::require_valid_scope(ci.variables(), scope, y);
    UniquenessVerdict v;
    v.m0 = omega(scope).boundary;
    for (VarIndex xi : v.m0) {
        const VarSet mi = omega(set_minus(scope, xi)).boundary;
        // Y ⫫ M0 | Mi is the same statement as Y ⫫ M0∖Mi | Mi; Xi keeps the left side non-empty.
        if (ci.independent(VarSet{y}, set_minus(v.m0, mi), mi)) {
            v.unique = false;
            v.witness = UniquenessWitness{xi, mi};
            return v;
        }
    }
    return v;
}

/// Direct essentiality check of every member of M0 against the full remaining scope.
template <CIDecider D>
UniquenessVerdict alg3_uniqueness(const D& ci, const VarSet& scope, VarIndex y, const BoundaryProducer& omega) {
    detail::require_valid_scope(ci.variables(), scope, y);
    UniquenessVerdict v;
    v.m0 = omega(scope).boundary;
    for (VarIndex xi : v.m0) {
        const VarSet rest = set_minus(scope, xi);
        if (ci.independent(VarSet{xi}, VarSet{y}, rest)) {
            v.unique = false;
            v.witness = UniquenessWitness{xi, rest};
            return v;
        }
    }
    return v;
}

/// Essential-set benchmark: build E by direct tests, then Unique iff Y ⫫ scope∖E | E.
template <CIDecider D>
UniquenessVerdict alg4_uniqueness(const D& ci, const VarSet& scope, VarIndex y) {
    detail::require_valid_scope(ci.variables(), scope, y);
    UniquenessVerdict v;
    for (VarIndex xi : scope)
        if (!ci.independent(VarSet{xi}, VarSet{y}, set_minus(scope, xi))) v.essential.push_back(xi);
    v.m0 = v.essential;
    v.has_essential = true;
    const VarSet rest = set_minus(scope, v.essential);
    v.unique = rest.empty() || ci.independent(VarSet{y}, rest, v.essential);
    if (!v.unique) v.witness = UniquenessWitness{std::nullopt, v.essential};
    return v;
}

inline nlohmann::json trace_to_json(const MBResult& r, const std::vector<VariableMeta>& vars) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : r.trace)
        steps.push_back({{"phase", s.phase},
                         {"candidate", vars.at(s.candidate).id},
                         {"delta", s.delta},
                         {"independent", s.independent}});
    return {{"target", vars.at(r.target).id},
            {"scope", ids_of(vars, r.scope)},
            {"boundary", ids_of(vars, r.boundary)},
            {"trace", steps}};
}

inline nlohmann::json verdict_to_json(const UniquenessVerdict& v, const std::vector<VariableMeta>& vars) {
    nlohmann::json j = {{"unique", v.unique}, {"m0", ids_of(vars, v.m0)}};
    if (v.has_essential) j["essential"] = ids_of(vars, v.essential);
    if (v.witness) {
        nlohmann::json w = {{"set", ids_of(vars, v.witness->set)}};
        if (v.witness->variable) w["variable"] = vars.at(*v.witness->variable).id;
        j["witness"] = w;
    }
    return j;
}

}  // namespace mbuniq
