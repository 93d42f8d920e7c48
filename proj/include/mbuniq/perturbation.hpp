#pragma once

#include "mbuniq/distribution.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mbuniq {

/// Channel that keeps a variable with probability 1 - epsilon and otherwise
/// replaces it by an independent draw from `noise`.
struct NoiseSpec {
    double epsilon = 0.0;
    std::vector<double> noise;

    static NoiseSpec uniform(double epsilon, State cardinality) {
        return {epsilon, std::vector<double>(cardinality, 1.0 / cardinality)};
    }

    void validate(State cardinality) const {
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0,1]");
        if (noise.size() != cardinality) throw std::invalid_argument("noise law must cover every state");
        double total = 0.0;
        for (double q : noise) {
            if (!(q > 0.0)) throw std::invalid_argument("noise law must be strictly positive");
            total += q;
        }
        if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("noise law must sum to 1");
    }
};

/// Replaces `var` by its noised copy; the joint law of the other variables is unchanged.
inline DiscreteDistribution epsilon_noise(const DiscreteDistribution& d, VarIndex var, const NoiseSpec& spec) {
    if (var >= d.num_variables()) throw std::invalid_argument("unknown variable index");
    const State card = d.variables()[var].cardinality;
    spec.validate(card);
    DistributionBuilder b(d.variables());
    for (const auto& [key, p] : d.table()) {
        auto states = d.decode(key);
        const State original = states[var];
        for (State s = 0; s < card; ++s) {
            states[var] = s;
            b.add(states, p * ((s == original ? 1.0 - spec.epsilon : 0.0) + spec.epsilon * spec.noise[s]));
        }
    }
    return b.build(d.tolerance());
}

/// Noises every variable of `vars` independently with the same spec shape (uniform noise).
inline DiscreteDistribution epsilon_noise_all(DiscreteDistribution d, const VarSet& vars, double epsilon) {
    for (VarIndex v : vars) d = epsilon_noise(d, v, NoiseSpec::uniform(epsilon, d.variables()[v].cardinality));
    return d;
}

/// One null (x, l) cell to fill, with the conditional law `alpha` of Y placed on it.
struct SingularityCell {
    State x_state = 0;
    std::vector<State> l_states;
    std::vector<double> alpha;
};

/// Moves total mass eta onto the null cells, split evenly, each spread over Y by its `alpha`.
///
/// `d` must be a law over exactly {x, y} ∪ cond. Every other cell is scaled by
/// 1 - eta, so the result sits at total variation eta from `d`.
inline DiscreteDistribution singularity_family(const DiscreteDistribution& d, VarIndex x, VarIndex y, const VarSet& cond,
                                               const std::vector<SingularityCell>& cells, double eta) {
    if (x == y || contains(cond, x) || contains(cond, y)) throw std::invalid_argument("x, y and cond must be disjoint");
    if (set_union(make_varset({x, y}), cond) != d.all_vars())
        throw std::invalid_argument("singularity_family needs a law over exactly {x, y} and cond; marginalize first");
    if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0,1)");
    if (cells.empty()) throw std::invalid_argument("at least one cell is required");
    const State y_card = d.variables()[y].cardinality;

    std::vector<std::vector<State>> targets;
    for (const auto& cell : cells) {
        if (cell.l_states.size() != cond.size()) throw std::invalid_argument("l_states must assign every conditioning variable");
        if (cell.alpha.size() != y_card) throw std::invalid_argument("alpha must cover every state of y");
        double alpha_total = 0.0;
        for (double a : cell.alpha) {
            if (a < 0.0) throw std::invalid_argument("alpha must be nonnegative");
            alpha_total += a;
        }
        if (std::abs(alpha_total - 1.0) > 1e-9) throw std::invalid_argument("alpha must sum to 1");

        std::vector<std::pair<VarIndex, State>> l_event;
        for (std::size_t i = 0; i < cond.size(); ++i) l_event.emplace_back(cond[i], cell.l_states[i]);
        auto xl_event = l_event;
        xl_event.emplace_back(x, cell.x_state);
        if (d.probability_of({{x, cell.x_state}}) <= kZeroThreshold) throw std::invalid_argument("witness requires f(x) > 0");
        if (d.probability_of(l_event) <= kZeroThreshold) throw std::invalid_argument("witness requires f(l) > 0");
        if (d.probability_of(xl_event) > kZeroThreshold)
            throw std::invalid_argument("witness pair (x, l) has positive probability");

        std::vector<State> states(d.num_variables());
        for (std::size_t i = 0; i < cond.size(); ++i) states[cond[i]] = cell.l_states[i];
        states[x] = cell.x_state;
        for (const auto& t : targets)
            if (t == states) throw std::invalid_argument("duplicate singularity cell");
        targets.push_back(std::move(states));
    }

    DistributionBuilder b(d.variables());
    for (const auto& [key, p] : d.table()) b.add(d.decode(key), (1.0 - eta) * p);
    const double share = eta / static_cast<double>(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        auto states = targets[c];
        for (State j = 0; j < y_card; ++j) {
            states[y] = j;
            b.add(states, share * cells[c].alpha[j]);
        }
    }
    return b.build(d.tolerance());
}

/// Single-cell form: mass eta on (x_state, l_states), spread over Y by `alpha`.
inline DiscreteDistribution singularity_family(const DiscreteDistribution& d, VarIndex x, VarIndex y, const VarSet& cond,
                                               State x_state, const std::vector<State>& l_states, double eta,
                                               const std::vector<double>& alpha) {
    return singularity_family(d, x, y, cond, {SingularityCell{x_state, l_states, alpha}}, eta);
}

/// Every null (x, l) pair with f(x) > 0 and f(l) > 0, in (l code, x state) order.
inline std::vector<SingularityCell> null_witness_cells(const DiscreteDistribution& d, VarIndex x, const VarSet& cond,
                                                       const std::vector<double>& alpha) {
    std::vector<SingularityCell> out;
    const SubsetCoder lc(d.variables(), cond);
    const State x_card = d.variables()[x].cardinality;
    for (std::uint64_t code = 0; code < lc.size(); ++code) {
        std::vector<State> ls(cond.size());
        std::vector<std::pair<VarIndex, State>> l_event;
        std::uint64_t rest = code;
        for (std::size_t i = 0; i < cond.size(); ++i) {
            const State card = d.variables()[cond[i]].cardinality;
            ls[i] = static_cast<State>(rest % card);
            rest /= card;
            l_event.emplace_back(cond[i], ls[i]);
        }
        if (d.probability_of(l_event) <= kZeroThreshold) continue;
        for (State xs = 0; xs < x_card; ++xs) {
            auto xl = l_event;
            xl.emplace_back(x, xs);
            if (d.probability_of({{x, xs}}) > kZeroThreshold && d.probability_of(xl) <= kZeroThreshold)
                out.push_back({xs, ls, alpha});
        }
    }
    return out;
}

}  // namespace mbuniq
