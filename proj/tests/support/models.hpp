#pragma once

// Seeded random laws for property tests: full-support Dirichlet tables and
// structured-zero models built from copies, coarsenings and parities.

#include "mbuniq/distribution.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace models {

using mbuniq::DiscreteDistribution;
using mbuniq::DistributionBuilder;
using mbuniq::State;
using mbuniq::VarIndex;
using mbuniq::VariableMeta;

inline std::vector<VariableMeta> named(const std::vector<State>& cards) {
    std::vector<VariableMeta> vars;
    for (std::size_t i = 0; i < cards.size(); ++i) vars.push_back({"V" + std::to_string(i), cards[i]});
    return vars;
}

inline void for_each_state(const std::vector<State>& cards, const std::function<void(const std::vector<State>&)>& fn) {
    std::vector<State> s(cards.size(), 0);
    for (;;) {
        fn(s);
        std::size_t i = 0;
        while (i < cards.size() && ++s[i] == cards[i]) s[i++] = 0;
        if (i == cards.size()) return;
    }
}

inline std::vector<State> random_cards(std::mt19937_64& rng, std::size_t nvars) {
    std::uniform_int_distribution<State> card(2, 3);
    std::vector<State> cards(nvars);
    for (auto& c : cards) c = card(rng);
    return cards;
}

/// Dirichlet(1) weights on every cell.
inline DiscreteDistribution full_support(std::mt19937_64& rng, const std::vector<State>& cards) {
    std::gamma_distribution<double> g(1.0, 1.0);
    DistributionBuilder b(named(cards));
    for_each_state(cards, [&](const std::vector<State>& s) { b.add(s, g(rng) + 1e-3); });
    return b.normalize().build();
}

/// Roots drawn from Dirichlet laws; every other variable is a copy or a
/// coarsening of an earlier one, a parity of two earlier ones, or a noisy
/// function of earlier ones. Support restrictions come from the deterministic rules.
inline DiscreteDistribution structured(std::mt19937_64& rng, std::size_t nvars) {
    std::vector<State> cards = random_cards(rng, nvars);
    std::uniform_int_distribution<int> rule(0, 4);
    std::vector<int> kind(nvars, -1);
    std::vector<std::pair<std::size_t, std::size_t>> parents(nvars, {0, 0});
    std::size_t roots = 1 + rng() % std::min<std::size_t>(2, nvars);
    for (std::size_t v = roots; v < nvars; ++v) {
        kind[v] = rule(rng);
        parents[v] = {rng() % v, rng() % v};
        if (kind[v] == 0) cards[v] = cards[parents[v].first];       // copy
        if (kind[v] == 1) cards[v] = 2;                              // coarsening
        if (kind[v] == 2) cards[v] = 2;                              // parity
    }
    std::gamma_distribution<double> g(1.0, 1.0);
    std::vector<std::vector<double>> rootlaw(roots);
    for (std::size_t r = 0; r < roots; ++r) {
        for (State s = 0; s < cards[r]; ++s) rootlaw[r].push_back(g(rng) + 0.05);
    }
    // Noisy children: a random conditional table per parent state, some rows degenerate.
    std::vector<std::vector<std::vector<double>>> cpt(nvars);
    for (std::size_t v = roots; v < nvars; ++v) {
        if (kind[v] < 3) continue;
        const State pc = cards[parents[v].first];
        cpt[v].resize(pc);
        for (State ps = 0; ps < pc; ++ps) {
            cpt[v][ps].resize(cards[v]);
            const bool point = kind[v] == 4 && (rng() & 1);
            const State at = static_cast<State>(rng() % cards[v]);
            for (State s = 0; s < cards[v]; ++s) cpt[v][ps][s] = point ? (s == at ? 1.0 : 0.0) : g(rng) + 0.05;
        }
    }
    DistributionBuilder b(named(cards));
    for_each_state(cards, [&](const std::vector<State>& s) {
        double p = 1.0;
        for (std::size_t v = 0; v < nvars && p > 0.0; ++v) {
            if (v < roots) {
                double t = 0.0;
                for (double w : rootlaw[v]) t += w;
                p *= rootlaw[v][s[v]] / t;
                continue;
            }
            const State a = s[parents[v].first], c = s[parents[v].second];
            switch (kind[v]) {
                case 0: p *= s[v] == a ? 1.0 : 0.0; break;
                case 1: p *= s[v] == (a == 0 ? 0u : 1u) ? 1.0 : 0.0; break;
                case 2: p *= s[v] == ((a + c) % 2) ? 1.0 : 0.0; break;
                default: {
                    double t = 0.0;
                    for (double w : cpt[v][a]) t += w;
                    p *= cpt[v][a][s[v]] / t;
                }
            }
        }
        if (p > 0.0) b.add(s, p);
    });
    return b.normalize().build();
}

/// Alternates full-support and structured laws over 3 to 5 variables.
inline DiscreteDistribution mixed(std::mt19937_64& rng, std::size_t index) {
    const std::size_t nvars = 3 + rng() % 3;
    if (index % 2 == 0) return full_support(rng, random_cards(rng, nvars));
    return structured(rng, nvars);
}

}  // namespace models
