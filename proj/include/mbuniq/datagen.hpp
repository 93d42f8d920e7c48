#pragma once

#include "mbuniq/dataset.hpp"
#include "mbuniq/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbuniq {

enum class SettingId { S1, S2, S3, S4, Fig1, Triangle, TriangleFull };

inline SettingId parse_setting(const std::string& s) {
    if (s == "1" || s == "S1" || s == "s1") return SettingId::S1;
    if (s == "2" || s == "S2" || s == "s2") return SettingId::S2;
    if (s == "3" || s == "S3" || s == "s3") return SettingId::S3;
    if (s == "4" || s == "S4" || s == "s4") return SettingId::S4;
    if (s == "fig1") return SettingId::Fig1;
    if (s == "triangle") return SettingId::Triangle;
    if (s == "triangle-full") return SettingId::TriangleFull;
    throw std::invalid_argument("unknown setting: " + s);
}

inline std::string to_string(SettingId id) {
    switch (id) {
        case SettingId::S1: return "1";
        case SettingId::S2: return "2";
        case SettingId::S3: return "3";
        case SettingId::S4: return "4";
        case SettingId::Fig1: return "fig1";
        case SettingId::Triangle: return "triangle";
        case SettingId::TriangleFull: return "triangle-full";
    }
    return "?";
}

/// Generative parameters. Settings 1-4 read "w1", "w2", "w3" (source-selection
/// weights, default 0.8/0.1/0.1) and "fidelity" (noisy-copy agreement, default 0.95).
struct SettingSpec {
    SettingId id = SettingId::S1;
    std::map<std::string, double> params;
    std::uint64_t seed = 0;

    double param(const std::string& name, double fallback) const {
        auto it = params.find(name);
        return it == params.end() ? fallback : it->second;
    }

    void validate() const {
        for (const auto& [k, v] : params)
            if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("parameter " + k + " must lie in [0,1]");
        const double w = param("w1", 0.8) + param("w2", 0.1) + param("w3", 0.1);
        if (std::abs(w - 1.0) > 1e-9) throw std::invalid_argument("source weights must sum to 1");
    }
};

struct GroundTruth {
    std::vector<VarSet> boundaries;
    bool unique = true;
    /// Known for Settings 1-4 only.
    std::optional<bool> composition_holds;
};

struct ExactSetting {
    DiscreteDistribution distribution;
    VarIndex target = 0;
    VarSet scope;
    GroundTruth truth;
};

namespace detail {

inline std::vector<VariableMeta> setting_variables() {
    std::vector<VariableMeta> vars;
    for (int i = 1; i <= 10; ++i) vars.push_back({"X" + std::to_string(i), 2});
    vars.push_back({"Y", 2});
    return vars;
}

inline constexpr VarIndex kY = 10;

inline VarIndex x_(int i) { return static_cast<VarIndex>(i - 1); }

// Full row of a Setting 1-4 draw given the latent inputs.
//   bits: independent fair coins (bit i drives X(i+1) unless overwritten)
//   source: which of the three designated sources Y copies
//   keep: whether the noisy Z-copy agrees with Z
inline std::vector<State> setting_row(SettingId id, std::uint32_t bits, int source, bool keep) {
    std::vector<State> row(11, 0);
    for (int i = 0; i < 10; ++i) row[i] = (bits >> i) & 1u;
    switch (id) {
        case SettingId::S1:
        case SettingId::S2: {
            if (id == SettingId::S2) row[x_(4)] = row[x_(2)];
            const VarIndex src[3] = {x_(1), x_(2), x_(3)};
            row[kY] = row[src[source]];
            break;
        }
        case SettingId::S3:
        case SettingId::S4: {
            if (id == SettingId::S4) {
                row[x_(8)] = row[x_(1)];
                row[x_(9)] = row[x_(2)];
            }
            const State z = row[x_(1)] ^ row[x_(2)];
            const State copy = keep ? z : 1 - z;
            if (id == SettingId::S3) row[x_(9)] = copy;
            row[x_(10)] = copy;
            const State src[3] = {z, row[x_(3)], row[x_(4)]};
            row[kY] = src[source];
            break;
        }
        default: throw std::invalid_argument("not a numbered setting");
    }
    return row;
}

inline bool is_numbered(SettingId id) {
    return id == SettingId::S1 || id == SettingId::S2 || id == SettingId::S3 || id == SettingId::S4;
}

inline VarSet xs(std::initializer_list<int> idx) {
    std::vector<VarIndex> out;
    for (int i : idx) out.push_back(x_(i));
    return make_varset(std::move(out));
}

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Four-variable law over (Z, X, Y, W) with P(Z,X) uniform on the five pairs
/// {(0,0), (0,1), (1,0), (1,1), (2,2)}, W a fair coin and, when X = 2, P(Y = 1 | W = 0) = 3/4 and
/// P(Y = 1 | W = 1) = 1/4. Y = 0 whenever X is 0 or 1.
inline DiscreteDistribution fig1_distribution() {
    std::vector<VariableMeta> vars{{"Z", 3}, {"X", 3}, {"Y", 3}, {"W", 2}};
    DistributionBuilder b(vars);
    const std::pair<State, State> zx[] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}};
    for (auto [z, x] : zx)
        for (State w = 0; w < 2; ++w) {
            const double base = 0.2 * 0.5;
            if (x != 2) {
                b.add({z, x, 0, w}, base);
            } else {
                const double p1 = w == 0 ? 0.75 : 0.25;
                b.add({z, x, 1, w}, base * p1);
                b.add({z, x, 2, w}, base * (1.0 - p1));
            }
        }
    return b.build();
}

/// Binary confounder triangle Z -> X -> Y, Z -> Y with Z ~ Bernoulli(1/2).
///
/// copy = true: X = Z almost surely and P(Y = 1 | X) = 0.2 + 0.6 X.
/// copy = false: X agrees with Z with probability 0.9 and
/// P(Y = 1 | X, Z) = 0.2 + 0.5 X + 0.2 Z, giving full support.
inline DiscreteDistribution confounder_triangle(bool copy) {
    std::vector<VariableMeta> vars{{"Z", 2}, {"X", 2}, {"Y", 2}};
    DistributionBuilder b(vars);
    for (State z = 0; z < 2; ++z)
        for (State x = 0; x < 2; ++x) {
            const double px = copy ? (x == z ? 1.0 : 0.0) : (x == z ? 0.9 : 0.1);
            const double py1 = copy ? 0.2 + 0.6 * x : 0.2 + 0.5 * x + 0.2 * z;
            b.add({z, x, 1}, 0.5 * px * py1);
            b.add({z, x, 0}, 0.5 * px * (1.0 - py1));
        }
    return b.build();
}

inline ExactSetting build_exact(const SettingSpec& spec) {
    spec.validate();
    using detail::xs;
    if (spec.id == SettingId::Fig1)
        return {fig1_distribution(), 2, make_varset({0, 1, 3}), {{make_varset({0, 3}), make_varset({1, 3})}, false, {}}};
    if (spec.id == SettingId::Triangle)
        return {confounder_triangle(true), 2, make_varset({0, 1}), {{VarSet{0}, VarSet{1}}, false, {}}};
    if (spec.id == SettingId::TriangleFull)
        return {confounder_triangle(false), 2, make_varset({0, 1}), {{make_varset({0, 1})}, true, {}}};

    const double w[3] = {spec.param("w1", 0.8), spec.param("w2", 0.1), spec.param("w3", 0.1)};
    const double fidelity = spec.param("fidelity", 0.95);
    const bool parity = spec.id == SettingId::S3 || spec.id == SettingId::S4;
    DistributionBuilder b(detail::setting_variables());
    for (std::uint32_t bits = 0; bits < 1024; ++bits)
        for (int source = 0; source < 3; ++source)
            for (int keep = 0; keep < (parity ? 2 : 1); ++keep) {
                const double pk = parity ? (keep ? fidelity : 1.0 - fidelity) : 1.0;
                b.add(detail::setting_row(spec.id, bits, source, keep), w[source] * pk / 1024.0);
            }

    ExactSetting out{b.build(), detail::kY, xs({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}), {}};
    switch (spec.id) {
        case SettingId::S1: out.truth = {{xs({1, 2, 3})}, true, true}; break;
        case SettingId::S2: out.truth = {{xs({1, 2, 3}), xs({1, 3, 4})}, false, true}; break;
        case SettingId::S3: out.truth = {{xs({1, 2, 3, 4})}, true, false}; break;
        case SettingId::S4:
            // X8 and X9 are exact copies of X1 and X2, so each pair member can stand in for the other.
            out.truth = {{xs({1, 2, 3, 4}), xs({1, 3, 4, 9}), xs({2, 3, 4, 8}), xs({3, 4, 8, 9})}, false, false};
            break;
        default: break;
    }
    return out;
}

/// n rows drawn by inverse CDF from an arbitrary exact law.
inline Dataset sample_distribution(const DiscreteDistribution& d, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("n must be >= 1");
    std::vector<std::uint64_t> keys;
    std::vector<double> cdf;
    double acc = 0.0;
    for (const auto& [k, p] : d.table()) {
        keys.push_back(k);
        acc += p;
        cdf.push_back(acc);
    }
    std::mt19937_64 rng(seed);
    std::vector<std::vector<State>> cols(d.num_variables(), std::vector<State>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const double u = detail::uniform01(rng) * acc;
        auto idx = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        idx = std::min(idx, keys.size() - 1);
        for (VarIndex v = 0; v < d.num_variables(); ++v) cols[v][r] = d.state(keys[idx], v);
    }
    return Dataset(d.variables(), std::move(cols));
}

/// n i.i.d. rows from the setting's generative description.
inline Dataset sample(const SettingSpec& spec, std::size_t n) {
    spec.validate();
    if (n == 0) throw std::invalid_argument("n must be >= 1");
    if (!detail::is_numbered(spec.id)) return sample_distribution(build_exact(spec).distribution, n, spec.seed);
    const double w1 = spec.param("w1", 0.8), w2 = spec.param("w2", 0.1);
    const double fidelity = spec.param("fidelity", 0.95);
    std::mt19937_64 rng(spec.seed);
    std::vector<std::vector<State>> cols(11, std::vector<State>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const auto bits = static_cast<std::uint32_t>(rng() & 0x3ffu);
        const double u = detail::uniform01(rng);
        const int source = u < w1 ? 0 : (u < w1 + w2 ? 1 : 2);
        const bool keep = detail::uniform01(rng) < fidelity;
        const auto row = detail::setting_row(spec.id, bits, source, keep);
        for (VarIndex v = 0; v < 11; ++v) cols[v][r] = row[v];
    }
    return Dataset(detail::setting_variables(), std::move(cols));
}

}  // namespace mbuniq
