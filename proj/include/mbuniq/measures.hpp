#pragma once

#include "mbuniq/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace mbuniq {

inline constexpr double kDefaultCITolerance = 1e-9;

/// Why a measure could not be evaluated: the event whose conditional law was needed.
struct UndefinedMeasure {
    std::string reason;
    std::vector<std::pair<std::string, State>> event;

    std::string describe() const {
        std::string out = reason + " (";
        for (std::size_t i = 0; i < event.size(); ++i) {
            if (i) out += ", ";
            out += event[i].first + "=" + std::to_string(event[i].second);
        }
        return out + ")";
    }
};

/// A measure in nats, or Undefined when a required conditional law conditions on a null event.
class MeasureValue {
public:
    static MeasureValue finite(double v) { return MeasureValue(v); }
    static MeasureValue undefined(UndefinedMeasure u) { return MeasureValue(std::move(u)); }

    bool is_finite() const { return std::holds_alternative<double>(value_); }
    double value() const {
        if (!is_finite()) throw std::logic_error("measure is undefined: " + undefined_info().describe());
        return std::get<double>(value_);
    }
    const UndefinedMeasure& undefined_info() const { return std::get<UndefinedMeasure>(value_); }

    std::string to_string() const {
        if (is_finite()) {
            std::ostringstream os;
            os.precision(12);
            os << value();
            return os.str();
        }
        return "undefined: " + undefined_info().describe();
    }

private:
    explicit MeasureValue(double v) : value_(v) {}
    explicit MeasureValue(UndefinedMeasure u) : value_(std::move(u)) {}
    std::variant<double, UndefinedMeasure> value_;
};

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a) throw std::invalid_argument("joint state space too large to index");
    return a * b;
}

inline void require_in_range(const DiscreteDistribution& d, const VarSet& s) {
    for (VarIndex v : s)
        if (v >= d.num_variables()) throw std::invalid_argument("unknown variable index");
}

inline void require_outside(const VarSet& s, const VarSet& cond, const char* what) {
    if (!disjoint(s, cond)) throw std::invalid_argument(std::string(what) + " overlaps the conditioning set");
}

// Decodes a subset code back to (id, state) pairs for error reporting.
inline std::vector<std::pair<std::string, State>> describe_code(const DiscreteDistribution& d, const SubsetCoder& c,
                                                                std::uint64_t code) {
    std::vector<std::pair<std::string, State>> out;
    for (std::size_t i = 0; i < c.members().size(); ++i) {
        const VarIndex v = c.members()[i];
        out.emplace_back(d.variables()[v].id, static_cast<State>((code / c.strides()[i]) % d.variables()[v].cardinality));
    }
    return out;
}

/// Joint and marginal tables of (X, Y, L) for single X, Y and a conditioning set L.
struct TripleTables {
    SubsetCoder l_coder;
    State x_card = 1, y_card = 1;
    std::vector<double> fx, fy;
    std::unordered_map<std::uint64_t, double> fl;
    std::unordered_map<std::uint64_t, double> fxl;   // l * x_card + x
    std::unordered_map<std::uint64_t, double> fyl;   // l * y_card + y
    std::unordered_map<std::uint64_t, double> fxyl;  // (l * x_card + x) * y_card + y

    TripleTables(const DiscreteDistribution& d, VarIndex x, VarIndex y, const VarSet& cond)
        : l_coder(d.variables(), cond), x_card(d.variables()[x].cardinality), y_card(d.variables()[y].cardinality),
          fx(x_card, 0.0), fy(y_card, 0.0) {
        checked_mul(checked_mul(l_coder.size(), x_card), y_card);
        for (const auto& [key, p] : d.table()) {
            const State xs = d.state(key, x), ys = d.state(key, y);
            const std::uint64_t l = l_coder.encode([&](VarIndex v) { return d.state(key, v); });
            fx[xs] += p;
            fy[ys] += p;
            fl[l] += p;
            fxl[l * x_card + xs] += p;
            fyl[l * y_card + ys] += p;
            fxyl[(l * x_card + xs) * y_card + ys] += p;
        }
    }

    static double lookup(const std::unordered_map<std::uint64_t, double>& m, std::uint64_t k) {
        auto it = m.find(k);
        return it == m.end() ? 0.0 : it->second;
    }

    std::vector<std::uint64_t> sorted_l() const {
        std::vector<std::uint64_t> out;
        for (const auto& [l, p] : fl)
            if (p > kZeroThreshold) out.push_back(l);
        std::sort(out.begin(), out.end());
        return out;
    }
};

inline void validate_triple(const DiscreteDistribution& d, VarIndex x, VarIndex y, const VarSet& cond) {
    require_in_range(d, VarSet{x});
    require_in_range(d, VarSet{y});
    require_in_range(d, cond);
    if (x == y) throw std::invalid_argument("cause and effect must be distinct variables");
    require_outside(VarSet{x}, cond, "x");
    require_outside(VarSet{y}, cond, "y");
}

}  // namespace detail

/// Conditional mutual information of compound variables X and Y given Z, in nats.
///
/// Terms with f(x,y,z) = 0 contribute nothing, so the result is always finite.
inline double cmi_sets(const DiscreteDistribution& d, const VarSet& x, const VarSet& y, const VarSet& z) {
    detail::require_in_range(d, x);
    detail::require_in_range(d, y);
    detail::require_in_range(d, z);
    detail::require_outside(x, z, "x");
    detail::require_outside(y, z, "y");
    const SubsetCoder cx(d.variables(), x), cy(d.variables(), y), cz(d.variables(), z);
    const std::uint64_t rx = cx.size(), ry = cy.size();
    detail::checked_mul(detail::checked_mul(cz.size(), rx), ry);

    struct Cell {
        double p = 0.0;
        std::uint64_t xz = 0, yz = 0, z = 0;
    };
    std::unordered_map<std::uint64_t, Cell> pxyz;
    std::unordered_map<std::uint64_t, double> pxz, pyz, pz;
    pxyz.reserve(d.table().size());
    for (const auto& [key, p] : d.table()) {
        auto st = [&](VarIndex v) { return d.state(key, v); };
        const std::uint64_t kx = cx.encode(st), ky = cy.encode(st), kz = cz.encode(st);
        const std::uint64_t xz = kz * rx + kx, yz = kz * ry + ky;
        Cell& c = pxyz[xz * ry + ky];
        c.p += p;
        c.xz = xz;
        c.yz = yz;
        c.z = kz;
        pxz[xz] += p;
        pyz[yz] += p;
        pz[kz] += p;
    }
    double total = 0.0;
    for (const auto& [k, c] : pxyz) {
        if (c.p <= 0.0) continue;
        total += c.p * std::log((c.p * pz[c.z]) / (pxz[c.xz] * pyz[c.yz]));
    }
    return total;
}

inline double mi_sets(const DiscreteDistribution& d, const VarSet& x, const VarSet& y) { return cmi_sets(d, x, y, {}); }

/// CMI(X, Y | cond) for single variables. Never Undefined.
inline MeasureValue cmi_exact(const DiscreteDistribution& d, VarIndex x, VarIndex y, const VarSet& cond) {
    return MeasureValue::finite(cmi_sets(d, VarSet{x}, VarSet{y}, cond));
}

inline MeasureValue mi_exact(const DiscreteDistribution& d, VarIndex x, VarIndex y) { return cmi_exact(d, x, y, {}); }

/// X ⫫ Y | Z in `d`, decided by CMI(X,Y|Z) <= tol.
inline bool is_ci_exact(const DiscreteDistribution& d, const VarSet& x, const VarSet& y, const VarSet& z,
                        double tol = kDefaultCITolerance) {
    if (!disjoint(x, y)) throw std::invalid_argument("is_ci_exact needs disjoint x and y");
    return cmi_sets(d, x, y, z) <= tol;
}

/// Causal strength of X on Y with the remaining parents `cond`.
///
/// Undefined when some x' with f(x') > 0 and some l with f(l) > 0 have f(x', l) = 0,
/// because f(y | x', l) is then needed by the interventional denominator.
inline MeasureValue causal_strength(const DiscreteDistribution& d, VarIndex x, VarIndex y, const VarSet& cond) {
    detail::validate_triple(d, x, y, cond);
    const detail::TripleTables t(d, x, y, cond);
    using detail::TripleTables;

    std::vector<std::pair<std::string, State>> event;
    for (std::uint64_t l : t.sorted_l())
        for (State xs = 0; xs < t.x_card; ++xs)
            if (t.fx[xs] > kZeroThreshold && TripleTables::lookup(t.fxl, l * t.x_card + xs) <= kZeroThreshold) {
                event.emplace_back(d.variables()[x].id, xs);
                for (auto& e : detail::describe_code(d, t.l_coder, l)) event.push_back(std::move(e));
                return MeasureValue::undefined({"f(y | x, l) conditions on a zero-probability event", event});
            }

    double total = 0.0;
    for (const auto& [k, p] : t.fxyl) {
        if (p <= 0.0) continue;
        const State ys = static_cast<State>(k % t.y_card);
        const std::uint64_t xl = k / t.y_card;
        const std::uint64_t l = xl / t.x_card;
        const double num = p / t.fxl.at(xl);
        double den = 0.0;
        for (State xp = 0; xp < t.x_card; ++xp) {
            if (t.fx[xp] <= kZeroThreshold) continue;
            const std::uint64_t xpl = l * t.x_card + xp;
            den += TripleTables::lookup(t.fxyl, xpl * t.y_card + ys) / t.fxl.at(xpl) * t.fx[xp];
        }
        total += p * std::log(num / den);
    }
    return MeasureValue::finite(total);
}

/// Part mutual information between X and Y given `cond`.
///
/// Undefined when f*(x|l) or f*(y|l) needs a conditional on a null (x', l) or (y', l) event.
inline MeasureValue pmi(const DiscreteDistribution& d, VarIndex x, VarIndex y, const VarSet& cond) {
    detail::validate_triple(d, x, y, cond);
    const detail::TripleTables t(d, x, y, cond);
    using detail::TripleTables;

    const auto ls = t.sorted_l();
    auto undefined_at = [&](VarIndex v, State s, std::uint64_t l) {
        std::vector<std::pair<std::string, State>> event{{d.variables()[v].id, s}};
        for (auto& e : detail::describe_code(d, t.l_coder, l)) event.push_back(std::move(e));
        return MeasureValue::undefined({"f*(.|l) conditions on a zero-probability event", event});
    };
    for (std::uint64_t l : ls)
        for (State xs = 0; xs < t.x_card; ++xs)
            if (t.fx[xs] > kZeroThreshold && TripleTables::lookup(t.fxl, l * t.x_card + xs) <= kZeroThreshold)
                return undefined_at(x, xs, l);
    for (std::uint64_t l : ls)
        for (State ys = 0; ys < t.y_card; ++ys)
            if (t.fy[ys] > kZeroThreshold && TripleTables::lookup(t.fyl, l * t.y_card + ys) <= kZeroThreshold)
                return undefined_at(y, ys, l);

    double total = 0.0;
    for (const auto& [k, p] : t.fxyl) {
        if (p <= 0.0) continue;
        const State ys = static_cast<State>(k % t.y_card);
        const std::uint64_t xl = k / t.y_card;
        const std::uint64_t l = xl / t.x_card;
        double fstar_x = 0.0;
        for (State yp = 0; yp < t.y_card; ++yp) {
            if (t.fy[yp] <= kZeroThreshold) continue;
            fstar_x += TripleTables::lookup(t.fxyl, xl * t.y_card + yp) / t.fyl.at(l * t.y_card + yp) * t.fy[yp];
        }
        double fstar_y = 0.0;
        for (State xp = 0; xp < t.x_card; ++xp) {
            if (t.fx[xp] <= kZeroThreshold) continue;
            const std::uint64_t xpl = l * t.x_card + xp;
            fstar_y += TripleTables::lookup(t.fxyl, xpl * t.y_card + ys) / t.fxl.at(xpl) * t.fx[xp];
        }
        total += p * std::log((p / t.fl.at(l)) / (fstar_x * fstar_y));
    }
    return MeasureValue::finite(total);
}

}  // namespace mbuniq
