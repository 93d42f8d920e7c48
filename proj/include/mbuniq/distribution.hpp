#pragma once

#include "mbuniq/types.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

namespace mbuniq {

/// Probabilities at or below this are treated as structural zeros.
inline constexpr double kZeroThreshold = 1e-12;

/// Sparse joint probability table over named finite variables.
///
/// Only strictly positive cells are stored; a missing cell has probability
/// exactly zero. Cells are keyed by the mixed-radix index of the full
/// assignment (first variable varies fastest). Instances are immutable.
class DiscreteDistribution {
public:
    using Table = std::map<std::uint64_t, double>;

    DiscreteDistribution() = default;

    DiscreteDistribution(std::vector<VariableMeta> variables, Table table, double tolerance = 1e-9)
        : variables_(std::move(variables)), tolerance_(tolerance) {
        validate_variables();
        coder_ = SubsetCoder(variables_, all_vars());
        double total = 0.0;
        for (const auto& [key, p] : table) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("probabilities must be finite and nonnegative");
            if (key >= coder_.size()) throw std::invalid_argument("table key out of range");
            if (p > 0.0) {
                table_.emplace(key, p);
                total += p;
            }
        }
        if (std::abs(total - 1.0) > tolerance_)
            throw std::invalid_argument("probabilities sum to " + std::to_string(total) + ", not 1");
    }

    const std::vector<VariableMeta>& variables() const { return variables_; }
    std::size_t num_variables() const { return variables_.size(); }
    const Table& table() const { return table_; }
    double tolerance() const { return tolerance_; }

    VarIndex index_of(const std::string& id) const { return mbuniq::index_of(variables_, id); }
    VarSet indices_of(const std::vector<std::string>& ids) const { return mbuniq::indices_of(variables_, ids); }

    VarSet all_vars() const {
        VarSet s(variables_.size());
        for (VarIndex i = 0; i < s.size(); ++i) s[i] = i;
        return s;
    }

    State state(std::uint64_t key, VarIndex v) const {
        return static_cast<State>((key / coder_.strides()[v]) % variables_[v].cardinality);
    }

    std::vector<State> decode(std::uint64_t key) const {
        std::vector<State> out(variables_.size());
        for (VarIndex v = 0; v < out.size(); ++v) out[v] = state(key, v);
        return out;
    }

    std::uint64_t encode(const std::vector<State>& states) const {
        if (states.size() != variables_.size()) throw std::invalid_argument("assignment must cover every variable");
        for (VarIndex v = 0; v < states.size(); ++v)
            if (states[v] >= variables_[v].cardinality)
                throw std::invalid_argument("state out of range for variable " + variables_[v].id);
        return coder_.encode([&](VarIndex v) { return static_cast<std::uint64_t>(states[v]); });
    }

    double probability(const std::vector<State>& states) const {
        auto it = table_.find(encode(states));
        return it == table_.end() ? 0.0 : it->second;
    }

    /// Probability of a partial assignment given as (variable, state) pairs.
    double probability_of(const std::vector<std::pair<VarIndex, State>>& partial) const {
        double total = 0.0;
        for (const auto& [key, p] : table_) {
            bool match = true;
            for (const auto& [v, s] : partial)
                if (state(key, v) != s) {
                    match = false;
                    break;
                }
            if (match) total += p;
        }
        return total;
    }

    /// Marginal probabilities of `subset`, keyed by the subset's own mixed-radix code.
    std::unordered_map<std::uint64_t, double> marginal_codes(const SubsetCoder& sub) const {
        std::unordered_map<std::uint64_t, double> out;
        out.reserve(table_.size());
        for (const auto& [key, p] : table_) out[sub.encode([&](VarIndex v) { return state(key, v); })] += p;
        return out;
    }

private:
    void validate_variables() const {
        for (std::size_t i = 0; i < variables_.size(); ++i) {
            if (variables_[i].cardinality < 1)
                throw std::invalid_argument("variable " + variables_[i].id + " must have cardinality >= 1");
            for (std::size_t j = 0; j < i; ++j)
                if (variables_[i].id == variables_[j].id)
                    throw std::invalid_argument("duplicate variable id: " + variables_[i].id);
        }
    }

    std::vector<VariableMeta> variables_;
    SubsetCoder coder_;
    Table table_;
    double tolerance_ = 1e-9;
};

/// Accumulates probability mass on full assignments before freezing a distribution.
class DistributionBuilder {
public:
    explicit DistributionBuilder(std::vector<VariableMeta> variables)
        : variables_(std::move(variables)), coder_(variables_, full_set(variables_.size())) {}

    void add(const std::vector<State>& states, double p) {
        if (states.size() != variables_.size()) throw std::invalid_argument("assignment must cover every variable");
        for (VarIndex v = 0; v < states.size(); ++v)
            if (states[v] >= variables_[v].cardinality)
                throw std::invalid_argument("state out of range for variable " + variables_[v].id);
        if (p < 0.0) throw std::invalid_argument("negative probability");
        if (p == 0.0) return;
        table_[coder_.encode([&](VarIndex v) { return static_cast<std::uint64_t>(states[v]); })] += p;
    }

    /// Rescales to unit mass; useful for generators that accumulate unnormalized weights.
    DistributionBuilder& normalize() {
        double total = 0.0;
        for (const auto& [k, p] : table_) total += p;
        if (total <= 0.0) throw std::invalid_argument("cannot normalize an empty table");
        for (auto& [k, p] : table_) p /= total;
        return *this;
    }

    DiscreteDistribution build(double tolerance = 1e-9) const {
        return DiscreteDistribution(variables_, table_, tolerance);
    }

private:
    static VarSet full_set(std::size_t n) {
        VarSet s(n);
        for (VarIndex i = 0; i < n; ++i) s[i] = i;
        return s;
    }

    std::vector<VariableMeta> variables_;
    SubsetCoder coder_;
    DiscreteDistribution::Table table_;
};

/// Sums out every variable not in `keep`. Variable order of the result follows `d`.
inline DiscreteDistribution marginal(const DiscreteDistribution& d, const VarSet& keep) {
    for (VarIndex v : keep)
        if (v >= d.num_variables()) throw std::invalid_argument("unknown variable index in marginal");
    std::vector<VariableMeta> vars;
    for (VarIndex v : keep) vars.push_back(d.variables()[v]);
    DistributionBuilder b(vars);
    std::vector<State> states(keep.size());
    for (const auto& [key, p] : d.table()) {
        for (std::size_t i = 0; i < keep.size(); ++i) states[i] = d.state(key, keep[i]);
        b.add(states, p);
    }
    return b.build(d.tolerance());
}

inline DiscreteDistribution marginal(const DiscreteDistribution& d, const std::vector<std::string>& keep) {
    return marginal(d, d.indices_of(keep));
}

/// Half the L1 distance between two tables over identical variables.
inline double total_variation(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    if (a.variables() != b.variables()) throw std::invalid_argument("total_variation needs identical variable lists");
    double sum = 0.0;
    auto ia = a.table().begin();
    auto ib = b.table().begin();
    while (ia != a.table().end() || ib != b.table().end()) {
        if (ib == b.table().end() || (ia != a.table().end() && ia->first < ib->first)) {
            sum += ia->second;
            ++ia;
        } else if (ia == a.table().end() || ib->first < ia->first) {
            sum += ib->second;
            ++ib;
        } else {
            sum += std::abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return 0.5 * sum;
}

// JSON: {"variables":[{"id":"X","card":3},...], "table":[{"a":{"X":0,...},"p":0.05},...]}

inline nlohmann::json to_json(const DiscreteDistribution& d) {
    nlohmann::json vars = nlohmann::json::array();
    for (const auto& v : d.variables()) vars.push_back({{"id", v.id}, {"card", v.cardinality}});
    nlohmann::json table = nlohmann::json::array();
    for (const auto& [key, p] : d.table()) {
        nlohmann::json a = nlohmann::json::object();
        for (VarIndex v = 0; v < d.num_variables(); ++v) a[d.variables()[v].id] = d.state(key, v);
        table.push_back({{"a", a}, {"p", p}});
    }
    return {{"variables", vars}, {"table", table}};
}

inline DiscreteDistribution distribution_from_json(const nlohmann::json& j, double tolerance = 1e-9) {
    if (!j.is_object() || !j.contains("variables") || !j.contains("table"))
        throw std::invalid_argument("distribution JSON needs 'variables' and 'table'");
    std::vector<VariableMeta> vars;
    for (const auto& v : j.at("variables")) {
        const auto card = v.at("card").get<long long>();
        if (card < 1) throw std::invalid_argument("cardinality must be >= 1");
        vars.push_back({v.at("id").get<std::string>(), static_cast<State>(card)});
    }
    DistributionBuilder b(vars);
    for (const auto& row : j.at("table")) {
        const auto& a = row.at("a");
        if (a.size() != vars.size()) throw std::invalid_argument("table entry must assign every variable");
        std::vector<State> states(vars.size());
        for (VarIndex v = 0; v < vars.size(); ++v) {
            if (!a.contains(vars[v].id)) throw std::invalid_argument("table entry missing variable " + vars[v].id);
            const auto s = a.at(vars[v].id).get<long long>();
            if (s < 0) throw std::invalid_argument("negative state");
            states[v] = static_cast<State>(s);
        }
        b.add(states, row.at("p").get<double>());
    }
    return b.build(tolerance);
}

inline DiscreteDistribution load_distribution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return distribution_from_json(j);
}

inline void save_distribution(const DiscreteDistribution& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json(d).dump(2) << "\n";
}

}  // namespace mbuniq
