#pragma once

#include "mbuniq/distribution.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbuniq {

/// Column-major table of observed discrete states.
class Dataset {
public:
    Dataset(std::vector<VariableMeta> variables, std::vector<std::vector<State>> columns)
        : variables_(std::move(variables)), columns_(std::move(columns)) {
        if (columns_.size() != variables_.size()) throw std::invalid_argument("one column per variable required");
        n_ = columns_.empty() ? 0 : columns_.front().size();
        if (n_ == 0) throw std::invalid_argument("dataset needs at least one row");
        for (std::size_t v = 0; v < columns_.size(); ++v) {
            if (variables_[v].cardinality < 1) throw std::invalid_argument("cardinality must be >= 1");
            for (std::size_t u = 0; u < v; ++u)
                if (variables_[u].id == variables_[v].id) throw std::invalid_argument("duplicate id " + variables_[v].id);
            if (columns_[v].size() != n_) throw std::invalid_argument("columns must have equal length");
            for (State s : columns_[v])
                if (s >= variables_[v].cardinality)
                    throw std::invalid_argument("state out of range in column " + variables_[v].id);
        }
    }

    const std::vector<VariableMeta>& variables() const { return variables_; }
    std::size_t num_variables() const { return variables_.size(); }
    std::size_t n() const { return n_; }
    const std::vector<State>& column(VarIndex v) const { return columns_.at(v); }
    State at(std::size_t row, VarIndex v) const { return columns_[v][row]; }

    VarIndex index_of(const std::string& id) const { return mbuniq::index_of(variables_, id); }
    VarSet indices_of(const std::vector<std::string>& ids) const { return mbuniq::indices_of(variables_, ids); }

    VarSet all_vars() const {
        VarSet s(variables_.size());
        for (VarIndex i = 0; i < s.size(); ++i) s[i] = i;
        return s;
    }

    bool operator==(const Dataset&) const = default;

private:
    std::vector<VariableMeta> variables_;
    std::vector<std::vector<State>> columns_;
    std::size_t n_ = 0;
};

/// Law putting mass count/n on every observed full assignment.
inline DiscreteDistribution empirical_distribution(const Dataset& ds) {
    DistributionBuilder b(ds.variables());
    std::vector<State> row(ds.num_variables());
    const double w = 1.0 / static_cast<double>(ds.n());
    for (std::size_t r = 0; r < ds.n(); ++r) {
        for (VarIndex v = 0; v < row.size(); ++v) row[v] = ds.at(r, v);
        b.add(row, w);
    }
    return b.normalize().build();
}

namespace detail {

inline std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace detail

/// Parses a CSV with a header of variable ids and integer states.
///
/// Cardinalities come from `declared` when given (the sidecar JSON's
/// "variables" array), otherwise each is inferred as max observed state + 1.
inline Dataset parse_dataset_csv(std::istream& in, const std::optional<std::vector<VariableMeta>>& declared = {}) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
    const auto header = detail::split_csv_line(line);
    std::vector<std::vector<State>> columns(header.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw std::invalid_argument("CSV line " + std::to_string(line_no) + " has wrong number of cells");
        for (std::size_t c = 0; c < cells.size(); ++c) {
            unsigned long long v = 0;
            const auto* first = cells[c].data();
            const auto* last = first + cells[c].size();
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc{} || ptr != last || cells[c].empty())
                throw std::invalid_argument("CSV line " + std::to_string(line_no) + ": bad state '" + cells[c] + "'");
            columns[c].push_back(static_cast<State>(v));
        }
    }
    std::vector<VariableMeta> vars;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (declared) {
            vars.push_back(declared->at(index_of(*declared, header[c])));
        } else {
            State max_state = 0;
            for (State s : columns[c]) max_state = std::max(max_state, s);
            vars.push_back({header[c], max_state + 1});
        }
    }
    return Dataset(std::move(vars), std::move(columns));
}

inline std::vector<VariableMeta> variables_from_json(const nlohmann::json& j) {
    std::vector<VariableMeta> vars;
    for (const auto& v : j.at("variables")) vars.push_back({v.at("id").get<std::string>(), v.at("card").get<State>()});
    return vars;
}

/// Loads `path`; a sidecar `path + ".json"` declaring cardinalities is used when present.
inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::optional<std::vector<VariableMeta>> declared;
    if (std::ifstream side(path + ".json"); side) {
        nlohmann::json j;
        side >> j;
        declared = variables_from_json(j);
    }
    return parse_dataset_csv(in, declared);
}

inline void write_dataset_csv(const Dataset& ds, std::ostream& out) {
    for (VarIndex v = 0; v < ds.num_variables(); ++v) out << (v ? "," : "") << ds.variables()[v].id;
    out << "\n";
    for (std::size_t r = 0; r < ds.n(); ++r) {
        for (VarIndex v = 0; v < ds.num_variables(); ++v) out << (v ? "," : "") << ds.at(r, v);
        out << "\n";
    }
}

inline void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_dataset_csv(ds, out);
    nlohmann::json side = {{"variables", nlohmann::json::array()}};
    for (const auto& v : ds.variables()) side["variables"].push_back({{"id", v.id}, {"card", v.cardinality}});
    std::ofstream sidecar(path + ".json");
    sidecar << side.dump(2) << "\n";
}

}  // namespace mbuniq
