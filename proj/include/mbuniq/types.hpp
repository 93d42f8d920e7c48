#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace mbuniq {

using State = std::uint32_t;
using VarIndex = std::size_t;

/// A set of variable positions, kept sorted and unique.
using VarSet = std::vector<VarIndex>;

struct VariableMeta {
    std::string id;
    State cardinality = 1;

    bool operator==(const VariableMeta&) const = default;
};

inline VarSet make_varset(std::vector<VarIndex> vars) {
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    return vars;
}

inline VarSet make_varset(std::initializer_list<VarIndex> vars) {
    return make_varset(std::vector<VarIndex>(vars));
}

inline bool contains(const VarSet& s, VarIndex v) {
    return std::binary_search(s.begin(), s.end(), v);
}

inline VarSet set_union(const VarSet& a, const VarSet& b) {
    VarSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline VarSet set_minus(const VarSet& a, const VarSet& b) {
    VarSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline VarSet set_minus(const VarSet& a, VarIndex v) {
    VarSet out;
    out.reserve(a.size());
    for (VarIndex x : a)
        if (x != v) out.push_back(x);
    return out;
}

inline VarSet set_intersection(const VarSet& a, const VarSet& b) {
    VarSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline bool is_subset(const VarSet& a, const VarSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline bool disjoint(const VarSet& a, const VarSet& b) {
    return set_intersection(a, b).empty();
}

/// Looks up variable positions by id; throws std::invalid_argument on unknown ids.
inline VarIndex index_of(const std::vector<VariableMeta>& vars, const std::string& id) {
    for (VarIndex i = 0; i < vars.size(); ++i)
        if (vars[i].id == id) return i;
    throw std::invalid_argument("unknown variable id: " + id);
}

inline VarSet indices_of(const std::vector<VariableMeta>& vars, const std::vector<std::string>& ids) {
    std::vector<VarIndex> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(index_of(vars, id));
    return make_varset(std::move(out));
}

inline std::vector<std::string> ids_of(const std::vector<VariableMeta>& vars, const VarSet& s) {
    std::vector<std::string> out;
    out.reserve(s.size());
    for (VarIndex v : s) out.push_back(vars.at(v).id);
    return out;
}

/// Renders a set as "{A,B,C}".
inline std::string format_set(const std::vector<VariableMeta>& vars, const VarSet& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += vars.at(s[i]).id;
    }
    return out + "}";
}

/// Mixed-radix encoder for the joint state of a variable subset.
class SubsetCoder {
public:
    SubsetCoder() = default;
    SubsetCoder(const std::vector<VariableMeta>& vars, const VarSet& subset) : members_(subset) {
        strides_.reserve(subset.size());
        std::uint64_t stride = 1;
        for (VarIndex v : subset) {
            strides_.push_back(stride);
            const std::uint64_t card = vars.at(v).cardinality;
            if (card != 0 && stride > UINT64_MAX / card)
                throw std::invalid_argument("joint state space too large to index");
            stride *= card;
        }
        size_ = stride;
    }

    template <class StateLookup>
    std::uint64_t encode(StateLookup&& state_of) const {
        std::uint64_t code = 0;
        for (std::size_t i = 0; i < members_.size(); ++i) code += strides_[i] * state_of(members_[i]);
        return code;
    }

    std::uint64_t size() const { return size_; }
    const VarSet& members() const { return members_; }
    const std::vector<std::uint64_t>& strides() const { return strides_; }

private:
    VarSet members_;
    std::vector<std::uint64_t> strides_;
    std::uint64_t size_ = 1;
};

}  // namespace mbuniq
