#pragma once

#include "mbuniq/mbuniq.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace mbuniq::cli {

namespace detail {

struct Source {
    std::string dist_path;
    std::string data_path;

    void add_to(CLI::App& app) {
        auto* d = app.add_option("--dist", dist_path, "distribution JSON file");
        auto* s = app.add_option("--data", data_path, "dataset CSV file");
        d->excludes(s);
    }

    bool exact() const { return !dist_path.empty(); }

    void require() const {
        if (dist_path.empty() && data_path.empty()) throw CLI::ValidationError("--dist/--data", "one of --dist or --data is required");
    }
};

struct TestFlags {
    double alpha = kDefaultAlpha;
    std::string test = "g2";
    std::uint64_t seed = 0;
    std::size_t permutations = 199;

    void add_to(CLI::App& app) {
        app.add_option("--alpha", alpha, "test level (data mode)")->check(CLI::Range(0.0, 1.0));
        app.add_option("--test", test, "g2 | g2-raw | permutation")->check(CLI::IsMember({"g2", "g2-raw", "permutation"}));
        app.add_option("--seed", seed, "seed for permutation tests and KIAMB");
        app.add_option("--permutations", permutations, "permutation count")->check(CLI::Range(99, 1000000));
    }
};

inline std::vector<std::string> split_ids(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& r : raw) {
        std::stringstream ss(r);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

inline VarSet default_scope(const std::vector<VariableMeta>& vars, const std::vector<std::string>& scope_ids,
                            VarIndex target) {
    if (!scope_ids.empty()) return indices_of(vars, scope_ids);
    VarSet all;
    for (VarIndex i = 0; i < vars.size(); ++i)
        if (i != target) all.push_back(i);
    return all;
}

/// Calls `fn(decider)` with an exact or a sample-based decider.
template <class Fn>
int with_decider(const Source& src, const TestFlags& tf, Fn&& fn) {
    if (src.exact()) {
        const ExactDecider ci(load_distribution(src.dist_path));
        return fn(ci);
    }
    const TestDecider ci(load_dataset(src.data_path), parse_test_kind(tf.test), tf.alpha, tf.seed, tf.permutations);
    return fn(ci);
}

inline std::vector<double> parse_doubles(const std::vector<std::string>& raw) {
    std::vector<double> out;
    for (const auto& s : split_ids(raw)) out.push_back(std::stod(s));
    return out;
}

}  // namespace detail

/// Runs the command line; returns 0 on success, 2 on usage errors, 1 on runtime errors.
inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    using namespace detail;
    CLI::App app{"Markov boundary uniqueness toolkit", "mbuniq"};
    app.require_subcommand(1);

    // measure
    auto* measure = app.add_subcommand("measure", "CMI, MI, causal strength or PMI on a law or a sample");
    Source m_src;
    m_src.add_to(*measure);
    std::string m_kind = "cmi", m_x, m_y;
    std::vector<std::string> m_cond;
    measure->add_option("--measure", m_kind, "cmi | mi | cs | pmi")->check(CLI::IsMember({"cmi", "mi", "cs", "pmi"}));
    measure->add_option("--x", m_x, "first variable")->required();
    measure->add_option("--y", m_y, "second variable")->required();
    measure->add_option("--cond", m_cond, "conditioning variables (comma separated)");

    // discover
    auto* discover = app.add_subcommand("discover", "find one Markov boundary");
    Source d_src;
    d_src.add_to(*discover);
    TestFlags d_tf;
    d_tf.add_to(*discover);
    std::string d_target, d_alg = "alg1";
    std::vector<std::string> d_scope;
    double d_k = kDefaultKiambK;
    bool d_trace = false;
    discover->add_option("--target", d_target, "target variable")->required();
    discover->add_option("--scope", d_scope, "candidate variables (default: all others)");
    discover->add_option("--algorithm", d_alg, "alg1 | kiamb")->check(CLI::IsMember({"alg1", "kiamb"}));
    discover->add_option("--k", d_k, "KIAMB k")->check(CLI::Range(0.0, 1.0));
    discover->add_flag("--trace", d_trace, "print the decision trace as JSON");

    // uniqueness
    auto* uniq = app.add_subcommand("uniqueness", "decide whether the Markov boundary is unique");
    Source u_src;
    u_src.add_to(*uniq);
    TestFlags u_tf;
    u_tf.add_to(*uniq);
    std::string u_target, u_alg = "alg2-af";
    std::vector<std::string> u_scope;
    double u_k = kDefaultKiambK;
    bool u_json = false;
    uniq->add_option("--target", u_target, "target variable")->required();
    uniq->add_option("--scope", u_scope, "candidate variables (default: all others)");
    uniq->add_option("--algorithm", u_alg, "alg2-af | alg2-ki | alg3 | alg4")
        ->check(CLI::IsMember({"alg2-af", "alg2-ki", "alg3", "alg4"}));
    uniq->add_option("--k", u_k, "KIAMB k")->check(CLI::Range(0.0, 1.0));
    uniq->add_flag("--json", u_json, "print the verdict as JSON");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "enumerate boundaries and the essential set of an exact law");
    std::string o_dist, o_target;
    std::vector<std::string> o_scope;
    bool o_json = false;
    oracle->add_option("--dist", o_dist, "distribution JSON file")->required();
    oracle->add_option("--target", o_target, "target variable")->required();
    oracle->add_option("--scope", o_scope, "candidate variables (default: all others)");
    oracle->add_flag("--json", o_json, "print JSON");

    // generate
    auto* generate = app.add_subcommand("generate", "sample a setting to CSV or export its exact law");
    std::string g_setting, g_out;
    std::size_t g_n = 1000;
    std::uint64_t g_seed = 1;
    bool g_exact = false;
    generate->add_option("--setting", g_setting, "1..4, fig1, triangle, triangle-full")->required();
    generate->add_option("--n", g_n, "rows")->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    generate->add_option("--seed", g_seed, "sampling seed");
    generate->add_option("--out", g_out, "output path (CSV, or JSON with --exact)")->required();
    generate->add_flag("--exact", g_exact, "write the exact law as distribution JSON");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo comparison of the uniqueness procedures");
    ExperimentConfig s_cfg;
    std::vector<std::string> s_settings, s_algs;
    std::vector<std::size_t> s_ns;
    std::optional<std::uint64_t> s_seed;
    std::string s_out, s_csv, s_timing, s_test = "g2";
    simulate->add_option("--reps", s_cfg.reps, "replications per cell")->check(CLI::PositiveNumber);
    simulate->add_option("--ns", s_ns, "sample sizes (comma separated)")->delimiter(',');
    simulate->add_option("--settings", s_settings, "settings 1..4 (comma separated)")
        ->delimiter(',')
        ->check(CLI::IsMember({"1", "2", "3", "4"}));
    simulate->add_option("--algorithms", s_algs, "alg2-af, alg2-ki, alg3, alg4")
        ->delimiter(',')
        ->check(CLI::IsMember({"alg2-af", "alg2-ki", "alg3", "alg4"}));
    simulate->add_option("--alpha", s_cfg.alpha, "test level")->check(CLI::Range(0.0, 1.0));
    simulate->add_option("--seed", s_seed, "master seed (default: MBUNIQ_SEED, else 20240601)");
    simulate->add_option("--jobs", s_cfg.jobs, "worker threads (0 = all cores)");
    simulate->add_option("--test", s_test, "g2 | g2-raw | permutation")->check(CLI::IsMember({"g2", "g2-raw", "permutation"}));
    simulate->add_option("--permutations", s_cfg.permutations, "permutation count")->check(CLI::Range(99, 1000000));
    simulate->add_option("--k", s_cfg.kiamb_k, "KIAMB k")->check(CLI::Range(0.0, 1.0));
    simulate->add_flag("--exact", s_cfg.exact, "decide from the exact laws instead of samples");
    simulate->add_option("--out", s_out, "report JSON path (default: stdout)");
    simulate->add_option("--csv", s_csv, "rate CSV path");
    simulate->add_option("--timing", s_timing, "wall-time JSON path");

    // perturb
    auto* perturb = app.add_subcommand("perturb", "epsilon-noise and singularity-family sweeps of CS and PMI");
    std::string p_dist, p_mode = "singularity", p_x, p_y;
    std::vector<std::string> p_cond, p_noise_vars, p_grid, p_alpha, p_fill;
    perturb->add_option("--dist", p_dist, "distribution JSON file")->required();
    perturb->add_option("--mode", p_mode, "singularity | noise")->check(CLI::IsMember({"singularity", "noise"}));
    perturb->add_option("--x", p_x, "cause variable")->required();
    perturb->add_option("--y", p_y, "effect variable")->required();
    perturb->add_option("--cond", p_cond, "conditioning variables");
    perturb->add_option("--grid", p_grid, "eta values (singularity) or epsilon values (noise)");
    perturb->add_option("--alpha", p_alpha, "law of Y on the first null cell (singularity)");
    perturb->add_option("--fill", p_fill, "law of Y on the remaining null cells (default uniform)");
    perturb->add_option("--noise-vars", p_noise_vars, "variables to noise (noise mode; default x)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (*measure) {
            m_src.require();
            const DiscreteDistribution d = m_src.exact() ? load_distribution(m_src.dist_path)
                                                         : empirical_distribution(load_dataset(m_src.data_path));
            const VarIndex x = d.index_of(m_x), y = d.index_of(m_y);
            const VarSet cond = d.indices_of(split_ids(m_cond));
            MeasureValue v = MeasureValue::finite(0.0);
            if (m_kind == "cmi") v = cmi_exact(d, x, y, cond);
            else if (m_kind == "mi") {
                if (!cond.empty()) throw CLI::ValidationError("--cond", "mi takes no conditioning set");
                v = mi_exact(d, x, y);
            } else if (m_kind == "cs") v = causal_strength(d, x, y, cond);
            else v = pmi(d, x, y, cond);
            out << v.to_string() << "\n";
            return 0;
        }
        if (*discover) {
            d_src.require();
            return with_decider(d_src, d_tf, [&](const auto& ci) {
                const auto& vars = ci.variables();
                const VarIndex y = index_of(vars, d_target);
                const VarSet scope = default_scope(vars, split_ids(d_scope), y);
                const MBResult r = d_alg == "alg1" ? alg1_backward_elimination(ci, scope, y)
                                                   : kiamb(ci, scope, y, d_k, d_tf.seed);
                if (d_trace) out << trace_to_json(r, vars).dump(2) << "\n";
                else out << format_set(vars, r.boundary) << "\n";
                return 0;
            });
        }
        if (*uniq) {
            u_src.require();
            return with_decider(u_src, u_tf, [&](const auto& ci) {
                const auto& vars = ci.variables();
                const VarIndex y = index_of(vars, u_target);
                const VarSet scope = default_scope(vars, split_ids(u_scope), y);
                const auto v = run_uniqueness(ci, scope, y, parse_algorithm(u_alg), u_k, u_tf.seed);
                if (u_json) {
                    out << verdict_to_json(v, vars).dump(2) << "\n";
                } else {
                    out << (v.unique ? "unique" : "multiple") << " M0=" << format_set(vars, v.m0);
                    if (v.witness) out << " witness=" << format_set(vars, v.witness->set);
                    out << "\n";
                }
                return 0;
            });
        }
        if (*oracle) {
            const auto d = load_distribution(o_dist);
            const VarIndex y = d.index_of(o_target);
            const VarSet scope = default_scope(d.variables(), split_ids(o_scope), y);
            const auto bs = enumerate_markov_boundaries(d, y, scope);
            const auto e = essential_set_exact(d, y, scope);
            const bool unique = is_markov_blanket(d, y, scope, e.members);
            if (o_json) {
                nlohmann::json j = {{"target", o_target},
                                    {"boundaries", nlohmann::json::array()},
                                    {"essential", ids_of(d.variables(), e.members)},
                                    {"unique", unique}};
                for (const auto& b : bs.boundaries) j["boundaries"].push_back(ids_of(d.variables(), b));
                out << j.dump(2) << "\n";
            } else {
                for (const auto& b : bs.boundaries) out << "boundary " << format_set(d.variables(), b) << "\n";
                out << "E=" << format_set(d.variables(), e.members) << "\n";
                out << (unique ? "unique" : "multiple") << "\n";
            }
            return 0;
        }
        if (*generate) {
            const SettingSpec spec{parse_setting(g_setting), {}, g_seed};
            const ExactSetting es = build_exact(spec);
            if (g_exact) {
                save_distribution(es.distribution, g_out);
            } else {
                const Dataset ds = mbuniq::detail::is_numbered(spec.id) ? sample(spec, g_n)
                                                               : sample_distribution(es.distribution, g_n, g_seed);
                save_dataset(ds, g_out);
            }
            return 0;
        }
        if (*simulate) {
            if (!s_ns.empty()) s_cfg.sample_sizes = s_ns;
            if (!s_settings.empty()) {
                s_cfg.settings.clear();
                for (const auto& s : s_settings) s_cfg.settings.push_back(parse_setting(s));
            }
            if (!s_algs.empty()) {
                s_cfg.algorithms.clear();
                for (const auto& a : s_algs) s_cfg.algorithms.push_back(parse_algorithm(a));
            }
            s_cfg.test = parse_test_kind(s_test);
            if (s_seed) {
                s_cfg.seed = *s_seed;
            } else if (const char* env = std::getenv("MBUNIQ_SEED"); env && *env) {
                s_cfg.seed = std::stoull(env);
            }
            try {
                s_cfg.validate();
            } catch (const std::invalid_argument& e) {
                err << "error: " << e.what() << "\n";
                return 2;
            }
            const SimulationReport rep = run_monte_carlo(s_cfg);
            const std::string body = report_to_json(rep).dump(2) + "\n";
            if (s_out.empty()) {
                out << body;
            } else {
                std::ofstream f(s_out, std::ios::binary);
                if (!f) throw std::runtime_error("cannot write " + s_out);
                f << body;
            }
            if (!s_csv.empty()) {
                std::ofstream f(s_csv, std::ios::binary);
                if (!f) throw std::runtime_error("cannot write " + s_csv);
                f << report_to_csv(rep);
            }
            if (!s_timing.empty()) {
                std::ofstream f(s_timing, std::ios::binary);
                if (!f) throw std::runtime_error("cannot write " + s_timing);
                f << timing_to_json(rep).dump(2) << "\n";
            }
            return 0;
        }
        if (*perturb) {
            const auto d = load_distribution(p_dist);
            const VarIndex x = d.index_of(p_x), y = d.index_of(p_y);
            const VarSet cond = d.indices_of(split_ids(p_cond));
            const DiscreteDistribution base = marginal(d, set_union(make_varset({x, y}), cond));
            const VarIndex bx = base.index_of(p_x), by = base.index_of(p_y);
            const VarSet bcond = base.indices_of(split_ids(p_cond));
            auto grid = parse_doubles(p_grid);
            if (p_mode == "singularity") {
                if (grid.empty()) grid = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
                const State ycard = base.variables()[by].cardinality;
                std::vector<double> fill(ycard, 1.0 / ycard);
                if (!p_fill.empty()) fill = parse_doubles(p_fill);
                auto cells = null_witness_cells(base, bx, bcond, fill);
                if (cells.empty()) throw std::invalid_argument("no null (x, l) cell: the measures are already defined");
                if (!p_alpha.empty()) cells.front().alpha = parse_doubles(p_alpha);
                out << "eta,tv,cs,pmi\n";
                for (double eta : grid) {
                    const auto f = singularity_family(base, bx, by, bcond, cells, eta);
                    out << fmt(eta) << "," << fmt(total_variation(base, f)) << ","
                        << causal_strength(f, bx, by, bcond).to_string() << "," << pmi(f, bx, by, bcond).to_string()
                        << "\n";
                }
            } else {
                if (grid.empty()) grid = {0.0, 0.05, 0.1, 0.2, 0.5};
                VarSet noised = p_noise_vars.empty() ? VarSet{x} : d.indices_of(split_ids(p_noise_vars));
                out << "epsilon,cmi,cs,pmi\n";
                for (double eps : grid) {
                    const auto f = eps > 0.0 ? epsilon_noise_all(d, noised, eps) : d;
                    out << fmt(eps) << "," << cmi_exact(f, x, y, cond).to_string() << ","
                        << causal_strength(f, x, y, cond).to_string() << "," << pmi(f, x, y, cond).to_string() << "\n";
                }
            }
            return 0;
        }
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace mbuniq::cli
