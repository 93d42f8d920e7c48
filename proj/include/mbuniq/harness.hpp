#pragma once

#include "mbuniq/algorithms.hpp"
#include "mbuniq/datagen.hpp"
#include "mbuniq/seeding.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

namespace mbuniq {

enum class UniquenessAlgorithm { Alg2AF, Alg2KI, Alg3, Alg4 };

inline UniquenessAlgorithm parse_algorithm(const std::string& s) {
    if (s == "alg2-af") return UniquenessAlgorithm::Alg2AF;
    if (s == "alg2-ki") return UniquenessAlgorithm::Alg2KI;
    if (s == "alg3") return UniquenessAlgorithm::Alg3;
    if (s == "alg4") return UniquenessAlgorithm::Alg4;
    throw std::invalid_argument("unknown algorithm: " + s);
}

inline std::string to_string(UniquenessAlgorithm a) {
    switch (a) {
        case UniquenessAlgorithm::Alg2AF: return "alg2-af";
        case UniquenessAlgorithm::Alg2KI: return "alg2-ki";
        case UniquenessAlgorithm::Alg3: return "alg3";
        case UniquenessAlgorithm::Alg4: return "alg4";
    }
    return "?";
}

inline const std::vector<UniquenessAlgorithm>& all_algorithms() {
    static const std::vector<UniquenessAlgorithm> all{UniquenessAlgorithm::Alg2AF, UniquenessAlgorithm::Alg2KI,
                                                      UniquenessAlgorithm::Alg3, UniquenessAlgorithm::Alg4};
    return all;
}

/// Runs one uniqueness procedure with any decider; Algorithm 3 uses backward elimination for M0.
template <CIDecider D>
UniquenessVerdict run_uniqueness(const D& ci, const VarSet& scope, VarIndex y, UniquenessAlgorithm algorithm,
                                 double kiamb_k, std::uint64_t kiamb_seed) {
    switch (algorithm) {
        case UniquenessAlgorithm::Alg2AF: return alg2_uniqueness(ci, scope, y, alg1_producer(ci, y));
        case UniquenessAlgorithm::Alg2KI: return alg2_uniqueness(ci, scope, y, kiamb_producer(ci, y, kiamb_k, kiamb_seed));
        case UniquenessAlgorithm::Alg3: return alg3_uniqueness(ci, scope, y, alg1_producer(ci, y));
        case UniquenessAlgorithm::Alg4: return alg4_uniqueness(ci, scope, y);
    }
    throw std::invalid_argument("unknown algorithm");
}

struct ExperimentConfig {
    std::vector<SettingId> settings{SettingId::S1, SettingId::S2, SettingId::S3, SettingId::S4};
    std::vector<std::size_t> sample_sizes{200, 500, 1000, 2000, 5000};
    std::size_t reps = 500;
    std::vector<UniquenessAlgorithm> algorithms = all_algorithms();
    double alpha = kDefaultAlpha;
    std::uint64_t seed = 20240601;
    CITestKind test = CITestKind::G2;
    std::size_t permutations = 199;
    double kiamb_k = kDefaultKiambK;
    /// Decide CI statements from the exact law instead of samples.
    bool exact = false;
    unsigned jobs = 0;  // 0 = hardware concurrency

    void validate() const {
        if (reps < 1) throw std::invalid_argument("reps must be >= 1");
        if (settings.empty() || sample_sizes.empty() || algorithms.empty())
            throw std::invalid_argument("settings, sample sizes and algorithms must be non-empty");
        for (SettingId s : settings)
            if (!detail::is_numbered(s)) throw std::invalid_argument("simulation supports settings 1-4 only");
        for (std::size_t n : sample_sizes)
            if (n < 200) throw std::invalid_argument("sample sizes must be >= 200");
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
        if (!(kiamb_k >= 0.0 && kiamb_k <= 1.0)) throw std::invalid_argument("kiamb k must lie in [0,1]");
    }
};

struct TrialOutcome {
    bool correct = false;
    bool predicted_unique = false;
    std::string error;
};

/// Seed for one replication: a pure function of the cell coordinates and the master seed.
inline std::uint64_t trial_seed(std::uint64_t master, SettingId s, std::size_t n, UniquenessAlgorithm a,
                                std::size_t rep) {
    return derive_seed(master, {static_cast<std::uint64_t>(s), n, static_cast<std::uint64_t>(a), rep});
}

/// Samples a dataset (unless exact), runs the verdict and scores it against the ground truth.
/// Algorithm failures are scored as incorrect with a reason rather than propagated.
inline TrialOutcome run_trial(const ExactSetting& truth, SettingId setting, std::size_t n,
                              UniquenessAlgorithm algorithm, std::uint64_t seed, const ExperimentConfig& cfg) {
    TrialOutcome out;
    try {
        UniquenessVerdict v;
        if (cfg.exact) {
            const ExactDecider ci(truth.distribution);
            v = run_uniqueness(ci, truth.scope, truth.target, algorithm, cfg.kiamb_k, derive_seed(seed, {3}));
        } else {
            const TestDecider ci(sample(SettingSpec{setting, {}, derive_seed(seed, {1})}, n), cfg.test, cfg.alpha,
                                 derive_seed(seed, {2}), cfg.permutations);
            v = run_uniqueness(ci, truth.scope, truth.target, algorithm, cfg.kiamb_k, derive_seed(seed, {3}));
        }
        out.predicted_unique = v.unique;
        out.correct = v.unique == truth.truth.unique;
    } catch (const std::exception& e) {
        out.correct = false;
        out.error = e.what();
    }
    return out;
}

struct CellResult {
    SettingId setting = SettingId::S1;
    std::size_t n = 0;
    UniquenessAlgorithm algorithm = UniquenessAlgorithm::Alg2AF;
    bool truth_unique = true;
    std::size_t reps = 0;
    std::size_t correct = 0;
    std::size_t false_unique = 0;
    std::size_t false_multiple = 0;
    std::size_t errors = 0;
    std::vector<std::uint64_t> seeds;
    double wall_seconds = 0.0;

    double rate() const { return reps ? static_cast<double>(correct) / static_cast<double>(reps) : 0.0; }
};

struct SimulationReport {
    ExperimentConfig config;
    std::vector<CellResult> cells;
    double wall_seconds = 0.0;

    const CellResult& cell(SettingId s, std::size_t n, UniquenessAlgorithm a) const {
        for (const auto& c : cells)
            if (c.setting == s && c.n == n && c.algorithm == a) return c;
        throw std::out_of_range("no such report cell");
    }
};

inline SimulationReport run_monte_carlo(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    std::map<SettingId, ExactSetting> truths;
    for (SettingId s : cfg.settings) truths.emplace(s, build_exact(SettingSpec{s, {}, 0}));

    SimulationReport report{cfg, {}, 0.0};
    for (SettingId s : cfg.settings)
        for (std::size_t n : cfg.sample_sizes)
            for (UniquenessAlgorithm a : cfg.algorithms) {
                CellResult c;
                c.setting = s;
                c.n = n;
                c.algorithm = a;
                c.truth_unique = truths.at(s).truth.unique;
                c.reps = cfg.reps;
                for (std::size_t r = 0; r < cfg.reps; ++r) c.seeds.push_back(trial_seed(cfg.seed, s, n, a, r));
                report.cells.push_back(std::move(c));
            }

    const std::size_t total = report.cells.size() * cfg.reps;
    std::vector<TrialOutcome> outcomes(total);
    std::vector<double> seconds(total, 0.0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < total; t = next++) {
            const CellResult& c = report.cells[t / cfg.reps];
            const auto t0 = std::chrono::steady_clock::now();
            outcomes[t] = run_trial(truths.at(c.setting), c.setting, c.n, c.algorithm, c.seeds[t % cfg.reps], cfg);
            seconds[t] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    unsigned jobs = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, total));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (std::size_t t = 0; t < total; ++t) {
        CellResult& c = report.cells[t / cfg.reps];
        const TrialOutcome& o = outcomes[t];
        c.wall_seconds += seconds[t];
        if (!o.error.empty()) {
            ++c.errors;
        } else if (o.correct) {
            ++c.correct;
        } else if (o.predicted_unique) {
            ++c.false_unique;
        } else {
            ++c.false_multiple;
        }
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

/// Deterministic report body. Timing is kept out so that identical seeds give identical bytes.
inline nlohmann::json report_to_json(const SimulationReport& r) {
    const auto& c = r.config;
    nlohmann::json cfg = {{"settings", nlohmann::json::array()},
                          {"sample_sizes", c.sample_sizes},
                          {"reps", c.reps},
                          {"algorithms", nlohmann::json::array()},
                          {"alpha", c.alpha},
                          {"seed", c.seed},
                          {"test", to_string(c.test)},
                          {"permutations", c.permutations},
                          {"kiamb_k", c.kiamb_k},
                          {"exact", c.exact}};
    for (SettingId s : c.settings) cfg["settings"].push_back(to_string(s));
    for (UniquenessAlgorithm a : c.algorithms) cfg["algorithms"].push_back(to_string(a));
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : r.cells)
        cells.push_back({{"setting", to_string(cell.setting)},
                         {"n", cell.n},
                         {"algorithm", to_string(cell.algorithm)},
                         {"truth", cell.truth_unique ? "unique" : "multiple"},
                         {"rate_kind", cell.truth_unique ? "TNR" : "TPR"},
                         {"rate", cell.rate()},
                         {"reps", cell.reps},
                         {"correct", cell.correct},
                         {"false_unique", cell.false_unique},
                         {"false_multiple", cell.false_multiple},
                         {"errors", cell.errors},
                         {"seeds", cell.seeds}});
    return {{"schema", "mbuniq.simulation_report/1"}, {"config", cfg}, {"cells", cells}};
}

inline nlohmann::json timing_to_json(const SimulationReport& r) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : r.cells)
        cells.push_back({{"setting", to_string(cell.setting)},
                         {"n", cell.n},
                         {"algorithm", to_string(cell.algorithm)},
                         {"trial_seconds", cell.wall_seconds}});
    return {{"wall_seconds", r.wall_seconds}, {"cells", cells}};
}

inline std::string report_to_csv(const SimulationReport& r) {
    std::ostringstream os;
    os.precision(10);
    os << "setting,n,algorithm,rate\n";
    for (const auto& c : r.cells) os << to_string(c.setting) << "," << c.n << "," << to_string(c.algorithm) << "," << c.rate() << "\n";
    return os.str();
}

}  // namespace mbuniq
