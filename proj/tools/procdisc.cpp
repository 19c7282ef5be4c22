#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "procdisc/channels.hpp"
#include "procdisc/lower_bounds.hpp"
#include "procdisc/sdp/sdpa.hpp"
#include "procdisc/upper_bounds.hpp"

using namespace procdisc;

namespace {

// ---------------------------------------------------------------------------
// Configuration: flat dotted key-value text, strict schema.
// ---------------------------------------------------------------------------

const std::set<std::string> kKnownKeys = {
    "ensemble.family", "ensemble.m",      "ensemble.t",        "ensemble.q_b",
    "ensemble.q_t",    "ensemble.q_b_offset", "ensemble.nu0",  "ensemble.dnu",
    "ensemble.p_c",    "ensemble.n",      "ensemble.seed",     "ensemble.priors",
    "bounds.list",     "solver.tol",      "solver.max_iter",   "solver.order_cap",
    "partition.breakpoints", "sweep.parameter", "sweep.start", "sweep.stop",
    "sweep.points",    "output.path",
};

const std::vector<std::string> kBoundNames = {"ub1",   "ub2", "ub1prime",  "partition",  "exact",
                                              "bayes", "pgm", "choistate", "nonadaptive"};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }
    double get_real(const std::string& key, double fallback) const {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        try {
            size_t pos = 0;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + " has a non-numeric value '" + it->second +
                              "'");
        }
    }
    int get_int(const std::string& key, int fallback) const {
        double v = get_real(key, fallback);
        int i = static_cast<int>(v);
        if (v != i) throw ConfigError("config key " + key + " must be an integer");
        return i;
    }
    std::vector<std::string> get_list(const std::string& key) const {
        std::vector<std::string> out;
        auto it = kv.find(key);
        if (it == kv.end()) return out;
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            size_t a = item.find_first_not_of(" \t");
            size_t b = item.find_last_not_of(" \t");
            if (a == std::string::npos) continue;
            out.push_back(item.substr(a, b - a + 1));
        }
        return out;
    }
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

void set_config_pair(RunConfig& cfg, const std::string& assignment, const std::string& where) {
    size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError(where + ": expected key=value, got '" + assignment + "'");
    std::string key = trim(assignment.substr(0, eq));
    std::string value = trim(assignment.substr(eq + 1));
    if (kKnownKeys.count(key) == 0) throw ConfigError(where + ": unknown config key '" + key + "'");
    cfg.kv[key] = value;
}

RunConfig parse_config(std::istream& in, const std::string& path) {
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        set_config_pair(cfg, line, path + ":" + std::to_string(lineno));
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Ensemble construction.
// ---------------------------------------------------------------------------

std::vector<double> config_priors(const RunConfig& cfg, int m_count) {
    auto items = cfg.get_list("ensemble.priors");
    if (items.empty()) return std::vector<double>(m_count, 1.0 / m_count);
    std::vector<double> priors;
    double sum = 0.0;
    for (const auto& s : items) {
        priors.push_back(std::stod(s));
        sum += priors.back();
    }
    if (static_cast<int>(priors.size()) != m_count)
        throw ConfigError("ensemble.priors needs " + std::to_string(m_count) + " entries");
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("priors must sum to 1");
    return priors;
}

struct EnsembleSpec {
    std::string family;
    int m = 3;
    int t = 1;
    double q_b = 0.5, q_t = 0.1;
    double nu0 = 0.3, dnu = 0.04, p_c = 0.2, n = 1.0;
    unsigned seed = 1;
    std::vector<double> priors;
};

EnsembleSpec read_spec(const RunConfig& cfg) {
    EnsembleSpec s;
    s.family = cfg.get("ensemble.family", "");
    if (s.family.empty()) throw ConfigError("ensemble.family is required");
    if (s.family != "cpf" && s.family != "gad" && s.family != "random")
        throw ConfigError("unknown ensemble.family '" + s.family + "' (cpf, gad, random)");
    s.m = cfg.get_int("ensemble.m", s.family == "gad" ? 3 : 3);
    s.t = cfg.get_int("ensemble.t", s.family == "gad" ? 3 : 1);
    if (s.family == "gad" && (s.m != 3 || s.t != 3))
        throw ConfigError("the gad family is the three-process, three-step memory ensemble");
    s.q_b = cfg.get_real("ensemble.q_b", s.q_b);
    s.q_t = cfg.get_real("ensemble.q_t", s.q_t);
    s.nu0 = cfg.get_real("ensemble.nu0", s.nu0);
    s.dnu = cfg.get_real("ensemble.dnu", s.dnu);
    s.p_c = cfg.get_real("ensemble.p_c", s.p_c);
    s.n = cfg.get_real("ensemble.n", s.n);
    s.seed = static_cast<unsigned>(cfg.get_int("ensemble.seed", 1));
    s.priors = config_priors(cfg, s.m);
    return s;
}

Ensemble build_ensemble(const EnsembleSpec& s) {
    if (s.family == "cpf") {
        Ensemble e = cpf_ensemble(s.m, s.q_b, s.q_t, s.t);
        return Ensemble(e.processes, s.priors);
    }
    if (s.family == "gad") {
        Ensemble e = fig4_ensemble(s.nu0, s.dnu, s.p_c, s.n);
        return Ensemble(e.processes, s.priors);
    }
    std::vector<KrausChannel> channels;
    for (int m = 0; m < s.m; ++m) channels.push_back(random_qubit_channel(s.seed + m));
    return ensemble_from_channels(channels, s.priors, s.t);
}

// ---------------------------------------------------------------------------
// Bounds.
// ---------------------------------------------------------------------------

struct BoundResult {
    double value = 0.0;
    std::string status = "optimal";
    double seconds = 0.0;
};

double pgm_for_ensemble(const Ensemble& e, const EnsembleSpec& s, int order_cap) {
    double n_in = 1.0;
    bool memoryless = true;
    for (const auto& sd : e.processes.front().step_dims()) {
        n_in *= sd.n_v;
        if (sd.n_wp_out > 1) memoryless = false;
    }
    const double order = static_cast<double>(e.processes.front().choi_order());
    if (order <= order_cap) {
        std::vector<Matrix> states;
        for (const auto& p : e.processes) states.push_back(p.choi().op.matrix() / n_in);
        return pgm_success(StateEnsemble(std::move(states), e.priors));
    }
    if (!memoryless)
        throw std::invalid_argument(
            "pgm refused: comb order " + std::to_string(static_cast<long>(order)) +
            " exceeds cap " + std::to_string(order_cap) + " and the process carries memory");
    // Low-rank route: the comb Choi of a memoryless process factors through
    // the Kraus operators of the step tensor product.
    std::vector<Matrix> factors;
    for (const auto& p : e.processes) {
        std::vector<Matrix> kraus = {Matrix::Ones(1, 1)};
        for (int t = 0; t < p.num_steps(); ++t) {
            std::vector<Matrix> next;
            for (const auto& a : kraus)
                for (const auto& k : p.step(t).kraus) {
                    Matrix prod(a.rows() * k.rows(), a.cols() * k.cols());
                    for (int r = 0; r < a.rows(); ++r)
                        for (int c = 0; c < a.cols(); ++c)
                            prod.block(r * k.rows(), c * k.cols(), k.rows(), k.cols()) = a(r, c) * k;
                    next.push_back(std::move(prod));
                }
            kraus = std::move(next);
        }
        Matrix f(kraus.front().size(), static_cast<long>(kraus.size()));
        for (size_t i = 0; i < kraus.size(); ++i) {
            // Row-major vectorization matches the Choi convention.
            const Matrix& k = kraus[i];
            long idx = 0;
            for (int r = 0; r < k.rows(); ++r)
                for (int c = 0; c < k.cols(); ++c) f(idx++, static_cast<long>(i)) = k(r, c);
        }
        factors.push_back(f / std::sqrt(n_in));
    }
    (void)s;
    return pgm_success_factors(factors, e.priors);
}

std::vector<StepFactorization> cpf_factorization(const EnsembleSpec& s) {
    std::vector<StepFactorization> factors(s.t);
    for (int t = 0; t < s.t; ++t) {
        factors[t].resize(s.m);
        for (int j = 0; j < s.m; ++j)
            for (int m = 0; m < s.m; ++m)
                factors[t][j].push_back(amplitude_damping(j == m ? s.q_t : s.q_b));
    }
    return factors;
}

PartitionSpec config_partition(const RunConfig& cfg, const Ensemble& e) {
    auto items = cfg.get_list("partition.breakpoints");
    std::vector<int> breaks;
    if (items.empty()) {
        for (int t = 1; t <= e.num_steps(); ++t) breaks.push_back(t);
    } else {
        for (const auto& it : items) breaks.push_back(std::stoi(it));
    }
    return PartitionSpec::with_default_allocation(std::move(breaks), e.priors);
}

BoundResult compute_bound(const std::string& name, const Ensemble& e, const EnsembleSpec& s,
                          const RunConfig& cfg, const sdp::SolverSettings& settings,
                          int order_cap) {
    BoundResult res;
    auto t0 = std::chrono::steady_clock::now();
    if (name == "ub1") {
        res.value = std::min(1.0, upper_bound_1(e, settings));
    } else if (name == "ub2") {
        res.value = std::min(1.0, upper_bound_2(e, settings));
    } else if (name == "ub1prime") {
        if (s.family != "cpf")
            throw std::invalid_argument("ub1prime needs the tensor-product cpf family");
        res.value = std::min(1.0, tensor_factor_bound(e, cpf_factorization(s), settings));
    } else if (name == "partition") {
        res.value = std::min(1.0, upper_bound_partition(e, config_partition(cfg, e), settings));
    } else if (name == "exact") {
        res.value = ultimate_success(e, settings, order_cap);
    } else if (name == "bayes") {
        res.value = bayes_lower_bound(e, settings).value;
    } else if (name == "pgm") {
        res.value = pgm_for_ensemble(e, s, order_cap);
    } else if (name == "choistate") {
        res.value = choi_state_lower_bound(e, settings, order_cap);
    } else if (name == "nonadaptive") {
        if (e.size() != 2 || e.processes.front().step_dims().front().n_wp_out > 1)
            throw std::invalid_argument("nonadaptive needs a binary memoryless ensemble");
        bool same_step = true;
        // The parallel bound needs one channel repeated T times.
        const auto& p0 = e.processes[0];
        for (int t = 1; t < p0.num_steps(); ++t)
            if ((choi_from_kraus(p0.step(t)).op.matrix() - choi_from_kraus(p0.step(0)).op.matrix())
                    .cwiseAbs()
                    .maxCoeff() > 1e-12)
                same_step = false;
        if (!same_step || !e.equal_priors(1e-12))
            throw std::invalid_argument(
                "nonadaptive needs identical steps per process and equal priors");
        res.value = nonadaptive_binary(e.processes[0].step(0), e.processes[1].step(0),
                                       e.num_steps(), settings, order_cap);
    } else {
        throw ConfigError("unknown bound '" + name + "' in bounds.list");
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

bool sandwich_consistent(const std::map<std::string, BoundResult>& results, double tol = 1e-6) {
    const std::set<std::string> uppers = {"ub1", "ub2", "ub1prime", "partition"};
    const std::set<std::string> lowers = {"bayes", "pgm", "choistate", "nonadaptive"};
    std::optional<double> exact;
    if (auto it = results.find("exact"); it != results.end()) exact = it->second.value;
    for (const auto& [name, r] : results) {
        if (r.value < -tol || r.value > 1.0 + tol) return false;
        if (lowers.count(name)) {
            if (exact && r.value > *exact + tol) return false;
            for (const auto& [uname, ur] : results)
                if (uppers.count(uname) && r.value > ur.value + tol) return false;
        }
        if (uppers.count(name) && exact && *exact > r.value + tol) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Output.
// ---------------------------------------------------------------------------

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output path " + path);
    out << content;
}

// ---------------------------------------------------------------------------
// Tasks.
// ---------------------------------------------------------------------------

int run_validate(const RunConfig& cfg) {
    EnsembleSpec s = read_spec(cfg);
    Ensemble e = build_ensemble(s);
    std::cout << "family " << s.family << ", " << e.size() << " processes, " << e.num_steps()
              << " steps\n";
    bool ok = true;
    for (int m = 0; m < e.size(); ++m) {
        for (int t = 0; t < e.num_steps(); ++t) {
            auto rep = is_cptp(e.processes[m].step(t), 1e-10);
            std::cout << "process " << m << " step " << t << ": cptp residual "
                      << fmt(rep.trace_preservation_residual) << "\n";
            ok = ok && rep.ok;
        }
        const int order_cap = cfg.get_int("solver.order_cap", 256);
        if (e.processes[m].choi_order() <= order_cap) {
            auto comb = is_comb(e.processes[m].choi().op, e.processes[m].step_dims(), 1e-8);
            std::cout << "process " << m << " comb residual " << fmt(comb.worst_residual) << "\n";
            ok = ok && comb.ok;
        } else {
            std::cout << "process " << m << " comb check skipped (order "
                      << e.processes[m].choi_order() << " exceeds cap " << order_cap << ")\n";
        }
    }
    std::cout << (ok ? "validation passed\n" : "validation FAILED\n");
    return ok ? 0 : 1;
}

int run_bounds(const RunConfig& cfg, const sdp::SolverSettings& settings,
               const std::string& out_path) {
    EnsembleSpec s = read_spec(cfg);
    Ensemble e = build_ensemble(s);
    auto names = cfg.get_list("bounds.list");
    if (names.empty()) names = {"ub1", "bayes"};
    const int order_cap = cfg.get_int("solver.order_cap", 256);

    std::map<std::string, BoundResult> results;
    for (const auto& name : names)
        results[name] = compute_bound(name, e, s, cfg, settings, order_cap);
    bool consistent = sandwich_consistent(results);

    std::string csv = "bound,value,status,seconds\n";
    for (const auto& name : names) {
        const auto& r = results[name];
        std::cout << name << " = " << fmt(r.value) << " (" << r.status << ", " << fmt(r.seconds)
                  << "s)\n";
        csv += name + "," + fmt(r.value) + "," + r.status + "," + fmt(r.seconds) + "\n";
    }
    std::cout << "sandwich consistent: " << (consistent ? "yes" : "NO") << "\n";
    csv += "consistent," + std::string(consistent ? "1" : "0") + ",,\n";
    if (!out_path.empty()) write_file(out_path, csv);
    return 0;
}

int run_sweep(const RunConfig& cfg, const std::string& task, const sdp::SolverSettings& settings,
              const std::string& out_path, int jobs) {
    EnsembleSpec base = read_spec(cfg);
    const bool cpf = (task == "sweep-cpf");
    if (cpf && base.family != "cpf") throw ConfigError("sweep-cpf needs ensemble.family = cpf");
    if (!cpf && base.family != "gad") throw ConfigError("sweep-gad needs ensemble.family = gad");

    std::string param = cfg.get("sweep.parameter", cpf ? "q_t" : "nu0");
    if (param != (cpf ? "q_t" : "nu0"))
        throw ConfigError("sweep.parameter must be " + std::string(cpf ? "q_t" : "nu0") +
                          " for this task");
    const double start = cfg.get_real("sweep.start", cpf ? 0.1 : 0.1);
    const double stop = cfg.get_real("sweep.stop", cpf ? 0.7 : 0.5);
    const int points = cfg.get_int("sweep.points", 5);
    if (points < 1) throw ConfigError("sweep.points must be positive");
    const double offset = cfg.get_real("ensemble.q_b_offset", 0.04);

    auto names = cfg.get_list("bounds.list");
    if (names.empty())
        names = cpf ? std::vector<std::string>{"ub1", "ub1prime", "bayes", "pgm"}
                    : std::vector<std::string>{"exact", "bayes", "ub1", "ub2", "choistate"};
    const int order_cap = cfg.get_int("solver.order_cap", 256);

    struct Row {
        double value = 0.0;
        std::map<std::string, BoundResult> results;
        std::string error;
    };
    std::vector<Row> rows(points);
    std::atomic<int> next{0};
    std::atomic<bool> solver_failed{false};

    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < points; i = next.fetch_add(1)) {
            Row& row = rows[i];
            row.value = (points == 1) ? start : start + (stop - start) * i / (points - 1);
            EnsembleSpec s = base;
            if (cpf) {
                s.q_t = row.value;
                s.q_b = row.value + offset;
            } else {
                s.nu0 = row.value;
            }
            try {
                Ensemble e = build_ensemble(s);
                for (const auto& name : names)
                    row.results[name] = compute_bound(name, e, s, cfg, settings, order_cap);
            } catch (const std::exception& ex) {
                row.error = ex.what();
                solver_failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    const int nthreads = std::max(1, std::min(jobs, points));
    for (int i = 0; i < nthreads - 1; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (const auto& row : rows)
        if (!row.error.empty()) {
            std::cerr << "solver failure at " << param << " = " << fmt(row.value) << ": "
                      << row.error << "\n";
        }
    if (solver_failed) return 2;

    std::string csv = param;
    for (const auto& name : names) csv += "," + name;
    for (const auto& name : names) csv += ",status_" + name;
    csv += ",consistent\n";
    for (const auto& row : rows) {
        bool consistent = sandwich_consistent(row.results);
        csv += fmt(row.value);
        for (const auto& name : names) csv += "," + fmt(row.results.at(name).value);
        for (const auto& name : names) csv += "," + row.results.at(name).status;
        csv += std::string(",") + (consistent ? "1" : "0") + "\n";
    }
    std::cout << csv;
    if (!out_path.empty()) write_file(out_path, csv);
    return 0;
}

int run_export_sdpa(const RunConfig& cfg, const std::string& out_path) {
    if (out_path.empty()) throw ConfigError("export-sdpa needs --out or output.path");
    EnsembleSpec s = read_spec(cfg);
    Ensemble e = build_ensemble(s);
    std::vector<StepDims> dims;
    std::vector<Matrix> weighted;
    for (int m = 0; m < e.size(); ++m) {
        std::vector<StepDims> d;
        ChoiOperator c = e.processes[m].segment_choi(0, e.num_steps() - 1, &d);
        if (m == 0) dims = d;
        weighted.push_back(e.priors[m] * c.op.matrix());
    }
    auto p = build_tester_sdp(weighted, dims);
    sdp::export_sdpa_file(p, out_path);
    std::cout << "wrote " << out_path << " (" << p.num_constraints() << " constraints, "
              << p.num_blocks() << " blocks)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bounds on the ultimate success probability of process discrimination"};
    app.require_subcommand(1);
    std::string config_path, out_path;
    int jobs = 1;
    double tol = -1.0;
    std::vector<std::string> overrides;
    std::vector<CLI::App*> tasks;
    for (const char* name : {"validate", "bounds", "sweep-cpf", "sweep-gad", "export-sdpa"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_path, "output path (CSV or .dat-s)");
        sub->add_option("--jobs", jobs, "worker threads for sweep points");
        sub->add_option("--tol", tol, "solver tolerance override");
        sub->add_option("--set", overrides, "config overrides, key=value");
        tasks.push_back(sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }
    const std::string task = app.get_subcommands().front()->get_name();

    try {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot read config file " + config_path);
        RunConfig cfg = parse_config(in, config_path);
        for (const auto& ov : overrides) set_config_pair(cfg, ov, "--set");

        sdp::SolverSettings settings;
        settings.tol = (tol > 0.0) ? tol : cfg.get_real("solver.tol", 1e-8);
        settings.max_iter = cfg.get_int("solver.max_iter", 200);

        if (out_path.empty()) out_path = cfg.get("output.path", "");
        if (task == "validate") return run_validate(cfg);
        if (task == "bounds") return run_bounds(cfg, settings, out_path);
        if (task == "export-sdpa") return run_export_sdpa(cfg, out_path);
        return run_sweep(cfg, task, settings, out_path, jobs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 2;
    }
}
