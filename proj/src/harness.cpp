#include "scldpc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "scldpc/evolution.hpp"

namespace scldpc {

namespace fs = std::filesystem;
using nlohmann::json;

const char* kToolVersion = "0.1.0";

validation_error::validation_error(const std::vector<std::string>& p)
    : std::runtime_error("invalid configuration: " + [&] {
          std::string s;
          for (const auto& x : p) s += (s.empty() ? "" : "; ") + x;
          return s;
      }()),
      problems(p) {}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::map<std::string, std::string> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw io_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return entries;
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> grid;
    if (spec.find(':') != std::string::npos) {
        double a = 0, b = 0, step = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(spec);
        if (!(ss >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
            throw parameter_error("bad grid sweep, expected a:b:step with step > 0");
        for (double x = a; x <= b + 1e-12; x += step) grid.push_back(x);
    } else {
        std::istringstream ss(spec);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            grid.push_back(std::stod(tok));
        }
    }
    if (grid.empty()) throw parameter_error("empty grid: " + spec);
    return grid;
}

ConnectivityMatrix resolve_ensemble(const std::string& spec) {
    if (fs::exists(spec)) return parse_matrix(read_text_file(spec));
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw parameter_error("ensemble spec is neither a file nor family:l,r,...: " + spec);
    const Family fam = family_from_name(spec.substr(0, colon));
    std::vector<int> args;
    std::istringstream ss(spec.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) args.push_back(std::stoi(tok));
    auto need = [&](std::size_t n, const char* shape) {
        if (args.size() != n) throw parameter_error(std::string("ensemble spec needs ") + shape);
    };
    switch (fam) {
        case Family::single: need(3, "single:l,r,L"); return single_chain(args[0], args[1], args[2]);
        case Family::modified:
            need(4, "modified:l,r,L,p");
            return modified_chain(args[0], args[1], args[2], args[3]);
        case Family::loop: need(3, "loop:l,r,L"); return loop_ensemble(args[0], args[1], args[2]);
        case Family::multilayer:
            if (args.size() == 4) return multilayer(args[0], args[1], args[2], args[3], 1);
            need(5, "multilayer:l,r,L,N,t");
            return multilayer(args[0], args[1], args[2], args[3], args[4]);
        case Family::custom: break;
    }
    throw parameter_error("custom ensembles must be given as a matrix file");
}

void apply_config_entries(ExperimentConfig& cfg, const std::map<std::string, std::string>& entries) {
    for (const auto& [key, value] : entries) {
        if (key == "ensemble") cfg.ensemble = value;
        else if (key == "M") cfg.M = std::stoi(value);
        else if (key == "channel") cfg.channel = value;
        else if (key == "eps" || key == "ebn0" || key == "grid") cfg.grid = parse_grid(value);
        else if (key == "trials") cfg.trials = std::stoll(value);
        else if (key == "seed") cfg.base_seed = std::stoull(value);
        else if (key == "decoder") {
            if (value == "pd") cfg.decoder = Decoder::pd;
            else if (value == "bp") cfg.decoder = Decoder::bp;
            else if (value == "window") cfg.decoder = Decoder::window;
            else throw parameter_error("decoder must be pd, bp, or window");
        } else if (key == "W") cfg.W = std::stoi(value);
        else if (key == "out") cfg.out_dir = value;
        else if (key == "threads") cfg.threads = std::stoi(value);
        else if (key == "avoid_4cycles") cfg.avoid_4cycles = value == "1" || value == "true";
        else if (key == "overwrite") cfg.overwrite = value == "1" || value == "true";
        else if (key == "tol") cfg.tol = std::stod(value);
        else if (key == "eps_single") cfg.eps = std::stod(value);
        else if (key == "sample_tau") cfg.sample_tau = std::stod(value);
        else if (key == "alpha") cfg.scaling.alpha = std::stod(value);
        else if (key == "theta") cfg.scaling.theta = std::stod(value);
        else if (key == "ybar") cfg.scaling.ybar = std::stod(value);
        else if (key == "eps_star") cfg.scaling.epsilon_star = std::stod(value);
        else if (key == "n_chains") cfg.n_chains = std::stoi(value);
        else if (key == "bp_max_iterations") cfg.bp_max_iterations = std::stoi(value);
        else if (key == "llr_clip") cfg.llr_clip = std::stod(value);
        else throw parameter_error("unknown config key: " + key);
    }
}

void validate(const ExperimentConfig& cfg) {
    std::vector<std::string> problems;
    if (cfg.mode != RunMode::scaling) {
        if (cfg.ensemble.empty()) problems.push_back("ensemble: missing");
        else {
            try {
                resolve_ensemble(cfg.ensemble);
            } catch (const std::exception& e) {
                problems.push_back(std::string("ensemble: ") + e.what());
            }
        }
    }
    if (cfg.mode == RunMode::simulate || cfg.mode == RunMode::window_sim) {
        if (cfg.M < 1) problems.push_back("M: must be >= 1");
        if (cfg.trials < 1) problems.push_back("trials: must be >= 1");
        if (cfg.grid.empty()) problems.push_back("grid: must be nonempty");
    }
    if (cfg.mode == RunMode::scaling && cfg.grid.empty()) problems.push_back("grid: must be nonempty");
    if (cfg.channel != "bec" && cfg.channel != "biawgn") problems.push_back("channel: must be bec or biawgn");
    if (cfg.channel == "biawgn" && cfg.decoder == Decoder::pd && cfg.mode == RunMode::simulate)
        problems.push_back("decoder: pd applies to the bec channel only");
    if (cfg.mode == RunMode::threshold && cfg.tol <= 0) problems.push_back("tol: must be > 0");
    if (cfg.out_dir.empty()) problems.push_back("out: missing");
    if (!problems.empty()) throw validation_error(problems);
}

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct DirLock {
    fs::path path;
    explicit DirLock(const fs::path& dir) : path(dir / ".lock") {
        if (fs::exists(path))
            throw io_error("output directory is locked by another run: " + path.string());
        write_text_file(path.string(), "pid lock\n");
    }
    ~DirLock() {
        std::error_code ec;
        fs::remove(path, ec);
    }
};

json config_json(const ExperimentConfig& cfg) {
    json j;
    j["ensemble"] = cfg.ensemble;
    j["M"] = cfg.M;
    j["channel"] = cfg.channel;
    j["grid"] = cfg.grid;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.base_seed;
    j["decoder"] = cfg.decoder == Decoder::pd ? "pd" : (cfg.decoder == Decoder::bp ? "bp" : "window");
    j["W"] = cfg.W;
    j["threads"] = cfg.threads;
    j["avoid_4cycles"] = cfg.avoid_4cycles;
    j["tol"] = cfg.tol;
    j["eps_single"] = cfg.eps;
    j["bp_max_iterations"] = cfg.bp_max_iterations;
    j["llr_clip"] = cfg.llr_clip;
    j["scaling"] = {{"alpha", cfg.scaling.alpha},
                    {"theta", cfg.scaling.theta},
                    {"ybar", cfg.scaling.ybar},
                    {"eps_star", cfg.scaling.epsilon_star},
                    {"M", cfg.scaling.M},
                    {"L", cfg.scaling.L}};
    j["n_chains"] = cfg.n_chains;
    return j;
}

void write_manifest(const fs::path& dir, const ExperimentConfig& cfg, const std::string& matrix_hash,
                    const std::string& started, const std::string& status) {
    json j;
    j["schema_version"] = 1;
    j["tool_version"] = kToolVersion;
    j["mode"] = cfg.mode == RunMode::simulate    ? "simulate"
                : cfg.mode == RunMode::threshold ? "threshold"
                : cfg.mode == RunMode::evolve    ? "evolve"
                : cfg.mode == RunMode::scaling   ? "scaling"
                                                 : "window-sim";
    j["config"] = config_json(cfg);
    j["matrix_hash"] = matrix_hash;
    j["base_seed"] = cfg.base_seed;
    j["started_utc"] = started;
    j["finished_utc"] = status == "complete" ? utc_now() : "";
    j["status"] = status;
    write_text_file((dir / "manifest.json").string(), j.dump(2) + "\n");
}

}  // namespace

CsvTable bler_to_csv(const BlerTable& table) {
    CsvTable csv;
    csv.header = {table.param_name, "trials", "failures", "bler", "ci_low", "ci_high"};
    for (int c = 1; c <= table.chain_count; ++c) csv.header.push_back("fail_chain_" + std::to_string(c));
    for (const auto& row : table.rows) {
        std::vector<std::string> cells = {format_full(row.param),      std::to_string(row.trials),
                                          std::to_string(row.failures), format_full(row.bler),
                                          format_full(row.ci.low),      format_full(row.ci.high)};
        for (long long cf : row.chain_failures) cells.push_back(std::to_string(cf));
        csv.rows.push_back(std::move(cells));
    }
    return csv;
}

CsvTable predictions_to_csv(const std::vector<PredictionRow>& rows) {
    CsvTable csv;
    csv.header = {"eps", "delta_eps", "p_short", "mu0", "p_long"};
    for (const auto& r : rows)
        csv.rows.push_back({format_full(r.eps), format_full(r.delta_eps), format_full(r.p_short),
                            format_full(r.mu0), format_full(r.p_long)});
    return csv;
}

CsvTable window_rows_to_csv(const std::vector<WindowCompareRow>& rows) {
    CsvTable csv;
    csv.header = {"param",       "trials",       "bler_full",   "bler_window", "ci_full_low",
                  "ci_full_high", "ci_window_low", "ci_window_high", "mismatches"};
    for (const auto& r : rows)
        csv.rows.push_back({format_full(r.param), std::to_string(r.trials), format_full(r.bler_full),
                            format_full(r.bler_window), format_full(r.ci_full.low),
                            format_full(r.ci_full.high), format_full(r.ci_window.low),
                            format_full(r.ci_window.high), std::to_string(r.outcome_mismatches)});
    return csv;
}

CsvTable trajectory_to_csv(const Trajectory& traj, double sample_tau) {
    CsvTable csv;
    const int layers = traj.samples.empty() ? 0 : static_cast<int>(traj.samples[0].r1_layer.size());
    csv.header = {"tau", "r1_total"};
    for (int j = 1; j <= layers; ++j) csv.header.push_back("r1_layer_" + std::to_string(j));
    csv.header.push_back("v_total");
    for (int j = 1; j <= layers; ++j) csv.header.push_back("v_layer_" + std::to_string(j));
    csv.header.push_back("v_outer");
    double next_tau = 0.0;
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const auto& s = traj.samples[i];
        if (sample_tau > 0.0 && s.tau < next_tau && i + 1 != traj.samples.size()) continue;
        next_tau = s.tau + sample_tau;
        std::vector<std::string> cells = {format_full(s.tau), format_full(s.r1_total)};
        for (double x : s.r1_layer) cells.push_back(format_full(x));
        cells.push_back(format_full(s.v_total));
        for (double x : s.v_layer) cells.push_back(format_full(x));
        cells.push_back(format_full(s.v_outer));
        csv.rows.push_back(std::move(cells));
    }
    return csv;
}

std::string run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    ConnectivityMatrix T;
    std::string matrix_text, matrix_hash = "none";
    if (cfg.mode != RunMode::scaling) {
        T = resolve_ensemble(cfg.ensemble);
        matrix_text = serialize_matrix(T);
        matrix_hash = fnv1a_hex(matrix_text);
    }

    const fs::path dir(cfg.out_dir);
    if (fs::exists(dir / "manifest.json") && !cfg.overwrite)
        throw io_error("output directory already holds results; pass overwrite to replace them");
    fs::create_directories(dir);
    DirLock lock(dir);

    const std::string started = utc_now();
    write_manifest(dir, cfg, matrix_hash, started, "incomplete");
    if (!matrix_text.empty()) write_text_file((dir / "ensemble.txt").string(), matrix_text);

    TrialOptions topts;
    topts.avoid_4cycles = cfg.avoid_4cycles;
    topts.threads = cfg.threads;

    BPConfig bp;
    bp.max_iterations = cfg.bp_max_iterations;
    bp.llr_clip = cfg.llr_clip;

    switch (cfg.mode) {
        case RunMode::simulate: {
            BlerTable table;
            if (cfg.channel == "bec") {
                if (cfg.decoder == Decoder::pd)
                    table = run_trials(T, cfg.M, cfg.grid, cfg.trials, cfg.base_seed, topts);
                else if (cfg.decoder == Decoder::bp)
                    table = bec_bp_trials(T, cfg.M, cfg.grid, cfg.trials, cfg.base_seed, bp, topts);
                else
                    table = bec_window_trials(T, cfg.M, cfg.grid, cfg.trials, cfg.base_seed, cfg.W, bp,
                                              topts);
            } else {
                if (cfg.decoder == Decoder::window)
                    table = awgn_window_trials(T, cfg.M, cfg.grid, cfg.trials, cfg.base_seed, cfg.W, bp,
                                               topts);
                else
                    table = simulate_biawgn(T, cfg.M, cfg.grid, cfg.trials, cfg.base_seed, bp, topts);
            }
            write_csv((dir / "bler.csv").string(), bler_to_csv(table));
            break;
        }
        case RunMode::threshold: {
            const ThresholdResult res = threshold(T, cfg.tol);
            json j;
            j["epsilon_star"] = res.epsilon_star;
            j["tol"] = cfg.tol;
            j["probes"] = res.trajectories_evaluated;
            write_text_file((dir / "threshold.json").string(), j.dump(2) + "\n");
            break;
        }
        case RunMode::evolve: {
            const Trajectory traj = integrate(T, cfg.eps);
            write_csv((dir / "trajectory.csv").string(), trajectory_to_csv(traj, cfg.sample_tau));
            break;
        }
        case RunMode::scaling: {
            const auto rows = scaling_predictions(cfg.scaling, cfg.grid, cfg.n_chains);
            write_csv((dir / "prediction.csv").string(), predictions_to_csv(rows));
            break;
        }
        case RunMode::window_sim: {
            const auto rows = window_compare_bec(T, cfg.M, cfg.grid, cfg.trials, cfg.base_seed, cfg.W,
                                                 bp, topts);
            write_csv((dir / "window_compare.csv").string(), window_rows_to_csv(rows));
            break;
        }
    }

    write_manifest(dir, cfg, matrix_hash, started, "complete");
    return dir.string();
}

CsvTable overlay(const CsvTable& bler, const CsvTable& prediction, const std::string& pred_col) {
    const std::vector<std::string> keys = {"eps", "ebn0", "param"};
    int bk = -1, pk = -1;
    for (const auto& k : keys)
        if (bk < 0 && bler.column(k) >= 0 && prediction.column(k) >= 0) {
            bk = bler.column(k);
            pk = prediction.column(k);
        }
    if (bk < 0) throw io_error("overlay: the tables share no grid column");
    const int bv = bler.column("bler");
    const int pv = prediction.column(pred_col);
    if (bv < 0) throw io_error("overlay: missing bler column");
    if (pv < 0) throw io_error("overlay: missing prediction column " + pred_col);

    CsvTable out;
    out.header = {bler.header[bk], "bler", pred_col, "ratio"};
    for (const auto& brow : bler.rows) {
        const double key = std::stod(brow[bk]);
        for (const auto& prow : prediction.rows) {
            if (std::stod(prow[pk]) != key) continue;
            const double emp = std::stod(brow[bv]);
            const double pred = std::stod(prow[pv]);
            const double ratio = emp > 0.0 ? pred / emp : std::nan("");
            out.rows.push_back({brow[bk], brow[bv], prow[pv], format_full(ratio)});
            break;
        }
    }
    if (out.rows.empty()) throw io_error("overlay: empty join, the grids are disjoint");
    return out;
}

}  // namespace scldpc
