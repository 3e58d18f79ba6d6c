// Command-line workbench for SC-LDPC chain ensembles: construction,
// mean-evolution analysis, Monte Carlo simulation, scaling-law predictions,
// and windowed-decoding experiments.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "scldpc/evolution.hpp"
#include "scldpc/harness.hpp"

using namespace scldpc;
using nlohmann::json;

namespace {

struct CommonFlags {
    std::string config_file;
    std::string out_dir;
    std::uint64_t seed = 1;
    int threads = 0;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonFlags& common) {
    cmd->add_option("--config", common.config_file, "flat key=value config file (CLI overrides it)");
    common.out_opt = cmd->add_option("--out", common.out_dir, "output directory");
    common.seed_opt = cmd->add_option("--seed", common.seed, "base RNG seed");
    common.threads_opt = cmd->add_option("--threads", common.threads, "worker cap (0 = all cores)");
}

// File entries first, then any CLI flag that was actually passed.
void merge_config(ExperimentConfig& cfg, const CommonFlags& common) {
    if (!common.config_file.empty()) apply_config_entries(cfg, read_config_file(common.config_file));
}

json ensemble_summary(const ConnectivityMatrix& T) {
    const DegreeProfile dp = degree_profile(T);
    const DesignRate rate = design_rate(T);
    json j;
    j["family"] = family_name(T.family);
    j["D"] = T.dim;
    j["l"] = T.l;
    j["r"] = T.r;
    j["L"] = T.L;
    if (T.family == Family::modified) j["p"] = T.p;
    if (T.family == Family::multilayer) {
        j["N"] = T.N;
        j["t"] = T.t;
        const Rational eta = protection_ratio(T.N, T.t);
        j["eta"] = {{"num", eta.num}, {"den", eta.den}, {"value", eta.value()}};
    }
    j["rate"] = {{"num", rate.num}, {"den", rate.den}, {"value", rate.value()}};
    j["d_v"] = dp.d_v;
    j["d_c"] = dp.d_c;
    j["check_degree"] = dp.check_degree;
    j["occupied_positions"] = dp.occupied_count();
    j["matrix_hash"] = fnv1a_hex(serialize_matrix(T));
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SC-LDPC connected-chain workbench"};
    app.require_subcommand(1);

    // ensemble
    auto* cmd_ens = app.add_subcommand("ensemble", "construct a connectivity matrix and its summary");
    CommonFlags ens_common;
    std::string ens_spec;
    bool ens_print = false;
    cmd_ens->add_option("--ensemble,-e", ens_spec, "family:l,r,... or matrix file")->required();
    cmd_ens->add_flag("--print", ens_print, "write the matrix to stdout as well");
    add_common(cmd_ens, ens_common);

    // evolve
    auto* cmd_evo = app.add_subcommand("evolve", "mean evolution trajectory CSV");
    CommonFlags evo_common;
    ExperimentConfig evo_cfg;
    evo_cfg.mode = RunMode::evolve;
    cmd_evo->add_option("--ensemble,-e", evo_cfg.ensemble, "ensemble spec");
    cmd_evo->add_option("--eps", evo_cfg.eps, "channel erasure probability");
    cmd_evo->add_option("--sample-tau", evo_cfg.sample_tau, "CSV sampling stride in tau units");
    bool evo_overwrite = false;
    cmd_evo->add_flag("--overwrite", evo_overwrite, "replace existing results");
    add_common(cmd_evo, evo_common);

    // threshold
    auto* cmd_thr = app.add_subcommand("threshold", "BP threshold by bisection");
    CommonFlags thr_common;
    ExperimentConfig thr_cfg;
    thr_cfg.mode = RunMode::threshold;
    cmd_thr->add_option("--ensemble,-e", thr_cfg.ensemble, "ensemble spec");
    cmd_thr->add_option("--tol", thr_cfg.tol, "bisection tolerance");
    bool thr_overwrite = false;
    cmd_thr->add_flag("--overwrite", thr_overwrite, "replace existing results");
    add_common(cmd_thr, thr_common);

    // simulate
    auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo block error rates");
    CommonFlags sim_common;
    ExperimentConfig sim_cfg;
    sim_cfg.mode = RunMode::simulate;
    std::string sim_eps, sim_eps_list, sim_ebn0, sim_decoder = "pd";
    cmd_sim->add_option("--ensemble,-e", sim_cfg.ensemble, "ensemble spec");
    cmd_sim->add_option("--M", sim_cfg.M, "variables per occupied position");
    cmd_sim->add_option("--eps", sim_eps, "erasure grid a:b:step");
    cmd_sim->add_option("--eps-list", sim_eps_list, "comma-separated erasure grid");
    cmd_sim->add_option("--ebn0", sim_ebn0, "Eb/N0 grid (dB), biawgn channel");
    cmd_sim->add_option("--channel", sim_cfg.channel, "bec | biawgn");
    cmd_sim->add_option("--trials", sim_cfg.trials, "trials per grid point");
    cmd_sim->add_option("--decoder", sim_decoder, "pd | bp | window");
    cmd_sim->add_option("--W", sim_cfg.W, "window width (decoder=window)");
    cmd_sim->add_option("--bp-iters", sim_cfg.bp_max_iterations, "BP iteration cap");
    cmd_sim->add_flag("--avoid-4cycles", sim_cfg.avoid_4cycles, "expurgate 4-cycles when sampling");
    bool sim_overwrite = false;
    cmd_sim->add_flag("--overwrite", sim_overwrite, "replace existing results");
    add_common(cmd_sim, sim_common);

    // scaling
    auto* cmd_scl = app.add_subcommand("scaling", "finite-length scaling-law predictions");
    CommonFlags scl_common;
    ExperimentConfig scl_cfg;
    scl_cfg.mode = RunMode::scaling;
    std::string scl_eps;
    cmd_scl->add_option("--alpha", scl_cfg.scaling.alpha, "std-to-mean ratio at the critical point");
    cmd_scl->add_option("--theta", scl_cfg.scaling.theta, "covariance decay rate");
    cmd_scl->add_option("--ybar", scl_cfg.scaling.ybar, "critical phase extent");
    cmd_scl->add_option("--eps-star", scl_cfg.scaling.epsilon_star, "ensemble threshold");
    cmd_scl->add_option("--M", scl_cfg.scaling.M, "variables per position");
    cmd_scl->add_option("--L", scl_cfg.scaling.L, "chain length");
    cmd_scl->add_option("--n-chains", scl_cfg.n_chains, "independent chains in the union bound");
    cmd_scl->add_option("--eps", scl_eps, "erasure grid a:b:step or list");
    bool scl_overwrite = false;
    cmd_scl->add_flag("--overwrite", scl_overwrite, "replace existing results");
    add_common(cmd_scl, scl_common);

    // window-sim
    auto* cmd_win = app.add_subcommand("window-sim", "paired full-vs-window decoding campaign");
    CommonFlags win_common;
    ExperimentConfig win_cfg;
    win_cfg.mode = RunMode::window_sim;
    std::string win_eps;
    cmd_win->add_option("--ensemble,-e", win_cfg.ensemble, "ensemble spec");
    cmd_win->add_option("--M", win_cfg.M, "variables per occupied position");
    cmd_win->add_option("--eps", win_eps, "erasure grid");
    cmd_win->add_option("--trials", win_cfg.trials, "paired trials per grid point");
    cmd_win->add_option("--W", win_cfg.W, "window width in positions");
    cmd_win->add_option("--bp-iters", win_cfg.bp_max_iterations, "BP iteration cap");
    bool win_overwrite = false;
    cmd_win->add_flag("--overwrite", win_overwrite, "replace existing results");
    add_common(cmd_win, win_common);

    // overlay
    auto* cmd_ovl = app.add_subcommand("overlay", "join Monte Carlo results with predictions");
    std::string ovl_bler, ovl_pred, ovl_out, ovl_col = "p_short";
    cmd_ovl->add_option("--bler", ovl_bler, "bler.csv path")->required();
    cmd_ovl->add_option("--prediction", ovl_pred, "prediction.csv path")->required();
    cmd_ovl->add_option("--out", ovl_out, "merged CSV path")->required();
    cmd_ovl->add_option("--pred-col", ovl_col, "prediction column for the ratio");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_ens->parsed()) {
            const ConnectivityMatrix T = resolve_ensemble(ens_spec);
            const json summary = ensemble_summary(T);
            if (!ens_common.out_dir.empty()) {
                std::filesystem::create_directories(ens_common.out_dir);
                write_text_file(ens_common.out_dir + "/ensemble.txt", serialize_matrix(T));
                write_text_file(ens_common.out_dir + "/summary.json", summary.dump(2) + "\n");
            }
            if (ens_print || ens_common.out_dir.empty()) std::cout << serialize_matrix(T);
            std::cout << summary.dump(2) << "\n";
            return 0;
        }
        if (cmd_ovl->parsed()) {
            const CsvTable merged = overlay(read_csv(ovl_bler), read_csv(ovl_pred), ovl_col);
            write_csv(ovl_out, merged);
            std::cout << "wrote " << ovl_out << " (" << merged.rows.size() << " rows)\n";
            return 0;
        }

        ExperimentConfig cfg;
        CommonFlags common;
        if (cmd_evo->parsed()) {
            cfg = evo_cfg;
            common = evo_common;
            merge_config(cfg, common);
            cfg.overwrite = evo_overwrite || cfg.overwrite;
        } else if (cmd_thr->parsed()) {
            cfg = thr_cfg;
            common = thr_common;
            merge_config(cfg, common);
            cfg.overwrite = thr_overwrite || cfg.overwrite;
        } else if (cmd_sim->parsed()) {
            cfg = sim_cfg;
            common = sim_common;
            merge_config(cfg, common);
            cfg.overwrite = sim_overwrite || cfg.overwrite;
            if (!sim_eps.empty()) cfg.grid = parse_grid(sim_eps);
            if (!sim_eps_list.empty()) cfg.grid = parse_grid(sim_eps_list);
            if (!sim_ebn0.empty()) {
                cfg.grid = parse_grid(sim_ebn0);
                cfg.channel = "biawgn";
            }
            if (sim_decoder == "pd") cfg.decoder = Decoder::pd;
            else if (sim_decoder == "bp") cfg.decoder = Decoder::bp;
            else if (sim_decoder == "window") cfg.decoder = Decoder::window;
            else throw parameter_error("decoder must be pd, bp, or window");
        } else if (cmd_scl->parsed()) {
            cfg = scl_cfg;
            common = scl_common;
            merge_config(cfg, common);
            cfg.overwrite = scl_overwrite || cfg.overwrite;
            if (!scl_eps.empty()) cfg.grid = parse_grid(scl_eps);
        } else if (cmd_win->parsed()) {
            cfg = win_cfg;
            common = win_common;
            merge_config(cfg, common);
            cfg.overwrite = win_overwrite || cfg.overwrite;
            if (!win_eps.empty()) cfg.grid = parse_grid(win_eps);
        }
        if (common.out_opt && common.out_opt->count()) cfg.out_dir = common.out_dir;
        else if (cfg.out_dir.empty()) cfg.out_dir = common.out_dir;
        if (common.seed_opt && common.seed_opt->count()) cfg.base_seed = common.seed;
        if (common.threads_opt && common.threads_opt->count()) cfg.threads = common.threads;

        const std::string dir = run_experiment(cfg);
        if (cfg.mode == RunMode::threshold)
            std::cout << read_text_file(dir + "/threshold.json");
        else
            std::cout << "wrote " << dir << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
