// Experiment runner: parses a scenario config, dispatches the training /
// reservation / baseline subcommands and writes CSV artifacts plus a manifest
// into the output directory.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "edgesim/csv.hpp"
#include "edgesim/experiment.hpp"

namespace fs = std::filesystem;
using namespace edgesim;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "scenario config file (JSON)");
    cmd->add_option("--out", args.out_dir, "output directory (default: runs/<stamp>-<cmd>)");
    cmd->add_option("--set", args.overrides, "config override, dotted.path=value")->take_all();
    cmd->add_option("--seed", args.seed, "seed override")->each([&](const std::string&) {
        args.seed_set = true;
    });
}

ScenarioConfig load_config(const CommonArgs& args) {
    ScenarioConfig cfg = args.config_path.empty()
                             ? ScenarioConfig::defaults_with_overrides(args.overrides)
                             : ScenarioConfig::from_file_with_overrides(args.config_path, args.overrides);
    if (args.seed_set) {
        ScenarioConfig patched = cfg;
        patched.seed = args.seed;
        return patched;
    }
    return cfg;
}

fs::path prepare_out_dir(const CommonArgs& args, const std::string& subcommand) {
    fs::path dir;
    if (!args.out_dir.empty()) {
        dir = args.out_dir;
    } else {
        const auto now = std::chrono::system_clock::now().time_since_epoch();
        const auto stamp = std::chrono::duration_cast<std::chrono::seconds>(now).count();
        dir = fs::path("runs") / (std::to_string(stamp) + "-" + subcommand);
    }
    fs::create_directories(dir);
    return dir;
}

void write_manifest(const fs::path& dir, const std::string& subcommand, const ScenarioConfig& cfg) {
    nlohmann::json m;
    m["subcommand"] = subcommand;
    m["seed"] = cfg.seed;
    m["version"] = kVersion;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "fnv1a:%016llx",
                  static_cast<unsigned long long>(cfg.config_hash()));
    m["config_hash"] = hash;
    m["config"] = nlohmann::json::parse(cfg.to_json_string());
    std::ofstream out(dir / "manifest.json");
    out << m.dump(2) << "\n";
}

void write_training_curve(const fs::path& dir, const std::vector<EpochStats>& curve) {
    std::ofstream out(dir / "training_curve.csv");
    CsvWriter w(out);
    w.row("epoch", "mean_latency_ms", "mean_reward", "clip_fraction", "mean_ratio", "value_loss",
          "noise_std", "x_uplink", "x_downlink", "x_compute");
    for (const auto& e : curve)
        w.row(e.epoch, e.mean_latency_ms, e.mean_reward, e.clip_fraction, e.mean_ratio,
              e.value_loss, e.noise_std, e.reservation.x(), e.reservation.y(), e.reservation.z());
}

void write_trajectory(const fs::path& dir, const std::string& name, const ReservationRun& run) {
    std::ofstream out(dir / name);
    CsvWriter w(out);
    w.row("window", "phase", "x_uplink", "x_downlink", "x_compute", "lambda", "l_h_ms",
          "weighted_usage", "rolling_l_h_ms");
    for (const auto& r : run.trajectory)
        w.row(r.window, std::string(r.warmup ? "warmup" : "guided"), r.x.x(), r.x.y(), r.x.z(),
              r.lambda, r.l_h_ms, r.usage, r.rolling_l_h_ms);
}

void write_eval(const fs::path& dir, const std::vector<EvalSummary>& sums) {
    {
        std::ofstream out(dir / "latency_cdf.csv");
        CsvWriter w(out);
        w.row("policy", "latency_ms", "cumulative_probability");
        for (const auto& s : sums) {
            std::vector<double> sorted = s.latencies_ms;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t i = 0; i < sorted.size(); ++i)
                w.row(s.label, sorted[i],
                      static_cast<double>(i + 1) / static_cast<double>(sorted.size()));
        }
    }
    {
        std::ofstream out(dir / "stage_breakdown.csv");
        CsvWriter w(out);
        w.row("policy", "local_ms", "uplink_ms", "queue_ms", "edge_ms", "broadcast_ms");
        for (const auto& s : sums)
            w.row(s.label, s.stage_local, s.stage_uplink, s.stage_queue, s.stage_edge,
                  s.stage_broadcast);
    }
    {
        std::ofstream out(dir / "summary.csv");
        CsvWriter w(out);
        w.row("policy", "mean_latency_ms", "offloads");
        for (const auto& s : sums)
            w.row(s.label, s.mean_latency_ms, static_cast<std::int64_t>(s.latencies_ms.size()));
    }
}

PolicyPair load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    return PolicyPair::load(in);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-driven vehicular offloading simulator and two-timescale controller"};
    app.require_subcommand(1);

    CommonArgs train_args, reserve_args, baseline_args, ve_args, eval_args, sweep_args;
    std::string reserve_ckpt, eval_ckpt, sweep_ckpt;
    std::string eval_policy = "trained";
    int sweep_from = 2, sweep_to = 10;

    auto* cmd_train = app.add_subcommand("train", "phase 1: train the shared offloading policy");
    add_common(cmd_train, train_args);

    auto* cmd_reserve =
        app.add_subcommand("reserve", "phase 2: GPR reservation control with a frozen checkpoint");
    add_common(cmd_reserve, reserve_args);
    cmd_reserve->add_option("--checkpoint", reserve_ckpt, "trained policy checkpoint")->required();

    auto* cmd_baseline =
        app.add_subcommand("baseline", "calibrate the always-offload baseline reservation");
    add_common(cmd_baseline, baseline_args);

    auto* cmd_ve = app.add_subcommand("virtualedge",
                                      "always-offload policy with GPR reservation control");
    add_common(cmd_ve, ve_args);

    auto* cmd_eval = app.add_subcommand("evaluate", "latency statistics under random reservations");
    add_common(cmd_eval, eval_args);
    cmd_eval->add_option("--checkpoint", eval_ckpt, "trained policy checkpoint");
    cmd_eval->add_option("--policy", eval_policy,
                         "trained | full_offload | full_local | static:<a> | all");

    auto* cmd_sweep = app.add_subcommand("sweep-vehicles", "usage comparison across fleet sizes");
    add_common(cmd_sweep, sweep_args);
    cmd_sweep->add_option("--checkpoint", sweep_ckpt, "trained policy checkpoint")->required();
    cmd_sweep->add_option("--from", sweep_from, "first vehicle count");
    cmd_sweep->add_option("--to", sweep_to, "last vehicle count");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_train->parsed()) {
            const ScenarioConfig cfg = load_config(train_args);
            const fs::path dir = prepare_out_dir(train_args, "train");
            write_manifest(dir, "train", cfg);
            const TrainResult res = train_policy(cfg, cfg.seed, &std::cout);
            write_training_curve(dir, res.curve);
            std::ofstream ckpt(dir / "policy.ckpt", std::ios::binary);
            res.policy.save(ckpt);
            std::cout << "artifacts in " << dir.string() << "\n";
        } else if (cmd_reserve->parsed()) {
            const ScenarioConfig cfg = load_config(reserve_args);
            const PolicyPair policy = load_checkpoint(reserve_ckpt);
            const fs::path dir = prepare_out_dir(reserve_args, "reserve");
            write_manifest(dir, "reserve", cfg);
            const ReservationRun run = run_reservation_loop(policy, cfg, cfg.seed, &std::cout);
            write_trajectory(dir, "trajectory.csv", run);
            std::cout << "converged usage " << run.converged_usage << ", l_H "
                      << run.converged_l_h_ms << " ms; artifacts in " << dir.string() << "\n";
        } else if (cmd_baseline->parsed()) {
            const ScenarioConfig cfg = load_config(baseline_args);
            const fs::path dir = prepare_out_dir(baseline_args, "baseline");
            write_manifest(dir, "baseline", cfg);
            const CalibrationResult res =
                baseline_calibrate(BaselinePolicy::full_offload(), cfg, cfg.seed);
            std::ofstream out(dir / "baseline.csv");
            CsvWriter w(out);
            w.row("feasible", "x_uplink", "x_downlink", "x_compute", "weighted_usage");
            w.row(res.feasible ? 1 : 0, res.reservation.x(), res.reservation.y(),
                  res.reservation.z(), res.usage);
            std::ofstream probes(dir / "probes.csv");
            CsvWriter pw(probes);
            pw.row("x_uplink", "x_downlink", "x_compute", "l_h_ms", "feasible");
            for (const auto& p : res.probes)
                pw.row(p.x.x(), p.x.y(), p.x.z(), p.l_h_ms, p.feasible ? 1 : 0);
            std::cout << "calibrated usage " << res.usage << "; artifacts in " << dir.string()
                      << "\n";
        } else if (cmd_ve->parsed()) {
            const ScenarioConfig cfg = load_config(ve_args);
            const fs::path dir = prepare_out_dir(ve_args, "virtualedge");
            write_manifest(dir, "virtualedge", cfg);
            const ReservationRun run = run_virtualedge(cfg, cfg.seed, &std::cout);
            write_trajectory(dir, "trajectory.csv", run);
            std::cout << "converged usage " << run.converged_usage << "; artifacts in "
                      << dir.string() << "\n";
        } else if (cmd_eval->parsed()) {
            const ScenarioConfig cfg = load_config(eval_args);
            const fs::path dir = prepare_out_dir(eval_args, "evaluate");
            write_manifest(dir, "evaluate", cfg);
            PolicyPair trained;
            bool have_trained = false;
            if (!eval_ckpt.empty()) {
                trained = load_checkpoint(eval_ckpt);
                have_trained = true;
            }
            std::vector<BaselinePolicy> policies;
            auto add_policy = [&](const std::string& name) {
                if (name == "trained") {
                    if (!have_trained)
                        throw std::runtime_error("evaluate: --policy trained needs --checkpoint");
                    policies.push_back(BaselinePolicy::trained(trained));
                } else if (name == "full_offload") {
                    policies.push_back(BaselinePolicy::full_offload());
                } else if (name == "full_local") {
                    policies.push_back(BaselinePolicy::full_local());
                } else if (name.rfind("static:", 0) == 0) {
                    policies.push_back(BaselinePolicy::static_split(std::stod(name.substr(7))));
                } else {
                    throw std::runtime_error("evaluate: unknown policy " + name);
                }
            };
            if (eval_policy == "all") {
                if (have_trained) add_policy("trained");
                add_policy("full_offload");
                add_policy("full_local");
                add_policy("static:0.5");
            } else {
                add_policy(eval_policy);
            }
            std::vector<EvalSummary> sums;
            for (const auto& p : policies) sums.push_back(evaluate_policy(p, cfg, cfg.seed));
            write_eval(dir, sums);
            for (const auto& s : sums)
                std::cout << s.label << ": mean latency " << s.mean_latency_ms << " ms over "
                          << s.latencies_ms.size() << " offloads\n";
            std::cout << "artifacts in " << dir.string() << "\n";
        } else if (cmd_sweep->parsed()) {
            const ScenarioConfig cfg = load_config(sweep_args);
            if (sweep_from < 1 || sweep_to < sweep_from)
                throw ConfigError("sweep-vehicles: need 1 <= from <= to");
            const PolicyPair policy = load_checkpoint(sweep_ckpt);
            const fs::path dir = prepare_out_dir(sweep_args, "sweep");
            write_manifest(dir, "sweep-vehicles", cfg);
            const auto rows = sweep_vehicles(cfg, policy, sweep_from, sweep_to, cfg.seed, &std::cout);
            std::ofstream out(dir / "sweep.csv");
            CsvWriter w(out);
            w.row("n_vehicles", "adaptive_usage", "baseline_usage", "virtualedge_usage",
                  "gap_vs_baseline");
            for (const auto& r : rows)
                w.row(r.n_vehicles, r.adaptive_usage, r.baseline_usage, r.virtualedge_usage,
                      r.gap_vs_baseline);
            std::cout << "artifacts in " << dir.string() << "\n";
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return 0;
}
