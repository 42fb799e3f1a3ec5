#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "windtrip/scenario.hpp"
#include "windtrip/summary.hpp"

namespace windtrip {

namespace cli_detail {

inline ScenarioConfig resolve_config(const std::string& config_path,
                                     const std::string& scenario_name,
                                     std::optional<std::uint64_t> seed_override) {
    ScenarioConfig sc;
    if (!config_path.empty()) {
        sc = load_config_file(config_path);
    } else if (!scenario_name.empty()) {
        sc = scenario_by_name(scenario_name);
    } else {
        throw ConfigError("either --config or --scenario is required");
    }
    if (seed_override) {
        sc.seed = *seed_override;
    }
    return sc;
}

inline std::vector<PhaseSpec> phases_for(const ScenarioConfig& sc) {
    if (sc.mission_type == "hover") {
        return make_hover_phases(sc);
    }
    return make_roundtrip_phases(sc.plan, sc.rates);
}

struct RunResult {
    MissionLog log;
    std::filesystem::path dir;
};

inline RunResult run_and_write(const ScenarioConfig& sc, const std::vector<PhaseSpec>& phases,
                               const std::filesystem::path& dir,
                               std::optional<DisturbanceTrack> track = std::nullopt) {
    RunResult r;
    r.dir = dir;
    r.log = run_phases(make_setup(sc), phases, std::move(track));
    write_mission_outputs(r.log, sc, dir);
    return r;
}

inline int finish(const RunResult& r) {
    if (r.log.diverged) {
        std::cerr << "simulation diverged: " << r.log.divergence_message << "\n"
                  << "partial logs written to " << r.dir.string() << "\n";
        return 2;
    }
    std::cout << "logs written to " << r.dir.string() << "\n";
    return 0;
}

inline ScenarioConfig with_return_mode(ScenarioConfig sc, LegMode mode) {
    sc.plan.return_mode = mode;
    if (sc.mission_type == "hover") {
        sc.hover_mode = mode;
    }
    return sc;
}

inline void print_phase_rmse(const MissionLog& log) {
    for (const auto& p : log.phases) {
        try {
            std::printf("  %-10s mode=%-11s rmse=%.4f m\n", p.name.c_str(), to_string(p.mode),
                        rmse(log, p.name));
        } catch (const std::invalid_argument&) {
        }
    }
}

}  // namespace cli_detail

inline int run_cli(std::vector<std::string> args) {
    using namespace cli_detail;
    CLI::App app{
        "windtrip: round-trip wind-disturbance rejection simulator for a small quadrotor"};
    app.require_subcommand(1);

    std::string config_path, scenario_name, out_dir, mode_str, leg, track_path;
    std::string field_name, plane, minmax_min, minmax_max, param_path, values_csv, modes_csv;
    std::optional<std::uint64_t> seed;
    double resolution = 0.05, sample_time = 0.0;
    int jobs = 1;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON configuration file");
        cmd->add_option("--scenario", scenario_name,
                        "named preset: jet|complex|slow|hover|calm");
        cmd->add_option("--seed", seed, "override the master seed");
        cmd->add_option("--out", out_dir, "output directory");
    };

    auto* simulate = app.add_subcommand("simulate", "run a single leg or hover");
    add_common(simulate);
    simulate->add_option("--leg", leg, "outbound|return|hover (default outbound)");
    simulate->add_option("--mode", mode_str, "controller mode pd|feedback|feedforward");
    simulate->add_option("--track", track_path,
                         "recorded track CSV for a feedforward return leg");

    auto* roundtrip = app.add_subcommand("roundtrip", "run a full round-trip mission");
    add_common(roundtrip);
    roundtrip->add_option("--return-mode", mode_str, "pd|feedback|feedforward");

    auto* compare = app.add_subcommand(
        "compare", "run the same mission with several return modes and report reductions");
    add_common(compare);
    compare->add_option("--modes", modes_csv, "comma list, default pd,feedback,feedforward");

    auto* fieldmap = app.add_subcommand("fieldmap", "sample a wind field on a grid to CSV");
    fieldmap->add_option("--config", config_path, "JSON configuration file");
    fieldmap->add_option("--scenario", scenario_name, "named preset");
    fieldmap->add_option("--field", field_name, "field preset: jet|complex|calm");
    fieldmap->add_option("--plane", plane, "fixed axis, e.g. z=1.0")->required();
    fieldmap->add_option("--min", minmax_min, "grid minimum 'a,b' in the free axes");
    fieldmap->add_option("--max", minmax_max, "grid maximum 'a,b' in the free axes");
    fieldmap->add_option("--res", resolution, "grid resolution in meters");
    fieldmap->add_option("--t", sample_time, "sample time in seconds");
    fieldmap->add_option("--out", out_dir, "output CSV file (default stdout)");

    auto* sweep = app.add_subcommand("sweep", "vary one config parameter over a list of values");
    add_common(sweep);
    sweep->add_option("--param", param_path, "dotted config path, e.g. estimator.tau_force")
        ->required();
    sweep->add_option("--values", values_csv, "comma-separated numeric values")->required();
    sweep->add_option("--jobs", jobs, "parallel workers");

    auto* report = app.add_subcommand("report", "regenerate summaries from persisted logs");
    report->add_option("--dir", out_dir, "run directory")->required();

    try {
        std::vector<const char*> argv;
        argv.push_back("windtrip");
        for (const auto& a : args) {
            argv.push_back(a.c_str());
        }
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (simulate->parsed()) {
            ScenarioConfig sc = resolve_config(config_path, scenario_name, seed);
            if (leg.empty()) {
                leg = sc.mission_type == "hover" ? "hover" : "outbound";
            }
            const LegMode mode = mode_str.empty()
                                     ? (leg == "return" ? sc.plan.return_mode
                                                        : (leg == "hover" ? sc.hover_mode
                                                                          : sc.plan.outbound_mode))
                                     : leg_mode_from_string(mode_str);
            std::vector<PhaseSpec> phases;
            std::optional<DisturbanceTrack> track;
            const double cdt = sc.rates.command_dt();
            const auto snap = [cdt](double d) { return std::ceil(d / cdt - 1e-9) * cdt; };
            if (leg == "outbound") {
                if (mode == LegMode::Feedforward) {
                    throw ConfigError("feedforward is only available on the return leg");
                }
                PhaseSpec pre{"preroll", Trajectory::hold(sc.plan.origin, sc.plan.preroll),
                              snap(sc.plan.preroll), mode, false, false, sc.plan.yaw_reference};
                PhaseSpec out{"outbound",
                              Trajectory::line(sc.plan.origin, sc.plan.target,
                                               sc.plan.outbound_speed, sc.plan.accel_limit),
                              0.0,
                              mode,
                              true,
                              false,
                              sc.plan.yaw_reference};
                out.duration = snap(out.trajectory.duration() + sc.plan.settle);
                phases = {pre, out};
            } else if (leg == "return") {
                if (mode == LegMode::Feedforward) {
                    if (track_path.empty()) {
                        throw ConfigError("--track is required for a feedforward return leg");
                    }
                    track = DisturbanceTrack::load(track_path);
                }
                PhaseSpec pre{"preroll", Trajectory::hold(sc.plan.target, sc.plan.preroll),
                              snap(sc.plan.preroll), LegMode::Feedback,
                              false,     false,
                              sc.plan.yaw_reference};
                PhaseSpec ret{"return",
                              Trajectory::line(sc.plan.target, sc.plan.origin,
                                               sc.plan.return_speed, sc.plan.accel_limit),
                              0.0,
                              mode,
                              false,
                              mode == LegMode::Feedforward,
                              sc.plan.yaw_reference};
                ret.duration = snap(ret.trajectory.duration() + sc.plan.settle);
                phases = {pre, ret};
            } else if (leg == "hover") {
                sc.hover_mode = mode;
                if (mode == LegMode::Feedforward) {
                    if (track_path.empty()) {
                        throw ConfigError("--track is required for feedforward hover");
                    }
                    track = DisturbanceTrack::load(track_path);
                }
                phases = make_hover_phases(sc);
            } else {
                throw ConfigError("--leg must be outbound, return, or hover");
            }
            const auto r = run_and_write(
                sc, phases, out_dir.empty() ? ("out/" + sc.name + "_" + leg) : out_dir,
                std::move(track));
            print_phase_rmse(r.log);
            return finish(r);
        }

        if (roundtrip->parsed()) {
            ScenarioConfig sc = resolve_config(config_path, scenario_name, seed);
            if (!mode_str.empty()) {
                sc.plan.return_mode = leg_mode_from_string(mode_str);
            }
            const auto r = run_and_write(sc, phases_for(sc),
                                         out_dir.empty() ? ("out/" + sc.name) : out_dir);
            print_phase_rmse(r.log);
            return finish(r);
        }

        if (compare->parsed()) {
            ScenarioConfig base = resolve_config(config_path, scenario_name, seed);
            std::vector<LegMode> modes;
            if (modes_csv.empty()) {
                modes = {LegMode::PdOnly, LegMode::Feedback, LegMode::Feedforward};
            } else {
                std::stringstream ss(modes_csv);
                std::string m;
                while (std::getline(ss, m, ',')) {
                    modes.push_back(leg_mode_from_string(m));
                }
            }
            const std::filesystem::path root =
                out_dir.empty() ? ("out/" + base.name + "_compare") : out_dir;
            const std::string leg_name = base.mission_type == "hover" ? "hold" : "return";
            nlohmann::json result = {{"scenario", base.name},
                                     {"seed", base.seed},
                                     {"leg", leg_name},
                                     {"rmse_m", nlohmann::json::object()}};
            double rmse_fb = -1.0, rmse_ff = -1.0;
            bool any_diverged = false;
            for (const LegMode m : modes) {
                const ScenarioConfig sc = with_return_mode(base, m);
                const auto r = run_and_write(sc, phases_for(sc), root / to_string(m));
                any_diverged = any_diverged || r.log.diverged;
                const double e = rmse(r.log, leg_name);
                result["rmse_m"][to_string(m)] = e;
                if (m == LegMode::Feedback) rmse_fb = e;
                if (m == LegMode::Feedforward) rmse_ff = e;
                std::printf("%-11s %s rmse: %.4f m\n", to_string(m), leg_name.c_str(), e);
            }
            if (rmse_fb > 0.0 && rmse_ff >= 0.0) {
                const double red = reduction_percent(rmse_fb, rmse_ff);
                result["reduction_percent_ff_vs_feedback"] = red;
                std::printf("feedforward vs feedback reduction: %.1f%%\n", red);
            }
            std::filesystem::create_directories(root);
            write_text_file(root / "compare.json", result.dump(2) + "\n");
            std::cout << "comparison written to " << (root / "compare.json").string() << "\n";
            return any_diverged ? 2 : 0;
        }

        if (fieldmap->parsed()) {
            ScenarioConfig sc;
            if (!field_name.empty()) {
                sc = scenario_by_name(field_name == "jet" || field_name == "complex" ||
                                              field_name == "calm"
                                          ? field_name
                                          : throw ConfigError("unknown --field preset '" +
                                                              field_name + "'"));
            } else {
                sc = resolve_config(config_path, scenario_name, std::nullopt);
            }
            auto field = build_field(sc.field_config);
            const auto eq = plane.find('=');
            if (eq == std::string::npos || eq != 1 ||
                (plane[0] != 'x' && plane[0] != 'y' && plane[0] != 'z')) {
                throw ConfigError("--plane must look like x=<v>, y=<v>, or z=<v>");
            }
            const char fixed_axis = plane[0];
            const double fixed_value = parse_double(plane.substr(2));
            double amin = -0.5, bmin = -1.0, amax = 2.5, bmax = 1.0;
            const auto parse_pair = [](const std::string& s, double& a, double& b) {
                const auto comma = s.find(',');
                if (comma == std::string::npos) {
                    throw ConfigError("expected 'a,b' but got '" + s + "'");
                }
                a = parse_double(s.substr(0, comma));
                b = parse_double(s.substr(comma + 1));
            };
            if (!minmax_min.empty()) parse_pair(minmax_min, amin, bmin);
            if (!minmax_max.empty()) parse_pair(minmax_max, amax, bmax);
            if (!(resolution > 0.0)) {
                throw ConfigError("--res must be > 0");
            }

            std::ostringstream csv;
            csv << "x,y,z,vx,vy,vz,speed\n";
            for (double a = amin; a <= amax + 1e-12; a += resolution) {
                for (double b = bmin; b <= bmax + 1e-12; b += resolution) {
                    Vec3 p;
                    if (fixed_axis == 'x') p = {fixed_value, a, b};
                    if (fixed_axis == 'y') p = {a, fixed_value, b};
                    if (fixed_axis == 'z') p = {a, b, fixed_value};
                    const Vec3 v = field ? field->air_velocity(p, sample_time) : Vec3::zero();
                    csv << format_double(p.x) << ',' << format_double(p.y) << ','
                        << format_double(p.z) << ',' << format_double(v.x) << ','
                        << format_double(v.y) << ',' << format_double(v.z) << ','
                        << format_double(v.norm()) << '\n';
                }
            }
            if (out_dir.empty()) {
                std::cout << csv.str();
            } else {
                write_text_file(out_dir, csv.str());
                std::cout << "field map written to " << out_dir << "\n";
            }
            return 0;
        }

        if (sweep->parsed()) {
            const ScenarioConfig base = resolve_config(config_path, scenario_name, seed);
            std::vector<double> values;
            {
                std::stringstream ss(values_csv);
                std::string v;
                while (std::getline(ss, v, ',')) {
                    values.push_back(parse_double(v));
                }
            }
            if (values.empty()) {
                throw ConfigError("--values must list at least one number");
            }
            std::string pointer = "/" + param_path;
            for (auto& ch : pointer) {
                if (ch == '.') ch = '/';
            }
            const std::filesystem::path root =
                out_dir.empty() ? ("out/" + base.name + "_sweep") : out_dir;

            const auto run_one = [&](std::size_t i) -> nlohmann::json {
                nlohmann::json cj = to_json(base);
                cj[nlohmann::json::json_pointer(pointer)] = values[i];
                ScenarioConfig sc = scenario_from_json(cj);
                sc.seed = derive_seed(base.seed, static_cast<std::uint64_t>(i));
                const std::string leg_name = sc.mission_type == "hover" ? "hold" : "return";
                nlohmann::json entry = {{"value", values[i]}, {"seed", sc.seed}};
                for (const LegMode m : {LegMode::Feedback, LegMode::Feedforward}) {
                    const ScenarioConfig scm = with_return_mode(sc, m);
                    const auto dir =
                        root / ("v" + std::to_string(i)) / to_string(m);
                    const auto r = run_and_write(scm, phases_for(scm), dir);
                    entry[std::string("rmse_") + to_string(m)] = rmse(r.log, leg_name);
                }
                entry["reduction_percent"] = reduction_percent(
                    entry["rmse_feedback"].get<double>(), entry["rmse_feedforward"].get<double>());
                return entry;
            };

            std::vector<nlohmann::json> entries(values.size());
            if (jobs <= 1) {
                for (std::size_t i = 0; i < values.size(); ++i) {
                    entries[i] = run_one(i);
                }
            } else {
                std::vector<std::future<void>> futures;
                std::atomic<std::size_t> next{0};
                const int workers = std::min<int>(jobs, static_cast<int>(values.size()));
                for (int w = 0; w < workers; ++w) {
                    futures.push_back(std::async(std::launch::async, [&]() {
                        for (std::size_t i = next.fetch_add(1); i < values.size();
                             i = next.fetch_add(1)) {
                            entries[i] = run_one(i);
                        }
                    }));
                }
                for (auto& f : futures) {
                    f.get();
                }
            }
            nlohmann::json out = {{"scenario", base.name},
                                  {"param", param_path},
                                  {"master_seed", base.seed},
                                  {"runs", entries}};
            std::filesystem::create_directories(root);
            write_text_file(root / "sweep.json", out.dump(2) + "\n");
            for (std::size_t i = 0; i < values.size(); ++i) {
                std::printf("%s=%g: feedback %.4f m, feedforward %.4f m (%.1f%% reduction)\n",
                            param_path.c_str(), values[i],
                            entries[i]["rmse_feedback"].get<double>(),
                            entries[i]["rmse_feedforward"].get<double>(),
                            entries[i]["reduction_percent"].get<double>());
            }
            std::cout << "sweep written to " << (root / "sweep.json").string() << "\n";
            return 0;
        }

        if (report->parsed()) {
            const std::filesystem::path dir(out_dir);
            std::vector<std::filesystem::path> run_dirs;
            if (std::filesystem::exists(dir / "commands_50hz.csv")) {
                run_dirs.push_back(dir);
            } else if (std::filesystem::is_directory(dir)) {
                for (const auto& entry : std::filesystem::directory_iterator(dir)) {
                    if (entry.is_directory() &&
                        std::filesystem::exists(entry.path() / "commands_50hz.csv")) {
                        run_dirs.push_back(entry.path());
                    }
                }
                std::sort(run_dirs.begin(), run_dirs.end());
            }
            if (run_dirs.empty()) {
                std::cerr << "no logs found in " << dir.string() << "\n";
                return 1;
            }
            for (const auto& rd : run_dirs) {
                regenerate_summary(rd);
                std::cout << "summary regenerated: " << (rd / "summary.json").string() << "\n";
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const SimulationDiverged& e) {
        std::cerr << "simulation diverged: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace windtrip
