// Command-line front end: scenario runs, sweeps, power-law fits and figure
// reproduction pipelines.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrm/csv_io.hpp"
#include "qrm/figures.hpp"
#include "qrm/scenario.hpp"
#include "qrm/svg.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitPeakAtBoundary = 4;

void emit_error_record(const std::string& type, const std::string& message,
                       const std::string& key = "") {
    json record;
    record["error"]["type"] = type;
    record["error"]["message"] = message;
    if (!key.empty()) {
        record["error"]["key"] = key;
    }
    std::cerr << record.dump() << "\n";
}

int resolve_workers(int cli_workers, const qrm::Scenario* scenario) {
    if (cli_workers > 0) {
        return cli_workers;
    }
    if (scenario && scenario->workers > 0) {
        return scenario->workers;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 2 : static_cast<int>(hw);
}

void write_trajectory_csv(const qrm::Scenario& sc, const qrm::PipelineResult& result,
                          const std::filesystem::path& path) {
    qrm::CsvTable table;
    table.comment = describe_scenario(sc) + " trunc_dim_used=" + std::to_string(result.trunc_dim);
    table.columns = {"t", "ex", "ep", "exx", "epp", "eg", "chi", "var_x", "fg"};
    const auto& traj = result.nominal;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& m = traj.moments[i];
        table.add_row({traj.times[i], m.ex, m.ep, m.exx, m.epp, m.eg, result.series.chi[i],
                       result.series.var_x[i], result.series.fg[i]});
    }
    table.write(path);
}

int run_simulate(const std::string& config_path, const std::string& out_override,
                 int cli_workers, bool quiet) {
    const qrm::Scenario sc = qrm::load_scenario(config_path);
    if (sc.sweep) {
        throw qrm::ConfigError("simulate expects a config without a sweep stage (use `sweep`)",
                               "sweep.axis", 0);
    }
    const int workers = resolve_workers(cli_workers, &sc);
    const std::filesystem::path out_dir = out_override.empty() ? sc.output_dir : out_override;
    std::filesystem::create_directories(out_dir);

    const qrm::PipelineResult result = qrm::run_fg_pipeline(sc.point, workers);
    const auto csv_path = out_dir / "trajectory.csv";
    write_trajectory_csv(sc, result, csv_path);
    if (!quiet) {
        if (result.max) {
            std::fprintf(stderr, "wrote %s (N=%d, fg_max=%.6g at t=%.6g, %.1fs)\n",
                         csv_path.string().c_str(), result.trunc_dim, result.max->fg_max,
                         result.max->t_star, result.elapsed_seconds);
        } else {
            std::fprintf(stderr, "wrote %s (N=%d, envelope max beyond horizon, %.1fs)\n",
                         csv_path.string().c_str(), result.trunc_dim, result.elapsed_seconds);
        }
    }
    return kExitOk;
}

int run_sweep_cmd(const std::string& config_path, const std::string& out_override,
                  int cli_workers, bool quiet) {
    const qrm::Scenario sc = qrm::load_scenario(config_path);
    if (!sc.sweep) {
        throw qrm::ConfigError("sweep requires sweep.axis and sweep.values", "sweep.axis", 0);
    }
    const int workers = resolve_workers(cli_workers, &sc);
    const std::filesystem::path out_dir = out_override.empty() ? sc.output_dir : out_override;
    std::filesystem::create_directories(out_dir);

    const auto records = qrm::run_sweep(sc.point, *sc.sweep, workers, quiet);

    qrm::CsvTable table;
    table.comment = describe_scenario(sc);
    table.columns = {"axis_value", "fg_max", "t_star"};
    for (const auto& r : records) {
        table.add_row({r.axis_value, r.fg_max, r.t_star});
    }
    const auto sweep_path = out_dir / "sweep.csv";
    table.write(sweep_path);

    qrm::SvgPlot plot;
    plot.title = "sweep over " + to_string(sc.sweep->axis);
    plot.x_label = to_string(sc.sweep->axis);
    plot.y_label = "max F_g";
    qrm::SvgSeries pts{"fg_max", {}, {}, true};
    for (const auto& r : records) {
        pts.x.push_back(r.axis_value);
        pts.y.push_back(r.fg_max);
    }
    plot.series.push_back(pts);

    if (sc.fit.enabled) {
        std::vector<double> xs, ys;
        for (const auto& r : records) {
            double x = r.axis_value;
            if (sc.fit.abscissa == qrm::FitAbscissa::DeltaGap) {
                if (sc.sweep->axis != qrm::SweepAxis::G) {
                    throw qrm::ConfigError("fit.abscissa=delta_gap requires sweep.axis=g",
                                           "fit.abscissa", 0);
                }
                x = qrm::delta_gap(r.axis_value);
            } else if (sc.fit.abscissa == qrm::FitAbscissa::KT) {
                if (sc.sweep->axis != qrm::SweepAxis::Nbar) {
                    throw qrm::ConfigError("fit.abscissa=kt requires sweep.axis=nbar",
                                           "fit.abscissa", 0);
                }
                x = qrm::kT_from_nbar(r.axis_value);
            }
            xs.push_back(x);
            ys.push_back(r.fg_max);
        }
        const qrm::FitResult fit = qrm::fit_power_law(xs, ys);
        qrm::CsvTable fit_table;
        fit_table.comment = describe_scenario(sc);
        fit_table.columns = {"a", "b", "rms_log_residual", "n_points"};
        fit_table.add_row({fit.a, fit.b, fit.rms_log_residual,
                           static_cast<double>(fit.n_points)});
        fit_table.write(out_dir / "fit.csv");
        plot.log_x = true;
        plot.log_y = true;
        if (!quiet) {
            std::fprintf(stderr, "fit: a=%.6g b=%.6g rms_log_residual=%.3g\n", fit.a, fit.b,
                         fit.rms_log_residual);
        }
    }
    plot.write(out_dir / "sweep.svg");
    if (!quiet) {
        std::fprintf(stderr, "wrote %s\n", sweep_path.string().c_str());
    }
    return kExitOk;
}

int run_fit(const std::string& csv_path, const std::string& x_col, const std::string& y_col,
            const std::string& out_path) {
    const qrm::CsvFile file = qrm::CsvFile::read(csv_path);
    const auto xs = file.column(x_col);
    const auto ys = file.column(y_col);
    const qrm::FitResult fit = qrm::fit_power_law(xs, ys);
    qrm::CsvTable table;
    table.comment = "fit input=" + csv_path + " x=" + x_col + " y=" + y_col;
    table.columns = {"a", "b", "rms_log_residual", "n_points"};
    table.add_row({fit.a, fit.b, fit.rms_log_residual, static_cast<double>(fit.n_points)});
    if (out_path.empty()) {
        std::cout << table.to_string();
    } else {
        table.write(out_path);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Criticality-based metrology simulator for the open quantum Rabi model"};
    app.require_subcommand(1);
    bool quiet = false;
    int workers = 0;
    app.add_flag("--quiet", quiet, "suppress progress output");
    app.add_option("--workers", workers, "worker thread count (default: hardware)");

    std::string config_path, out_dir, figure_id, fit_csv, fit_x, fit_y, fit_out;

    auto* simulate = app.add_subcommand("simulate", "run one scenario and write trajectory.csv");
    simulate->add_option("config", config_path, "scenario config file")->required();
    simulate->add_option("--out", out_dir, "output directory (overrides output.dir)");

    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and write sweep.csv");
    sweep->add_option("config", config_path, "scenario config file")->required();
    sweep->add_option("--out", out_dir, "output directory (overrides output.dir)");

    auto* fit = app.add_subcommand("fit", "power-law fit of two CSV columns");
    fit->add_option("csv", fit_csv, "input CSV file")->required();
    fit->add_option("--x", fit_x, "abscissa column name")->required();
    fit->add_option("--y", fit_y, "ordinate column name")->required();
    fit->add_option("--out", fit_out, "output CSV (default: stdout)");

    auto* repro = app.add_subcommand("reproduce", "reproduce a figure dataset");
    repro->add_option("figure", figure_id, "figure id (fig1a..fig7b)")->required();
    repro->add_option("--out", out_dir, "output directory (default: .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help
        }
        emit_error_record("usage", e.what());
        return kExitConfig;
    }

    try {
        if (simulate->parsed()) {
            return run_simulate(config_path, out_dir, workers, quiet);
        }
        if (sweep->parsed()) {
            return run_sweep_cmd(config_path, out_dir, workers, quiet);
        }
        if (fit->parsed()) {
            return run_fit(fit_csv, fit_x, fit_y, fit_out);
        }
        if (repro->parsed()) {
            const auto written = qrm::reproduce(figure_id, out_dir.empty() ? "." : out_dir,
                                                resolve_workers(workers, nullptr), quiet);
            if (!quiet) {
                for (const auto& path : written) {
                    std::fprintf(stderr, "wrote %s\n", path.string().c_str());
                }
            }
            return kExitOk;
        }
    } catch (const qrm::ConfigError& e) {
        emit_error_record("config", e.what(), e.key);
        return kExitConfig;
    } catch (const qrm::InvalidParameter& e) {
        emit_error_record("config", e.what());
        return kExitConfig;
    } catch (const qrm::TruncationOverflow& e) {
        emit_error_record("truncation_overflow", e.what());
        return kExitNumerical;
    } catch (const qrm::StepFailure& e) {
        emit_error_record("step_failure", e.what());
        return kExitNumerical;
    } catch (const qrm::PeakAtBoundary& e) {
        emit_error_record("peak_at_boundary", e.what());
        return kExitPeakAtBoundary;
    } catch (const std::exception& e) {
        emit_error_record("error", e.what());
        return 1;
    }
    return kExitOk;
}
