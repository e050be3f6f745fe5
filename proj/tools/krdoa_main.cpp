#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "krdoa/experiment.hpp"
#include "krdoa/io.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;
    bool trials_set = false;
    double grid_step = 0.0;
    bool grid_step_set = false;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON experiment config; flags override it");
    cmd->add_option("--seed", opts.seed, "base RNG seed")->each([&](const std::string&) {
        opts.seed_set = true;
    });
    cmd->add_option("--trials", opts.trials, "Monte Carlo trials per SNR point")
        ->each([&](const std::string&) { opts.trials_set = true; });
    cmd->add_option("--grid-step", opts.grid_step, "search grid step in degrees")
        ->each([&](const std::string&) { opts.grid_step_set = true; });
    cmd->add_option("--out", opts.out_dir, "output directory");
}

krdoa::ExperimentConfig resolve(const CommonOpts& opts) {
    krdoa::ExperimentConfig cfg = opts.config_path.empty()
                                      ? krdoa::ExperimentConfig::defaults()
                                      : krdoa::ExperimentConfig::from_json_file(opts.config_path);
    if (opts.seed_set) cfg.seed = opts.seed;
    if (opts.trials_set) cfg.trials = opts.trials;
    if (opts.grid_step_set) cfg.grid.step_deg = opts.grid_step;
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"KR subspace direction finding for quasi-stationary sources"};
    app.require_subcommand(1);

    CommonOpts spectrum_opts, rmse_opts, bench_opts, dof_opts;

    CLI::App* spectrum = app.add_subcommand(
        "spectrum", "spatial pseudospectra for every configured geometry and method");
    add_common(spectrum, spectrum_opts);

    CLI::App* rmse = app.add_subcommand(
        "rmse", "Monte Carlo RMSE of a single source over the configured SNR sweep");
    add_common(rmse, rmse_opts);

    CLI::App* bench =
        app.add_subcommand("bench", "median timings of the SVD and spectral-search stages");
    add_common(bench, bench_opts);

    CLI::App* dof = app.add_subcommand("dof-table", "virtual-aperture table with enumeration cross-check");
    add_common(dof, dof_opts);

    std::vector<std::string> plot_inputs;
    std::string plot_out;
    CLI::App* plot = app.add_subcommand("plot", "render spectrum/rmse CSV files to SVG");
    plot->add_option("csv", plot_inputs, "CSV files produced by the spectrum or rmse commands")
        ->required();
    plot->add_option("--out", plot_out, "output directory (default: alongside the CSV)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (spectrum->parsed()) {
            const auto cfg = resolve(spectrum_opts);
            const auto runs = krdoa::run_spectrum(cfg);
            for (const auto& run : runs) {
                std::cout << run.geometry << " " << run.method << ": peaks at";
                for (const auto& p : run.spectrum.peaks)
                    std::cout << " " << krdoa::format_double(p.angle_deg);
                std::cout << " deg\n";
            }
            std::cout << "wrote " << runs.size() << " spectra to " << cfg.out_dir << "\n";
        } else if (rmse->parsed()) {
            const auto cfg = resolve(rmse_opts);
            const auto table = krdoa::run_rmse(cfg);
            std::cout << "snr_db";
            for (const auto& s : table.series) std::cout << " " << s.geometry << "/" << s.method;
            std::cout << "\n";
            for (size_t i = 0; i < table.snr_db.size(); ++i) {
                std::cout << table.snr_db[i];
                for (const auto& s : table.series)
                    std::cout << " " << krdoa::format_double(s.rmse_deg[i]);
                std::cout << "\n";
            }
            std::cout << "wrote " << cfg.out_dir << "/rmse.csv\n";
        } else if (bench->parsed()) {
            const auto cfg = resolve(bench_opts);
            const auto report = krdoa::run_bench(cfg);
            std::cout << krdoa::format_bench_table(report);
            std::cout << "wrote " << cfg.out_dir << "/bench.json\n";
        } else if (dof->parsed()) {
            const auto rows = krdoa::dof_table();
            std::cout << krdoa::format_dof_table(rows);
            for (const auto& r : rows)
                if (!r.enumeration_ok)
                    throw std::runtime_error("aperture enumeration disagrees with the closed forms");
        } else if (plot->parsed()) {
            for (const auto& csv : plot_inputs) {
                std::filesystem::path out =
                    plot_out.empty() ? std::filesystem::path(csv).parent_path()
                                     : std::filesystem::path(plot_out);
                out /= std::filesystem::path(csv).stem().string() + ".svg";
                krdoa::emit_plot(csv, out.string());
                std::cout << "wrote " << out.string() << "\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
