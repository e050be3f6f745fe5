#include "krdoa/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "krdoa/io.hpp"
#include "krdoa/kernels.hpp"
#include "krdoa/simulate.hpp"
#include "krdoa/svg_plot.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace krdoa {

namespace {

SourceScenario scenario_from(const ExperimentConfig& cfg) {
    SourceScenario sc;
    sc.doas_deg = cfg.doas_deg;
    sc.power_model = PowerModel::RandomUniform;
    sc.nominal_power = 1.0;
    sc.seed = cfg.seed;
    sc.snapshots = cfg.snapshots;
    sc.frame_length = cfg.frame_length;
    return sc;
}

SpectrumResult run_method(Method m, const FrameCovariances& fc, const ArrayGeometry& g, int k,
                          const GridSpec& grid) {
    switch (m) {
        case Method::RealKr: return real_kr_spectrum(fc, g, k, grid);
        case Method::ComplexKr: return complex_kr_baseline(fc, g, k, grid);
    }
    throw std::invalid_argument("unknown method");
}

std::string run_tag(const std::string& label, Method m) {
    return label + "_" + to_string(m);
}

std::vector<double> to_db(const std::vector<double>& values) {
    const double peak = *std::max_element(values.begin(), values.end());
    std::vector<double> db(values.size());
    for (size_t i = 0; i < values.size(); ++i) db[i] = 10.0 * std::log10(values[i] / peak);
    return db;
}

// Run f(t) for t in [0, n) across threads, keeping results indexed by t so
// aggregation order never depends on the thread count.
template <class F>
void parallel_trials(int n, F&& f) {
    std::string error;
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < n; ++t) {
        try {
            f(t);
        } catch (const std::exception& e) {
#pragma omp critical
            if (error.empty()) error = e.what();
        }
    }
    if (!error.empty()) throw std::runtime_error(error);
}

}  // namespace

std::vector<SpectrumRun> run_spectrum(const ExperimentConfig& cfg, bool write_files) {
    cfg.validate();
    const SourceScenario sc = scenario_from(cfg);
    const double noise = snr_to_noise_power(cfg.snr_db, sc.nominal_power);
    const int k = static_cast<int>(cfg.doas_deg.size());

    std::vector<SpectrumRun> runs;
    for (const auto& gc : cfg.geometries) {
        const ArrayGeometry g = gc.build();
        const Snapshots snaps = generate_snapshots(g, sc, noise);
        const FrameCovariances fc = local_covariances(snaps.x, sc.frame_length);
        for (Method m : cfg.methods)
            runs.push_back({g.label, to_string(m), run_method(m, fc, g, k, cfg.grid)});
    }

    if (write_files) {
        for (const auto& run : runs) {
            const std::vector<double> db = to_db(run.spectrum.values);
            std::vector<std::vector<double>> rows(run.spectrum.grid_deg.size());
            for (size_t i = 0; i < rows.size(); ++i)
                rows[i] = {run.spectrum.grid_deg[i], db[i]};
            const std::string tag = run.geometry + "_" + run.method;
            write_csv(cfg.out_dir + "/spectrum_" + tag + ".csv", {"angle_deg", "p_db"}, rows);

            const double peak_ref = *std::max_element(run.spectrum.values.begin(),
                                                      run.spectrum.values.end());
            nlohmann::json pj = nlohmann::json::array();
            for (const auto& p : run.spectrum.peaks)
                pj.push_back({{"angle_deg", p.angle_deg},
                              {"p_db", 10.0 * std::log10(p.value / peak_ref)}});
            write_text_file(cfg.out_dir + "/peaks_" + tag + ".json", pj.dump(2) + "\n");
        }
        write_manifest(cfg, "spectrum");
    }
    return runs;
}

RmseTable run_rmse(const ExperimentConfig& cfg, bool write_files) {
    cfg.validate();
    RmseTable table;
    table.snr_db = cfg.snr_sweep_db;

    SourceScenario base = scenario_from(cfg);
    base.doas_deg = {cfg.rmse_truth_deg};

    for (const auto& gc : cfg.geometries) {
        const ArrayGeometry g = gc.build();
        for (Method m : cfg.methods) {
            RmseSeries series;
            series.geometry = g.label;
            series.method = to_string(m);
            for (double snr : cfg.snr_sweep_db) {
                const double noise = snr_to_noise_power(snr, base.nominal_power);
                std::vector<double> estimates(static_cast<size_t>(cfg.trials));
                parallel_trials(cfg.trials, [&](int t) {
                    SourceScenario sc = base;
                    sc.seed = cfg.seed + static_cast<std::uint64_t>(t);
                    const Snapshots snaps = generate_snapshots(g, sc, noise);
                    const FrameCovariances fc = local_covariances(snaps.x, sc.frame_length);
                    const SpectrumResult s = run_method(m, fc, g, 1, cfg.grid);
                    const size_t best = static_cast<size_t>(
                        std::max_element(s.values.begin(), s.values.end()) - s.values.begin());
                    estimates[static_cast<size_t>(t)] = s.grid_deg[best];
                });
                series.rmse_deg.push_back(rmse(estimates, cfg.rmse_truth_deg));
            }
            table.series.push_back(std::move(series));
        }
    }

    if (write_files) {
        std::vector<std::string> header{"snr_db"};
        for (const auto& s : table.series) header.push_back(run_tag(s.geometry, method_from_string(s.method)));
        std::vector<std::vector<double>> rows(table.snr_db.size());
        for (size_t i = 0; i < table.snr_db.size(); ++i) {
            rows[i].push_back(table.snr_db[i]);
            for (const auto& s : table.series) rows[i].push_back(s.rmse_deg[i]);
        }
        write_csv(cfg.out_dir + "/rmse.csv", header, rows);
        write_manifest(cfg, "rmse");
    }
    return table;
}

namespace {

struct StageStats {
    double median = 0.0;
    double iqr = 0.0;
};

template <class F>
StageStats time_stage(F&& f, int repeats) {
    for (int i = 0; i < 5; ++i) f();  // warm-up, excluded
    std::vector<double> ms(static_cast<size_t>(repeats));
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        ms[static_cast<size_t>(i)] = std::chrono::duration<double, std::milli>(t1 - t0).count();
    }
    std::sort(ms.begin(), ms.end());
    const size_t n = ms.size();
    StageStats st;
    st.median = (ms[(n - 1) / 2] + ms[n / 2]) / 2.0;
    st.iqr = ms[(3 * (n - 1)) / 4] - ms[(n - 1) / 4];
    return st;
}

}  // namespace

void BenchReport::validate() const {
    if (repeats < 30) throw std::runtime_error("bench: need at least 30 repeats, got " +
                                               std::to_string(repeats));
    if (entries.empty()) throw std::runtime_error("bench: no entries");
    for (const auto& e : entries)
        if (!(e.svd_ms_median > 0.0) || !(e.search_ms_median > 0.0))
            throw std::runtime_error("bench: nonpositive timing for " + e.geometry + "/" + e.method);
}

BenchReport run_bench(const ExperimentConfig& cfg, bool write_files) {
    cfg.validate();
    const SourceScenario sc = scenario_from(cfg);
    const double noise = snr_to_noise_power(cfg.snr_db, sc.nominal_power);
    const int k = static_cast<int>(cfg.doas_deg.size());
    const std::vector<double> grid = cfg.grid.angles();

    BenchReport report;
    report.repeats = cfg.bench_repeats;

    for (const auto& gc : cfg.geometries) {
        const ArrayGeometry g = gc.build();
        const Snapshots snaps = generate_snapshots(g, sc, noise);
        const FrameCovariances fc = local_covariances(snaps.x, sc.frame_length);
        const double phase_factor = 2.0 * std::numbers::pi * g.base_spacing / g.wavelength;

        for (Method m : cfg.methods) {
            BenchEntry entry;
            entry.geometry = g.label;
            entry.method = to_string(m);

            if (m == Method::RealKr) {
                const RealKRMatrix obs = build_real_observation(fc, g);
                const auto svd = time_stage([&] { (void)noise_subspace(obs.m, k); },
                                            cfg.bench_repeats);
                const RealNoiseSubspace un = noise_subspace(obs.m, k);
                const std::vector<double> w = manifold_weights_real(g);
                std::vector<double> out(grid.size());
                const auto search = time_stage(
                    [&] { kernels::real_music_scan_serial(un.basis, phase_factor, w, grid, out); },
                    cfg.bench_repeats);
                entry.svd_ms_median = svd.median;
                entry.svd_ms_iqr = svd.iqr;
                entry.search_ms_median = search.median;
                entry.search_ms_iqr = search.iqr;
            } else {
                const KRObservation y = vectorize(fc);
                Eigen::MatrixXcd z = g.is_ula() ? reduce_ula(y, g.num_sensors())
                                                : average_sort(y, difference_coarray(g)).z;
                const Eigen::VectorXcd mean = z.rowwise().mean();
                z.colwise() -= mean;
                const auto svd = time_stage([&] { (void)noise_subspace(z, k); }, cfg.bench_repeats);
                const ComplexNoiseSubspace un = noise_subspace(z, k);
                const std::vector<double> w = manifold_weights_complex(g);
                std::vector<double> out(grid.size());
                const auto search = time_stage(
                    [&] {
                        kernels::complex_music_scan_serial(un.basis, phase_factor, w, grid, out);
                    },
                    cfg.bench_repeats);
                entry.svd_ms_median = svd.median;
                entry.svd_ms_iqr = svd.iqr;
                entry.search_ms_median = search.median;
                entry.search_ms_iqr = search.iqr;
            }
            report.entries.push_back(entry);
        }
    }

    std::ostringstream env;
    env << "compiler " <<
#if defined(__clang__)
        "clang " << __clang_major__ << "." << __clang_minor__
#elif defined(__GNUC__)
        "gcc " << __GNUC__ << "." << __GNUC_MINOR__
#else
        "unknown"
#endif
        << ", eigen " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
        << EIGEN_MINOR_VERSION << ", grid points " << grid.size()
        << ", stages timed single-threaded, medians over " << cfg.bench_repeats
        << " repeats (5 warm-up runs excluded)";
    report.environment = env.str();
    report.validate();

    if (write_files) {
        nlohmann::json j;
        j["repeats"] = report.repeats;
        j["environment"] = report.environment;
        j["entries"] = nlohmann::json::array();
        for (const auto& e : report.entries)
            j["entries"].push_back({{"geometry", e.geometry},
                                    {"method", e.method},
                                    {"svd_ms_median", e.svd_ms_median},
                                    {"svd_ms_iqr", e.svd_ms_iqr},
                                    {"search_ms_median", e.search_ms_median},
                                    {"search_ms_iqr", e.search_ms_iqr}});
        write_text_file(cfg.out_dir + "/bench.json", j.dump(2) + "\n");
        write_manifest(cfg, "bench");
    }
    return report;
}

std::string format_bench_table(const BenchReport& report) {
    std::ostringstream out;
    out << "stage timings, milliseconds (median, IQR in brackets)\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%-12s %-11s %22s %22s\n", "geometry", "method",
                  "svd", "search");
    out << line;
    for (const auto& e : report.entries) {
        char svd[40], search[40];
        std::snprintf(svd, sizeof(svd), "%.3f [%.3f]", e.svd_ms_median, e.svd_ms_iqr);
        std::snprintf(search, sizeof(search), "%.3f [%.3f]", e.search_ms_median, e.search_ms_iqr);
        std::snprintf(line, sizeof(line), "%-12s %-11s %22s %22s\n", e.geometry.c_str(),
                      e.method.c_str(), svd, search);
        out << line;
    }
    out << report.environment << "\n";
    return out.str();
}

std::vector<DofRow> dof_table() {
    const int splits[4][2] = {{3, 2}, {5, 2}, {5, 3}, {7, 3}};
    std::vector<DofRow> rows;
    for (int r = 0; r < 4; ++r) {
        DofRow row;
        row.n1 = splits[r][0];
        row.n2 = splits[r][1];
        row.mra = kMraDofReference[r];
        row.coprime = dof_formula(ArrayFamily::Coprime, row.n1, row.n2);
        row.ula_kr = dof_formula(ArrayFamily::UlaKr, row.n1, row.n2);
        row.pal = dof_formula(ArrayFamily::PalNested, row.n1, row.n2);
        row.proposed = dof_formula(ArrayFamily::ProposedNested, row.n1, row.n2);

        const auto ula_lags = difference_coarray(make_ula(row.n1 + row.n2)).lags.size();
        const auto pal_lags = difference_coarray(make_nested_pal(row.n1, row.n2)).lags.size();
        const auto prop_lags =
            difference_coarray(make_nested_proposed(row.n1, row.n2)).lags.size();
        row.enumeration_ok = static_cast<int>(ula_lags) == row.ula_kr &&
                             static_cast<int>(pal_lags) == row.pal &&
                             static_cast<int>(prop_lags) == row.proposed;
        rows.push_back(row);
    }
    return rows;
}

std::string format_dof_table(const std::vector<DofRow>& rows) {
    std::ostringstream out;
    out << "virtual-aperture degrees of freedom by sensor split\n";
    char line[160];
    std::snprintf(line, sizeof(line), "%-8s %6s %8s %8s %8s %9s  %s\n", "n1+n2", "mra",
                  "coprime", "ula-kr", "pal", "proposed", "enumeration");
    out << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof(line), "%d+%-6d %6d %8d %8d %8d %9d  %s\n", r.n1, r.n2, r.mra,
                      r.coprime, r.ula_kr, r.pal, r.proposed, r.enumeration_ok ? "ok" : "MISMATCH");
        out << line;
    }
    out << "formulas: coprime n1*n2; ula-kr 2(n1+n2)-1; pal 2*n2*(n1+1)-1; proposed 2*(n2+1)*n1+1\n";
    return out.str();
}

void emit_plot(const std::string& csv_path, const std::string& out_svg_path) {
    const CsvTable table = read_csv(csv_path);
    const std::string stem = std::filesystem::path(csv_path).stem().string();

    PlotSpec spec;
    std::vector<PlotSeries> series;
    if (table.header.front() == "angle_deg") {
        spec.title = stem;
        spec.x_label = "angle (deg)";
        spec.y_label = "pseudospectrum (dB)";
        spec.log_y = false;
    } else if (table.header.front() == "snr_db") {
        spec.title = stem;
        spec.x_label = "SNR (dB)";
        spec.y_label = "RMSE (deg)";
        spec.log_y = true;
    } else {
        throw std::runtime_error(csv_path + ": unrecognized CSV layout (expected a first column "
                                 "of angle_deg or snr_db)");
    }

    for (size_t c = 1; c < table.header.size(); ++c) {
        PlotSeries s;
        s.name = table.header[c];
        for (const auto& row : table.rows) {
            s.x.push_back(row[0]);
            s.y.push_back(row[c]);
        }
        series.push_back(std::move(s));
    }
    if (series.empty()) throw std::runtime_error(csv_path + ": no data columns to plot");
    write_svg_plot(out_svg_path, spec, series);
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command) {
    nlohmann::json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["config"] = nlohmann::json::parse(cfg.to_json_text());
    write_text_file(cfg.out_dir + "/manifest.json", j.dump(2) + "\n");
}

}  // namespace krdoa
