#pragma once

#include <string>
#include <vector>

#include "krdoa/config.hpp"
#include "krdoa/estimator.hpp"

namespace krdoa {

inline constexpr const char* kVersion = "0.1.0";

/// One computed spectrum, tagged by the geometry label and method name.
struct SpectrumRun {
    std::string geometry;
    std::string method;
    SpectrumResult spectrum;
};

/// RMSE-versus-SNR curves; series[i].rmse_deg is aligned with snr_db.
struct RmseSeries {
    std::string geometry;
    std::string method;
    std::vector<double> rmse_deg;
};
struct RmseTable {
    std::vector<double> snr_db;
    std::vector<RmseSeries> series;
};

/// Median/IQR wall-clock timings (milliseconds) of the two estimator stages,
/// measured single-threaded on prebuilt observations.
struct BenchEntry {
    std::string geometry;
    std::string method;
    double svd_ms_median = 0.0;
    double svd_ms_iqr = 0.0;
    double search_ms_median = 0.0;
    double search_ms_iqr = 0.0;
};
struct BenchReport {
    std::vector<BenchEntry> entries;
    int repeats = 0;
    std::string environment;

    void validate() const;  ///< throws unless repeats >= 30 and timings > 0
};

/// One row of the aperture comparison table for a sensor split n1 + n2.
struct DofRow {
    int n1 = 0;
    int n2 = 0;
    int mra = 0;
    int coprime = 0;
    int ula_kr = 0;
    int pal = 0;
    int proposed = 0;
    bool enumeration_ok = false;  ///< co-array enumeration matched the formulas
};

/// Spectra for every (geometry, method) pair in the config at cfg.snr_db.
/// With write_files set, writes per-run CSV spectra (angle_deg, p_db),
/// per-run peak lists (JSON) and a manifest into cfg.out_dir.
std::vector<SpectrumRun> run_spectrum(const ExperimentConfig& cfg, bool write_files = true);

/// Monte Carlo RMSE of a single source at cfg.rmse_truth_deg across
/// cfg.snr_sweep_db. Trials are distributed over threads; trial t of every
/// series uses seed cfg.seed + t, so curves are paired across series and
/// byte-identical for any thread count.
RmseTable run_rmse(const ExperimentConfig& cfg, bool write_files = true);

/// Time the SVD and spectral-search stages of both methods on data generated
/// at the config's reference scenario. Medians over cfg.bench_repeats runs
/// after warm-up, single-threaded.
BenchReport run_bench(const ExperimentConfig& cfg, bool write_files = true);
std::string format_bench_table(const BenchReport& report);

/// Aperture table for the sensor splits 3+2, 5+2, 5+3, 7+3, with each
/// closed-form entry cross-checked against explicit co-array enumeration.
std::vector<DofRow> dof_table();
std::string format_dof_table(const std::vector<DofRow>& rows);

/// Render a CSV produced by run_spectrum or run_rmse to a standalone SVG
/// line plot (spectrum: dB versus angle; rmse: log-scale versus SNR).
void emit_plot(const std::string& csv_path, const std::string& out_svg_path);

/// Reproducibility record: command, library version, and the full config.
void write_manifest(const ExperimentConfig& cfg, const std::string& command);

}  // namespace krdoa
