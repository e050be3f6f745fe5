// Acceptance gate: one check per release-blocking property of the library.
// Each check prints a single [PASS]/[FAIL] line; the exit code is the number
// of failures, so the binary doubles as a CI gate and a quick health report.

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "krdoa/estimator.hpp"
#include "krdoa/experiment.hpp"
#include "krdoa/geometry.hpp"
#include "krdoa/kr_pipeline.hpp"
#include "krdoa/simulate.hpp"
#include "test_helpers.hpp"

using namespace krdoa;
using krdoa::testing::max_abs;
using krdoa::testing::random_profile;

namespace {

const std::vector<double> kSevenDoas{-50, -40, -15, 0, 30, 35, 40};
const std::vector<double> kTenDoas{-65, -48, -33.5, -20, -7.25, 4.6, 18, 29.85, 43, 57.1};

struct Outcome {
    bool ok = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

Eigen::VectorXd stacked_steering(const ArrayGeometry& g, double theta) {
    const VirtualSteering vs = virtual_steering(g, theta);
    Eigen::VectorXd b(vs.b_r.size() + vs.b_i.size());
    b << vs.b_r, vs.b_i;
    return b;
}

double nearest_peak(const std::vector<Peak>& peaks, double theta) {
    double best = std::numeric_limits<double>::quiet_NaN();
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& p : peaks) {
        const double d = std::abs(p.angle_deg - theta);
        if (d < dist) {
            dist = d;
            best = p.angle_deg;
        }
    }
    return best;
}

// 1. Closed-form virtual-aperture sizes against explicit co-array enumeration.
Outcome check_aperture_table() {
    const auto t0 = std::chrono::steady_clock::now();
    const int expected[4][7] = {
        {3, 2, 19, 6, 9, 15, 19},
        {5, 2, 35, 10, 13, 23, 31},
        {5, 3, 47, 15, 15, 35, 41},
        {7, 3, 73, 21, 19, 47, 57},
    };
    const std::vector<DofRow> rows = dof_table();
    bool ok = rows.size() == 4;
    for (size_t r = 0; ok && r < 4; ++r)
        ok = rows[r].n1 == expected[r][0] && rows[r].n2 == expected[r][1] &&
             rows[r].mra == expected[r][2] && rows[r].coprime == expected[r][3] &&
             rows[r].ula_kr == expected[r][4] && rows[r].pal == expected[r][5] &&
             rows[r].proposed == expected[r][6] && rows[r].enumeration_ok;

    int enumerated = 0;
    for (int n1 = 2; n1 <= 8 && ok; ++n1)
        for (int n2 = 2; n2 <= 8 && ok; ++n2) {
            const CoArrayMap c = difference_coarray(make_nested_proposed(n1, n2));
            ok = is_hole_free(c) && c.max_lag == (n2 + 1) * n1 &&
                 static_cast<int>(c.lags.size()) ==
                     dof_formula(ArrayFamily::ProposedNested, n1, n2);
            ++enumerated;
        }

    const double secs = seconds_since(t0);
    ok = ok && secs < 1.0;
    return {ok, "all 4x5 table cells exact, " + std::to_string(enumerated) +
                    " stage splits enumerated hole-free in " + fmt(secs) + " s"};
}

// 2. The real observation must not change when diagonal noise is added.
Outcome check_noise_cancellation() {
    const PowerProfile profile = random_profile(50, 7, 29);
    double worst = 0.0;
    for (const ArrayGeometry& g : {make_ula(6), make_nested_proposed(3, 3)}) {
        const RealKRMatrix base =
            build_real_observation(exact_covariances(g, kSevenDoas, profile, 0.0), g);
        for (double sigma : {1.0, 100.0}) {
            const RealKRMatrix noisy =
                build_real_observation(exact_covariances(g, kSevenDoas, profile, sigma), g);
            worst = std::max(worst, max_abs(Eigen::MatrixXd(noisy.m - base.m)));
        }
        const Eigen::VectorXd ramp = Eigen::VectorXd::LinSpaced(g.num_sensors(), 0.5, 8.0);
        const RealKRMatrix nonuniform =
            build_real_observation(exact_covariances(g, kSevenDoas, profile, ramp), g);
        worst = std::max(worst, max_abs(Eigen::MatrixXd(nonuniform.m - base.m)));
    }
    return {worst < 1e-12, "largest deviation across noise levels " + fmt(worst) +
                               " (tolerance 1e-12)"};
}

// 3. With ensemble covariances the noise subspace annihilates the steering
//    vector of every source, including source counts above the sensor count.
Outcome check_null_depth() {
    double worst = 0.0;
    const struct {
        ArrayGeometry g;
        const std::vector<double>& doas;
    } setups[2] = {{make_ula(6), kSevenDoas}, {make_nested_proposed(3, 3), kTenDoas}};
    for (const auto& setup : setups) {
        const int k = static_cast<int>(setup.doas.size());
        const FrameCovariances fc =
            exact_covariances(setup.g, setup.doas, random_profile(50, k, 31), 0.7);
        const RealKRMatrix obs = build_real_observation(fc, setup.g);
        const RealNoiseSubspace un = noise_subspace(obs.m, k);
        for (double theta : setup.doas) {
            const Eigen::VectorXd b = stacked_steering(setup.g, theta);
            worst = std::max(worst, (un.basis.transpose() * b).norm() / b.norm());
        }
    }
    return {worst < 1e-8, "worst normalized null " + fmt(worst) +
                              " over 7 sources on 6-sensor ULA and 10 on the nested array"};
}

// 4. Reference scenario, sampled data: the nested array resolves all seven
//    sources while the same-size ULA cannot separate the 30/35/40 cluster.
Outcome check_reference_scenario() {
    const auto t0 = std::chrono::steady_clock::now();
    const int seeds = 20;
    std::vector<int> nested_ok(seeds, 0), ula_ok(seeds, 0);
    const ArrayGeometry nested = make_nested_proposed(3, 3);
    const ArrayGeometry ula = make_ula(6);
    const GridSpec grid;
    const double noise = snr_to_noise_power(0.0);

    std::string error;
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < seeds; ++s) {
        try {
            SourceScenario sc;
            sc.doas_deg = kSevenDoas;
            sc.seed = 1 + static_cast<std::uint64_t>(s);
            sc.snapshots = 20000;
            sc.frame_length = 400;

            const Snapshots xn = generate_snapshots(nested, sc, noise);
            const SpectrumResult sn =
                real_kr_spectrum(local_covariances(xn.x, 400), nested, 7, grid);
            bool all_found = true;
            for (double theta : kSevenDoas)
                all_found = all_found && std::abs(nearest_peak(sn.peaks, theta) - theta) <= 1.0;
            nested_ok[static_cast<size_t>(s)] = all_found ? 1 : 0;

            const Snapshots xu = generate_snapshots(ula, sc, noise);
            const SpectrumResult su = real_kr_spectrum(local_covariances(xu.x, 400), ula, 7, grid);
            int cluster_peaks = 0;
            for (const auto& p : su.peaks)
                if (p.angle_deg >= 28.0 && p.angle_deg <= 42.0) ++cluster_peaks;
            ula_ok[static_cast<size_t>(s)] = cluster_peaks < 3 ? 1 : 0;
        } catch (const std::exception& e) {
#pragma omp critical
            if (error.empty()) error = e.what();
        }
    }
    if (!error.empty()) return {false, "run failed: " + error};

    const int nested_hits = std::accumulate(nested_ok.begin(), nested_ok.end(), 0);
    const int ula_hits = std::accumulate(ula_ok.begin(), ula_ok.end(), 0);
    const double secs = seconds_since(t0);
    const bool ok = nested_hits >= 18 && ula_hits >= 16 && secs < 120.0;
    return {ok, "nested resolved all 7 within 1 deg in " + std::to_string(nested_hits) +
                    "/20 seeds (need 18); ULA merged the cluster in " + std::to_string(ula_hits) +
                    "/20 (need 16); " + fmt(secs) + " s"};
}

// 5. RMSE curves: the nested array beats the same-size ULA wherever either
//    still makes errors, and both improve monotonically with SNR.
Outcome check_rmse_ordering() {
    ExperimentConfig cfg = ExperimentConfig::defaults();
    cfg.methods = {Method::RealKr};
    cfg.snr_sweep_db = {-10.0, -5.0, 0.0, 5.0, 10.0};
    cfg.trials = 200;
    const RmseTable table = run_rmse(cfg, /*write_files=*/false);

    const std::vector<double>* ula = nullptr;
    const std::vector<double>* nested = nullptr;
    for (const auto& s : table.series) {
        if (s.geometry == "ula6") ula = &s.rmse_deg;
        if (s.geometry == "nested3x3") nested = &s.rmse_deg;
    }
    if (!ula || !nested) return {false, "missing series"};

    bool monotone = true, ordered = true;
    int contested = 0;  // SNR points where at least one method errs
    for (size_t i = 0; i < table.snr_db.size(); ++i) {
        if (i + 1 < table.snr_db.size()) {
            monotone = monotone && (*ula)[i + 1] <= (*ula)[i] + 1e-12;
            monotone = monotone && (*nested)[i + 1] <= (*nested)[i] + 1e-12;
        }
        ordered = ordered && (*nested)[i] <= (*ula)[i];
        if (std::max((*nested)[i], (*ula)[i]) > 0.0) {
            ++contested;
            ordered = ordered && (*nested)[i] < (*ula)[i];
        }
    }
    std::ostringstream detail;
    detail << "ula [";
    for (double v : *ula) detail << " " << fmt(v);
    detail << " ] vs nested [";
    for (double v : *nested) detail << " " << fmt(v);
    detail << " ] deg over snr {-10..10}";
    const bool ok = monotone && ordered && contested >= 1;
    return {ok, detail.str()};
}

// 6. The real-arithmetic stages must beat the complex baseline stages.
Outcome check_stage_timings() {
    const ExperimentConfig cfg = ExperimentConfig::defaults();  // 100 repeats, 0.05 deg grid
    const BenchReport report = run_bench(cfg, /*write_files=*/false);

    auto entry = [&](const std::string& geometry, const std::string& method) -> const BenchEntry* {
        for (const auto& e : report.entries)
            if (e.geometry == geometry && e.method == method) return &e;
        return nullptr;
    };

    bool ok = true;
    std::ostringstream detail;
    for (const std::string geometry : {"ula6", "nested3x3"}) {
        const BenchEntry* real = entry(geometry, "real-kr");
        const BenchEntry* cplx = entry(geometry, "complex-kr");
        if (!real || !cplx) return {false, "missing bench entries"};
        ok = ok && real->svd_ms_median < cplx->svd_ms_median &&
             real->search_ms_median < cplx->search_ms_median;
        detail << geometry << " svd " << fmt(real->svd_ms_median) << "<"
               << fmt(cplx->svd_ms_median) << " ms, search " << fmt(real->search_ms_median)
               << "<" << fmt(cplx->search_ms_median) << " ms; ";
    }
    detail << "medians over " << report.repeats << " repeats";
    return {ok, detail.str()};
}

// 7. The real observation factors exactly as steering times frame powers,
//    and the real transform preserves per-column energy up to the dropped row.
Outcome check_model_identity() {
    double worst_rel = 0.0, worst_energy = 0.0;
    const struct {
        ArrayGeometry g;
        const std::vector<double>& doas;
    } setups[2] = {{make_ula(6), kSevenDoas}, {make_nested_proposed(3, 3), kTenDoas}};
    for (const auto& setup : setups) {
        const int k = static_cast<int>(setup.doas.size());
        const PowerProfile profile = random_profile(50, k, 37);
        const FrameCovariances fc = exact_covariances(setup.g, setup.doas, profile, 1.1);
        const RealKRMatrix obs = build_real_observation(fc, setup.g);

        Eigen::MatrixXd b(obs.m.rows(), k);
        for (int c = 0; c < k; ++c)
            b.col(c) = stacked_steering(setup.g, setup.doas[static_cast<size_t>(c)]);
        const Eigen::MatrixXd expected = b * profile.power.transpose();
        worst_rel = std::max(worst_rel,
                             max_abs(Eigen::MatrixXd(obs.m - expected)) / max_abs(expected));

        const KRObservation y = vectorize(fc);
        const Eigen::MatrixXcd z = setup.g.is_ula()
                                       ? reduce_ula(y, setup.g.num_sensors())
                                       : average_sort(y, difference_coarray(setup.g)).z;
        const int half = static_cast<int>((z.rows() - 1) / 2);
        const RealKRMatrix out = real_transform(z, half);
        for (Eigen::Index c = 0; c < z.cols(); ++c) {
            const double in_sq = z.col(c).squaredNorm();
            const double kept = in_sq - std::norm(z(half, c));
            worst_energy =
                std::max(worst_energy, std::abs(out.m.col(c).squaredNorm() - kept) / in_sq);
        }
    }
    const bool ok = worst_rel < 1e-10 && worst_energy < 1e-12;
    return {ok, "factorization off by " + fmt(worst_rel) + " relative; energy identity off by " +
                    fmt(worst_energy) + " relative"};
}

// 8. Real and complex pipelines must locate the same peaks: exactly (to one
//    grid step) on ensemble covariances, and within half a degree per source
//    on sampled data where the nested array resolves everything.
Outcome check_real_complex_agreement() {
    const GridSpec grid;
    const double step_tol = grid.step_deg + 1e-9;
    double worst_exact = 0.0;

    const PowerProfile profile = random_profile(50, 7, 41);
    for (const ArrayGeometry& g : {make_ula(6), make_nested_proposed(3, 3)}) {
        const FrameCovariances fc = exact_covariances(g, kSevenDoas, profile, 1.0);
        const std::vector<Peak> real_peaks = real_kr_spectrum(fc, g, 7, grid).peaks;
        const std::vector<Peak> cplx_peaks = complex_kr_baseline(fc, g, 7, grid).peaks;
        for (double theta : kSevenDoas)
            worst_exact = std::max(worst_exact, std::abs(nearest_peak(real_peaks, theta) -
                                                         nearest_peak(cplx_peaks, theta)));
    }

    SourceScenario sc;
    sc.doas_deg = kSevenDoas;
    sc.seed = 1;
    sc.snapshots = 20000;
    sc.frame_length = 400;
    const ArrayGeometry nested = make_nested_proposed(3, 3);
    const Snapshots snaps = generate_snapshots(nested, sc, snr_to_noise_power(0.0));
    const FrameCovariances fc = local_covariances(snaps.x, 400);
    const std::vector<Peak> real_peaks = real_kr_spectrum(fc, nested, 7, grid).peaks;
    const std::vector<Peak> cplx_peaks = complex_kr_baseline(fc, nested, 7, grid).peaks;
    double worst_sampled = 0.0;
    for (double theta : kSevenDoas)
        worst_sampled = std::max(worst_sampled, std::abs(nearest_peak(real_peaks, theta) -
                                                         nearest_peak(cplx_peaks, theta)));

    const bool ok = worst_exact <= step_tol && worst_sampled <= 0.5;
    return {ok, "ensemble-covariance peaks differ by " + fmt(worst_exact) +
                    " deg (tolerance one grid step); sampled-data peaks by " +
                    fmt(worst_sampled) + " deg (tolerance 0.5)"};
}

}  // namespace

int main() {
    struct Check {
        const char* label;
        Outcome (*run)();
    };
    const Check checks[] = {
        {"aperture formulas match co-array enumeration", check_aperture_table},
        {"spatially white noise cancels from the real observation", check_noise_cancellation},
        {"noise subspace annihilates every source, beyond the sensor count", check_null_depth},
        {"nested array resolves 7 sources where the ULA merges the cluster",
         check_reference_scenario},
        {"rmse: nested beats the ULA and both improve with SNR", check_rmse_ordering},
        {"real-arithmetic SVD and search are faster than the complex baseline",
         check_stage_timings},
        {"observation factors as steering times frame powers", check_model_identity},
        {"real and complex pipelines locate the same peaks", check_real_complex_agreement},
    };

    int failures = 0;
    int num = 0;
    for (const auto& check : checks) {
        ++num;
        Outcome outcome;
        try {
            outcome = check.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %d. %s — %s\n", outcome.ok ? "PASS" : "FAIL", num, check.label,
                    outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.ok) ++failures;
    }
    if (failures == 0)
        std::printf("all %d checks passed\n", num);
    else
        std::printf("%d of %d checks FAILED\n", failures, num);
    return failures;
}
