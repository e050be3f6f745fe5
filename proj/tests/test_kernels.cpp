#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "krdoa/estimator.hpp"
#include "krdoa/kernels.hpp"
#include "krdoa/kr_pipeline.hpp"
#include "krdoa/simulate.hpp"
#include "test_helpers.hpp"

using namespace krdoa;
using krdoa::testing::max_abs;

namespace {

struct ScanFixture {
    Eigen::MatrixXd real_basis;
    Eigen::MatrixXcd complex_basis;
    std::vector<double> real_weights;
    std::vector<double> complex_weights;
    std::vector<double> grid;
    double phase_factor = 0.0;
};

ScanFixture make_fixture() {
    const ArrayGeometry g = make_nested_proposed(3, 3);
    const std::vector<double> doas{-65, -48, -33.5, -20, -7.25, 4.6, 18, 29.85, 43, 57.1};
    const FrameCovariances fc =
        exact_covariances(g, doas, testing::random_profile(50, 10, 23), 0.8);

    ScanFixture f;
    const RealKRMatrix obs = build_real_observation(fc, g);
    f.real_basis = noise_subspace(obs.m, 10).basis;
    const Eigen::MatrixXcd z = average_sort(vectorize(fc), difference_coarray(g)).z;
    f.complex_basis = noise_subspace(z, 10).basis;
    f.real_weights = manifold_weights_real(g);
    f.complex_weights = manifold_weights_complex(g);
    f.grid = GridSpec{-90.0, 90.0, 0.25}.angles();
    f.phase_factor = g.spatial_phase(90.0);  // 2*pi*spacing/wavelength
    return f;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1e-300});
        worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
    }
    return worst;
}

// Random orthonormal bases keep every projection well away from zero, so the
// serial/parallel comparison is not dominated by the conditioning of exact
// nulls (where the spectrum is a reciprocal of a vanishing quantity).
Eigen::MatrixXd random_real_basis(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

Eigen::MatrixXcd random_complex_basis(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = std::complex<double>(g(rng), g(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(rows, cols);
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("real scan parallel matches the serial reference") {
    const ScanFixture f = make_fixture();
    const Eigen::MatrixXd basis = random_real_basis(f.real_basis.rows(), 14, 421);
    std::vector<double> serial(f.grid.size()), parallel(f.grid.size());
    kernels::real_music_scan_serial(basis, f.phase_factor, f.real_weights, f.grid, serial);
    kernels::real_music_scan_parallel(basis, f.phase_factor, f.real_weights, f.grid, parallel);
    CHECK(max_rel_diff(serial, parallel) < 1e-12);
    for (double v : serial) {
        CHECK(std::isfinite(v));
        CHECK(v > 0.0);
    }
}

TEST_CASE("complex scan parallel matches the serial reference") {
    const ScanFixture f = make_fixture();
    const Eigen::MatrixXcd basis = random_complex_basis(f.complex_basis.rows(), 15, 422);
    std::vector<double> serial(f.grid.size()), parallel(f.grid.size());
    kernels::complex_music_scan_serial(basis, f.phase_factor, f.complex_weights, f.grid, serial);
    kernels::complex_music_scan_parallel(basis, f.phase_factor, f.complex_weights, f.grid,
                                         parallel);
    CHECK(max_rel_diff(serial, parallel) < 1e-12);
}

TEST_CASE("scans on a data-derived basis agree where the spectrum is bounded") {
    // Near the exact nulls of an exact-covariance basis the spectrum is the
    // reciprocal of a denominator that underflows toward zero, so relative
    // agreement is only meaningful where the projection stays measurable.
    const ScanFixture f = make_fixture();
    std::vector<double> serial(f.grid.size()), parallel(f.grid.size());
    kernels::real_music_scan_serial(f.real_basis, f.phase_factor, f.real_weights, f.grid, serial);
    kernels::real_music_scan_parallel(f.real_basis, f.phase_factor, f.real_weights, f.grid,
                                      parallel);
    const double cutoff = *std::min_element(serial.begin(), serial.end()) * 1e3;
    double worst = 0.0;
    size_t compared = 0;
    for (size_t i = 0; i < serial.size(); ++i) {
        if (serial[i] > cutoff) continue;  // skip the near-null reciprocals
        worst = std::max(worst, std::abs(serial[i] - parallel[i]) /
                                    std::max({serial[i], parallel[i], 1e-300}));
        ++compared;
    }
    CHECK(compared > f.grid.size() / 2);
    CHECK(worst < 1e-10);
}

TEST_CASE("parallel scans are reproducible across thread counts") {
    const ScanFixture f = make_fixture();
    std::vector<std::vector<double>> runs;
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    for (int threads : {1, 2, 4}) {
        omp_set_num_threads(threads);
        std::vector<double> out(f.grid.size());
        kernels::real_music_scan_parallel(f.real_basis, f.phase_factor, f.real_weights, f.grid,
                                          out);
        runs.push_back(std::move(out));
    }
    omp_set_num_threads(saved);
#else
    for (int repeat = 0; repeat < 3; ++repeat) {
        std::vector<double> out(f.grid.size());
        kernels::real_music_scan_parallel(f.real_basis, f.phase_factor, f.real_weights, f.grid,
                                          out);
        runs.push_back(std::move(out));
    }
#endif
    for (size_t r = 1; r < runs.size(); ++r)
        for (size_t i = 0; i < runs[0].size(); ++i) CHECK(runs[r][i] == runs[0][i]);
}

TEST_CASE("scan argument validation") {
    const ScanFixture f = make_fixture();
    std::vector<double> out(f.grid.size());

    const Eigen::MatrixXd odd_rows = Eigen::MatrixXd::Zero(5, 2);
    CHECK_THROWS_AS(kernels::real_music_scan_serial(odd_rows, f.phase_factor, f.real_weights,
                                                    f.grid, out),
                    std::invalid_argument);

    std::vector<double> short_weights(f.real_weights.begin(), f.real_weights.end() - 1);
    CHECK_THROWS_AS(kernels::real_music_scan_serial(f.real_basis, f.phase_factor, short_weights,
                                                    f.grid, out),
                    std::invalid_argument);

    std::vector<double> short_out(f.grid.size() - 1);
    CHECK_THROWS_AS(kernels::real_music_scan_parallel(f.real_basis, f.phase_factor,
                                                      f.real_weights, f.grid, short_out),
                    std::invalid_argument);

    const Eigen::MatrixXcd even_rows = Eigen::MatrixXcd::Zero(6, 2);
    CHECK_THROWS_AS(kernels::complex_music_scan_serial(even_rows, f.phase_factor,
                                                       f.complex_weights, f.grid, out),
                    std::invalid_argument);
}

TEST_CASE("frame covariance kernels agree with a direct product") {
    const ArrayGeometry g = make_nested_proposed(2, 3);
    SourceScenario sc;
    sc.doas_deg = {-35.0, 5.0, 50.0};
    sc.seed = 71;
    sc.snapshots = 2000;
    sc.frame_length = 250;
    const Snapshots snaps = generate_snapshots(g, sc, 0.6);

    std::vector<Eigen::MatrixXcd> serial, parallel;
    kernels::frame_covariances_serial(snaps.x, 250, serial);
    kernels::frame_covariances_parallel(snaps.x, 250, parallel);
    REQUIRE(serial.size() == 8);
    REQUIRE(parallel.size() == 8);

    for (int m = 0; m < 8; ++m) {
        const Eigen::MatrixXcd block = snaps.x.middleCols(250 * m, 250);
        const Eigen::MatrixXcd direct = block * block.adjoint() / 250.0;
        CHECK(max_abs(Eigen::MatrixXcd(serial[m] - direct)) < 1e-12 * max_abs(direct));
        CHECK(max_abs(Eigen::MatrixXcd(parallel[m] - direct)) < 1e-12 * max_abs(direct));
        // both flavors pin the Hermitian structure exactly
        CHECK(max_abs(Eigen::MatrixXcd(serial[m] - serial[m].adjoint())) == 0.0);
        CHECK(max_abs(Eigen::MatrixXcd(parallel[m] - parallel[m].adjoint())) == 0.0);
    }
}

TEST_CASE("frame covariance kernels are reproducible across thread counts") {
    SourceScenario sc;
    sc.doas_deg = {12.0};
    sc.seed = 5;
    sc.snapshots = 1200;
    sc.frame_length = 100;
    const Snapshots snaps = generate_snapshots(make_ula(4), sc, 1.0);

    std::vector<std::vector<Eigen::MatrixXcd>> runs;
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    for (int threads : {1, 2, 4}) {
        omp_set_num_threads(threads);
        std::vector<Eigen::MatrixXcd> out;
        kernels::frame_covariances_parallel(snaps.x, 100, out);
        runs.push_back(std::move(out));
    }
    omp_set_num_threads(saved);
#else
    for (int repeat = 0; repeat < 2; ++repeat) {
        std::vector<Eigen::MatrixXcd> out;
        kernels::frame_covariances_parallel(snaps.x, 100, out);
        runs.push_back(std::move(out));
    }
#endif
    for (size_t r = 1; r < runs.size(); ++r)
        for (size_t m = 0; m < runs[0].size(); ++m)
            CHECK(max_abs(Eigen::MatrixXcd(runs[r][m] - runs[0][m])) == 0.0);
}

TEST_CASE("frame covariance kernels validate frame length") {
    std::vector<Eigen::MatrixXcd> out;
    const Eigen::MatrixXcd x = Eigen::MatrixXcd::Ones(2, 10);
    CHECK_THROWS_AS(kernels::frame_covariances_serial(x, 3, out), std::invalid_argument);
    CHECK_THROWS_AS(kernels::frame_covariances_parallel(x, 0, out), std::invalid_argument);
}

}  // TEST_SUITE
