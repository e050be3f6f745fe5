#include "krdoa/kernels.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace krdoa::kernels {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kDegToRad = std::numbers::pi / 180.0;

double clamp_denom(double d) {
    return std::max(d, std::numeric_limits<double>::min());
}

void check_scan_args(Eigen::Index rows, size_t half_expected, size_t weights,
                     size_t grid, size_t out) {
    if (weights != half_expected)
        throw std::invalid_argument("music scan: weight count does not match basis rows");
    if (grid != out) throw std::invalid_argument("music scan: output size != grid size");
    if (rows < 1) throw std::invalid_argument("music scan: empty noise basis");
}

}  // namespace

void real_music_scan_serial(const Eigen::MatrixXd& noise_basis, double phase_factor,
                            std::span<const double> weights, std::span<const double> grid_deg,
                            std::span<double> out) {
    const int rows = static_cast<int>(noise_basis.rows());
    const int half = rows / 2;
    const int cols = static_cast<int>(noise_basis.cols());
    if (rows % 2 != 0) throw std::invalid_argument("real music scan: basis rows must be even");
    check_scan_args(rows, static_cast<size_t>(half), weights.size(), grid_deg.size(), out.size());

    std::vector<double> b(static_cast<size_t>(rows));
    for (size_t p = 0; p < grid_deg.size(); ++p) {
        const double phi = phase_factor * std::sin(grid_deg[p] * kDegToRad);
        for (int i = 0; i < half; ++i) {
            const double arg = (half - i) * phi;
            b[static_cast<size_t>(i)] = kSqrt2 * weights[static_cast<size_t>(i)] * std::cos(arg);
            b[static_cast<size_t>(half + i)] =
                kSqrt2 * weights[static_cast<size_t>(i)] * std::sin(arg);
        }
        double denom = 0.0;
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int r = 0; r < rows; ++r) acc += noise_basis(r, c) * b[static_cast<size_t>(r)];
            denom += acc * acc;
        }
        out[p] = 1.0 / clamp_denom(denom);
    }
}

void real_music_scan_parallel(const Eigen::MatrixXd& noise_basis, double phase_factor,
                              std::span<const double> weights, std::span<const double> grid_deg,
                              std::span<double> out) {
    const int rows = static_cast<int>(noise_basis.rows());
    const int half = rows / 2;
    if (rows % 2 != 0) throw std::invalid_argument("real music scan: basis rows must be even");
    check_scan_args(rows, static_cast<size_t>(half), weights.size(), grid_deg.size(), out.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(grid_deg.size());

#pragma omp parallel
    {
        Eigen::VectorXd b(rows);
        Eigen::VectorXd proj(noise_basis.cols());
#pragma omp for schedule(static)
        for (std::ptrdiff_t p = 0; p < n; ++p) {
            const double phi = phase_factor * std::sin(grid_deg[static_cast<size_t>(p)] * kDegToRad);
            for (int i = 0; i < half; ++i) {
                const double arg = (half - i) * phi;
                const double w = kSqrt2 * weights[static_cast<size_t>(i)];
                b(i) = w * std::cos(arg);
                b(half + i) = w * std::sin(arg);
            }
            proj.noalias() = noise_basis.transpose() * b;
            out[static_cast<size_t>(p)] = 1.0 / clamp_denom(proj.squaredNorm());
        }
    }
}

void complex_music_scan_serial(const Eigen::MatrixXcd& noise_basis, double phase_factor,
                               std::span<const double> weights, std::span<const double> grid_deg,
                               std::span<double> out) {
    const int rows = static_cast<int>(noise_basis.rows());
    const int cols = static_cast<int>(noise_basis.cols());
    if (rows % 2 != 1) throw std::invalid_argument("complex music scan: basis rows must be odd");
    const int half = (rows - 1) / 2;
    check_scan_args(rows, static_cast<size_t>(rows), weights.size(), grid_deg.size(), out.size());

    std::vector<std::complex<double>> m(static_cast<size_t>(rows));
    for (size_t p = 0; p < grid_deg.size(); ++p) {
        const double phi = phase_factor * std::sin(grid_deg[p] * kDegToRad);
        for (int r = 0; r < rows; ++r) {
            const double arg = -(r - half) * phi;
            m[static_cast<size_t>(r)] =
                weights[static_cast<size_t>(r)] * std::complex<double>(std::cos(arg), std::sin(arg));
        }
        double denom = 0.0;
        for (int c = 0; c < cols; ++c) {
            std::complex<double> acc(0.0, 0.0);
            for (int r = 0; r < rows; ++r)
                acc += std::conj(noise_basis(r, c)) * m[static_cast<size_t>(r)];
            denom += std::norm(acc);
        }
        out[p] = 1.0 / clamp_denom(denom);
    }
}

void complex_music_scan_parallel(const Eigen::MatrixXcd& noise_basis, double phase_factor,
                                 std::span<const double> weights, std::span<const double> grid_deg,
                                 std::span<double> out) {
    const int rows = static_cast<int>(noise_basis.rows());
    if (rows % 2 != 1) throw std::invalid_argument("complex music scan: basis rows must be odd");
    const int half = (rows - 1) / 2;
    check_scan_args(rows, static_cast<size_t>(rows), weights.size(), grid_deg.size(), out.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(grid_deg.size());

#pragma omp parallel
    {
        Eigen::VectorXcd m(rows);
        Eigen::VectorXcd proj(noise_basis.cols());
#pragma omp for schedule(static)
        for (std::ptrdiff_t p = 0; p < n; ++p) {
            const double phi = phase_factor * std::sin(grid_deg[static_cast<size_t>(p)] * kDegToRad);
            for (int r = 0; r < rows; ++r) {
                const double arg = -(r - half) * phi;
                m(r) = weights[static_cast<size_t>(r)] *
                       std::complex<double>(std::cos(arg), std::sin(arg));
            }
            proj.noalias() = noise_basis.adjoint() * m;
            out[static_cast<size_t>(p)] = 1.0 / clamp_denom(proj.squaredNorm());
        }
    }
}

namespace {

void check_cov_args(const Eigen::MatrixXcd& x, int frame_length) {
    if (frame_length < 1)
        throw std::invalid_argument("frame covariances: frame length must be positive");
    if (x.cols() % frame_length != 0)
        throw std::invalid_argument("frame covariances: column count is not a multiple of the frame length");
}

// Mirror the computed lower triangle so the result is Hermitian to the bit.
void hermitianize(Eigen::MatrixXcd& r) {
    const int n = static_cast<int>(r.rows());
    for (int i = 0; i < n; ++i) {
        r(i, i) = std::complex<double>(r(i, i).real(), 0.0);
        for (int j = i + 1; j < n; ++j) r(i, j) = std::conj(r(j, i));
    }
}

}  // namespace

void frame_covariances_serial(const Eigen::MatrixXcd& x, int frame_length,
                              std::vector<Eigen::MatrixXcd>& out) {
    check_cov_args(x, frame_length);
    const int n = static_cast<int>(x.rows());
    const int frames = static_cast<int>(x.cols()) / frame_length;
    out.assign(static_cast<size_t>(frames), Eigen::MatrixXcd());
    for (int m = 0; m < frames; ++m) {
        Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n, n);
        for (int t = m * frame_length; t < (m + 1) * frame_length; ++t)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j <= i; ++j) r(i, j) += x(i, t) * std::conj(x(j, t));
        r /= static_cast<double>(frame_length);
        hermitianize(r);
        out[static_cast<size_t>(m)] = std::move(r);
    }
}

void frame_covariances_parallel(const Eigen::MatrixXcd& x, int frame_length,
                                std::vector<Eigen::MatrixXcd>& out) {
    check_cov_args(x, frame_length);
    const int n = static_cast<int>(x.rows());
    const int frames = static_cast<int>(x.cols()) / frame_length;
    out.assign(static_cast<size_t>(frames), Eigen::MatrixXcd());
#pragma omp parallel for schedule(static)
    for (int m = 0; m < frames; ++m) {
        Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n, n);
        r.selfadjointView<Eigen::Lower>().rankUpdate(x.middleCols(m * frame_length, frame_length),
                                                     1.0 / frame_length);
        hermitianize(r);
        out[static_cast<size_t>(m)] = std::move(r);
    }
}

}  // namespace krdoa::kernels
