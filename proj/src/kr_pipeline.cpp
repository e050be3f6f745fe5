#include "krdoa/kr_pipeline.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace krdoa {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

}  // namespace

KRObservation vectorize(const FrameCovariances& fc) {
    if (fc.num_frames() < 1) throw std::invalid_argument("vectorize: no frames");
    const int n = fc.num_sensors();
    KRObservation out;
    out.num_sensors = n;
    out.y.resize(static_cast<Eigen::Index>(n) * n, fc.num_frames());
    for (int m = 0; m < fc.num_frames(); ++m) {
        const auto& r = fc.mats[static_cast<size_t>(m)];
        if (r.rows() != n || r.cols() != n)
            throw std::invalid_argument("vectorize: frame " + std::to_string(m) +
                                        " has inconsistent dimensions");
        // Column-major stacking, so vec(a d a^H) = d * (conj(a) (x) a).
        out.y.col(m) = Eigen::Map<const Eigen::VectorXcd>(r.data(), static_cast<Eigen::Index>(n) * n);
    }
    return out;
}

UlaSelection ula_selection(int n) {
    if (n < 2) throw std::invalid_argument("ula_selection: need at least 2 sensors");
    UlaSelection s;
    s.g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) * n, 2 * n - 1);
    s.w = Eigen::VectorXd::Zero(2 * n - 1);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Eigen::Index row = static_cast<Eigen::Index>(j) * n + i;  // vec index of R(i, j)
            const int col = (n - 1) + (i - j);                              // ascending lag i - j
            s.g(row, col) = 1.0;
            s.w(col) += 1.0;
        }
    }
    return s;
}

Eigen::MatrixXcd reduce_ula(const KRObservation& y, int n) {
    if (n < 2) throw std::invalid_argument("reduce_ula: need at least 2 sensors");
    if (y.num_sensors != n || y.y.rows() != static_cast<Eigen::Index>(n) * n)
        throw std::invalid_argument("reduce_ula: observation rows (" + std::to_string(y.y.rows()) +
                                    ") do not match sensor count " + std::to_string(n));
    const Eigen::Index m = y.y.cols();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * n - 1, m);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            out.row((n - 1) + (i - j)) += y.y.row(static_cast<Eigen::Index>(j) * n + i);
    for (int c = 0; c < 2 * n - 1; ++c) {
        const double count = n - std::abs(c - (n - 1));
        out.row(c) /= std::sqrt(count);
    }
    return out;
}

SortedCoarrayObservation average_sort(const KRObservation& y, const CoArrayMap& c) {
    const int n = c.num_sensors;
    if (y.num_sensors != n || y.y.rows() != static_cast<Eigen::Index>(n) * n)
        throw std::invalid_argument("average_sort: observation rows do not match the co-array's sensor count");
    if (!is_hole_free(c))
        throw std::invalid_argument("average_sort: the difference co-array has holes; only contiguous-lag arrays are supported");

    SortedCoarrayObservation out;
    out.max_lag = c.max_lag;
    out.z = Eigen::MatrixXcd::Zero(2 * c.max_lag + 1, y.y.cols());
    // Accumulation runs over vec order (j major, i minor). For a fixed lag
    // the pairs (i, j) and their transposes are visited in the same relative
    // order, so conjugate symmetry of Hermitian input survives bit-exactly.
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int lag = c.pair_lag[static_cast<size_t>(i) * n + j];
            out.z.row(lag + c.max_lag) += y.y.row(static_cast<Eigen::Index>(j) * n + i);
        }
    for (int r = 0; r < 2 * c.max_lag + 1; ++r) {
        const int count = c.multiplicity_of(r - c.max_lag);
        out.z.row(r) /= static_cast<double>(count);
    }
    return out;
}

RealKRMatrix real_transform(const Eigen::MatrixXcd& sorted, int half_size) {
    const Eigen::Index rows = sorted.rows();
    if (rows % 2 == 0)
        throw std::invalid_argument("real_transform: expected an odd row count (symmetric lags plus center), got " +
                                    std::to_string(rows));
    if (half_size != (rows - 1) / 2)
        throw std::invalid_argument("real_transform: half size " + std::to_string(half_size) +
                                    " does not match " + std::to_string(rows) + " rows");

    // For conjugate-symmetric rows this equals the unitary combination of
    // mirrored lag pairs; extracting Re/Im of the negative-lag block avoids
    // the complex multiply. The zero-lag row is dropped, which is what
    // removes spatially uncorrelated noise from the observation.
    RealKRMatrix out;
    out.half = half_size;
    out.m.resize(2 * half_size, sorted.cols());
    out.m.topRows(half_size) = kSqrt2 * sorted.topRows(half_size).real();
    out.m.bottomRows(half_size) = kSqrt2 * sorted.topRows(half_size).imag();
    out.row_weights.assign(static_cast<size_t>(half_size), 1.0);
    return out;
}

RealKRMatrix build_real_observation(const FrameCovariances& fc, const ArrayGeometry& g) {
    const KRObservation y = vectorize(fc);
    if (y.num_sensors != g.num_sensors())
        throw std::invalid_argument("build_real_observation: covariances and geometry disagree on sensor count");
    RealKRMatrix out;
    if (g.is_ula()) {
        const int n = g.num_sensors();
        out = real_transform(reduce_ula(y, n), n - 1);
    } else {
        const CoArrayMap c = difference_coarray(g);
        const SortedCoarrayObservation z = average_sort(y, c);
        out = real_transform(z.z, z.max_lag);
    }
    out.row_weights = manifold_weights_real(g);
    return out;
}

std::vector<double> manifold_weights_real(const ArrayGeometry& g) {
    if (g.is_ula()) {
        const int n = g.num_sensors();
        std::vector<double> w(static_cast<size_t>(n - 1));
        // Channel i carries lag magnitude n-1-i, which n-(n-1-i) = i+1 sensor
        // pairs produce; the reduction scaled that channel by sqrt(i+1).
        for (int i = 0; i < n - 1; ++i) w[static_cast<size_t>(i)] = std::sqrt(i + 1.0);
        return w;
    }
    const CoArrayMap c = difference_coarray(g);
    if (!is_hole_free(c))
        throw std::invalid_argument("manifold_weights_real: the difference co-array has holes");
    return std::vector<double>(static_cast<size_t>(c.max_lag), 1.0);
}

std::vector<double> manifold_weights_complex(const ArrayGeometry& g) {
    if (g.is_ula()) {
        const int n = g.num_sensors();
        std::vector<double> w(static_cast<size_t>(2 * n - 1));
        for (int r = 0; r < 2 * n - 1; ++r)
            w[static_cast<size_t>(r)] = std::sqrt(n - std::abs(r - (n - 1)));
        return w;
    }
    const CoArrayMap c = difference_coarray(g);
    if (!is_hole_free(c))
        throw std::invalid_argument("manifold_weights_complex: the difference co-array has holes");
    return std::vector<double>(static_cast<size_t>(2 * c.max_lag + 1), 1.0);
}

VirtualSteering virtual_steering(const ArrayGeometry& g, double theta_deg) {
    if (!(theta_deg >= -90.0 && theta_deg <= 90.0))
        throw std::invalid_argument("virtual_steering: angle " + std::to_string(theta_deg) +
                                    " outside [-90, 90]");
    const std::vector<double> w = manifold_weights_real(g);
    const int half = static_cast<int>(w.size());
    const double phi = g.spatial_phase(theta_deg);
    VirtualSteering b;
    b.b_r.resize(half);
    b.b_i.resize(half);
    for (int i = 0; i < half; ++i) {
        const double arg = (half - i) * phi;
        b.b_r(i) = kSqrt2 * w[static_cast<size_t>(i)] * std::cos(arg);
        b.b_i(i) = kSqrt2 * w[static_cast<size_t>(i)] * std::sin(arg);
    }
    return b;
}

Eigen::VectorXcd virtual_steering_complex(const ArrayGeometry& g, double theta_deg) {
    if (!(theta_deg >= -90.0 && theta_deg <= 90.0))
        throw std::invalid_argument("virtual_steering_complex: angle " + std::to_string(theta_deg) +
                                    " outside [-90, 90]");
    const std::vector<double> w = manifold_weights_complex(g);
    const int rows = static_cast<int>(w.size());
    const int half = (rows - 1) / 2;
    const double phi = g.spatial_phase(theta_deg);
    Eigen::VectorXcd m(rows);
    for (int r = 0; r < rows; ++r) {
        const double arg = -(r - half) * phi;
        m(r) = w[static_cast<size_t>(r)] * std::complex<double>(std::cos(arg), std::sin(arg));
    }
    return m;
}

}  // namespace krdoa
