#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace krdoa::kernels {

// Grid scans and frame-covariance accumulation come in two flavors: a plain
// serial reference (straightforward scalar loops, kept as the ground truth
// for testing) and the production variant that distributes independent work
// items across OpenMP threads. Grid points and frames are independent, so
// the parallel results do not depend on the thread count.

/// Real subspace scan. noise_basis has 2*half rows; weights has `half`
/// entries; phase_factor is 2*pi*spacing/wavelength. For each grid angle the
/// stacked steering [sqrt(2)*w_i*cos(l_i*phi); sqrt(2)*w_i*sin(l_i*phi)]
/// (l_i = half - i) is projected onto the basis columns and
/// out = 1 / ||projection||^2.
void real_music_scan_serial(const Eigen::MatrixXd& noise_basis, double phase_factor,
                            std::span<const double> weights, std::span<const double> grid_deg,
                            std::span<double> out);
void real_music_scan_parallel(const Eigen::MatrixXd& noise_basis, double phase_factor,
                              std::span<const double> weights, std::span<const double> grid_deg,
                              std::span<double> out);

/// Complex subspace scan over a (2*half + 1)-row manifold
/// m[r] = weights[r] * exp(-j*(r - half)*phi).
void complex_music_scan_serial(const Eigen::MatrixXcd& noise_basis, double phase_factor,
                               std::span<const double> weights, std::span<const double> grid_deg,
                               std::span<double> out);
void complex_music_scan_parallel(const Eigen::MatrixXcd& noise_basis, double phase_factor,
                                 std::span<const double> weights, std::span<const double> grid_deg,
                                 std::span<double> out);

/// Per-frame sample covariances (1/L) X_m X_m^H, exactly Hermitian (lower
/// triangle computed, upper mirrored, diagonal imaginary parts zeroed).
void frame_covariances_serial(const Eigen::MatrixXcd& x, int frame_length,
                              std::vector<Eigen::MatrixXcd>& out);
void frame_covariances_parallel(const Eigen::MatrixXcd& x, int frame_length,
                                std::vector<Eigen::MatrixXcd>& out);

}  // namespace krdoa::kernels
