#pragma once

#include <Eigen/Dense>
#include <vector>

#include "krdoa/kr_pipeline.hpp"

namespace krdoa {

/// Uniform angular grid in degrees. Angles are generated on a micro-degree
/// lattice so that decimal grid steps land exactly on decimal angles
/// (e.g. a 0.05 step hits 15.0 bit-exactly).
struct GridSpec {
    double min_deg = -90.0;
    double max_deg = 90.0;
    double step_deg = 0.05;

    std::vector<double> angles() const;
    void validate() const;
};

/// Left singular vectors spanning the noise subspace of a real observation,
/// plus the full singular spectrum for rank diagnostics.
struct RealNoiseSubspace {
    Eigen::MatrixXd basis;  ///< rows x (rows - k), orthonormal columns
    Eigen::VectorXd singular_values;
};

struct ComplexNoiseSubspace {
    Eigen::MatrixXcd basis;
    Eigen::VectorXd singular_values;
};

/// Noise subspace of an observation matrix with k signal directions: the
/// left singular vectors k+1 .. rows. Throws when k < 0, k >= rows (no noise
/// subspace left), k > columns (rank-deficient frame matrix), or the
/// observation is identically zero.
RealNoiseSubspace noise_subspace(const Eigen::MatrixXd& obs, int k);
ComplexNoiseSubspace noise_subspace(const Eigen::MatrixXcd& obs, int k);

struct Peak {
    double angle_deg = 0.0;
    double value = 0.0;  ///< linear pseudospectrum height
};

struct SpectrumResult {
    std::vector<double> grid_deg;
    std::vector<double> values;  ///< linear pseudospectrum, strictly positive
    std::vector<Peak> peaks;     ///< filled by the estimator entry points
};

/// Subspace pseudospectrum P(theta) = 1 / ||U_n^T b(theta)||^2 over the grid,
/// with b the stacked real virtual steering of the geometry.
SpectrumResult music_spectrum(const RealNoiseSubspace& un, const ArrayGeometry& g,
                              const GridSpec& grid);

/// Complex variant: P(theta) = 1 / ||U_n^H m(theta)||^2 with m the weighted
/// complex manifold over ascending lags.
SpectrumResult music_spectrum(const ComplexNoiseSubspace& un, const ArrayGeometry& g,
                              const GridSpec& grid);

/// The k largest strict local maxima of the spectrum, in ascending angle.
/// Fewer than k peaks are returned when the spectrum has fewer local maxima.
/// With refine = true each peak angle is adjusted by 3-point parabolic
/// interpolation of log-height around the grid maximum.
std::vector<Peak> find_peaks(const SpectrumResult& s, int k, bool refine = false);

/// Full real-valued pipeline: real observation, noise subspace from a real
/// SVD, real spectral search; peaks are the k largest local maxima.
SpectrumResult real_kr_spectrum(const FrameCovariances& fc, const ArrayGeometry& g, int k,
                                const GridSpec& grid);

/// Complex reference pipeline: lag-sorted complex observation, columns
/// projected onto the complement of the all-ones direction (removing the
/// common noise term), complex SVD, complex spectral search.
SpectrumResult complex_kr_baseline(const FrameCovariances& fc, const ArrayGeometry& g, int k,
                                   const GridSpec& grid);

/// Root-mean-square error of angle estimates against a single true angle.
double rmse(const std::vector<double>& estimates_deg, double truth_deg);

}  // namespace krdoa
