#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "krdoa/geometry.hpp"

namespace krdoa {

/// N x T matrix of array snapshots; column t is the array output at time t.
using SnapshotMatrix = Eigen::MatrixXcd;

/// Law for the per-segment source power of a quasi-stationary emitter.
enum class PowerModel {
    Constant,       ///< nominal power over the whole record (stationary)
    RandomUniform,  ///< each segment draws power from U[0.5, 2.0] * nominal
};

/// Quasi-stationary source scenario: K narrowband far-field emitters whose
/// powers are piecewise constant over random-length segments, observed in M
/// frames of `frame_length` snapshots each (M = snapshots / frame_length).
struct SourceScenario {
    std::vector<double> doas_deg;  ///< distinct angles in [-90, 90]
    PowerModel power_model = PowerModel::RandomUniform;
    double nominal_power = 1.0;
    std::uint64_t seed = 1;
    int snapshots = 20000;    ///< T, must be a multiple of frame_length
    int frame_length = 400;   ///< L

    int num_sources() const { return static_cast<int>(doas_deg.size()); }
    int num_frames() const { return snapshots / frame_length; }
    void validate() const;  ///< throws std::invalid_argument on bad fields
};

/// Realized average source powers per frame: entry (m, k) is the mean power
/// of source k over the snapshots of frame m. Conditioned on a realization
/// these are the exact per-frame second moments of the source samples.
struct PowerProfile {
    Eigen::MatrixXd power;  ///< M x K, nonnegative
};

/// Source sample matrix (K x T) together with its realized power profile.
struct SourceSignals {
    Eigen::MatrixXcd samples;
    PowerProfile profile;
};

/// Snapshot matrix together with the realized source power profile that
/// produced it (kept so exact covariances can be formed for the same draw).
struct Snapshots {
    SnapshotMatrix x;  ///< N x T
    PowerProfile profile;
};

/// Per-frame sample covariances of a snapshot record.
struct FrameCovariances {
    std::vector<Eigen::MatrixXcd> mats;  ///< M Hermitian N x N matrices
    int frame_length = 0;

    int num_frames() const { return static_cast<int>(mats.size()); }
    int num_sensors() const { return mats.empty() ? 0 : static_cast<int>(mats.front().rows()); }
};

/// Far-field steering vector: element i is exp(-j * 2*pi * d_i / lambda * sin(theta))
/// with d_i the physical position of sensor i. Throws if theta is outside [-90, 90].
Eigen::VectorXcd steering_vector(const ArrayGeometry& g, double theta_deg);

/// Steering matrix with one column per angle.
Eigen::MatrixXcd steering_matrix(const ArrayGeometry& g, const std::vector<double>& doas_deg);

/// Draw circular complex Gaussian source samples following the scenario's
/// segment/power law. Deterministic in the scenario seed; each source uses
/// an independent substream.
SourceSignals generate_sources(const SourceScenario& sc);

/// X = A * S + V with spatially/temporally white circular Gaussian noise of
/// per-sensor variance noise_power[i]. Noise uses substreams independent of
/// the source draws, so the same seed yields the same sources at any noise level.
Snapshots generate_snapshots(const ArrayGeometry& g, const SourceScenario& sc,
                             const Eigen::VectorXd& noise_power);
Snapshots generate_snapshots(const ArrayGeometry& g, const SourceScenario& sc,
                             double noise_power);

/// Sample covariance of each length-L frame: R_m = (1/L) * X_m * X_m^H.
/// Throws if the number of columns is not a multiple of frame_length.
FrameCovariances local_covariances(const SnapshotMatrix& x, int frame_length);

/// Ensemble frame covariances for a known power profile and noise diagonal:
/// R_m = A * diag(profile row m) * A^H + diag(noise_diag). Exactly Hermitian
/// by construction.
FrameCovariances exact_covariances(const ArrayGeometry& g, const std::vector<double>& doas_deg,
                                   const PowerProfile& profile, const Eigen::VectorXd& noise_diag);
FrameCovariances exact_covariances(const ArrayGeometry& g, const std::vector<double>& doas_deg,
                                   const PowerProfile& profile, double noise_power);

/// Noise variance that realizes a given SNR (dB) against a nominal source power.
double snr_to_noise_power(double snr_db, double nominal_power = 1.0);

}  // namespace krdoa
