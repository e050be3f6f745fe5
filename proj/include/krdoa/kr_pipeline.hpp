#pragma once

#include <Eigen/Dense>
#include <vector>

#include "krdoa/geometry.hpp"
#include "krdoa/simulate.hpp"

namespace krdoa {

// Lag/row convention used throughout: matrices indexed by co-array lag hold
// the lag u = d_i - d_j in row u + max_lag, i.e. rows run over ascending
// pair difference -max_lag .. +max_lag. A single unit-power source at phase
// phi contributes exp(-j*u*phi) to the row of lag u.

/// Vectorized frame covariances: column m is vec(R_m) in column-major order,
/// so Y = conj(A) (x) A * Psi^T + vec(C) * 1^T for the signal model.
struct KRObservation {
    Eigen::MatrixXcd y;  ///< N^2 x M
    int num_sensors = 0;
};

/// Co-array rows of a KR observation after averaging repeated lags and
/// sorting by lag. Row r corresponds to lag r - max_lag.
struct SortedCoarrayObservation {
    Eigen::MatrixXcd z;  ///< (2*max_lag + 1) x M
    int max_lag = 0;
};

/// Real-valued denoised observation. Rows 0 .. half-1 are cosine channels
/// for lag magnitudes half .. 1 (descending); rows half .. 2*half-1 are the
/// matching sine channels. The zero-lag row — the only one touched by
/// spatially uncorrelated noise — is annihilated by construction.
struct RealKRMatrix {
    Eigen::MatrixXd m;  ///< 2*half x M
    int half = 0;
    std::vector<double> row_weights;  ///< per-channel manifold weights, size `half`
};

/// Real virtual steering split into cosine/phase-quadrature halves:
///   b_r[i] = sqrt(2) * w_i * cos((half - i) * phi)
///   b_i[i] = sqrt(2) * w_i * sin((half - i) * phi)
struct VirtualSteering {
    Eigen::VectorXd b_r;
    Eigen::VectorXd b_i;
};

KRObservation vectorize(const FrameCovariances& fc);

/// Selection matrix for the ULA fast path. `g` is the N^2 x (2N-1) binary
/// matrix whose column c picks every entry of vec(R) with lag c - (N-1);
/// `w` is the diagonal of g^T g, i.e. the per-lag pair counts 1..N..1.
struct UlaSelection {
    Eigen::MatrixXd g;
    Eigen::VectorXd w;
};
UlaSelection ula_selection(int n);

/// ULA reduction W^{-1/2} G^T Y: rows ascending lag -(N-1) .. N-1, each the
/// sqrt-count-weighted average of the vec(R) entries sharing that lag.
Eigen::MatrixXcd reduce_ula(const KRObservation& y, int n);

/// Generic co-array reduction: plain arithmetic mean of the rows sharing
/// each lag, sorted ascending. Requires a hole-free co-array.
SortedCoarrayObservation average_sort(const KRObservation& y, const CoArrayMap& c);

/// Orthonormal real transform specialized to conjugate-symmetric rows
/// (row(-u) = conj(row(u))): the output stacks sqrt(2)*Re and sqrt(2)*Im of
/// the negative-lag rows and drops the zero-lag row. Energy is preserved up
/// to the dropped row: ||out||^2 = ||in||^2 - ||in row 0-lag||^2.
RealKRMatrix real_transform(const Eigen::MatrixXcd& sorted, int half_size);

/// Full path from frame covariances to the real observation: vectorize, then
/// reduce (fast path when g is a ULA, co-array averaging otherwise), then
/// the real transform. row_weights is filled to match the geometry.
RealKRMatrix build_real_observation(const FrameCovariances& fc, const ArrayGeometry& g);

/// Manifold weights for the real observation (size max_lag): sqrt of the
/// lag pair count on a ULA, all ones on the averaged co-array path.
std::vector<double> manifold_weights_real(const ArrayGeometry& g);

/// Manifold weights for the complex (2*max_lag + 1)-row observation.
std::vector<double> manifold_weights_complex(const ArrayGeometry& g);

/// Real virtual steering vector pair for the geometry at a given angle.
VirtualSteering virtual_steering(const ArrayGeometry& g, double theta_deg);

/// Complex virtual manifold over ascending lags: row r holds
/// w_r * exp(-j * (r - max_lag) * phi(theta)).
Eigen::VectorXcd virtual_steering_complex(const ArrayGeometry& g, double theta_deg);

}  // namespace krdoa
