#include "krdoa/estimator.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "krdoa/kernels.hpp"

namespace krdoa {

void GridSpec::validate() const {
    if (!(step_deg > 0.0)) throw std::invalid_argument("grid: step must be positive");
    if (min_deg < -90.0 - 1e-9 || max_deg > 90.0 + 1e-9)
        throw std::invalid_argument("grid: range must stay within [-90, 90] degrees");
    if (!(min_deg <= max_deg)) throw std::invalid_argument("grid: min must not exceed max");
}

std::vector<double> GridSpec::angles() const {
    validate();
    // Micro-degree lattice: decimal steps then produce exact decimal angles
    // (0.05-degree grids contain 15.0 bit-exactly, which keeps on-grid
    // estimates free of representation noise).
    const long long step_u = std::llround(step_deg * 1e6);
    if (step_u < 1) throw std::invalid_argument("grid: step must be at least 1e-6 degrees");
    const long long min_u = std::llround(min_deg * 1e6);
    const long long max_u = std::llround(max_deg * 1e6);
    std::vector<double> out;
    out.reserve(static_cast<size_t>((max_u - min_u) / step_u + 1));
    for (long long u = min_u; u <= max_u; u += step_u) out.push_back(static_cast<double>(u) / 1e6);
    return out;
}

namespace {

template <class Matrix>
void check_subspace_args(const Matrix& obs, int k) {
    if (k < 0) throw std::invalid_argument("noise_subspace: negative source count");
    if (obs.rows() < 1 || obs.cols() < 1)
        throw std::invalid_argument("noise_subspace: empty observation matrix");
    if (k >= obs.rows())
        throw std::invalid_argument("noise_subspace: " + std::to_string(k) + " sources leave no noise subspace in " +
                                    std::to_string(obs.rows()) + " rows (need k <= rows - 1)");
    if (k > obs.cols())
        throw std::invalid_argument("noise_subspace: " + std::to_string(k) + " sources exceed the " +
                                    std::to_string(obs.cols()) +
                                    " available frames; the signal subspace would be rank-deficient");
}

}  // namespace

RealNoiseSubspace noise_subspace(const Eigen::MatrixXd& obs, int k) {
    check_subspace_args(obs, k);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(obs, Eigen::ComputeFullU);
    if (svd.singularValues()(0) <= 0.0)
        throw std::invalid_argument("noise_subspace: observation matrix is identically zero");
    return {svd.matrixU().rightCols(obs.rows() - k), svd.singularValues()};
}

ComplexNoiseSubspace noise_subspace(const Eigen::MatrixXcd& obs, int k) {
    check_subspace_args(obs, k);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(obs, Eigen::ComputeFullU);
    if (svd.singularValues()(0) <= 0.0)
        throw std::invalid_argument("noise_subspace: observation matrix is identically zero");
    return {svd.matrixU().rightCols(obs.rows() - k), svd.singularValues()};
}

SpectrumResult music_spectrum(const RealNoiseSubspace& un, const ArrayGeometry& g,
                              const GridSpec& grid) {
    SpectrumResult s;
    s.grid_deg = grid.angles();
    if (s.grid_deg.empty()) throw std::invalid_argument("music_spectrum: empty grid");
    const std::vector<double> w = manifold_weights_real(g);
    if (static_cast<Eigen::Index>(2 * w.size()) != un.basis.rows())
        throw std::invalid_argument("music_spectrum: noise basis rows (" + std::to_string(un.basis.rows()) +
                                    ") do not match the geometry's real observation size (" +
                                    std::to_string(2 * w.size()) + ")");
    s.values.resize(s.grid_deg.size());
    kernels::real_music_scan_parallel(un.basis, 2.0 * std::numbers::pi * g.base_spacing / g.wavelength,
                                      w, s.grid_deg, s.values);
    return s;
}

SpectrumResult music_spectrum(const ComplexNoiseSubspace& un, const ArrayGeometry& g,
                              const GridSpec& grid) {
    SpectrumResult s;
    s.grid_deg = grid.angles();
    if (s.grid_deg.empty()) throw std::invalid_argument("music_spectrum: empty grid");
    const std::vector<double> w = manifold_weights_complex(g);
    if (static_cast<Eigen::Index>(w.size()) != un.basis.rows())
        throw std::invalid_argument("music_spectrum: noise basis rows (" + std::to_string(un.basis.rows()) +
                                    ") do not match the geometry's lag count (" +
                                    std::to_string(w.size()) + ")");
    s.values.resize(s.grid_deg.size());
    kernels::complex_music_scan_parallel(un.basis,
                                         2.0 * std::numbers::pi * g.base_spacing / g.wavelength,
                                         w, s.grid_deg, s.values);
    return s;
}

std::vector<Peak> find_peaks(const SpectrumResult& s, int k, bool refine) {
    if (k < 1) throw std::invalid_argument("find_peaks: need k >= 1");
    if (s.values.size() != s.grid_deg.size())
        throw std::invalid_argument("find_peaks: spectrum grid/value size mismatch");

    struct Candidate {
        double angle;
        double value;
        size_t index;
    };
    std::vector<Candidate> cand;
    for (size_t i = 1; i + 1 < s.values.size(); ++i)
        if (s.values[i] > s.values[i - 1] && s.values[i] > s.values[i + 1])
            cand.push_back({s.grid_deg[i], s.values[i], i});

    std::stable_sort(cand.begin(), cand.end(),
                     [](const Candidate& a, const Candidate& b) { return a.value > b.value; });
    if (static_cast<int>(cand.size()) > k) cand.resize(static_cast<size_t>(k));
    std::sort(cand.begin(), cand.end(),
              [](const Candidate& a, const Candidate& b) { return a.angle < b.angle; });

    std::vector<Peak> peaks;
    peaks.reserve(cand.size());
    for (const auto& c : cand) {
        double angle = c.angle;
        if (refine) {
            // 3-point parabola through log-heights around the grid maximum.
            const double y0 = std::log(s.values[c.index - 1]);
            const double y1 = std::log(s.values[c.index]);
            const double y2 = std::log(s.values[c.index + 1]);
            const double denom = y0 - 2.0 * y1 + y2;
            if (denom < 0.0) {
                const double delta = 0.5 * (y0 - y2) / denom;
                angle += delta * (s.grid_deg[c.index + 1] - s.grid_deg[c.index]);
            }
        }
        peaks.push_back({angle, c.value});
    }
    return peaks;
}

SpectrumResult real_kr_spectrum(const FrameCovariances& fc, const ArrayGeometry& g, int k,
                                const GridSpec& grid) {
    const RealKRMatrix obs = build_real_observation(fc, g);
    const RealNoiseSubspace un = noise_subspace(obs.m, k);
    SpectrumResult s = music_spectrum(un, g, grid);
    s.peaks = find_peaks(s, k);
    return s;
}

SpectrumResult complex_kr_baseline(const FrameCovariances& fc, const ArrayGeometry& g, int k,
                                   const GridSpec& grid) {
    const KRObservation y = vectorize(fc);
    if (y.num_sensors != g.num_sensors())
        throw std::invalid_argument("complex_kr_baseline: covariances and geometry disagree on sensor count");
    Eigen::MatrixXcd z;
    if (g.is_ula()) {
        z = reduce_ula(y, g.num_sensors());
    } else {
        z = average_sort(y, difference_coarray(g)).z;
    }
    // Project columns onto the orthogonal complement of the all-ones
    // direction: the frame-constant noise term vec(C) 1^T dies here, while
    // source powers vary across frames and survive.
    const Eigen::VectorXcd mean = z.rowwise().mean();
    z.colwise() -= mean;
    const ComplexNoiseSubspace un = noise_subspace(z, k);
    SpectrumResult s = music_spectrum(un, g, grid);
    s.peaks = find_peaks(s, k);
    return s;
}

double rmse(const std::vector<double>& estimates_deg, double truth_deg) {
    if (estimates_deg.empty()) throw std::invalid_argument("rmse: no estimates");
    double acc = 0.0;
    for (double e : estimates_deg) {
        const double d = e - truth_deg;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(estimates_deg.size()));
}

}  // namespace krdoa
