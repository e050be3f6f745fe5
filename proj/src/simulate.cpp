#include "krdoa/simulate.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "krdoa/kernels.hpp"

namespace krdoa {

namespace {

// Independent deterministic substream per (seed, domain, index). The domain
// tag separates source draws from noise draws so the same scenario seed
// produces identical sources at any noise level.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint32_t domain, std::uint32_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      domain, index};
    return std::mt19937_64(seq);
}

constexpr std::uint32_t kSourceDomain = 0x736f7572u;
constexpr std::uint32_t kNoiseDomain = 0x6e6f6973u;

}  // namespace

void SourceScenario::validate() const {
    if (snapshots < 1) throw std::invalid_argument("scenario: snapshots must be positive");
    if (frame_length < 1) throw std::invalid_argument("scenario: frame_length must be positive");
    if (snapshots % frame_length != 0)
        throw std::invalid_argument("scenario: snapshots (" + std::to_string(snapshots) +
                                    ") must be a multiple of frame_length (" +
                                    std::to_string(frame_length) + ")");
    if (!(nominal_power > 0.0))
        throw std::invalid_argument("scenario: nominal_power must be positive");
    for (size_t k = 0; k < doas_deg.size(); ++k) {
        if (!(doas_deg[k] >= -90.0 && doas_deg[k] <= 90.0))
            throw std::invalid_argument("scenario: angle " + std::to_string(doas_deg[k]) +
                                        " outside [-90, 90]");
        for (size_t l = k + 1; l < doas_deg.size(); ++l)
            if (doas_deg[k] == doas_deg[l])
                throw std::invalid_argument("scenario: duplicate source angle " +
                                            std::to_string(doas_deg[k]));
    }
}

Eigen::VectorXcd steering_vector(const ArrayGeometry& g, double theta_deg) {
    if (!(theta_deg >= -90.0 && theta_deg <= 90.0))
        throw std::invalid_argument("steering_vector: angle " + std::to_string(theta_deg) +
                                    " outside [-90, 90]");
    const double phase = g.spatial_phase(theta_deg);
    Eigen::VectorXcd a(g.num_sensors());
    for (int i = 0; i < g.num_sensors(); ++i) {
        const double arg = -phase * g.positions[i];
        a(i) = std::complex<double>(std::cos(arg), std::sin(arg));
    }
    return a;
}

Eigen::MatrixXcd steering_matrix(const ArrayGeometry& g, const std::vector<double>& doas_deg) {
    Eigen::MatrixXcd a(g.num_sensors(), static_cast<Eigen::Index>(doas_deg.size()));
    for (size_t k = 0; k < doas_deg.size(); ++k) a.col(static_cast<Eigen::Index>(k)) = steering_vector(g, doas_deg[k]);
    return a;
}

SourceSignals generate_sources(const SourceScenario& sc) {
    sc.validate();
    const int k_total = sc.num_sources();
    const int t_total = sc.snapshots;
    const int frames = sc.num_frames();
    const int len = sc.frame_length;

    SourceSignals out;
    out.samples.resize(k_total, t_total);
    out.profile.power.resize(frames, k_total);

    for (int k = 0; k < k_total; ++k) {
        auto rng = make_stream(sc.seed, kSourceDomain, static_cast<std::uint32_t>(k));
        std::uniform_int_distribution<int> seg_len((len + 1) / 2, 3 * len / 2);
        std::uniform_real_distribution<double> seg_power(0.5, 2.0);
        std::normal_distribution<double> gauss(0.0, 1.0);

        // Piecewise-constant power: segment boundaries never align with the
        // frame grid, which is what makes the per-frame powers vary.
        std::vector<double> p(static_cast<size_t>(t_total));
        int t = 0;
        while (t < t_total) {
            int length = t_total - t;
            double power = sc.nominal_power;
            if (sc.power_model == PowerModel::RandomUniform) {
                length = seg_len(rng);
                power = seg_power(rng) * sc.nominal_power;
            }
            const int stop = std::min(t_total, t + length);
            for (int u = t; u < stop; ++u) p[static_cast<size_t>(u)] = power;
            t = stop;
        }

        for (int u = 0; u < t_total; ++u) {
            const double amp = std::sqrt(p[static_cast<size_t>(u)] / 2.0);
            const double re = gauss(rng);
            const double im = gauss(rng);
            out.samples(k, u) = std::complex<double>(amp * re, amp * im);
        }

        for (int m = 0; m < frames; ++m) {
            double acc = 0.0;
            for (int u = m * len; u < (m + 1) * len; ++u) acc += p[static_cast<size_t>(u)];
            out.profile.power(m, k) = acc / len;
        }
    }
    return out;
}

Snapshots generate_snapshots(const ArrayGeometry& g, const SourceScenario& sc,
                             const Eigen::VectorXd& noise_power) {
    const int n = g.num_sensors();
    if (noise_power.size() != n)
        throw std::invalid_argument("generate_snapshots: noise vector length " +
                                    std::to_string(noise_power.size()) + " != sensor count " +
                                    std::to_string(n));
    for (int i = 0; i < n; ++i)
        if (noise_power(i) < 0.0)
            throw std::invalid_argument("generate_snapshots: negative noise power at sensor " +
                                        std::to_string(i));

    auto src = generate_sources(sc);
    Snapshots out;
    out.profile = std::move(src.profile);
    if (sc.num_sources() > 0) {
        const Eigen::MatrixXcd a = steering_matrix(g, sc.doas_deg);
        out.x = a * src.samples;
    } else {
        out.x = Eigen::MatrixXcd::Zero(n, sc.snapshots);
    }

    for (int i = 0; i < n; ++i) {
        if (noise_power(i) == 0.0) continue;
        auto rng = make_stream(sc.seed, kNoiseDomain, static_cast<std::uint32_t>(i));
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double amp = std::sqrt(noise_power(i) / 2.0);
        for (int t = 0; t < sc.snapshots; ++t) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            out.x(i, t) += std::complex<double>(amp * re, amp * im);
        }
    }
    return out;
}

Snapshots generate_snapshots(const ArrayGeometry& g, const SourceScenario& sc,
                             double noise_power) {
    return generate_snapshots(g, sc, Eigen::VectorXd::Constant(g.num_sensors(), noise_power));
}

FrameCovariances local_covariances(const SnapshotMatrix& x, int frame_length) {
    if (frame_length < 1) throw std::invalid_argument("local_covariances: frame_length must be positive");
    if (x.cols() % frame_length != 0)
        throw std::invalid_argument("local_covariances: snapshot count " +
                                    std::to_string(x.cols()) + " is not a multiple of " +
                                    std::to_string(frame_length));
    FrameCovariances fc;
    fc.frame_length = frame_length;
    kernels::frame_covariances_parallel(x, frame_length, fc.mats);
    return fc;
}

FrameCovariances exact_covariances(const ArrayGeometry& g, const std::vector<double>& doas_deg,
                                   const PowerProfile& profile, const Eigen::VectorXd& noise_diag) {
    const int n = g.num_sensors();
    const int k_total = static_cast<int>(doas_deg.size());
    if (profile.power.cols() != k_total)
        throw std::invalid_argument("exact_covariances: profile has " +
                                    std::to_string(profile.power.cols()) + " sources, angles have " +
                                    std::to_string(k_total));
    if (noise_diag.size() != n)
        throw std::invalid_argument("exact_covariances: noise vector length " +
                                    std::to_string(noise_diag.size()) + " != sensor count " +
                                    std::to_string(n));
    for (int i = 0; i < n; ++i)
        if (noise_diag(i) < 0.0)
            throw std::invalid_argument("exact_covariances: negative noise power at sensor " +
                                        std::to_string(i));

    const Eigen::MatrixXcd a = steering_matrix(g, doas_deg);
    FrameCovariances fc;
    fc.frame_length = 0;
    fc.mats.resize(static_cast<size_t>(profile.power.rows()));
    for (Eigen::Index m = 0; m < profile.power.rows(); ++m) {
        Eigen::MatrixXcd r(n, n);
        // Lower triangle from the model, upper mirrored: Hermitian to the bit.
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j <= i; ++j) {
                std::complex<double> acc(0.0, 0.0);
                for (int k = 0; k < k_total; ++k)
                    acc += profile.power(m, k) * (a(i, k) * std::conj(a(j, k)));
                r(i, j) = acc;
            }
        }
        for (int i = 0; i < n; ++i) {
            r(i, i) = std::complex<double>(r(i, i).real() + noise_diag(i), 0.0);
            for (int j = i + 1; j < n; ++j) r(i, j) = std::conj(r(j, i));
        }
        fc.mats[static_cast<size_t>(m)] = std::move(r);
    }
    return fc;
}

FrameCovariances exact_covariances(const ArrayGeometry& g, const std::vector<double>& doas_deg,
                                   const PowerProfile& profile, double noise_power) {
    return exact_covariances(g, doas_deg, profile,
                             Eigen::VectorXd::Constant(g.num_sensors(), noise_power));
}

double snr_to_noise_power(double snr_db, double nominal_power) {
    return nominal_power / std::pow(10.0, snr_db / 10.0);
}

}  // namespace krdoa
