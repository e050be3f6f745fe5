#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krdoa/estimator.hpp"
#include "krdoa/geometry.hpp"

namespace krdoa {

enum class Method { RealKr, ComplexKr };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

/// Declarative array description used in experiment configs. `kind` is one
/// of "ula", "nested" (alias "nested-proposed"), "pal" (alias "nested-pal"),
/// or "custom" with an explicit integer position list.
struct GeometryConfig {
    std::string kind = "ula";
    int n = 0;        // ula
    int n1 = 0;       // nested stages
    int n2 = 0;
    std::vector<int> positions;  // custom
    double spacing = 0.5;
    std::string label;  // optional override; constructors pick a default

    ArrayGeometry build() const;
};

/// Everything the experiment harness needs for one run. Defaults reproduce
/// the reference setup: seven sources at 0 dB SNR observed by a 6-element
/// ULA and a (3,3) two-level nested array over 50 frames of 400 snapshots.
struct ExperimentConfig {
    std::vector<GeometryConfig> geometries;
    std::vector<Method> methods;
    std::vector<double> doas_deg;
    double snr_db = 0.0;
    std::vector<double> snr_sweep_db;  // rmse sweep
    double rmse_truth_deg = 15.0;      // single-source angle for the rmse run
    int snapshots = 20000;
    int frame_length = 400;
    int trials = 200;
    std::uint64_t seed = 1;
    GridSpec grid;
    int bench_repeats = 100;
    std::string out_dir = "out";

    static ExperimentConfig defaults();
    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json_text() const;
    void validate() const;
};

}  // namespace krdoa
