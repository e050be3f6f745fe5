#include "krdoa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace krdoa {

bool ArrayGeometry::is_ula() const {
    for (int i = 0; i < num_sensors(); ++i)
        if (positions[i] != i) return false;
    return num_sensors() > 0;
}

double ArrayGeometry::spatial_phase(double theta_deg) const {
    const double theta = theta_deg * std::numbers::pi / 180.0;
    return 2.0 * std::numbers::pi * base_spacing / wavelength * std::sin(theta);
}

int CoArrayMap::lag_index(int lag) const {
    auto it = index_of.find(lag);
    return it == index_of.end() ? -1 : it->second;
}

int CoArrayMap::multiplicity_of(int lag) const {
    const int idx = lag_index(lag);
    return idx < 0 ? 0 : multiplicity[idx];
}

namespace {

void check_spacing(double spacing) {
    if (!(spacing > 0.0))
        throw InvalidGeometryError("array spacing must be positive, got " +
                                   std::to_string(spacing));
}

ArrayGeometry finish(std::vector<int> positions, double spacing, std::string label) {
    ArrayGeometry g;
    g.positions = std::move(positions);
    g.base_spacing = spacing;
    g.wavelength = 2.0 * spacing;
    g.label = std::move(label);
    return g;
}

}  // namespace

ArrayGeometry make_ula(int n, double spacing) {
    if (n < 2)
        throw InvalidGeometryError("make_ula: need at least 2 sensors, got " + std::to_string(n));
    check_spacing(spacing);
    std::vector<int> pos(static_cast<size_t>(n));
    std::iota(pos.begin(), pos.end(), 0);
    return finish(std::move(pos), spacing, "ula" + std::to_string(n));
}

ArrayGeometry make_nested_proposed(int n1, int n2, double spacing) {
    if (n1 < 2 || n2 < 2)
        throw InvalidGeometryError(
            "make_nested_proposed: both stages need at least 2 sensors (the difference "
            "co-array has holes otherwise), got n1=" +
            std::to_string(n1) + " n2=" + std::to_string(n2));
    check_spacing(spacing);
    std::vector<int> pos;
    pos.reserve(static_cast<size_t>(n1 + n2));
    for (int i = 0; i < n1; ++i) pos.push_back(i);
    for (int n = 1; n <= n2; ++n) pos.push_back((n + 1) * n1);
    return finish(std::move(pos), spacing,
                  "nested" + std::to_string(n1) + "x" + std::to_string(n2));
}

ArrayGeometry make_nested_pal(int n1, int n2, double spacing) {
    if (n1 < 1 || n2 < 2)
        throw InvalidGeometryError("make_nested_pal: need n1 >= 1 and n2 >= 2, got n1=" +
                                   std::to_string(n1) + " n2=" + std::to_string(n2));
    check_spacing(spacing);
    // Inner stage at 1..n1 and outer stage at m*(n1+1), shifted down by one
    // lattice unit so the first sensor sits at 0.
    std::vector<int> pos;
    pos.reserve(static_cast<size_t>(n1 + n2));
    for (int i = 0; i < n1; ++i) pos.push_back(i);
    for (int m = 1; m <= n2; ++m) pos.push_back(m * (n1 + 1) - 1);
    return finish(std::move(pos), spacing, "pal" + std::to_string(n1) + "x" + std::to_string(n2));
}

ArrayGeometry make_custom(std::vector<int> positions, double spacing, std::string label) {
    if (positions.size() < 2)
        throw InvalidGeometryError("make_custom: need at least 2 sensors, got " +
                                   std::to_string(positions.size()));
    check_spacing(spacing);
    for (size_t i = 1; i < positions.size(); ++i)
        if (positions[i] <= positions[i - 1])
            throw InvalidGeometryError("make_custom: positions must be strictly increasing");
    return finish(std::move(positions), spacing, std::move(label));
}

CoArrayMap difference_coarray(const ArrayGeometry& g) {
    const int n = g.num_sensors();
    if (n < 1) throw InvalidGeometryError("difference_coarray: empty geometry");

    CoArrayMap c;
    c.num_sensors = n;
    c.pair_lag.resize(static_cast<size_t>(n) * n);
    std::unordered_map<int, int> counts;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const int lag = g.positions[i] - g.positions[j];
            c.pair_lag[static_cast<size_t>(i) * n + j] = lag;
            ++counts[lag];
        }

    c.lags.reserve(counts.size());
    for (const auto& [lag, cnt] : counts) c.lags.push_back(lag);
    std::sort(c.lags.begin(), c.lags.end());
    c.multiplicity.resize(c.lags.size());
    for (size_t r = 0; r < c.lags.size(); ++r) {
        c.multiplicity[r] = counts[c.lags[r]];
        c.index_of.emplace(c.lags[r], static_cast<int>(r));
    }
    c.max_lag = c.lags.back();
    return c;
}

bool is_hole_free(const CoArrayMap& c) {
    return static_cast<int>(c.lags.size()) == 2 * c.max_lag + 1;
}

int dof_formula(ArrayFamily family, int n1, int n2) {
    if (n1 < 1 || n2 < 1)
        throw InvalidGeometryError("dof_formula: stage sizes must be positive, got n1=" +
                                   std::to_string(n1) + " n2=" + std::to_string(n2));
    switch (family) {
        case ArrayFamily::UlaKr:
            return 2 * (n1 + n2) - 1;
        case ArrayFamily::Coprime:
            return n1 * n2;
        case ArrayFamily::PalNested:
            return 2 * n2 * (n1 + 1) - 1;
        case ArrayFamily::ProposedNested:
            return 2 * (n2 + 1) * n1 + 1;
    }
    throw InvalidGeometryError("dof_formula: unknown array family");
}

}  // namespace krdoa
