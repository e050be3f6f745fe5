#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace krdoa {

/// Thrown when sensor counts or positions cannot form a usable array.
class InvalidGeometryError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Linear array described by sensor positions on an integer lattice.
///
/// The physical location of sensor i is positions[i] * base_spacing meters.
/// Keeping positions integral makes all lag arithmetic on the difference
/// co-array exact.
struct ArrayGeometry {
    std::vector<int> positions;  ///< strictly increasing; canonical arrays start at 0
    double base_spacing = 0.5;   ///< lattice unit in meters
    double wavelength = 1.0;     ///< carrier wavelength in meters
    std::string label;

    int num_sensors() const { return static_cast<int>(positions.size()); }

    /// True when positions are exactly 0, 1, ..., N-1.
    bool is_ula() const;

    /// Phase advance per lattice unit at arrival angle theta (degrees,
    /// measured from broadside): 2*pi * base_spacing / wavelength * sin(theta).
    double spatial_phase(double theta_deg) const;
};

/// Difference co-array of an array: every pairwise lag d_i - d_j together
/// with the number of sensor pairs that produce it.
struct CoArrayMap {
    std::vector<int> lags;          ///< distinct lags, ascending, closed under negation
    std::vector<int> multiplicity;  ///< pair count per lag, aligned with `lags`
    std::vector<int> pair_lag;      ///< row-major N x N; entry (i, j) = d_i - d_j
    int num_sensors = 0;
    int max_lag = 0;

    int lag_index(int lag) const;        ///< index into `lags`, or -1 if absent
    int multiplicity_of(int lag) const;  ///< pair count, or 0 if absent

    std::unordered_map<int, int> index_of;  ///< lag -> index into `lags`
};

/// Uniform linear array with n sensors at 0, 1, ..., n-1.
/// The wavelength is fixed at twice the spacing (half-wavelength pitch).
ArrayGeometry make_ula(int n, double spacing = 0.5);

/// Two-level nested array with a dense inner stage of n1 sensors at
/// 0 .. n1-1 and a sparse outer stage at (n+1)*n1 for n = 1 .. n2.
/// Its difference co-array is hole-free with max lag (n2+1)*n1.
ArrayGeometry make_nested_proposed(int n1, int n2, double spacing = 0.5);

/// Classic two-level nested array: inner stage 0 .. n1-1, outer stage at
/// m*(n1+1) - 1 for m = 1 .. n2 (positions normalized to start at 0).
ArrayGeometry make_nested_pal(int n1, int n2, double spacing = 0.5);

/// Arbitrary integer sensor positions (must be strictly increasing).
ArrayGeometry make_custom(std::vector<int> positions, double spacing = 0.5,
                          std::string label = "custom");

CoArrayMap difference_coarray(const ArrayGeometry& g);

/// True when the co-array covers every integer lag in [-max_lag, max_lag].
bool is_hole_free(const CoArrayMap& c);

enum class ArrayFamily { UlaKr, Coprime, PalNested, ProposedNested };

/// Closed-form count of resolvable-source degrees of freedom for an array
/// family built from (n1, n2):
///   ula-kr    2*(n1+n2) - 1     (ULA with n1+n2 sensors, KR virtual aperture)
///   coprime   n1*n2
///   pal       2*n2*(n1+1) - 1
///   proposed  2*(n2+1)*n1 + 1
int dof_formula(ArrayFamily family, int n1, int n2);

/// Reference virtual-aperture sizes of minimum-redundancy arrays with
/// 5, 7, 8 and 10 elements (sensor splits 3+2, 5+2, 5+3, 7+3). There is no
/// generic constructor for MRAs; these are tabulated comparison values.
inline constexpr int kMraDofReference[4] = {19, 35, 47, 73};

}  // namespace krdoa
