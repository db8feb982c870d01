#pragma once

#include <cstddef>
#include <vector>

namespace nfsim {

struct Position3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

Position3 operator+(const Position3& a, const Position3& b);
Position3 operator-(const Position3& a, const Position3& b);
Position3 operator*(double s, const Position3& p);
double dot(const Position3& a, const Position3& b);
double norm(const Position3& p);
double distance(const Position3& a, const Position3& b);

// Uniform planar array in the y-z plane (local x offset is always zero).
// The linear element index runs row-major over (row = z index, col = y index),
// i.e. n = row * cols + col; consecutive same-row elements step along +y.
struct ArrayGeometry {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double spacing = 0.0;   // meters
    Position3 center;
    std::vector<Position3> elements;  // absolute coordinates

    std::size_t size() const { return elements.size(); }
};

// Per-element (distance [m], elevation [rad], azimuth [rad]) triples,
// stored row-major with 3 values per element.
struct GeometricFeatures {
    std::vector<double> values;

    std::size_t count() const { return values.size() / 3; }
    double distance(std::size_t n) const { return values[3 * n]; }
    double elevation(std::size_t n) const { return values[3 * n + 1]; }
    double azimuth(std::size_t n) const { return values[3 * n + 2]; }
};

// Centered index sets: offsets take values (i - (count-1)/2) * spacing, so the
// element centroid coincides with the array center (half-integer steps for
// even counts, no rounding).
ArrayGeometry build_upa(std::size_t rows, std::size_t cols, double spacing,
                        const Position3& center);

// Maximum pairwise element distance (the planar diagonal for a UPA).
double aperture(const ArrayGeometry& g);

// Z_R = 2 D^2 / lambda.
double rayleigh_distance(double aperture_m, double wavelength);

// Exact spherical-wavefront phase of an element at scalar aperture offset q,
// for a user at radial distance r and boresight angle theta:
//   (2 pi / lambda) * (sqrt(r^2 + q^2 - 2 r q sin(theta)) - r)
double spherical_phase(double radial_distance, double boresight_angle,
                       double element_offset, double wavelength);

// Far-field phase under the planar-wave assumption: (2 pi / lambda) q sin(theta).
double planar_phase(double boresight_angle, double element_offset, double wavelength);

// Second-order Taylor approximation of the spherical-planar phase difference:
//   pi q^2 cos^2(theta) / (lambda r)
double phase_error_approx(double element_offset, double boresight_angle,
                          double radial_distance, double wavelength);

// Per-element (distance, elevation, azimuth) of a point seen from each array
// element. Azimuth uses the two-argument arctangent of (dy, dx) so users
// behind the array plane get unambiguous angles; the result lies in (-pi, pi].
GeometricFeatures geometric_features(const ArrayGeometry& g, const Position3& ue);

} // namespace nfsim
