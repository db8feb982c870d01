#include "nfsim/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace nfsim {

Position3 operator+(const Position3& a, const Position3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
}

Position3 operator-(const Position3& a, const Position3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}

Position3 operator*(double s, const Position3& p) {
    return {s * p.x, s * p.y, s * p.z};
}

double dot(const Position3& a, const Position3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

double norm(const Position3& p) {
    return std::sqrt(dot(p, p));
}

double distance(const Position3& a, const Position3& b) {
    return norm(a - b);
}

ArrayGeometry build_upa(std::size_t rows, std::size_t cols, double spacing,
                        const Position3& center) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("build_upa: zero array dimension");
    if (spacing <= 0.0) throw std::invalid_argument("build_upa: spacing must be positive");

    ArrayGeometry g;
    g.rows = rows;
    g.cols = cols;
    g.spacing = spacing;
    g.center = center;
    g.elements.reserve(rows * cols);

    const double row_mid = (static_cast<double>(rows) - 1.0) / 2.0;
    const double col_mid = (static_cast<double>(cols) - 1.0) / 2.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double z_off = (static_cast<double>(r) - row_mid) * spacing;
        for (std::size_t c = 0; c < cols; ++c) {
            const double y_off = (static_cast<double>(c) - col_mid) * spacing;
            g.elements.push_back({center.x, center.y + y_off, center.z + z_off});
        }
    }
    return g;
}

double aperture(const ArrayGeometry& g) {
    if (g.elements.empty()) throw std::invalid_argument("aperture: empty geometry");
    double best = 0.0;
    for (std::size_t i = 0; i < g.elements.size(); ++i) {
        for (std::size_t j = i + 1; j < g.elements.size(); ++j) {
            best = std::max(best, distance(g.elements[i], g.elements[j]));
        }
    }
    return best;
}

double rayleigh_distance(double aperture_m, double wavelength) {
    if (wavelength <= 0.0) throw std::invalid_argument("rayleigh_distance: wavelength must be positive");
    if (aperture_m < 0.0) throw std::invalid_argument("rayleigh_distance: negative aperture");
    return 2.0 * aperture_m * aperture_m / wavelength;
}

double spherical_phase(double radial_distance, double boresight_angle,
                       double element_offset, double wavelength) {
    if (radial_distance <= 0.0) throw std::invalid_argument("spherical_phase: r must be positive");
    const double r = radial_distance;
    const double q = element_offset;
    double radicand = r * r + q * q - 2.0 * r * q * std::sin(boresight_angle);
    if (radicand < 0.0) {
        // Analytically impossible for real inputs; tolerate rounding residue only.
        if (radicand > -1e-12 * (r * r + q * q)) {
            radicand = 0.0;
        } else {
            throw std::domain_error("spherical_phase: negative radicand");
        }
    }
    return (2.0 * M_PI / wavelength) * (std::sqrt(radicand) - r);
}

double planar_phase(double boresight_angle, double element_offset, double wavelength) {
    return (2.0 * M_PI / wavelength) * element_offset * std::sin(boresight_angle);
}

double phase_error_approx(double element_offset, double boresight_angle,
                          double radial_distance, double wavelength) {
    if (radial_distance <= 0.0) throw std::invalid_argument("phase_error_approx: r must be positive");
    const double c = std::cos(boresight_angle);
    return M_PI * element_offset * element_offset * c * c / (wavelength * radial_distance);
}

GeometricFeatures geometric_features(const ArrayGeometry& g, const Position3& ue) {
    GeometricFeatures f;
    f.values.reserve(3 * g.size());
    for (const auto& e : g.elements) {
        const Position3 d = ue - e;
        const double dist = norm(d);
        if (dist == 0.0) throw std::invalid_argument("geometric_features: point coincides with an element");
        const double elevation = std::asin(d.z / dist);
        double azimuth = std::atan2(d.y, d.x);
        if (azimuth <= -M_PI) azimuth = M_PI;  // keep the range (-pi, pi]
        f.values.push_back(dist);
        f.values.push_back(elevation);
        f.values.push_back(azimuth);
    }
    return f;
}

} // namespace nfsim
