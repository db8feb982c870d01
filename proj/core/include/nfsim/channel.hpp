#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "nfsim/geometry.hpp"

namespace nfsim {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

struct ComplexMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Complex> v;  // row-major

    ComplexMatrix() = default;
    ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c) {}

    Complex& at(std::size_t r, std::size_t c) { return v[r * cols + c]; }
    const Complex& at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
};

// RIS reflection state. Only the angles are stored, so the unit-modulus
// constraint holds by construction; the m-th coefficient is exp(j*angles[m]).
struct RisPhases {
    std::vector<double> angles;  // radians, kept in [0, 2*pi)

    std::size_t size() const { return angles.size(); }
    Complex coefficient(std::size_t m) const {
        return std::polar(1.0, angles[m]);
    }
};

// Normalizes an arbitrary angle into [0, 2*pi).
double wrap_angle(double radians);

// Per-UE binary LoS availability; bits[k] == 1 means the direct link is clear.
struct BlockageState {
    std::vector<int> bits;
};

// Spherical-wave LoS channels for one snapshot. Regenerates bit-identically
// from (geometries, positions, wavelength); there is no stochastic term.
struct ChannelSet {
    double wavelength = 0.0;
    std::vector<ComplexVector> h_bd;  // per UE, length N (BS antennas)
    std::vector<ComplexVector> h_rd;  // per UE, length M (RIS elements)
    ComplexMatrix g_br;               // M x N

    std::size_t num_ues() const { return h_bd.size(); }
};

// Free-space path gain (lambda / (4 pi d))^2, dimensionless power ratio.
double path_loss(double distance_m, double wavelength);

// Free-space path loss in positive dB: -10*log10(path_loss).
double path_loss_db(double distance_m, double wavelength);

// LoS channel vector from every element of `tx` to the point `rx`:
// entry n = sqrt(eta_n) * exp(-j 2 pi d_n / lambda) with exact per-element
// Euclidean distances (no far-field approximation).
ComplexVector los_channel(const ArrayGeometry& tx, const Position3& rx, double wavelength);

// Element-pair LoS channel between two arrays; entry (m, n) couples rx element
// m with tx element n.
ComplexMatrix mimo_channel(const ArrayGeometry& tx, const ArrayGeometry& rx, double wavelength);

// Scales every entry by 10^(-attenuation_db/20) when blocked; identity otherwise.
ComplexVector apply_blockage(const ComplexVector& h, bool blocked, double attenuation_db);

// Mode-switched effective channel. mode_bit = 1 selects the direct link and
// returns h_bd unchanged; mode_bit = 0 returns the cascaded RIS link
// (h_rd^H Theta G)^H as a length-N vector, so its conjugate transpose is the
// row vector used by the SINR expression.
ComplexVector effective_channel(const ComplexVector& h_bd, const ComplexVector& h_rd,
                                const ComplexMatrix& g_br, const RisPhases& phases,
                                int mode_bit);

ChannelSet make_channel_set(const ArrayGeometry& bs, const ArrayGeometry& ris,
                            const std::vector<Position3>& ues, double wavelength);

} // namespace nfsim
