#pragma once

#include <cstddef>
#include <vector>

#include "nfsim/channel.hpp"

namespace nfsim {

// N x K precoder, column k serves UE k. Stored column-major so a column is a
// contiguous beam vector.
struct BeamMatrix {
    std::size_t n = 0;  // BS antennas
    std::size_t k = 0;  // UEs
    std::vector<Complex> v;

    BeamMatrix() = default;
    BeamMatrix(std::size_t n_, std::size_t k_) : n(n_), k(k_), v(n_ * k_) {}

    Complex& at(std::size_t row, std::size_t col) { return v[col * n + row]; }
    const Complex& at(std::size_t row, std::size_t col) const { return v[col * n + row]; }

    double frobenius_sq() const;
};

struct LinkReport {
    std::vector<double> sinr;      // linear, per UE
    std::vector<double> se;        // bps/Hz, log2(1 + sinr)
    double sum_se = 0.0;
    std::vector<double> qos_slack; // se - se_min, per UE
};

// Per-UE linear SINR: |h_k^H w_k|^2 / (sum_{i != k} |h_k^H w_i|^2 + noise).
std::vector<double> sinr(const std::vector<ComplexVector>& h_eff, const BeamMatrix& w,
                         double noise_power);

// log2(1 + sinr); rejects negative SINR.
double spectral_efficiency(double sinr_linear);

double sum_se(const LinkReport& r);

LinkReport link_report(const std::vector<ComplexVector>& h_eff, const BeamMatrix& w,
                       double noise_power, double se_min);

// Scales W down to meet ||W||_F^2 <= p_max; identity when already feasible.
// Idempotent: a projected matrix is returned unchanged.
BeamMatrix project_power(const BeamMatrix& w, double p_max);

std::vector<double> qos_slack(const LinkReport& r, double se_min);

struct MatchedFilterResult {
    BeamMatrix w;   // N x 1
    double se = 0.0;
};

// Closed-form optimum for a single user with a fixed channel: w = sqrt(p) h/||h||,
// SE = log2(1 + p ||h||^2 / noise).
MatchedFilterResult matched_filter_oracle(const ComplexVector& h, double power,
                                          double noise_power);

struct RisAlignmentResult {
    RisPhases phases;
    double gain = 0.0;  // achieved |h_rd^H Theta c|^2
};

// Closed-form maximizer of |h_rd^H Theta c| over unit-modulus Theta:
// angle_m = -arg(conj(h_rd[m]) * c[m]); the achieved power gain is
// (sum_m |h_rd[m]| |c[m]|)^2. Zero entries contribute nothing and get angle 0.
RisAlignmentResult ris_alignment_oracle(const ComplexVector& h_rd, const ComplexVector& c);

} // namespace nfsim
