#include "nfsim/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace nfsim {

double BeamMatrix::frobenius_sq() const {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return s;
}

namespace {

Complex column_dot(const ComplexVector& h, const BeamMatrix& w, std::size_t col) {
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < h.size(); ++i) {
        acc += std::conj(h[i]) * w.at(i, col);
    }
    return acc;
}

} // namespace

std::vector<double> sinr(const std::vector<ComplexVector>& h_eff, const BeamMatrix& w,
                         double noise_power) {
    if (noise_power <= 0.0) throw std::invalid_argument("sinr: noise power must be positive");
    const std::size_t k = h_eff.size();
    if (k < 1 || w.k != k) throw std::invalid_argument("sinr: UE count mismatch");
    for (const auto& h : h_eff) {
        if (h.size() != w.n) throw std::invalid_argument("sinr: channel/precoder dimension mismatch");
    }

    std::vector<double> out(k);
    for (std::size_t uk = 0; uk < k; ++uk) {
        double signal = 0.0;
        double interference = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double p = std::norm(column_dot(h_eff[uk], w, i));
            if (i == uk) {
                signal = p;
            } else {
                interference += p;
            }
        }
        out[uk] = signal / (interference + noise_power);
    }
    return out;
}

double spectral_efficiency(double sinr_linear) {
    if (sinr_linear < 0.0) throw std::invalid_argument("spectral_efficiency: negative SINR");
    return std::log1p(sinr_linear) / std::log(2.0);
}

double sum_se(const LinkReport& r) {
    return r.sum_se;
}

LinkReport link_report(const std::vector<ComplexVector>& h_eff, const BeamMatrix& w,
                       double noise_power, double se_min) {
    LinkReport r;
    r.sinr = sinr(h_eff, w, noise_power);
    r.se.reserve(r.sinr.size());
    for (double s : r.sinr) {
        const double se = spectral_efficiency(s);
        r.se.push_back(se);
        r.sum_se += se;
    }
    r.qos_slack.reserve(r.se.size());
    for (double se : r.se) r.qos_slack.push_back(se - se_min);
    return r;
}

BeamMatrix project_power(const BeamMatrix& w, double p_max) {
    if (p_max <= 0.0) throw std::invalid_argument("project_power: p_max must be positive");
    const double fro2 = w.frobenius_sq();
    // The relative guard makes projection exactly idempotent while staying far
    // inside the C1 tolerance.
    if (fro2 <= p_max * (1.0 + 1e-13)) return w;
    const double scale = std::sqrt(p_max / fro2);
    BeamMatrix out = w;
    for (auto& x : out.v) x *= scale;
    return out;
}

std::vector<double> qos_slack(const LinkReport& r, double se_min) {
    if (se_min < 0.0) throw std::invalid_argument("qos_slack: se_min must be nonnegative");
    std::vector<double> out;
    out.reserve(r.se.size());
    for (double se : r.se) out.push_back(se - se_min);
    return out;
}

MatchedFilterResult matched_filter_oracle(const ComplexVector& h, double power,
                                          double noise_power) {
    double norm_sq = 0.0;
    for (const auto& x : h) norm_sq += std::norm(x);
    if (norm_sq <= 0.0) throw std::invalid_argument("matched_filter_oracle: zero channel");

    const double scale = std::sqrt(power / norm_sq);
    MatchedFilterResult res;
    res.w = BeamMatrix(h.size(), 1);
    for (std::size_t i = 0; i < h.size(); ++i) res.w.at(i, 0) = scale * h[i];
    res.se = spectral_efficiency(power * norm_sq / noise_power);
    return res;
}

RisAlignmentResult ris_alignment_oracle(const ComplexVector& h_rd, const ComplexVector& c) {
    if (h_rd.size() != c.size()) throw std::invalid_argument("ris_alignment_oracle: size mismatch");
    RisAlignmentResult res;
    res.phases.angles.resize(h_rd.size());
    double amp = 0.0;
    for (std::size_t m = 0; m < h_rd.size(); ++m) {
        const Complex prod = std::conj(h_rd[m]) * c[m];
        res.phases.angles[m] = (prod == Complex{0.0, 0.0}) ? 0.0 : wrap_angle(-std::arg(prod));
        amp += std::abs(h_rd[m]) * std::abs(c[m]);
    }
    res.gain = amp * amp;
    return res;
}

} // namespace nfsim
