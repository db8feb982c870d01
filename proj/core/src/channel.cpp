#include "nfsim/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace nfsim {

double wrap_angle(double radians) {
    const double two_pi = 2.0 * M_PI;
    double a = std::fmod(radians, two_pi);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a = 0.0;
    return a;
}

double path_loss(double distance_m, double wavelength) {
    if (distance_m <= 0.0) throw std::invalid_argument("path_loss: distance must be positive");
    if (wavelength <= 0.0) throw std::invalid_argument("path_loss: wavelength must be positive");
    const double a = wavelength / (4.0 * M_PI * distance_m);
    return a * a;
}

double path_loss_db(double distance_m, double wavelength) {
    return -10.0 * std::log10(path_loss(distance_m, wavelength));
}

namespace {

Complex los_entry(double d, double wavelength) {
    const double amp = std::sqrt(path_loss(d, wavelength));
    return std::polar(amp, -2.0 * M_PI * d / wavelength);
}

} // namespace

ComplexVector los_channel(const ArrayGeometry& tx, const Position3& rx, double wavelength) {
    ComplexVector h;
    h.reserve(tx.size());
    for (const auto& e : tx.elements) {
        const double d = distance(e, rx);
        if (d == 0.0) throw std::invalid_argument("los_channel: rx coincides with an element");
        h.push_back(los_entry(d, wavelength));
    }
    return h;
}

ComplexMatrix mimo_channel(const ArrayGeometry& tx, const ArrayGeometry& rx, double wavelength) {
    ComplexMatrix g(rx.size(), tx.size());
    for (std::size_t m = 0; m < rx.size(); ++m) {
        for (std::size_t n = 0; n < tx.size(); ++n) {
            const double d = distance(rx.elements[m], tx.elements[n]);
            if (d == 0.0) throw std::invalid_argument("mimo_channel: overlapping elements");
            g.at(m, n) = los_entry(d, wavelength);
        }
    }
    return g;
}

ComplexVector apply_blockage(const ComplexVector& h, bool blocked, double attenuation_db) {
    if (!blocked) return h;
    const double scale = std::pow(10.0, -attenuation_db / 20.0);
    ComplexVector out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = scale * h[i];
    return out;
}

ComplexVector effective_channel(const ComplexVector& h_bd, const ComplexVector& h_rd,
                                const ComplexMatrix& g_br, const RisPhases& phases,
                                int mode_bit) {
    const std::size_t n = h_bd.size();
    const std::size_t m = h_rd.size();
    if (g_br.rows != m || g_br.cols != n) {
        throw std::invalid_argument("effective_channel: G dimensions do not match h_bd/h_rd");
    }
    if (phases.size() != m) {
        throw std::invalid_argument("effective_channel: phase count does not match RIS size");
    }
    if (mode_bit == 1) return h_bd;

    // h_eff = (h_rd^H Theta G)^H = G^H Theta^H h_rd
    ComplexVector h(n, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < m; ++i) {
        const Complex w = h_rd[i] * std::conj(phases.coefficient(i));
        for (std::size_t j = 0; j < n; ++j) {
            h[j] += w * std::conj(g_br.at(i, j));
        }
    }
    return h;
}

ChannelSet make_channel_set(const ArrayGeometry& bs, const ArrayGeometry& ris,
                            const std::vector<Position3>& ues, double wavelength) {
    ChannelSet cs;
    cs.wavelength = wavelength;
    cs.g_br = mimo_channel(bs, ris, wavelength);
    cs.h_bd.reserve(ues.size());
    cs.h_rd.reserve(ues.size());
    for (const auto& u : ues) {
        cs.h_bd.push_back(los_channel(bs, u, wavelength));
        cs.h_rd.push_back(los_channel(ris, u, wavelength));
    }
    return cs;
}

} // namespace nfsim
