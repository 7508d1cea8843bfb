#pragma once

// Fiber/link description and the frequency-domain link kernels.  Everything
// internal is strict SI (m, s, W, rad/s); the unit helpers below are the only
// place engineering units (ps/nm/km, dB/km, GBd, dBm) are converted.

#include <cmath>
#include <complex>
#include <numbers>
#include <string_view>
#include <vector>

#include "nli4d/errors.hpp"

namespace nli4d {

using cplx = std::complex<double>;

namespace units {

constexpr double c_light = 299792458.0;        // m/s
constexpr double h_planck = 6.62607015e-34;    // J s

// Chromatic dispersion D [ps/(nm km)] at wavelength lambda [nm] to
// beta2 [s^2/m]:  beta2 = -D lambda^2 / (2 pi c).
inline double beta2_from_dispersion(double d_ps_nm_km, double lambda_nm) {
    const double d_si = d_ps_nm_km * 1e-6;        // s/m^2
    const double lambda = lambda_nm * 1e-9;       // m
    return -d_si * lambda * lambda / (2.0 * std::numbers::pi * c_light);
}

// Power attenuation alpha [1/m] from the usual dB/km figure.
inline double alpha_from_db_km(double alpha_db_km) {
    return alpha_db_km * std::numbers::ln10 / 10.0 / 1000.0;
}

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt / 1e-3); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

}  // namespace units

struct FiberSpec {
    double gamma_per_w_m = 0;   // nonlinear coefficient [1/(W m)]
    double beta2_s2_m = 0;      // group velocity dispersion [s^2/m]
    double alpha_db_km = 0;     // power attenuation [dB/km]

    double alpha() const { return units::alpha_from_db_km(alpha_db_km); }
};

enum class Amplification {
    Lumped,            // loss e^{-alpha z} per span, lumped gain at span end
    IdealDistributed,  // loss exactly balanced everywhere, f(z) = 1
};

const char* to_string(Amplification a);
// Accepts "lumped" / "ideal_distributed"; throws ConfigError otherwise.
Amplification amplification_from_string(std::string_view s);

struct LinkSpec {
    FiberSpec fiber;
    double span_length_m = 0;
    int num_spans = 1;
    Amplification amplification = Amplification::Lumped;
    double noise_figure_db = 0;  // amplifier noise figure (Lumped only)

    double total_length() const { return span_length_m * num_spans; }
};

// Rectangular (Nyquist) pulse spectrum with unit energy:
// g(w) = sqrt(T) for |w| <= pi/T, 0 otherwise.
struct PulseSpectrum {
    double T;  // symbol period [s]

    bool in_band(double w) const { return std::abs(w) <= std::numbers::pi / T; }
    double value(double w) const { return in_band(w) ? std::sqrt(T) : 0.0; }
};

// \int_0^L f(z) e^{i kappa z} dz over the whole link, where f(z) is the
// normalized power profile (e^{-alpha z} restarted per span for Lumped,
// 1 for IdealDistributed).  For Lumped links the per-span integral is
// multiplied by the phased-array sum over span start phases.
inline cplx loss_phase_integral(const LinkSpec& link, double kappa) {
    if (link.amplification == Amplification::IdealDistributed) {
        const double L = link.total_length();
        const double q = kappa * L;
        if (std::abs(q) < 1e-6) {
            // (e^{i q} - 1)/(i kappa) ~ L (1 + i q/2 - q^2/6)
            return L * cplx(1.0 - q * q / 6.0, 0.5 * q);
        }
        return (std::polar(1.0, q) - 1.0) / cplx(0.0, kappa);
    }

    const double Ls = link.span_length_m;
    const double alpha = link.fiber.alpha();

    // Single span: (1 - e^{(-alpha + i kappa) Ls}) / (alpha - i kappa).
    const cplx p(-alpha, kappa);
    cplx span;
    if (std::abs(p) * Ls < 1e-6) {
        const cplx q = p * Ls;
        span = Ls * (1.0 + q * 0.5 + q * q / 6.0);
    } else {
        span = (1.0 - std::exp(p * Ls)) / (-p);
    }

    // Phased-array factor sum_{s=0}^{Ns-1} e^{i kappa s Ls}.  Reduce the
    // per-span phase mod 2 pi first: the sum is exactly periodic in it.
    const int ns = link.num_spans;
    if (ns == 1) return span;
    const double delta = std::remainder(kappa * Ls, 2.0 * std::numbers::pi);
    cplx array;
    if (std::abs(delta) < 1e-9) {
        array = static_cast<double>(ns) * std::polar(1.0, 0.5 * delta * (ns - 1));
    } else {
        array = std::polar(1.0, 0.5 * delta * (ns - 1)) *
                (std::sin(0.5 * ns * delta) / std::sin(0.5 * delta));
    }
    return span * array;
}

// Self-channel kernel
//   rho_s(w1,w2,w3) = g*(w1-w2+w3) g(w1) g*(w2) g(w3)
//                     * \int_0^L f(z) e^{i beta2 (w2-w3)(w2-w1) z} dz
// with the unit-energy rectangular pulse; T^2 on the support, 0 outside.
inline cplx rho_s(double w1, double w2, double w3, double T, const LinkSpec& link) {
    const double wb = std::numbers::pi / T;
    if (std::abs(w1) > wb || std::abs(w2) > wb || std::abs(w3) > wb ||
        std::abs(w1 - w2 + w3) > wb)
        return {0.0, 0.0};
    const double kappa = link.fiber.beta2_s2_m * (w2 - w3) * (w2 - w1);
    return (T * T) * loss_phase_integral(link, kappa);
}

// Cross-channel kernel at interferer offset omega (rad/s): identical to
// rho_s except for the walk-off term in the accumulated phase,
//   kappa = beta2 (w2 - w3 + omega)(w2 - w1).
inline cplx rho_xp(double w1, double w2, double w3, double omega, double T,
                   const LinkSpec& link) {
    const double wb = std::numbers::pi / T;
    if (std::abs(w1) > wb || std::abs(w2) > wb || std::abs(w3) > wb ||
        std::abs(w1 - w2 + w3) > wb)
        return {0.0, 0.0};
    const double kappa = link.fiber.beta2_s2_m * (w2 - w3 + omega) * (w2 - w1);
    return (T * T) * loss_phase_integral(link, kappa);
}

struct WdmGrid {
    double symbol_rate_baud = 0;    // R [Baud]
    double channel_spacing_hz = 0;  // Delta f [Hz]
    int num_channels = 1;
    std::vector<double> power_w;    // per-channel launch power [W]

    double T() const { return 1.0 / symbol_rate_baud; }
    // 1-based center channel index (lower middle for even counts).
    int center_channel() const { return (num_channels + 1) / 2; }
    // Center frequency offset of 1-based channel j from the comb center [Hz].
    double channel_offset_hz(int j) const {
        return (j - 0.5 * (num_channels + 1)) * channel_spacing_hz;
    }
};

}  // namespace nli4d
