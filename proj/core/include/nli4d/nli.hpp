#pragma once

// Assembly of per-channel nonlinear-interference variances, the ASE floor
// and SNR:
//
//   sigma2_SCI = (8/81) gamma^2 P^3 T^2 [ psi1 S1 + psi2 X1 + psi3 X2 + 3 Z1 ]
//                summed over both polarization roles,
//   sigma2_XPM(omega) = 2 (8/81) gamma^2 P_coi P_int^2 T^2 [ phi1 X(omega) + 6 Z(omega) ],
//   sigma2_NLI(n) = sigma2_SCI(n) + sum_{j != n} sigma2_XPM(|j-n| 2 pi spacing).
//
// The factor T^2 converts the kernel integrals - which are built from the
// unit-energy pulse spectrum g = sqrt(T) - to matched-filter symbol units;
// with it the zero-dispersion single-channel limit reproduces the classic
// incoherent Gaussian-noise result (32/81) gamma^2 P^3 L^2 exactly.

#include <optional>
#include <string>
#include <vector>

#include "nli4d/constellation.hpp"
#include "nli4d/integrator.hpp"
#include "nli4d/link.hpp"

namespace nli4d {

enum class ModelMode {
    FourD,  // full 4D statistics
    Egn,    // tensor-product statistics
    Gn,     // Gaussian input statistics (every coefficient vanishes)
};

const char* to_string(ModelMode m);
// Accepts "fourd" / "egn" / "gn"; throws ConfigError otherwise.
ModelMode model_mode_from_string(std::string_view s);

// One WDM channel with its resolved modulation statistics.
struct PlanChannel {
    std::string format_ref;  // file path, builtin label or "gaussian"
    bool gaussian = false;
    Constellation4D constellation;  // empty when gaussian
    MomentSet m;
    double power_w = 0;
};

struct ChannelPlan {
    WdmGrid grid;
    LinkSpec link;
    ModelMode mode = ModelMode::FourD;
    std::vector<PlanChannel> channels;  // size == grid.num_channels
    int coi = 0;                        // 1-based channel of interest (reports cover all)

    // Coefficients of channel j (1-based) under the plan's mode.
    KerrCoeffs coeffs(int j) const;
};

// Self-channel variance for one channel (both polarization roles).
double sci_variance(const KerrCoeffs& k, const IntegralSet& ints,
                    double gamma_per_w_m, double p_coi_w);

// Cross-channel variance contributed by one interferer at offset integrals
// (X, Z); phi1 is the interferer's phi1_factor, T the symbol period.
double xpm_variance(double phi1, const XpmIntegrals& xz, double T,
                    double gamma_per_w_m, double p_coi_w, double p_int_w);

struct XpmContribution {
    int j = 0;            // interfering channel (1-based)
    double omega = 0;     // |j - n| * 2 pi spacing [rad/s]
    double sigma2 = 0;    // variance contribution [W]
};

struct ChannelNli {
    int n = 0;                    // channel (1-based)
    double sigma2_sci = 0;        // [W]
    double sigma2_xpm = 0;        // [W], sum over interferers
    std::vector<XpmContribution> xpm_terms;
    double sigma2_err = 0;        // 1-sigma from integral std_errs [W]
    double eta = 0;               // sigma2_nli / P^3 [1/W^2]
    double eta_db = 0;            // 10 log10(eta * 1 W^2)
    std::optional<double> snr_db;  // present when an ASE floor exists
    bool clamped = false;          // a negative variance was clamped to zero
    double clamped_from = 0;       // most negative raw value before clamping
};

struct NliReport {
    std::vector<ChannelNli> channels;
    double sigma2_ase = 0;  // [W]; 0 for ideal distributed amplification
};

// Per-channel NLI for every channel of the plan.  Throws MissingIntegral if
// the set lacks an offset the plan needs.
NliReport total_nli(const ChannelPlan& plan, const IntegralSet& ints);

// Dual-polarization ASE variance per channel after num_spans amplifiers:
// Ns (G - 1) F h nu / T with G = e^{alpha Ls}.  Zero for IdealDistributed.
double ase_variance(const LinkSpec& link, double symbol_rate_baud,
                    double carrier_freq_hz = 193.414489e12);

double snr_linear(double p_w, double sigma2_ase_w, double sigma2_nli_w);
double snr_db(double p_w, double sigma2_ase_w, double sigma2_nli_w);

// CSV serialization of a report: "n,sigma2_sci,sigma2_xpm,eta_db,snr_db".
std::string report_to_csv(const NliReport& report);

}  // namespace nli4d
