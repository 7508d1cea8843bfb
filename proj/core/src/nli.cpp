#include "nli4d/nli.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "nli4d/errors.hpp"

namespace nli4d {

const char* to_string(ModelMode m) {
    switch (m) {
        case ModelMode::FourD: return "fourd";
        case ModelMode::Egn: return "egn";
        case ModelMode::Gn: return "gn";
    }
    return "?";
}

ModelMode model_mode_from_string(std::string_view s) {
    if (s == "fourd" || s == "4d") return ModelMode::FourD;
    if (s == "egn") return ModelMode::Egn;
    if (s == "gn") return ModelMode::Gn;
    throw ConfigError("unknown model mode: '" + std::string(s) +
                      "' (expected \"fourd\", \"egn\" or \"gn\")");
}

KerrCoeffs ChannelPlan::coeffs(int j) const {
    const PlanChannel& ch = channels.at(j - 1);
    switch (mode) {
        case ModelMode::Gn:
            return kerr_coefficients(gaussian_moments(), CoeffMode::FourD);
        case ModelMode::Egn:
            return kerr_coefficients(ch.m, CoeffMode::Egn);
        case ModelMode::FourD:
        default:
            return kerr_coefficients(ch.m, CoeffMode::FourD);
    }
}

namespace {

constexpr double kPrefactor = 8.0 / 81.0;

}  // namespace

double sci_variance(const KerrCoeffs& k, const IntegralSet& ints,
                    double gamma_per_w_m, double p_coi_w) {
    const double T2 = ints.T * ints.T;  // pulse-energy conversion (see header)
    const double scale =
        kPrefactor * gamma_per_w_m * gamma_per_w_m * p_coi_w * p_coi_w * p_coi_w * T2;
    const double bracket = (k.x.psi1 + k.y.psi1) * ints.S1.re.value +
                           (k.x.psi2 + k.y.psi2) * ints.X1.re.value +
                           (k.x.psi3 + k.y.psi3) * ints.X2.re.value +
                           6.0 * ints.Z1.value;
    return scale * bracket;
}

double xpm_variance(double phi1, const XpmIntegrals& xz, double T,
                    double gamma_per_w_m, double p_coi_w, double p_int_w) {
    const double scale = 2.0 * kPrefactor * gamma_per_w_m * gamma_per_w_m * p_coi_w *
                         p_int_w * p_int_w * T * T;
    return scale * (phi1 * xz.X.re.value + 6.0 * xz.Z.value);
}

namespace {

double sci_err(const KerrCoeffs& k, const IntegralSet& ints, double scale) {
    const double e1 = (k.x.psi1 + k.y.psi1) * ints.S1.re.std_err;
    const double e2 = (k.x.psi2 + k.y.psi2) * ints.X1.re.std_err;
    const double e3 = (k.x.psi3 + k.y.psi3) * ints.X2.re.std_err;
    const double e4 = 6.0 * ints.Z1.std_err;
    return scale * std::sqrt(e1 * e1 + e2 * e2 + e3 * e3 + e4 * e4);
}

}  // namespace

double ase_variance(const LinkSpec& link, double symbol_rate_baud,
                    double carrier_freq_hz) {
    if (link.amplification != Amplification::Lumped) return 0.0;
    const double alpha = link.fiber.alpha();
    const double gain = std::exp(alpha * link.span_length_m);
    const double noise_factor = units::db_to_linear(link.noise_figure_db);
    return link.num_spans * (gain - 1.0) * noise_factor * units::h_planck *
           carrier_freq_hz * symbol_rate_baud;
}

double snr_linear(double p_w, double sigma2_ase_w, double sigma2_nli_w) {
    const double denom = sigma2_ase_w + sigma2_nli_w;
    if (denom <= 0.0)
        throw DegenerateDenominator("SNR denominator is zero (no ASE, no NLI)");
    return p_w / denom;
}

double snr_db(double p_w, double sigma2_ase_w, double sigma2_nli_w) {
    return units::linear_to_db(snr_linear(p_w, sigma2_ase_w, sigma2_nli_w));
}

NliReport total_nli(const ChannelPlan& plan, const IntegralSet& ints) {
    const int n_ch = plan.grid.num_channels;
    const double gamma = plan.link.fiber.gamma_per_w_m;

    NliReport report;
    report.sigma2_ase = plan.link.amplification == Amplification::Lumped
                            ? ase_variance(plan.link, plan.grid.symbol_rate_baud)
                            : 0.0;

    for (int n = 1; n <= n_ch; ++n) {
        const PlanChannel& coi = plan.channels.at(n - 1);
        const KerrCoeffs kn = plan.coeffs(n);

        ChannelNli row;
        row.n = n;
        row.sigma2_sci = sci_variance(kn, ints, gamma, coi.power_w);
        if (row.sigma2_sci < 0.0) {
            row.clamped = true;
            row.clamped_from = std::min(row.clamped_from, row.sigma2_sci);
            row.sigma2_sci = 0.0;
        }
        const double p3 = coi.power_w * coi.power_w * coi.power_w;
        const double sci_scale = kPrefactor * gamma * gamma * p3 * ints.T * ints.T;
        double err2 = std::pow(sci_err(kn, ints, sci_scale), 2);

        for (int j = 1; j <= n_ch; ++j) {
            if (j == n) continue;
            const int off = std::abs(j - n);
            const auto it = ints.xpm.find(off);
            if (it == ints.xpm.end())
                throw MissingIntegral("integral set lacks XPM offset " +
                                      std::to_string(off));
            const KerrCoeffs kj = plan.coeffs(j);
            const double p_int = plan.channels.at(j - 1).power_w;
            double s = xpm_variance(kj.phi1_factor, it->second, ints.T, gamma,
                                    coi.power_w, p_int);
            if (s < 0.0) {
                row.clamped = true;
                row.clamped_from = std::min(row.clamped_from, s);
                s = 0.0;
            }
            const double omega =
                2.0 * std::numbers::pi * ints.channel_spacing_hz * off;
            row.xpm_terms.push_back({j, omega, s});
            row.sigma2_xpm += s;

            const double xpm_scale = 2.0 * kPrefactor * gamma * gamma * coi.power_w *
                                     p_int * p_int * ints.T * ints.T;
            const double ex = kj.phi1_factor * it->second.X.re.std_err;
            const double ez = 6.0 * it->second.Z.std_err;
            err2 += xpm_scale * xpm_scale * (ex * ex + ez * ez);
        }

        row.sigma2_err = std::sqrt(err2);
        const double sigma2 = row.sigma2_sci + row.sigma2_xpm;
        row.eta = sigma2 / p3;
        row.eta_db = row.eta > 0.0 ? units::linear_to_db(row.eta)
                                   : -std::numeric_limits<double>::infinity();
        const double denom = report.sigma2_ase + sigma2;
        if (denom > 0.0) row.snr_db = units::linear_to_db(coi.power_w / denom);
        report.channels.push_back(std::move(row));
    }
    return report;
}

std::string report_to_csv(const NliReport& report) {
    std::string out = "n,sigma2_sci,sigma2_xpm,eta_db,snr_db\n";
    char buf[160];
    for (const auto& ch : report.channels) {
        if (ch.snr_db)
            std::snprintf(buf, sizeof buf, "%d,%.9e,%.9e,%.2f,%.2f\n", ch.n,
                          ch.sigma2_sci, ch.sigma2_xpm, ch.eta_db, *ch.snr_db);
        else
            std::snprintf(buf, sizeof buf, "%d,%.9e,%.9e,%.2f,nan\n", ch.n,
                          ch.sigma2_sci, ch.sigma2_xpm, ch.eta_db);
        out += buf;
    }
    return out;
}

}  // namespace nli4d
