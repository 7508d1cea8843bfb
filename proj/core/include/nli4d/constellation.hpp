#pragma once

// Four-dimensional (dual-polarization) constellations and the statistical
// quantities the interference model needs from them: the normalized moment
// ratios phi_1..phi_7, the per-polarization coefficient triples
// (psi_1, psi_2, psi_3) for self-channel interference, and the cross-channel
// factor phi1_factor.  Two coefficient modes are supported: the full 4D
// assembly and the reduced form that treats the two polarizations as an
// independent tensor product (historic EGN behaviour).

#include <complex>
#include <string>
#include <string_view>
#include <vector>

namespace nli4d {

using cplx = std::complex<double>;

struct Point4D {
    cplx ax;  // complex amplitude, x polarization
    cplx ay;  // complex amplitude, y polarization
};

struct Constellation4D {
    std::string label;
    std::vector<Point4D> points;

    std::size_t size() const { return points.size(); }
    // Mean of |ax|^2 + |ay|^2 over the (uniformly weighted) alphabet.
    double mean_power() const;
};

// Parses "ax_re ax_im ay_re ay_im" per line; '#' starts a comment and
// whitespace-only lines are skipped.  Throws MalformedLine / TooFewPoints.
Constellation4D parse_constellation(std::string_view text, std::string label = "");

// Convenience: read a whole file and parse it.  The file name becomes the
// label unless the first comment line provides one ("# name: ...").
Constellation4D load_constellation_file(const std::string& path);

// Returns a copy rescaled so that mean_power() == power_watt.
// Throws ZeroPowerConstellation when the input has no power to scale.
[[nodiscard]] Constellation4D normalize_power(const Constellation4D& c,
                                              double power_watt);

// Normalized moment ratios.  x-role denominators use E|ax|^2, the y-role
// entries are the same ratios with the polarizations swapped.  phi2, phi5
// and phi7 are stored once; for the symmetric alphabets the model accepts
// the swapped versions coincide with them (validate_assumptions enforces
// the required power/fourth-moment equalities).
struct MomentSet {
    double mu2x = 0;   // E|ax|^2
    double mu2y = 0;   // E|ay|^2
    double phi1 = 0;   // E|ax|^6 / E^3|ax|^2
    double phi2 = 0;   // E|ax|^4 / E^2|ax|^2
    double phi3 = 0;   // E{|ax|^4 |ay|^2} / E^3|ax|^2
    double phi4 = 0;   // E{|ay|^4 |ax|^2} / E^3|ax|^2
    double phi5 = 0;   // E{|ax|^2 |ay|^2} / E^2|ax|^2
    double phi6 = 0;   // E|bx|^4 / E^2|bx|^2 (interferer role; same alphabet)
    double phi7 = 0;   // E{|bx|^2 |by|^2} / E^2|bx|^2
    double phi1y = 0;  // E|ay|^6 / E^3|ay|^2
    double phi3y = 0;  // E{|ay|^4 |ax|^2} / E^3|ay|^2
    double phi4y = 0;  // E{|ax|^4 |ay|^2} / E^3|ay|^2
    double phi6y = 0;  // E|by|^4 / E^2|by|^2
};

// Computes MomentSet with compensated summation.  Scale invariant.
// Throws ZeroPolarizationPower if either polarization is empty.
MomentSet moments(const Constellation4D& c);

// Analytic moments of the circular-Gaussian reference input (per
// polarization independent complex Gaussian): phi1 = 6, phi2 = phi3 = phi4 =
// phi6 = 2, phi5 = phi7 = 1.  Every Kerr coefficient vanishes for it.
MomentSet gaussian_moments();

enum class CoeffMode {
    FourD,  // full four-dimensional statistics
    Egn,    // tensor-product reduction (per-polarization statistics only)
};

struct PolCoeffs {
    double psi1 = 0;
    double psi2 = 0;
    double psi3 = 0;
};

struct KerrCoeffs {
    PolCoeffs x;         // coefficients of the x-polarization variance
    PolCoeffs y;         // same with the roles of x and y swapped
    double phi1_factor = 0;  // cross-channel coefficient Phi_1
    CoeffMode mode = CoeffMode::FourD;
};

// FourD:  psi1 = phi1 - 12 phi2 + 24 + 2 phi3 + phi4 - 12 phi5
//         psi2 = 5 phi2 - 15 + 5 phi5
//         psi3 = phi2 - 3 + phi5
//         phi1_factor = 5 phi6 - 15 + 5 phi7
// Egn:    psi1 = phi1 - 9 phi2 + 12
//         psi2 = 5 phi2 - 10
//         psi3 = phi2 - 2
//         phi1_factor = 5 phi6 - 10
KerrCoeffs kerr_coefficients(const MomentSet& m, CoeffMode mode);

struct AssumptionCheck {
    std::string name;
    double measured = 0;   // |deviation|, normalized by the matching power
    double threshold = 0;  // tolerance it was compared against
    bool pass = false;
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;
    bool model_eligible = false;  // all checks passed
};

// Checks the symmetries the model relies on: zero mean, zero pseudo-moments
// E{ax^2}, zero cross-correlation E{ax ay*}, zero third-order moments
// E{|ax|^2 ax} and E{|ay|^2 ax} (and the x<->y mirrors), equal per-pol
// powers and equal per-pol fourth moments.  Deviations are normalized by
// E|ax|^2 raised to the matching power so the report is scale invariant.
AssumptionReport validate_assumptions(const Constellation4D& c, double tol = 1e-9);

// Factored prediction of one entry of the sixth-order moment table for
// E{ a_{h,y} a*_{k,y} a_{l,x} a*_{h',y} a_{k',y} a*_{l',x} }, selected by
// its index-equality pattern, e.g. "h=h'!=k=k'!=l=l'" (an apostrophe marks
// a primed index, "!=" separates groups drawn at distinct times).
// Throws UnknownPattern for anything outside the 16 supported cases.
cplx moment_table_oracle(const Constellation4D& c, std::string_view pattern);

// Same for the fourth-order cross-channel table
// E{ b_{h,x} b*_{k,x} b*_{h',x} b_{k',x} }: "h=k=h'=k'", "h=k!=h'=k'",
// "h=h'!=k=k'".
cplx xpm_moment_oracle(const Constellation4D& c, std::string_view pattern);

}  // namespace nli4d
