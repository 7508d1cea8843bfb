#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <string>

#include "nli4d/constellation.hpp"
#include "nli4d/errors.hpp"
#include "nli4d/formats.hpp"
#include "../support/brute_force.hpp"

using namespace nli4d;

namespace {

Constellation4D tensor_square(const std::vector<cplx>& pol_points, std::string label) {
    Constellation4D c;
    c.label = std::move(label);
    for (const cplx& x : pol_points)
        for (const cplx& y : pol_points) c.points.push_back({x, y});
    return c;
}

std::vector<cplx> qam_levels(int side) {
    std::vector<cplx> pts;
    for (int i = 0; i < side; ++i)
        for (int q = 0; q < side; ++q)
            pts.emplace_back(2 * i - side + 1, 2 * q - side + 1);
    return pts;
}

std::vector<cplx> psk_ring(int n, double radius = 1.0, double phase = 0.0) {
    std::vector<cplx> pts;
    for (int k = 0; k < n; ++k)
        pts.push_back(std::polar(radius, phase + 2.0 * M_PI * k / n));
    return pts;
}

}  // namespace

TEST_CASE("parser accepts comments, blank lines and CRLF") {
    const char* text =
        "# name: toy\r\n"
        "\r\n"
        "  # a comment\n"
        "1 0 0 1\n"
        "\t-1  0   0  -1 \n"
        "0.5 -0.5 0.25 0\n";
    Constellation4D c = parse_constellation(text, "fallback");
    CHECK(c.points.size() == 3);
    CHECK(c.points[0].ax == cplx(1, 0));
    CHECK(c.points[1].ay == cplx(0, -1));
    CHECK(c.points[2].ax == cplx(0.5, -0.5));
}

TEST_CASE("parser reports the failing line") {
    try {
        parse_constellation("1 0 0 1\n1 0 bad 1\n", "t");
        FAIL("expected MalformedLine");
    } catch (const MalformedLine& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_constellation("1 0 0 1 9\n1 0 0 -1\n", "t"), MalformedLine);
    CHECK_THROWS_AS(parse_constellation("1 0 0 1\n", "t"), TooFewPoints);
    CHECK_THROWS_AS(parse_constellation("# only comments\n", "t"), TooFewPoints);
}

TEST_CASE("normalize_power rescales to the requested mean power") {
    Constellation4D c = formats::pm_16qam();
    Constellation4D n = normalize_power(c, 2.5e-3);
    CHECK(n.mean_power() == doctest::Approx(2.5e-3).epsilon(1e-12));
    // Shape preserved: every point scaled by the same factor.
    const double scale = std::abs(n.points[3].ax / c.points[3].ax);
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        if (std::abs(c.points[i].ay) == 0.0) continue;
        CHECK(std::abs(n.points[i].ay / c.points[i].ay) ==
              doctest::Approx(scale).epsilon(1e-12));
    }
    Constellation4D zero;
    zero.points = {{cplx(0, 0), cplx(0, 0)}, {cplx(0, 0), cplx(0, 0)}};
    CHECK_THROWS_AS((void)normalize_power(zero, 1.0), ZeroPowerConstellation);
}

TEST_CASE("moment ratios are scale invariant and match closed forms") {
    Constellation4D q = formats::pm_16qam();
    MomentSet m1 = moments(q);
    MomentSet m2 = moments(normalize_power(q, 1e-3));
    CHECK(m1.phi1 == doctest::Approx(m2.phi1).epsilon(1e-12));
    CHECK(m1.phi2 == doctest::Approx(m2.phi2).epsilon(1e-12));
    CHECK(m1.phi5 == doctest::Approx(m2.phi5).epsilon(1e-12));

    // Per-polarization 16QAM: E|a|^2 = 10, E|a|^4 = 132, E|a|^6 = 1960.
    CHECK(m1.phi2 == doctest::Approx(1.32).epsilon(1e-12));
    CHECK(m1.phi1 == doctest::Approx(1.96).epsilon(1e-12));
    // Independent equal-power polarizations: phi5 = 1, phi3 = phi4 = phi2.
    CHECK(m1.phi5 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m1.phi3 == doctest::Approx(m1.phi2).epsilon(1e-12));
    CHECK(m1.phi4 == doctest::Approx(m1.phi2).epsilon(1e-12));
    CHECK(m1.phi6 == doctest::Approx(m1.phi2).epsilon(1e-12));
    CHECK(m1.phi7 == doctest::Approx(m1.phi5).epsilon(1e-12));
}

TEST_CASE("Kerr coefficients: constant-power alphabets and QAM closed forms") {
    // PM-QPSK: per-pol constant modulus (phi1 = phi2 = phi5 = 1).
    KerrCoeffs k = kerr_coefficients(moments(formats::pm_qpsk()), CoeffMode::FourD);
    CHECK(k.x.psi1 == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(k.x.psi2 == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK(k.x.psi3 == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(k.phi1_factor == doctest::Approx(-5.0).epsilon(1e-12));
    CHECK(k.y.psi1 == doctest::Approx(k.x.psi1).epsilon(1e-12));

    // PM-16QAM closed forms: psi2 = 5*1.32 - 10 = -3.4 etc.
    KerrCoeffs k16 = kerr_coefficients(moments(formats::pm_16qam()), CoeffMode::FourD);
    CHECK(k16.x.psi1 == doctest::Approx(2.08).epsilon(1e-12));
    CHECK(k16.x.psi2 == doctest::Approx(-3.4).epsilon(1e-12));
    CHECK(k16.x.psi3 == doctest::Approx(-0.68).epsilon(1e-12));
    CHECK(k16.phi1_factor == doctest::Approx(-3.4).epsilon(1e-12));

    // PM-64QAM: phi2 = 29/21, phi1 = 6871/3087.
    KerrCoeffs k64 = kerr_coefficients(moments(formats::pm_64qam()), CoeffMode::Egn);
    CHECK(k64.x.psi1 == doctest::Approx(5548.0 / 3087.0).epsilon(1e-12));
    CHECK(k64.x.psi2 == doctest::Approx(-65.0 / 21.0).epsilon(1e-12));
    CHECK(k64.x.psi3 == doctest::Approx(-13.0 / 21.0).epsilon(1e-12));
    CHECK(k64.phi1_factor == doctest::Approx(-65.0 / 21.0).epsilon(1e-12));
}

TEST_CASE("Kerr coefficients vanish for the circular-Gaussian reference") {
    for (CoeffMode mode : {CoeffMode::FourD, CoeffMode::Egn}) {
        KerrCoeffs k = kerr_coefficients(gaussian_moments(), mode);
        CHECK(k.x.psi1 == 0.0);
        CHECK(k.x.psi2 == 0.0);
        CHECK(k.x.psi3 == 0.0);
        CHECK(k.y.psi1 == 0.0);
        CHECK(k.phi1_factor == 0.0);
    }
}

TEST_CASE("4D and tensor-product modes coincide for independent polarizations") {
    std::vector<Constellation4D> tensors = {
        tensor_square(psk_ring(4, 1.0, M_PI / 4), "qpsk^2"),
        tensor_square(psk_ring(8), "8psk^2"),
        tensor_square(qam_levels(4), "16qam^2"),
        tensor_square(qam_levels(8), "64qam^2"),
        [] {
            auto two_ring = psk_ring(8, 1.0);
            auto inner = psk_ring(8, 0.5, M_PI / 8);
            two_ring.insert(two_ring.end(), inner.begin(), inner.end());
            return tensor_square(two_ring, "ring16^2");
        }(),
    };
    for (const auto& c : tensors) {
        MomentSet m = moments(c);
        KerrCoeffs a = kerr_coefficients(m, CoeffMode::FourD);
        KerrCoeffs b = kerr_coefficients(m, CoeffMode::Egn);
        CAPTURE(c.label);
        CHECK(a.x.psi1 == doctest::Approx(b.x.psi1).epsilon(1e-12));
        CHECK(a.y.psi1 == doctest::Approx(b.y.psi1).epsilon(1e-12));
        CHECK(a.x.psi2 == doctest::Approx(b.x.psi2).epsilon(1e-12));
        CHECK(a.x.psi3 == doctest::Approx(b.x.psi3).epsilon(1e-12));
        CHECK(a.phi1_factor == doctest::Approx(b.phi1_factor).epsilon(1e-12));
    }
}

TEST_CASE("4D coefficients of the polarization-coupled alphabets (frozen)") {
    auto check = [](const Constellation4D& c, double p1, double p2, double p3,
                    double f1, CoeffMode mode) {
        KerrCoeffs k = kerr_coefficients(moments(c), mode);
        CAPTURE(c.label);
        CHECK(k.x.psi1 == doctest::Approx(p1).epsilon(1e-12));
        CHECK(k.x.psi2 == doctest::Approx(p2).epsilon(1e-12));
        CHECK(k.x.psi3 == doctest::Approx(p3).epsilon(1e-12));
        CHECK(k.phi1_factor == doctest::Approx(f1).epsilon(1e-12));
    };
    // Constant 4D modulus (cross-polytope, PSK-alternating, anti-correlated
    // rings): same coefficients as PM-QPSK in the joint-statistics mode.
    check(formats::biortho4_8(), 4, -5, -1, -5, CoeffMode::FourD);
    check(formats::dicyclic4_16(), 4, -5, -1, -5, CoeffMode::FourD);
    check(formats::dicyclic4_24(), 4, -5, -1, -5, CoeffMode::FourD);
    check(formats::a2_8psk(), 4, -5, -1, -5, CoeffMode::FourD);
    check(formats::tetra4_9(), 2.0625, -3.75, -0.75, -3.75, CoeffMode::FourD);
    check(formats::so_pm_qpsk(), 1.6, -3.0, -0.6, -3.0, CoeffMode::FourD);
    check(formats::sp_qam4_128(), 2.08, -3.4, -0.68, -3.4, CoeffMode::FourD);

    // The tensor-product reduction misreads the coupled alphabets; frozen
    // values document how far off it is.
    check(formats::biortho4_8(), -2, 0, 0, 0, CoeffMode::Egn);
    check(formats::dicyclic4_16(), -2, 0, 0, 0, CoeffMode::Egn);
    check(formats::tetra4_9(), -3.1875, 1.25, 0.25, 1.25, CoeffMode::Egn);
    check(formats::so_pm_qpsk(), 2.8, -4.0, -0.8, -4.0, CoeffMode::Egn);

    // a2_8psk marginals are two-level rings; recompute from the ring ratio.
    const double r2 = 0.65 * 0.65;
    const double mu = (1 + r2) / 2;
    const double phi2 = ((1 + r2 * r2) / 2) / (mu * mu);
    const double phi1 = ((1 + r2 * r2 * r2) / 2) / (mu * mu * mu);
    check(formats::a2_8psk(), phi1 - 9 * phi2 + 12, 5 * phi2 - 10, phi2 - 2,
          5 * phi2 - 10, CoeffMode::Egn);
}

TEST_CASE("assumption checks accept the library alphabets") {
    for (const auto& [label, make] : formats::all()) {
        AssumptionReport rep = validate_assumptions(make());
        CAPTURE(label);
        CHECK(rep.model_eligible);
        CHECK(rep.checks.size() == 11);
    }
}

TEST_CASE("assumption checks flag broken symmetries by name") {
    // A DC offset breaks the zero-mean requirement.
    Constellation4D shifted = formats::pm_qpsk();
    for (auto& p : shifted.points) p.ax += 0.25;
    AssumptionReport rep = validate_assumptions(shifted);
    CHECK_FALSE(rep.model_eligible);
    bool mean_failed = false;
    for (const auto& chk : rep.checks)
        if (chk.name == "E[ax]=0") {
            mean_failed = !chk.pass;
            CHECK(chk.measured > chk.threshold);
        }
    CHECK(mean_failed);

    // Unequal polarization powers break the power-balance requirement.
    Constellation4D lop = formats::pm_qpsk();
    for (auto& p : lop.points) p.ay *= 2.0;
    AssumptionReport rep2 = validate_assumptions(lop);
    CHECK_FALSE(rep2.model_eligible);
    for (const auto& chk : rep2.checks)
        if (chk.name == "E[|ax|^2]=E[|ay|^2]") CHECK_FALSE(chk.pass);
}

TEST_CASE("sixth-order moment table matches brute-force enumeration") {
    const std::vector<Constellation4D> alphabets = {
        formats::pm_qpsk(),    formats::biortho4_8(),   formats::tetra4_9(),
        formats::so_pm_qpsk(), formats::dicyclic4_16(), formats::dicyclic4_24(),
    };
    for (const auto& c : alphabets) {
        const double p = c.mean_power();
        const double scale3 = p * p * p;  // sixth-order moments scale as power^3
        for (const auto& pattern : testing::sixth_order_patterns()) {
            const cplx predicted = moment_table_oracle(c, pattern);
            const cplx brute = testing::brute_force_sixth(c, pattern);
            CAPTURE(c.label);
            CAPTURE(pattern);
            CHECK(std::abs(predicted - brute) <= 1e-12 * scale3);
        }
    }
}

TEST_CASE("fourth-order cross-channel table matches brute-force enumeration") {
    const std::vector<Constellation4D> alphabets = {
        formats::pm_qpsk(),    formats::pm_16qam(),     formats::tetra4_9(),
        formats::so_pm_qpsk(), formats::dicyclic4_16(), formats::a2_8psk(),
    };
    for (const auto& c : alphabets) {
        const double p = c.mean_power();
        for (const auto& pattern : testing::fourth_order_patterns()) {
            const cplx predicted = xpm_moment_oracle(c, pattern);
            const cplx brute = testing::brute_force_fourth(c, pattern);
            CAPTURE(c.label);
            CAPTURE(pattern);
            CHECK(std::abs(predicted - brute) <= 1e-12 * p * p);
        }
    }
}

TEST_CASE("pattern spellings: whitespace and the unicode inequality sign") {
    Constellation4D c = formats::so_pm_qpsk();
    const cplx a = moment_table_oracle(c, "h=h'!=k=k'!=l=l'");
    const cplx b = moment_table_oracle(c, "h = h' \xE2\x89\xA0 k = k' \xE2\x89\xA0 l = l'");
    CHECK(a == b);
    CHECK_THROWS_AS(moment_table_oracle(c, "h=k"), UnknownPattern);
    CHECK_THROWS_AS(xpm_moment_oracle(c, "h!=k!=h'!=k'"), UnknownPattern);
}
