#include "nli4d/constellation.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nli4d/detail/rng.hpp"
#include "nli4d/errors.hpp"

namespace nli4d {

double Constellation4D::mean_power() const {
    detail::CompensatedSum s;
    for (const auto& p : points) s.add(std::norm(p.ax) + std::norm(p.ay));
    return points.empty() ? 0.0 : s.value() / static_cast<double>(points.size());
}

namespace {

bool is_blank(std::string_view line) {
    for (char ch : line)
        if (!std::isspace(static_cast<unsigned char>(ch))) return false;
    return true;
}

}  // namespace

Constellation4D parse_constellation(std::string_view text, std::string label) {
    Constellation4D c;
    c.label = std::move(label);

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(
            pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (is_blank(line)) continue;
        std::size_t first = line.find_first_not_of(" \t");
        if (line[first] == '#') continue;

        std::array<double, 4> v{};
        const char* p = line.data() + first;
        const char* end = line.data() + line.size();
        for (int i = 0; i < 4; ++i) {
            char* next = nullptr;
            // strtod needs NUL-terminated input; lines are views, so copy.
            std::string field(p, end - p);
            v[i] = std::strtod(field.c_str(), &next);
            if (next == field.c_str())
                throw MalformedLine(line_no, "expected 4 numbers, found " +
                                                 std::to_string(i));
            if (!std::isfinite(v[i]))
                throw MalformedLine(line_no, "non-finite value");
            p += next - field.c_str();
        }
        while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
        if (p != end) throw MalformedLine(line_no, "trailing characters after 4 numbers");

        c.points.push_back({cplx(v[0], v[1]), cplx(v[2], v[3])});
    }

    if (c.points.size() < 2)
        throw TooFewPoints("constellation has " + std::to_string(c.points.size()) +
                           " point(s); at least 2 required");
    return c;
}

Constellation4D load_constellation_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open constellation file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    std::string label = std::filesystem::path(path).stem().string();
    // Honour an optional "# name: ..." header.
    if (text.rfind("# name:", 0) == 0) {
        std::size_t eol = text.find('\n');
        std::string name = text.substr(7, eol == std::string::npos ? std::string::npos
                                                                   : eol - 7);
        const auto a = name.find_first_not_of(" \t");
        const auto b = name.find_last_not_of(" \t\r");
        if (a != std::string::npos) label = name.substr(a, b - a + 1);
    }
    return parse_constellation(text, label);
}

Constellation4D normalize_power(const Constellation4D& c, double power_watt) {
    const double p = c.mean_power();
    if (!(p > 0.0))
        throw ZeroPowerConstellation("constellation '" + c.label +
                                     "' has zero mean power");
    const double scale = std::sqrt(power_watt / p);
    Constellation4D out = c;
    for (auto& pt : out.points) {
        pt.ax *= scale;
        pt.ay *= scale;
    }
    return out;
}

namespace {

// Raw power sums used by moments() and the oracles.
struct RawMoments {
    double m2x = 0, m2y = 0;      // E|ax|^2, E|ay|^2
    double m4x = 0, m4y = 0;      // E|ax|^4, E|ay|^4
    double m6x = 0, m6y = 0;      // E|ax|^6, E|ay|^6
    double m42xy = 0;             // E{|ax|^4 |ay|^2}
    double m42yx = 0;             // E{|ay|^4 |ax|^2}
    double m22 = 0;               // E{|ax|^2 |ay|^2}
    cplx ay_axc{};                // E{ay ax*}
    cplx p3y_x{};                 // E{|ay|^2 ay* ax}
};

RawMoments raw_moments(const Constellation4D& c) {
    detail::CompensatedSum m2x, m2y, m4x, m4y, m6x, m6y, m42xy, m42yx, m22;
    detail::CompensatedSum cr1, ci1, cr2, ci2;
    for (const auto& pt : c.points) {
        const double px = std::norm(pt.ax);
        const double py = std::norm(pt.ay);
        m2x.add(px);
        m2y.add(py);
        m4x.add(px * px);
        m4y.add(py * py);
        m6x.add(px * px * px);
        m6y.add(py * py * py);
        m42xy.add(px * px * py);
        m42yx.add(py * py * px);
        m22.add(px * py);
        const cplx v1 = pt.ay * std::conj(pt.ax);
        cr1.add(v1.real());
        ci1.add(v1.imag());
        const cplx v2 = py * std::conj(pt.ay) * pt.ax;
        cr2.add(v2.real());
        ci2.add(v2.imag());
    }
    const double inv = 1.0 / static_cast<double>(c.points.size());
    RawMoments r;
    r.m2x = m2x.value() * inv;
    r.m2y = m2y.value() * inv;
    r.m4x = m4x.value() * inv;
    r.m4y = m4y.value() * inv;
    r.m6x = m6x.value() * inv;
    r.m6y = m6y.value() * inv;
    r.m42xy = m42xy.value() * inv;
    r.m42yx = m42yx.value() * inv;
    r.m22 = m22.value() * inv;
    r.ay_axc = cplx(cr1.value(), ci1.value()) * inv;
    r.p3y_x = cplx(cr2.value(), ci2.value()) * inv;
    return r;
}

}  // namespace

MomentSet moments(const Constellation4D& c) {
    if (c.points.empty()) throw TooFewPoints("empty constellation");
    const RawMoments r = raw_moments(c);
    if (!(r.m2x > 0.0)) throw ZeroPolarizationPower("x polarization has zero power");
    if (!(r.m2y > 0.0)) throw ZeroPolarizationPower("y polarization has zero power");

    MomentSet m;
    m.mu2x = r.m2x;
    m.mu2y = r.m2y;
    const double d2x = r.m2x * r.m2x;
    const double d3x = d2x * r.m2x;
    const double d2y = r.m2y * r.m2y;
    const double d3y = d2y * r.m2y;
    m.phi1 = r.m6x / d3x;
    m.phi2 = r.m4x / d2x;
    m.phi3 = r.m42xy / d3x;
    m.phi4 = r.m42yx / d3x;
    m.phi5 = r.m22 / d2x;
    // The interferer-role ratios have the same functional form evaluated on
    // the same alphabet; they differ from phi2/phi5 only when the interferer
    // uses a different format, which is handled per channel by the plan.
    m.phi6 = m.phi2;
    m.phi7 = m.phi5;
    m.phi1y = r.m6y / d3y;
    m.phi3y = r.m42yx / d3y;
    m.phi4y = r.m42xy / d3y;
    m.phi6y = r.m4y / d2y;
    return m;
}

MomentSet gaussian_moments() {
    MomentSet m;
    m.mu2x = m.mu2y = 0.5;
    m.phi1 = m.phi1y = 6.0;
    m.phi2 = 2.0;
    m.phi3 = m.phi3y = 2.0;
    m.phi4 = m.phi4y = 2.0;
    m.phi5 = 1.0;
    m.phi6 = m.phi6y = 2.0;
    m.phi7 = 1.0;
    return m;
}

KerrCoeffs kerr_coefficients(const MomentSet& m, CoeffMode mode) {
    KerrCoeffs k;
    k.mode = mode;
    if (mode == CoeffMode::FourD) {
        k.x.psi1 = m.phi1 - 12.0 * m.phi2 + 24.0 + 2.0 * m.phi3 + m.phi4 - 12.0 * m.phi5;
        k.y.psi1 = m.phi1y - 12.0 * m.phi2 + 24.0 + 2.0 * m.phi3y + m.phi4y - 12.0 * m.phi5;
        k.x.psi2 = k.y.psi2 = 5.0 * m.phi2 - 15.0 + 5.0 * m.phi5;
        k.x.psi3 = k.y.psi3 = m.phi2 - 3.0 + m.phi5;
        k.phi1_factor = 5.0 * m.phi6 - 15.0 + 5.0 * m.phi7;
    } else {
        k.x.psi1 = m.phi1 - 9.0 * m.phi2 + 12.0;
        k.y.psi1 = m.phi1y - 9.0 * m.phi2 + 12.0;
        k.x.psi2 = k.y.psi2 = 5.0 * m.phi2 - 10.0;
        k.x.psi3 = k.y.psi3 = m.phi2 - 2.0;
        k.phi1_factor = 5.0 * m.phi6 - 10.0;
    }
    return k;
}

AssumptionReport validate_assumptions(const Constellation4D& c, double tol) {
    if (c.points.empty()) throw TooFewPoints("empty constellation");

    detail::CompensatedSum sums[18];  // re/im pairs of the complex means
    detail::CompensatedSum p2x, p2y, p4x, p4y;
    for (const auto& pt : c.points) {
        const cplx vals[9] = {
            pt.ax,
            pt.ay,
            pt.ax * pt.ax,
            pt.ay * pt.ay,
            pt.ax * std::conj(pt.ay),
            std::norm(pt.ax) * pt.ax,
            std::norm(pt.ay) * pt.ay,
            std::norm(pt.ay) * pt.ax,
            std::norm(pt.ax) * pt.ay,
        };
        for (int i = 0; i < 9; ++i) {
            sums[2 * i].add(vals[i].real());
            sums[2 * i + 1].add(vals[i].imag());
        }
        p2x.add(std::norm(pt.ax));
        p2y.add(std::norm(pt.ay));
        p4x.add(std::norm(pt.ax) * std::norm(pt.ax));
        p4y.add(std::norm(pt.ay) * std::norm(pt.ay));
    }

    const double inv = 1.0 / static_cast<double>(c.points.size());
    const double s = 0.5 * (p2x.value() + p2y.value()) * inv;  // mean per-pol power
    if (!(s > 0.0))
        throw ZeroPowerConstellation("cannot validate a zero-power constellation");

    // Normalization exponent of each complex mean: amplitude^deg scales as
    // power^(deg/2).
    static constexpr const char* names[9] = {
        "E[ax]=0",        "E[ay]=0",         "E[ax^2]=0",
        "E[ay^2]=0",      "E[ax ay*]=0",     "E[|ax|^2 ax]=0",
        "E[|ay|^2 ay]=0", "E[|ay|^2 ax]=0",  "E[|ax|^2 ay]=0",
    };
    static constexpr double degree[9] = {1, 1, 2, 2, 2, 3, 3, 3, 3};

    AssumptionReport rep;
    rep.model_eligible = true;
    for (int i = 0; i < 9; ++i) {
        const cplx mean(sums[2 * i].value() * inv, sums[2 * i + 1].value() * inv);
        AssumptionCheck chk;
        chk.name = names[i];
        chk.measured = std::abs(mean) / std::pow(s, degree[i] / 2.0);
        chk.threshold = tol;
        chk.pass = chk.measured <= tol;
        rep.model_eligible = rep.model_eligible && chk.pass;
        rep.checks.push_back(std::move(chk));
    }

    AssumptionCheck eqp;
    eqp.name = "E[|ax|^2]=E[|ay|^2]";
    eqp.measured = std::abs(p2x.value() - p2y.value()) * inv / s;
    eqp.threshold = tol;
    eqp.pass = eqp.measured <= tol;
    rep.model_eligible = rep.model_eligible && eqp.pass;
    rep.checks.push_back(std::move(eqp));

    AssumptionCheck eq4;
    eq4.name = "E[|ax|^4]=E[|ay|^4]";
    eq4.measured = std::abs(p4x.value() - p4y.value()) * inv / (s * s);
    eq4.threshold = tol;
    eq4.pass = eq4.measured <= tol;
    rep.model_eligible = rep.model_eligible && eq4.pass;
    rep.checks.push_back(std::move(eq4));

    return rep;
}

namespace {

std::string canonical_pattern(std::string_view pattern) {
    std::string out;
    for (std::size_t i = 0; i < pattern.size();) {
        unsigned char ch = pattern[i];
        if (std::isspace(ch)) {
            ++i;
            continue;
        }
        // Accept the UTF-8 "not equal" sign as a group separator.
        if (ch == 0xE2 && i + 2 < pattern.size() &&
            static_cast<unsigned char>(pattern[i + 1]) == 0x89 &&
            static_cast<unsigned char>(pattern[i + 2]) == 0xA0) {
            out += "!=";
            i += 3;
            continue;
        }
        out += static_cast<char>(ch);
        ++i;
    }
    return out;
}

}  // namespace

cplx moment_table_oracle(const Constellation4D& c, std::string_view pattern) {
    const RawMoments r = raw_moments(c);

    // Short-hands for the factored forms of the table.
    const double m2x = r.m2x;
    const double m2y = r.m2y;
    const double m4y = r.m4y;
    const double m22 = r.m22;
    const cplx e_ay_axc = r.ay_axc;               // E{ay ax*}
    const cplx e_ax_ayc = std::conj(r.ay_axc);    // E{ax ay*}
    const cplx e3_yx = r.p3y_x;                   // E{|ay|^2 ay* ax}
    const cplx e3_yx_c = std::conj(r.p3y_x);      // E{|ay|^2 ay ax*}

    const std::string p = canonical_pattern(pattern);
    if (p == "h=k=l=h'=k'=l'") return {r.m42yx, 0.0};
    if (p == "h=h'!=l=k=k'=l'") return {m2y * m22, 0.0};
    if (p == "h=k!=l=h'=k'=l'") return {m2y * m22, 0.0};
    if (p == "h=l'!=l=k=h'=k'") return e_ay_axc * e3_yx;
    if (p == "k=l!=h=h'=k'=l'") return std::conj(e_ay_axc) * e3_yx_c;
    if (p == "k=k'!=h=l=h'=l'") return {m2y * m22, 0.0};
    if (p == "l=h'!=h=k=k'=l'") return std::conj(e_ay_axc) * e3_yx_c;
    if (p == "l=l'!=h=k=h'=k'") return {m2x * m4y, 0.0};
    if (p == "h'=k'!=h=k=l=l'") return {m2y * m22, 0.0};
    if (p == "k'=l'!=h=k=l=h'") return e_ay_axc * e3_yx;
    if (p == "h=h'!=k=k'!=l=l'") return {m2y * m2y * m2x, 0.0};
    if (p == "h=k!=l=h'!=k'=l'") return m2y * e_ax_ayc * e_ay_axc;
    if (p == "h=k!=l=l'!=k'=h'") return {m2y * m2y * m2x, 0.0};
    if (p == "h=h'!=k=l!=k'=l'") return m2y * e_ax_ayc * e_ay_axc;
    if (p == "h=l'!=k=l!=h'=k'") return m2y * e_ax_ayc * e_ay_axc;
    if (p == "h=l'!=k=k'!=l=h'") return m2y * e_ax_ayc * e_ay_axc;
    throw UnknownPattern("unsupported sixth-order moment pattern: " +
                         std::string(pattern));
}

cplx xpm_moment_oracle(const Constellation4D& c, std::string_view pattern) {
    const RawMoments r = raw_moments(c);
    const std::string p = canonical_pattern(pattern);
    if (p == "h=k=h'=k'") return {r.m4x, 0.0};
    if (p == "h=k!=h'=k'") return {r.m2x * r.m2x, 0.0};
    if (p == "h=h'!=k=k'") return {r.m2x * r.m2x, 0.0};
    throw UnknownPattern("unsupported fourth-order moment pattern: " +
                         std::string(pattern));
}

}  // namespace nli4d
