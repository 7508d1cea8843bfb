#include "nli4d/formats.hpp"

#include <cmath>
#include <numbers>

namespace nli4d::formats {

namespace {

// Tensor product of two identical square-QAM alphabets with the odd levels
// -(2m-1), ..., -1, 1, ..., 2m-1 on each real dimension.
Constellation4D pm_square_qam(int levels_per_dim, std::string label) {
    std::vector<double> levels(levels_per_dim);
    for (int i = 0; i < levels_per_dim; ++i)
        levels[i] = static_cast<double>(2 * i - levels_per_dim + 1);

    Constellation4D c;
    c.label = std::move(label);
    for (double xr : levels)
        for (double xi : levels)
            for (double yr : levels)
                for (double yi : levels)
                    c.points.push_back({cplx(xr, xi), cplx(yr, yi)});
    return c;
}

// m-PSK ring with radius r.
std::vector<cplx> psk_ring(int m, double r = 1.0) {
    std::vector<cplx> out(m);
    for (int k = 0; k < m; ++k)
        out[k] = std::polar(r, 2.0 * std::numbers::pi * k / m);
    return out;
}

Constellation4D pol_alternating_psk(int m, std::string label) {
    Constellation4D c;
    c.label = std::move(label);
    for (const cplx& p : psk_ring(m)) c.points.push_back({p, cplx(0, 0)});
    for (const cplx& p : psk_ring(m)) c.points.push_back({cplx(0, 0), p});
    return c;
}

}  // namespace

Constellation4D pm_qpsk() { return pm_square_qam(2, "pm_qpsk"); }
Constellation4D pm_16qam() { return pm_square_qam(4, "pm_16qam"); }
Constellation4D pm_64qam() { return pm_square_qam(8, "pm_64qam"); }

Constellation4D biortho4_8() {
    Constellation4D c;
    c.label = "biortho4_8";
    for (int dim = 0; dim < 4; ++dim)
        for (double sign : {1.0, -1.0}) {
            double v[4] = {0, 0, 0, 0};
            v[dim] = sign;
            c.points.push_back({cplx(v[0], v[1]), cplx(v[2], v[3])});
        }
    return c;
}

Constellation4D tetra4_9() {
    Constellation4D c = biortho4_8();
    c.label = "tetra4_9";
    c.points.push_back({cplx(0, 0), cplx(0, 0)});
    return c;
}

Constellation4D so_pm_qpsk() {
    Constellation4D c;
    c.label = "so_pm_qpsk";
    const double g = 0.5 * (1.0 + std::sqrt(5.0));  // golden ratio shell scale
    for (double scale : {1.0, g})
        for (double xr : {-1.0, 1.0})
            for (double xi : {-1.0, 1.0})
                for (double yr : {-1.0, 1.0})
                    for (double yi : {-1.0, 1.0})
                        c.points.push_back({scale * cplx(xr, xi), scale * cplx(yr, yi)});
    return c;
}

Constellation4D sp_qam4_128() {
    Constellation4D c;
    c.label = "sp_qam4_128";
    const Constellation4D full = pm_16qam();
    for (const auto& p : full.points) {
        const long sum = std::lround(p.ax.real() + p.ax.imag() + p.ay.real() +
                                     p.ay.imag());
        if (((sum % 4) + 4) % 4 == 0) c.points.push_back(p);
    }
    return c;
}

Constellation4D dicyclic4_16() { return pol_alternating_psk(8, "dicyclic4_16"); }
Constellation4D dicyclic4_24() { return pol_alternating_psk(12, "dicyclic4_24"); }

Constellation4D a2_8psk(double ring_ratio) {
    Constellation4D c;
    c.label = "a2_8psk";
    const double r1 = 1.0;
    const double r2 = ring_ratio;
    for (const auto& [rx, ry] : {std::pair{r1, r2}, std::pair{r2, r1}})
        for (const cplx& px : psk_ring(8, rx))
            for (const cplx& py : psk_ring(8, ry))
                c.points.push_back({px, py});
    return c;
}

const std::vector<std::pair<std::string, std::function<Constellation4D()>>>& all() {
    static const std::vector<std::pair<std::string, std::function<Constellation4D()>>>
        table = {
            {"pm_qpsk", pm_qpsk},
            {"pm_16qam", pm_16qam},
            {"pm_64qam", pm_64qam},
            {"biortho4_8", biortho4_8},
            {"tetra4_9", tetra4_9},
            {"so_pm_qpsk", so_pm_qpsk},
            {"sp_qam4_128", sp_qam4_128},
            {"dicyclic4_16", dicyclic4_16},
            {"dicyclic4_24", dicyclic4_24},
            {"a2_8psk", [] { return a2_8psk(); }},
        };
    return table;
}

}  // namespace nli4d::formats
