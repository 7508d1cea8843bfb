#include "nli4d/integrator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

#include "nli4d/detail/rng.hpp"
#include "nli4d/errors.hpp"

namespace nli4d {

int integrator_workers() {
    if (const char* env = std::getenv("NLI4D_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

constexpr std::uint64_t kMinBudget = 1000;
constexpr std::uint64_t kMinPerStratum = 16;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t state = seed ^ (0xD1B54A32D192ED03ull * (tag + 1));
    return detail::splitmix64(state);
}

struct StratumResult {
    double sum_re = 0, sumsq_re = 0;
    double sum_im = 0, sumsq_im = 0;
};

// Largest strata-per-axis k <= 4 keeping at least kMinPerStratum samples in
// each of the k^d strata.
int strata_per_axis(std::uint64_t budget, int d) {
    for (int k = 4; k >= 2; --k) {
        std::uint64_t cells = 1;
        for (int i = 0; i < d; ++i) cells *= k;
        if (budget / cells >= kMinPerStratum) return k;
    }
    return 1;
}

// Samples one stratum with its own RNG substream.  The point order inside a
// stratum is fixed, so results do not depend on which worker ran it.
template <class F>
StratumResult run_stratum(const F& f, const Box& box, int k, std::uint64_t stratum,
                          std::uint64_t n, std::uint64_t seed) {
    const int d = static_cast<int>(box.dims.size());
    double lo[5], step[5];
    std::uint64_t idx = stratum;
    for (int a = 0; a < d; ++a) {
        const int cell = static_cast<int>(idx % k);
        idx /= k;
        const auto& [blo, bhi] = box.dims[a];
        step[a] = (bhi - blo) / k;
        lo[a] = blo + cell * step[a];
    }

    detail::Xoshiro256ss rng(seed, stratum);
    detail::CompensatedSum sre, sre2, sim, sim2;
    double x[5];
    for (std::uint64_t i = 0; i < n; ++i) {
        for (int a = 0; a < d; ++a) x[a] = lo[a] + step[a] * rng.uniform();
        const cplx v = f(x);
        sre.add(v.real());
        sre2.add(v.real() * v.real());
        sim.add(v.imag());
        sim2.add(v.imag() * v.imag());
    }
    return {sre.value(), sre2.value(), sim.value(), sim2.value()};
}

template <class F>
ComplexIntegral run_estimate(const F& f, const Box& box, std::uint64_t budget,
                             std::uint64_t seed) {
    const int d = static_cast<int>(box.dims.size());
    if (d < 1 || d > 5) throw Error("integration dimension must be 1..5");
    if (budget < kMinBudget)
        throw BudgetTooSmall("budget " + std::to_string(budget) + " < " +
                             std::to_string(kMinBudget));

    const int k = strata_per_axis(budget, d);
    std::uint64_t cells = 1;
    for (int i = 0; i < d; ++i) cells *= k;
    const std::uint64_t base = budget / cells;
    const std::uint64_t rem = budget % cells;
    auto stratum_n = [&](std::uint64_t s) { return base + (s < rem ? 1 : 0); };

    std::vector<StratumResult> results(cells);
    const int workers = std::min<int>(integrator_workers(), static_cast<int>(cells));
    if (workers <= 1) {
        for (std::uint64_t s = 0; s < cells; ++s)
            results[s] = run_stratum(f, box, k, s, stratum_n(s), seed);
    } else {
        std::atomic<std::uint64_t> next{0};
        auto work = [&] {
            for (std::uint64_t s; (s = next.fetch_add(1)) < cells;)
                results[s] = run_stratum(f, box, k, s, stratum_n(s), seed);
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // Reduce in stratum order (bit-reproducible for any worker count).
    const double cell_volume = box.volume() / static_cast<double>(cells);
    detail::CompensatedSum val_re, var_re, val_im, var_im;
    for (std::uint64_t s = 0; s < cells; ++s) {
        const auto& r = results[s];
        const double n = static_cast<double>(stratum_n(s));
        const double mean_re = r.sum_re / n;
        const double mean_im = r.sum_im / n;
        val_re.add(cell_volume * mean_re);
        val_im.add(cell_volume * mean_im);
        if (n > 1) {
            const double sv_re = std::max(0.0, (r.sumsq_re - n * mean_re * mean_re) / (n - 1));
            const double sv_im = std::max(0.0, (r.sumsq_im - n * mean_im * mean_im) / (n - 1));
            var_re.add(cell_volume * cell_volume * sv_re / n);
            var_im.add(cell_volume * cell_volume * sv_im / n);
        }
    }

    ComplexIntegral out;
    out.re = {val_re.value(), std::sqrt(std::max(0.0, var_re.value())), budget, seed};
    out.im = {val_im.value(), std::sqrt(std::max(0.0, var_im.value())), budget, seed};
    return out;
}

Box band_box(double T, int d) {
    const double wb = std::numbers::pi / T;
    Box box;
    box.dims.assign(d, {-wb, wb});
    return box;
}

// Scales value and std_err by the table prefactor.
ComplexIntegral scaled(ComplexIntegral ci, double factor) {
    ci.re.value *= factor;
    ci.re.std_err *= std::abs(factor);
    ci.im.value *= factor;
    ci.im.std_err *= std::abs(factor);
    return ci;
}

}  // namespace

IntegralEstimate estimate(const std::function<double(std::span<const double>)>& f,
                          const Box& box, std::uint64_t budget, std::uint64_t seed) {
    const int d = static_cast<int>(box.dims.size());
    auto wrap = [&](const double* x) {
        return cplx(f(std::span<const double>(x, d)), 0.0);
    };
    return run_estimate(wrap, box, budget, seed).re;
}

ComplexIntegral estimate_complex(const std::function<cplx(std::span<const double>)>& f,
                                 const Box& box, std::uint64_t budget,
                                 std::uint64_t seed) {
    const int d = static_cast<int>(box.dims.size());
    auto wrap = [&](const double* x) { return f(std::span<const double>(x, d)); };
    return run_estimate(wrap, box, budget, seed);
}

ComplexIntegral eval_S1(const LinkSpec& link, double T, std::uint64_t budget,
                        std::uint64_t seed) {
    const double two_pi = 2.0 * std::numbers::pi;
    auto f = [&](const double* w) -> cplx {
        const cplx a = rho_s(w[0], w[1], w[2], T, link);
        if (a == cplx{}) return {};
        const cplx b = rho_s(w[3], w[4], w[0] + w[2] + w[4] - w[1] - w[3], T, link);
        return a * std::conj(b);
    };
    const double factor = 1.0 / (T * std::pow(two_pi, 5));
    return scaled(run_estimate(f, band_box(T, 5), budget, seed), factor);
}

ComplexIntegral eval_X1(const LinkSpec& link, double T, std::uint64_t budget,
                        std::uint64_t seed) {
    const double two_pi = 2.0 * std::numbers::pi;
    auto f = [&](const double* w) -> cplx {
        const cplx a = rho_s(w[0], w[1], w[2], T, link);
        if (a == cplx{}) return {};
        const cplx b = rho_s(w[0], w[3], w[3] - w[1] + w[2], T, link);
        return a * std::conj(b);
    };
    const double factor = 1.0 / (T * T * std::pow(two_pi, 4));
    return scaled(run_estimate(f, band_box(T, 4), budget, seed), factor);
}

ComplexIntegral eval_X2(const LinkSpec& link, double T, std::uint64_t budget,
                        std::uint64_t seed) {
    const double two_pi = 2.0 * std::numbers::pi;
    auto f = [&](const double* w) -> cplx {
        const cplx a = rho_s(w[0], w[1], w[2], T, link);
        if (a == cplx{}) return {};
        const cplx b = rho_s(w[3], w[1], w[0] + w[2] - w[3], T, link);
        return a * std::conj(b);
    };
    const double factor = 1.0 / (T * T * std::pow(two_pi, 4));
    return scaled(run_estimate(f, band_box(T, 4), budget, seed), factor);
}

IntegralEstimate eval_Z1(const LinkSpec& link, double T, std::uint64_t budget,
                         std::uint64_t seed) {
    const double two_pi = 2.0 * std::numbers::pi;
    auto f = [&](const double* w) -> cplx {
        return {std::norm(rho_s(w[0], w[1], w[2], T, link)), 0.0};
    };
    const double factor = 1.0 / (T * T * T * std::pow(two_pi, 3));
    return scaled(run_estimate(f, band_box(T, 3), budget, seed), factor).re;
}

ComplexIntegral eval_Xxpm(const LinkSpec& link, double T, double omega,
                          std::uint64_t budget, std::uint64_t seed) {
    const double two_pi = 2.0 * std::numbers::pi;
    auto f = [&](const double* w) -> cplx {
        const cplx a = rho_xp(w[0], w[1], w[2], omega, T, link);
        if (a == cplx{}) return {};
        const cplx b = rho_xp(w[0] - w[1] + w[3], w[3], w[2], omega, T, link);
        return a * std::conj(b);
    };
    const double factor = 1.0 / (T * T * std::pow(two_pi, 4));
    return scaled(run_estimate(f, band_box(T, 4), budget, seed), factor);
}

IntegralEstimate eval_Zxpm(const LinkSpec& link, double T, double omega,
                           std::uint64_t budget, std::uint64_t seed) {
    const double two_pi = 2.0 * std::numbers::pi;
    auto f = [&](const double* w) -> cplx {
        return {std::norm(rho_xp(w[0], w[1], w[2], omega, T, link)), 0.0};
    };
    const double factor = 1.0 / (T * T * T * std::pow(two_pi, 3));
    return scaled(run_estimate(f, band_box(T, 3), budget, seed), factor).re;
}

IntegralSet eval_integral_set(const LinkSpec& link, double T,
                              double channel_spacing_hz,
                              const std::vector<int>& offsets,
                              const IntegratorBudgets& budgets) {
    IntegralSet set;
    set.T = T;
    set.channel_spacing_hz = channel_spacing_hz;
    set.S1 = eval_S1(link, T, budgets.d5, derive_seed(budgets.seed, 1));
    set.X1 = eval_X1(link, T, budgets.d4, derive_seed(budgets.seed, 2));
    set.X2 = eval_X2(link, T, budgets.d4, derive_seed(budgets.seed, 3));
    set.Z1 = eval_Z1(link, T, budgets.d3, derive_seed(budgets.seed, 4));
    for (int off : offsets) {
        if (off <= 0 || set.xpm.count(off)) continue;
        const double omega = 2.0 * std::numbers::pi * channel_spacing_hz * off;
        XpmIntegrals xz;
        xz.X = eval_Xxpm(link, T, omega, budgets.d4,
                         derive_seed(budgets.seed, 1000 + 2 * off));
        xz.Z = eval_Zxpm(link, T, omega, budgets.d3,
                         derive_seed(budgets.seed, 1001 + 2 * off));
        set.xpm.emplace(off, std::move(xz));
    }
    return set;
}

}  // namespace nli4d
