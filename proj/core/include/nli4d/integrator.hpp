#pragma once

// Seeded stratified Monte-Carlo integration over low-dimensional boxes, plus
// the six link-kernel integrals the interference model consumes:
//
//   S1 (5D), X1, X2 (4D), Z1 (3D)      self-channel
//   X(omega) (4D), Z(omega) (3D)       cross-channel, per interferer offset
//
// Integration domain is the pulse band [-pi/T, pi/T] per variable; kernel
// arguments that fall outside the band make the kernel vanish (the band
// indicators live inside rho_s / rho_xp).  Results are deterministic for a
// fixed seed regardless of worker count: every stratum owns an RNG substream
// keyed by (seed, stratum index) and partial results are reduced in stratum
// order.  Worker count is capped by the NLI4D_THREADS environment variable.

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "nli4d/link.hpp"

namespace nli4d {

struct IntegralEstimate {
    double value = 0;
    double std_err = 0;         // one-sigma error from the stratified variance
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

// Real and imaginary part of a complex integrand estimated from the same
// sample stream.  The model consumes .re; .im is a diagnostic that must be
// statistically compatible with zero.
struct ComplexIntegral {
    IntegralEstimate re;
    IntegralEstimate im;
};

struct Box {
    std::vector<std::pair<double, double>> dims;  // [lo, hi) per axis
    double volume() const {
        double v = 1;
        for (auto& [lo, hi] : dims) v *= hi - lo;
        return v;
    }
};

// Generic stratified estimate of \int_box f.  Up to 5 dimensions; budget is
// the total sample count (>= 1000, else BudgetTooSmall) split evenly over
// the strata (4 per axis when the budget allows at least 16 samples per
// stratum, fewer otherwise).
IntegralEstimate estimate(const std::function<double(std::span<const double>)>& f,
                          const Box& box, std::uint64_t budget, std::uint64_t seed);

// Same machinery for a complex integrand.
ComplexIntegral estimate_complex(const std::function<cplx(std::span<const double>)>& f,
                                 const Box& box, std::uint64_t budget,
                                 std::uint64_t seed);

// ---- model integrals -------------------------------------------------------
//
// Values include the table prefactors 1/T^k and the 1/(2 pi)^d of the
// measure; the kernels are built from the unit-energy pulse spectrum
// (see nli.hpp for the conversion to physical variances).

ComplexIntegral eval_S1(const LinkSpec& link, double T, std::uint64_t budget,
                        std::uint64_t seed);
ComplexIntegral eval_X1(const LinkSpec& link, double T, std::uint64_t budget,
                        std::uint64_t seed);
ComplexIntegral eval_X2(const LinkSpec& link, double T, std::uint64_t budget,
                        std::uint64_t seed);
IntegralEstimate eval_Z1(const LinkSpec& link, double T, std::uint64_t budget,
                         std::uint64_t seed);
ComplexIntegral eval_Xxpm(const LinkSpec& link, double T, double omega,
                          std::uint64_t budget, std::uint64_t seed);
IntegralEstimate eval_Zxpm(const LinkSpec& link, double T, double omega,
                           std::uint64_t budget, std::uint64_t seed);

struct IntegratorBudgets {
    std::uint64_t d3 = 2'000'000;   // 3D integrals (Z1, Z)
    std::uint64_t d4 = 2'000'000;   // 4D integrals (X1, X2, X)
    std::uint64_t d5 = 10'000'000;  // 5D integral (S1)
    std::uint64_t seed = 1;
};

struct XpmIntegrals {
    ComplexIntegral X;
    IntegralEstimate Z;
};

// Everything the model needs for one (link, symbol rate): the self-channel
// set plus X/Z memoized per distinct channel-offset step |j - n|.
struct IntegralSet {
    double T = 0;
    ComplexIntegral S1, X1, X2;
    IntegralEstimate Z1;
    std::map<int, XpmIntegrals> xpm;  // key: offset in channel-spacing steps
    double channel_spacing_hz = 0;
};

// Evaluates the full set; offsets lists the |j - n| values needed (each
// mapped to omega = offset * 2 pi spacing).  Deterministic in (budgets.seed).
IntegralSet eval_integral_set(const LinkSpec& link, double T,
                              double channel_spacing_hz,
                              const std::vector<int>& offsets,
                              const IntegratorBudgets& budgets);

// Effective worker count used by estimate(): min(hardware, NLI4D_THREADS).
int integrator_workers();

}  // namespace nli4d
