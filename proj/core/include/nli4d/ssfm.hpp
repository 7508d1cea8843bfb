#pragma once

// Split-step Manakov simulator used to validate the analytical model.
// Sinc-pulse WDM generation with exact rectangular spectra on the FFT grid,
// symmetrized split-step propagation with adaptive (nonlinear-phase capped)
// steps, and an idealized receiver: full dispersion compensation, brickwall
// matched filter, symbol-rate sampling and conditional-mean SNR estimation.

#include <cstdint>
#include <string>
#include <vector>

#include "nli4d/constellation.hpp"
#include "nli4d/link.hpp"

namespace nli4d {

struct SsfmSettings {
    std::uint64_t num_symbols = 16384;  // per channel; must divide the FFT length
    std::uint64_t guard_symbols = 512;  // discarded at both ends before statistics
    int oversampling = 0;               // samples per symbol, power of two; 0 = auto
    double max_nl_phase_rad = 3e-3;     // adaptive step cap
    std::uint64_t seed = 1;
    bool add_ase = false;               // inject amplifier noise (off for validation)
};

struct SimConfig {
    WdmGrid grid;
    LinkSpec link;
    // One alphabet per channel, already scaled to its launch power.
    std::vector<Constellation4D> channel_formats;
    SsfmSettings settings;
};

struct FieldSamples {
    std::vector<cplx> ex, ey;   // time samples, both polarizations
    double sample_rate_hz = 0;
};

struct TxRecord {
    std::vector<std::uint32_t> indices;  // drawn alphabet indices per symbol
};

struct WdmSignal {
    FieldSamples field;
    std::vector<TxRecord> tx;  // one record per channel
};

struct RxChannel {
    int channel = 0;                 // 1-based
    std::vector<Point4D> symbols;    // matched-filter outputs (full sequence)
    double snr_linear = 0;
    double snr_db = 0;
    double eta = 0;                  // 1 / (SNR P^2) [1/W^2]
    double eta_db = 0;
    std::uint64_t min_point_count = 0;  // smallest conditioning-class size used
};

// Smallest power-of-two samples-per-symbol that keeps the sample rate at
// least twice the occupied WDM bandwidth (no first-order mixing product can
// alias back into the signal band).
int auto_oversampling(const WdmGrid& grid);

// Checks symbol count / grid alignment / bandwidth and resolves
// settings.oversampling == 0.  Throws GridTooWide or ConfigError.
SimConfig validate_sim(SimConfig cfg);

// Draws symbols (per-channel RNG substreams of settings.seed) and builds the
// aggregate field.  Total mean power equals the sum of channel powers.
WdmSignal generate_wdm(const SimConfig& cfg);

// Propagates through every span.  Lumped amplification restores the span
// loss at each span end; ideal distributed propagation is lossless.
FieldSamples propagate(const FieldSamples& in, const SimConfig& cfg);

// Demodulates channel n (1-based) and estimates SNR over the guard-trimmed
// symbol stream via per-point conditional means.  Throws
// InsufficientSymbolsPerPoint when a point was seen fewer than 20 times.
RxChannel receive(const FieldSamples& field, const SimConfig& cfg, int n,
                  const TxRecord& tx);

// Binary dump of received symbols: magic "NLI4DSYM\0", u32 version, u32
// channel count, u64 symbols per channel, then per channel f64
// (ax_re, ax_im, ay_re, ay_im) per symbol; all little-endian.
void dump_symbols(const std::string& path, const std::vector<RxChannel>& rx);

}  // namespace nli4d
