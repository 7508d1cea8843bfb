#include "nli4d/ssfm.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>

#include "nli4d/detail/rng.hpp"
#include "nli4d/errors.hpp"

namespace nli4d {

namespace {

// FFTW planning is not thread safe; execution of distinct plans is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

// In-place unnormalized c2c transforms bound to one buffer.
class Fft {
  public:
    explicit Fft(std::vector<cplx>& data) : data_(data) {
        std::lock_guard lock(fftw_mutex());
        auto* p = reinterpret_cast<fftw_complex*>(data_.data());
        const int n = static_cast<int>(data_.size());
        fwd_ = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Fft() {
        std::lock_guard lock(fftw_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    void forward() { fftw_execute(fwd_); }
    void backward() { fftw_execute(bwd_); }

  private:
    std::vector<cplx>& data_;
    fftw_plan fwd_, bwd_;
};

bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

// Frequency of FFT bin m for an n-point transform at sample rate fs.
double bin_freq(std::size_t m, std::size_t n, double fs) {
    const auto half = n / 2;
    const double idx = m < half ? static_cast<double>(m)
                                : static_cast<double>(m) - static_cast<double>(n);
    return idx * fs / static_cast<double>(n);
}

}  // namespace

int auto_oversampling(const WdmGrid& grid) {
    const double occupied =
        (grid.num_channels - 1) * grid.channel_spacing_hz + grid.symbol_rate_baud;
    const double need = 2.0 * occupied * grid.T();  // samples per symbol
    int os = 2;
    while (os < need) os *= 2;
    return os;
}

SimConfig validate_sim(SimConfig cfg) {
    const int n_ch = cfg.grid.num_channels;
    if (n_ch < 1) throw ConfigError("num_channels must be >= 1");
    if (cfg.grid.symbol_rate_baud <= 0) throw ConfigError("symbol rate must be > 0");
    if (static_cast<int>(cfg.channel_formats.size()) != n_ch)
        throw ConfigError("one constellation per channel required");
    if (static_cast<int>(cfg.grid.power_w.size()) != n_ch)
        throw ConfigError("one launch power per channel required");
    if (cfg.settings.num_symbols < 4)
        throw ConfigError("num_symbols must be >= 4");
    if (cfg.settings.num_symbols <= 2 * cfg.settings.guard_symbols)
        throw ConfigError("num_symbols must exceed twice guard_symbols");
    if (cfg.settings.max_nl_phase_rad <= 0)
        throw ConfigError("max_nl_phase_rad must be > 0");

    for (int j = 0; j < n_ch; ++j) {
        const double p = cfg.channel_formats[j].mean_power();
        if (std::abs(p - cfg.grid.power_w[j]) > 1e-9 * cfg.grid.power_w[j])
            throw ConfigError("channel " + std::to_string(j + 1) +
                              ": constellation power does not match launch power");
    }

    const int min_os = auto_oversampling(cfg.grid);
    if (cfg.settings.oversampling == 0) cfg.settings.oversampling = min_os;
    if (!is_power_of_two(cfg.settings.oversampling))
        throw ConfigError("oversampling must be a power of two");
    if (cfg.settings.oversampling < min_os)
        throw GridTooWide("oversampling " + std::to_string(cfg.settings.oversampling) +
                          " gives a simulated band narrower than twice the WDM "
                          "bandwidth (need >= " + std::to_string(min_os) + ")");

    // Channel centers must land on FFT bins: offset * num_symbols / symbol
    // rate must be an integer number of bins.
    const double kt = static_cast<double>(cfg.settings.num_symbols) * cfg.grid.T();
    for (int j = 1; j <= n_ch; ++j) {
        const double bins = cfg.grid.channel_offset_hz(j) * kt;
        if (std::abs(bins - std::round(bins)) > 1e-6)
            throw ConfigError("channel " + std::to_string(j) +
                              " center is not on the FFT grid; adjust num_symbols "
                              "(spacing * num_symbols / symbol_rate must be even)");
    }
    return cfg;
}

WdmSignal generate_wdm(const SimConfig& raw) {
    const SimConfig cfg = validate_sim(raw);
    const std::size_t K = cfg.settings.num_symbols;
    const std::size_t os = cfg.settings.oversampling;
    const std::size_t nf = K * os;
    const double kt = static_cast<double>(K) * cfg.grid.T();

    WdmSignal out;
    out.field.sample_rate_hz = cfg.grid.symbol_rate_baud * static_cast<double>(os);
    std::vector<cplx> yx(nf), yy(nf);

    std::vector<cplx> sx(K), sy(K);
    Fft fft_x(sx), fft_y(sy);

    for (int j = 1; j <= cfg.grid.num_channels; ++j) {
        const auto& pts = cfg.channel_formats[j - 1].points;
        const auto m_size = static_cast<std::uint32_t>(pts.size());
        detail::Xoshiro256ss rng(cfg.settings.seed, static_cast<std::uint64_t>(j));

        TxRecord rec;
        rec.indices.resize(K);
        for (std::size_t k = 0; k < K; ++k) {
            const std::uint32_t idx = rng.uniform_index(m_size);
            rec.indices[k] = idx;
            sx[k] = pts[idx].ax;
            sy[k] = pts[idx].ay;
        }
        fft_x.forward();
        fft_y.forward();

        // Place the K rectangular-spectrum bins at the channel offset.
        const auto o = static_cast<long long>(
            std::llround(cfg.grid.channel_offset_hz(j) * kt));
        for (std::size_t m = 0; m < K; ++m) {
            const long long mu = m < K / 2 ? static_cast<long long>(m)
                                           : static_cast<long long>(m) -
                                                 static_cast<long long>(K);
            const std::size_t g = static_cast<std::size_t>(
                ((o + mu) % static_cast<long long>(nf) + static_cast<long long>(nf)) %
                static_cast<long long>(nf));
            yx[g] += sx[m];
            yy[g] += sy[m];
        }
        out.tx.push_back(std::move(rec));
    }

    // Periodic sinc interpolation: inverse transform scaled by os/nf keeps
    // the symbol values at the symbol instants and the launch powers exact.
    out.field.ex = std::move(yx);
    out.field.ey = std::move(yy);
    {
        Fft ifx(out.field.ex), ify(out.field.ey);
        ifx.backward();
        ify.backward();
    }
    const double scale = static_cast<double>(os) / static_cast<double>(nf);
    for (auto& v : out.field.ex) v *= scale;
    for (auto& v : out.field.ey) v *= scale;
    return out;
}

namespace {

struct Propagator {
    std::vector<cplx>& ex;
    std::vector<cplx>& ey;
    Fft fft_x, fft_y;
    std::vector<double> w2;  // (2 pi f)^2 per bin
    double beta2;
    double alpha;       // 0 for ideal distributed propagation
    double gamma_eff;   // (8/9) gamma
    double inv_nf;

    Propagator(std::vector<cplx>& x, std::vector<cplx>& y, double fs,
               const SimConfig& cfg)
        : ex(x), ey(y), fft_x(x), fft_y(y) {
        const std::size_t nf = ex.size();
        w2.resize(nf);
        for (std::size_t m = 0; m < nf; ++m) {
            const double w = 2.0 * std::numbers::pi * bin_freq(m, nf, fs);
            w2[m] = w * w;
        }
        beta2 = cfg.link.fiber.beta2_s2_m;
        alpha = cfg.link.amplification == Amplification::Lumped
                    ? cfg.link.fiber.alpha()
                    : 0.0;
        gamma_eff = 8.0 / 9.0 * cfg.link.fiber.gamma_per_w_m;
        inv_nf = 1.0 / static_cast<double>(nf);
    }

    double peak_power() const {
        double p = 0;
        for (std::size_t n = 0; n < ex.size(); ++n)
            p = std::max(p, std::norm(ex[n]) + std::norm(ey[n]));
        return p;
    }

    // Dispersion + loss over length ell.
    void linear(double ell) {
        fft_x.forward();
        fft_y.forward();
        const double amp = std::exp(-0.5 * alpha * ell) * inv_nf;
        for (std::size_t m = 0; m < ex.size(); ++m) {
            const cplx h = std::polar(amp, 0.5 * beta2 * w2[m] * ell);
            ex[m] *= h;
            ey[m] *= h;
        }
        fft_x.backward();
        fft_y.backward();
    }

    // Kerr phase accumulated over a step of length dz centered on the
    // current field:  theta = gamma_eff |E|^2 * 2 sinh(alpha dz / 2) / alpha,
    // which makes constant-envelope self-phase rotation exact per step.
    void nonlinear(double dz) {
        const double half = 0.5 * alpha * dz;
        const double w_eff = alpha > 0 ? 2.0 * std::sinh(half) / alpha : dz;
        for (std::size_t n = 0; n < ex.size(); ++n) {
            const double theta =
                gamma_eff * (std::norm(ex[n]) + std::norm(ey[n])) * w_eff;
            const cplx rot = std::polar(1.0, theta);
            ex[n] *= rot;
            ey[n] *= rot;
        }
    }

    void scale(double s) {
        for (auto& v : ex) v *= s;
        for (auto& v : ey) v *= s;
    }

    double cap_step(double cap, double remaining) const {
        if (gamma_eff <= 0) return remaining;
        const double p = peak_power();
        if (p <= 0) return remaining;
        const double dz = cap / (gamma_eff * p);
        if (dz < 1.0)
            throw StepUnderflow("nonlinear-phase cap forces a step below 1 m");
        return std::min(dz, remaining);
    }
};

}  // namespace

FieldSamples propagate(const FieldSamples& in, const SimConfig& raw) {
    const SimConfig cfg = validate_sim(raw);
    FieldSamples field = in;
    Propagator prop(field.ex, field.ey, field.sample_rate_hz, cfg);

    const double ls = cfg.link.span_length_m;
    const double cap = cfg.settings.max_nl_phase_rad;
    const bool lumped = cfg.link.amplification == Amplification::Lumped;

    for (int span = 0; span < cfg.link.num_spans; ++span) {
        double zpos = 0;
        double dz = prop.cap_step(cap, ls);
        prop.linear(0.5 * dz);
        while (true) {
            prop.nonlinear(dz);
            zpos += dz;
            const double remaining = ls - zpos;
            if (remaining <= 1e-9 * ls) {
                prop.linear(0.5 * dz);
                break;
            }
            const double dz_next = prop.cap_step(cap, remaining);
            prop.linear(0.5 * (dz + dz_next));
            dz = dz_next;
        }
        if (lumped) {
            // Lumped amplifier restores the span loss exactly.
            prop.scale(std::exp(0.5 * cfg.link.fiber.alpha() * ls));
            if (cfg.settings.add_ase) {
                const double gain = std::exp(cfg.link.fiber.alpha() * ls);
                const double nf_lin = units::db_to_linear(cfg.link.noise_figure_db);
                const double carrier = 193.414489e12;
                // Per-polarization per-sample noise variance over the full
                // simulated bandwidth.
                const double var = (gain - 1.0) * nf_lin * units::h_planck * carrier *
                                   field.sample_rate_hz / 2.0;
                const double s = std::sqrt(var / 2.0);
                detail::Xoshiro256ss rng(cfg.settings.seed,
                                         0xA5Eull * 1000 + static_cast<std::uint64_t>(span));
                auto draw = [&]() {
                    // Box-Muller
                    const double u1 = std::max(rng.uniform(), 1e-300);
                    const double u2 = rng.uniform();
                    const double r = std::sqrt(-2.0 * std::log(u1));
                    return cplx(r * std::cos(2 * std::numbers::pi * u2),
                                r * std::sin(2 * std::numbers::pi * u2));
                };
                for (std::size_t n = 0; n < field.ex.size(); ++n) {
                    field.ex[n] += s * draw();
                    field.ey[n] += s * draw();
                }
            }
        }
    }
    return field;
}

RxChannel receive(const FieldSamples& field, const SimConfig& raw, int n,
                  const TxRecord& tx) {
    const SimConfig cfg = validate_sim(raw);
    if (n < 1 || n > cfg.grid.num_channels)
        throw Error("receive: channel index out of range");

    const std::size_t K = cfg.settings.num_symbols;
    const std::size_t os = cfg.settings.oversampling;
    const std::size_t nf = K * os;
    if (field.ex.size() != nf || field.ey.size() != nf)
        throw Error("receive: field length does not match the configuration");
    const double fs = field.sample_rate_hz;
    const double kt = static_cast<double>(K) * cfg.grid.T();
    const double length = cfg.link.total_length();
    const double beta2 = cfg.link.fiber.beta2_s2_m;

    std::vector<cplx> yx = field.ex;
    std::vector<cplx> yy = field.ey;
    {
        Fft fx(yx), fy(yy);
        fx.forward();
        fy.forward();
    }

    // Extract the channel band, compensate dispersion at the true (offset)
    // frequency of each bin, and transform back at symbol rate: brickwall
    // matched filter plus exact symbol-instant decimation in one move.
    const auto o =
        static_cast<long long>(std::llround(cfg.grid.channel_offset_hz(n) * kt));
    std::vector<cplx> zx(K), zy(K);
    for (std::size_t m = 0; m < K; ++m) {
        const long long mu = m < K / 2
                                 ? static_cast<long long>(m)
                                 : static_cast<long long>(m) - static_cast<long long>(K);
        const std::size_t g = static_cast<std::size_t>(
            ((o + mu) % static_cast<long long>(nf) + static_cast<long long>(nf)) %
            static_cast<long long>(nf));
        const double w = 2.0 * std::numbers::pi * bin_freq(g, nf, fs);
        const cplx comp = std::polar(1.0, -0.5 * beta2 * w * w * length);
        zx[m] = yx[g] * comp;
        zy[m] = yy[g] * comp;
    }
    {
        Fft fx(zx), fy(zy);
        fx.backward();
        fy.backward();
    }
    // Undo the transmit interpolation gain (os) and the K-point transform
    // pair so that a linear-only link returns the symbols exactly.
    const double scale = 1.0 / (static_cast<double>(os) * static_cast<double>(K));
    RxChannel rx;
    rx.channel = n;
    rx.symbols.resize(K);
    for (std::size_t k = 0; k < K; ++k)
        rx.symbols[k] = {zx[k] * scale, zy[k] * scale};

    // Conditional means per transmitted point over the guard-trimmed range.
    const std::size_t guard = cfg.settings.guard_symbols;
    const std::size_t lo = guard, hi = K - guard;
    const std::size_t m_size = cfg.channel_formats[n - 1].points.size();
    if (tx.indices.size() != K) throw Error("receive: tx record length mismatch");

    std::vector<cplx> sum_x(m_size), sum_y(m_size);
    std::vector<std::uint64_t> count(m_size, 0);
    for (std::size_t k = lo; k < hi; ++k) {
        const auto idx = tx.indices[k];
        sum_x[idx] += rx.symbols[k].ax;
        sum_y[idx] += rx.symbols[k].ay;
        ++count[idx];
    }
    std::uint64_t min_count = ~0ull;
    for (std::size_t i = 0; i < m_size; ++i) min_count = std::min(min_count, count[i]);
    if (min_count < 20)
        throw InsufficientSymbolsPerPoint(
            "a constellation point was transmitted only " +
            std::to_string(min_count) + " times (need >= 20)");
    rx.min_point_count = min_count;

    std::vector<cplx> mean_x(m_size), mean_y(m_size);
    for (std::size_t i = 0; i < m_size; ++i) {
        mean_x[i] = sum_x[i] / static_cast<double>(count[i]);
        mean_y[i] = sum_y[i] / static_cast<double>(count[i]);
    }
    std::vector<double> dev(m_size, 0.0);
    for (std::size_t k = lo; k < hi; ++k) {
        const auto idx = tx.indices[k];
        dev[idx] += std::norm(rx.symbols[k].ax - mean_x[idx]) +
                    std::norm(rx.symbols[k].ay - mean_y[idx]);
    }
    double num = 0, den = 0;
    for (std::size_t i = 0; i < m_size; ++i) {
        num += std::norm(mean_x[i]) + std::norm(mean_y[i]);
        den += dev[i] / static_cast<double>(count[i]);
    }
    if (den <= 0) throw DegenerateDenominator("zero conditional variance");

    rx.snr_linear = num / den;
    rx.snr_db = units::linear_to_db(rx.snr_linear);
    const double p = cfg.grid.power_w[n - 1];
    rx.eta = 1.0 / (rx.snr_linear * p * p);
    rx.eta_db = units::linear_to_db(rx.eta);
    return rx;
}

void dump_symbols(const std::string& path, const std::vector<RxChannel>& rx) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open symbol dump file: " + path);
    const char magic[9] = {'N', 'L', 'I', '4', 'D', 'S', 'Y', 'M', '\0'};
    out.write(magic, sizeof magic);
    const std::uint32_t version = 1;
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    const auto n_ch = static_cast<std::uint32_t>(rx.size());
    out.write(reinterpret_cast<const char*>(&n_ch), sizeof n_ch);
    const std::uint64_t n_sym = rx.empty() ? 0 : rx.front().symbols.size();
    out.write(reinterpret_cast<const char*>(&n_sym), sizeof n_sym);
    for (const auto& ch : rx) {
        if (ch.symbols.size() != n_sym)
            throw Error("dump_symbols: ragged channel lengths");
        for (const auto& s : ch.symbols) {
            const double vals[4] = {s.ax.real(), s.ax.imag(), s.ay.real(),
                                    s.ay.imag()};
            out.write(reinterpret_cast<const char*>(vals), sizeof vals);
        }
    }
    if (!out) throw Error("short write to symbol dump file: " + path);
}

}  // namespace nli4d
