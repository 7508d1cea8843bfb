// Command line front end: analytical NLI model, SNR sweeps, split-step
// validation and constellation inspection, driven by a JSON config.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nli4d/config.hpp"
#include "nli4d/constellation.hpp"
#include "nli4d/errors.hpp"
#include "nli4d/integrator.hpp"
#include "nli4d/link.hpp"
#include "nli4d/nli.hpp"
#include "nli4d/ssfm.hpp"

namespace {

using nlohmann::json;
using namespace nli4d;

constexpr int kExitConfig = 2;
constexpr int kExitTolerance = 3;

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot open output file: " + out_path);
    out << text;
    if (!out) throw ConfigError("short write to output file: " + out_path);
}

struct CommonFlags {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    double budget_scale = 1.0;
    bool force = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_mode = true) {
    cmd->add_option("--config", f.config_path, "JSON run configuration")
        ->required();
    cmd->add_option("--out", f.out_path, "output file (default: stdout)");
    cmd->add_option("--seed", f.seed, "override the configured seeds");
    if (with_mode)
        cmd->add_option("--mode", f.mode,
                        "override model mode (fourd | egn | gn)");
    cmd->add_option("--budget", f.budget_scale,
                    "multiply configured integrator budgets by this factor")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--force", f.force,
                  "keep going when a format fails the model assumption checks");
}

RunConfig load_with_overrides(const CommonFlags& f) {
    RunConfig cfg = load_run_config(f.config_path);
    if (f.seed) {
        cfg.budgets.seed = *f.seed;
        cfg.ssfm.seed = *f.seed;
    }
    if (f.mode) cfg.mode = model_mode_from_string(*f.mode);
    auto scale = [&](std::uint64_t b) {
        return static_cast<std::uint64_t>(static_cast<double>(b) * f.budget_scale);
    };
    cfg.budgets.d3 = scale(cfg.budgets.d3);
    cfg.budgets.d4 = scale(cfg.budgets.d4);
    cfg.budgets.d5 = scale(cfg.budgets.d5);
    return cfg;
}

std::vector<int> all_offsets(int num_channels) {
    std::vector<int> offsets;
    for (int off = 1; off < num_channels; ++off) offsets.push_back(off);
    return offsets;
}

void warn_clamped(const NliReport& report) {
    for (const auto& ch : report.channels)
        if (ch.clamped)
            std::fprintf(stderr,
                         "warning: channel %d: negative variance %.3e W clamped "
                         "to zero (integration noise)\n",
                         ch.n, ch.clamped_from);
}

// ---------------------------------------------------------------- moments --

json moments_json(const std::string& path, double tol) {
    Constellation4D c = load_constellation_file(path);
    const MomentSet m = moments(c);
    const AssumptionReport rep = validate_assumptions(c, tol);

    auto coeffs_json = [](const KerrCoeffs& k) {
        return json{{"psi1_x", k.x.psi1}, {"psi1_y", k.y.psi1},
                    {"psi2", k.x.psi2},   {"psi3", k.x.psi3},
                    {"phi1_factor", k.phi1_factor}};
    };
    json checks = json::array();
    for (const auto& chk : rep.checks)
        checks.push_back({{"name", chk.name},
                          {"measured", chk.measured},
                          {"threshold", chk.threshold},
                          {"pass", chk.pass}});
    return json{
        {"file", path},
        {"label", c.label},
        {"points", c.points.size()},
        {"mean_power_w", c.mean_power()},
        {"moments",
         {{"mu2x", m.mu2x}, {"mu2y", m.mu2y}, {"phi1", m.phi1}, {"phi2", m.phi2},
          {"phi3", m.phi3}, {"phi4", m.phi4}, {"phi5", m.phi5}, {"phi6", m.phi6},
          {"phi7", m.phi7}, {"phi1_y", m.phi1y}, {"phi3_y", m.phi3y},
          {"phi4_y", m.phi4y}}},
        {"coeffs_4d", coeffs_json(kerr_coefficients(m, CoeffMode::FourD))},
        {"coeffs_egn", coeffs_json(kerr_coefficients(m, CoeffMode::Egn))},
        {"assumptions", checks},
        {"model_eligible", rep.model_eligible},
    };
}

int cmd_moments(const std::vector<std::string>& files, double tol,
                const std::string& out_path) {
    json out = json::array();
    bool all_eligible = true;
    for (const auto& f : files) {
        json j = moments_json(f, tol);
        all_eligible = all_eligible && j["model_eligible"].get<bool>();
        out.push_back(std::move(j));
    }
    write_output(out_path, out.dump(2) + "\n");
    return all_eligible ? 0 : kExitTolerance;
}

// -------------------------------------------------------------------- nli --

int cmd_nli(const CommonFlags& f) {
    const RunConfig cfg = load_with_overrides(f);
    const ChannelPlan plan = resolve_plan(cfg, f.force);
    const IntegralSet ints =
        eval_integral_set(cfg.link, cfg.grid.T(), cfg.grid.channel_spacing_hz,
                          all_offsets(cfg.grid.num_channels), cfg.budgets);
    const NliReport report = total_nli(plan, ints);
    warn_clamped(report);
    write_output(f.out_path, report_to_csv(report));
    return 0;
}

// -------------------------------------------------------------- snr-sweep --

int cmd_snr_sweep(const CommonFlags& f, double pmin_dbm, double pmax_dbm,
                  double step_db) {
    if (step_db <= 0) throw ConfigError("--step must be > 0");
    if (pmax_dbm < pmin_dbm) throw ConfigError("--pmax must be >= --pmin");
    const RunConfig cfg = load_with_overrides(f);
    if (cfg.link.amplification != Amplification::Lumped)
        throw ConfigError("snr-sweep needs lumped amplification (an ASE floor)");

    const ChannelPlan plan = resolve_plan(cfg, f.force);
    const IntegralSet ints =
        eval_integral_set(cfg.link, cfg.grid.T(), cfg.grid.channel_spacing_hz,
                          all_offsets(cfg.grid.num_channels), cfg.budgets);
    const NliReport base = total_nli(plan, ints);
    warn_clamped(base);
    const double sigma2_ase = base.sigma2_ase;

    // eta_n is invariant when every launch power scales by the same factor,
    // so the sweep rescales the baseline variances instead of re-integrating.
    std::string csv = "power_dbm,n,eta_db,snr_db\n";
    char buf[128];
    for (double p_dbm = pmin_dbm; p_dbm <= pmax_dbm + 1e-9; p_dbm += step_db) {
        for (const auto& ch : base.channels) {
            const double p0 = plan.channels.at(ch.n - 1).power_w;
            const double ratio = units::dbm_to_watt(p_dbm) / p0;
            const double p = p0 * ratio;
            const double sigma2_nli =
                (ch.sigma2_sci + ch.sigma2_xpm) * ratio * ratio * ratio;
            std::snprintf(buf, sizeof buf, "%.2f,%d,%.2f,%.2f\n", p_dbm, ch.n,
                          ch.eta_db, snr_db(p, sigma2_ase, sigma2_nli));
            csv += buf;
        }
    }
    write_output(f.out_path, csv);
    return 0;
}

// ------------------------------------------------------------------- ssfm --

json run_ssfm(const RunConfig& cfg, const ChannelPlan& plan,
              const std::string& dump_path, std::vector<double>* eta_db_out) {
    const SimConfig sim = validate_sim(make_sim_config(cfg, plan));
    const WdmSignal tx = generate_wdm(sim);
    const FieldSamples rx_field = propagate(tx.field, sim);

    json per_channel = json::array();
    std::vector<RxChannel> received;
    for (int n = 1; n <= sim.grid.num_channels; ++n) {
        RxChannel rx = receive(rx_field, sim, n, tx.tx[n - 1]);
        per_channel.push_back({{"n", n},
                               {"snr_db", rx.snr_db},
                               {"eta_db", rx.eta_db}});
        if (eta_db_out) eta_db_out->push_back(rx.eta_db);
        received.push_back(std::move(rx));
    }
    if (!dump_path.empty()) dump_symbols(dump_path, received);

    return json{{"per_channel", per_channel},
                {"settings",
                 {{"num_symbols", sim.settings.num_symbols},
                  {"guard_symbols", sim.settings.guard_symbols},
                  {"oversampling", sim.settings.oversampling},
                  {"max_nl_phase_mrad", sim.settings.max_nl_phase_rad * 1e3},
                  {"seed", sim.settings.seed},
                  {"ase", sim.settings.add_ase}}}};
}

int cmd_ssfm(const CommonFlags& f, const std::string& dump_path) {
    const RunConfig cfg = load_with_overrides(f);
    const ChannelPlan plan = resolve_plan(cfg, f.force);
    const json out = run_ssfm(cfg, plan, dump_path, nullptr);
    write_output(f.out_path, out.dump(2) + "\n");
    return 0;
}

// --------------------------------------------------------------- validate --

int cmd_validate(const CommonFlags& f) {
    const RunConfig cfg = load_with_overrides(f);
    if (cfg.link.fiber.gamma_per_w_m == 0.0) {
        json out{{"skipped", true},
                 {"reason", "gamma = 0: no nonlinear interference to compare "
                            "(split-step SNR is limited only by numerics)"}};
        write_output(f.out_path, out.dump(2) + "\n");
        return 0;
    }
    const ChannelPlan plan = resolve_plan(cfg, f.force);

    const IntegralSet ints =
        eval_integral_set(cfg.link, cfg.grid.T(), cfg.grid.channel_spacing_hz,
                          all_offsets(cfg.grid.num_channels), cfg.budgets);
    const NliReport model = total_nli(plan, ints);
    warn_clamped(model);

    std::vector<double> eta_sim_db;
    json sim_json = run_ssfm(cfg, plan, "", &eta_sim_db);

    json rows = json::array();
    double sum_abs = 0;
    for (const auto& ch : model.channels) {
        const double delta = ch.eta_db - eta_sim_db.at(ch.n - 1);
        sum_abs += std::abs(delta);
        rows.push_back({{"n", ch.n},
                        {"eta_model_db", ch.eta_db},
                        {"eta_ssfm_db", eta_sim_db.at(ch.n - 1)},
                        {"delta_db", delta}});
    }
    const double mean_abs = sum_abs / static_cast<double>(model.channels.size());
    const bool pass = mean_abs <= cfg.validate_tolerance_db;
    json out{{"skipped", false},
             {"mode", to_string(cfg.mode)},
             {"per_channel", rows},
             {"mean_abs_delta_db", mean_abs},
             {"tolerance_db", cfg.validate_tolerance_db},
             {"pass", pass}};
    write_output(f.out_path, out.dump(2) + "\n");
    return pass ? 0 : kExitTolerance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonlinear-interference model for 4D modulation formats over "
                 "multi-span WDM fiber links"};
    app.require_subcommand(1);

    // moments
    auto* mom = app.add_subcommand(
        "moments", "print moment ratios, model coefficients and symmetry "
                   "checks for constellation files");
    std::vector<std::string> files;
    double tol = 1e-9;
    std::string mom_out;
    mom->add_option("files", files, "constellation coordinate files")
        ->required()
        ->expected(-1);
    mom->add_option("--tol", tol, "assumption-check tolerance");
    mom->add_option("--out", mom_out, "output file (default: stdout)");

    // nli
    auto* nli = app.add_subcommand(
        "nli", "analytical per-channel NLI report (CSV)");
    CommonFlags nf;
    add_common(nli, nf);

    // snr-sweep
    auto* sweep = app.add_subcommand(
        "snr-sweep", "SNR vs launch power from one integral evaluation (CSV)");
    CommonFlags sf;
    double pmin = -10, pmax = 10, step = 1.0;
    add_common(sweep, sf);
    sweep->add_option("--pmin", pmin, "lowest launch power [dBm]");
    sweep->add_option("--pmax", pmax, "highest launch power [dBm]");
    sweep->add_option("--step", step, "power step [dB]");

    // ssfm
    auto* sim = app.add_subcommand(
        "ssfm", "split-step simulation of the configured link (JSON)");
    CommonFlags xf;
    std::string dump_path;
    add_common(sim, xf, /*with_mode=*/false);
    sim->add_option("--dump-symbols", dump_path,
                    "write received symbols to a binary file");

    // validate
    auto* val = app.add_subcommand(
        "validate", "compare the analytical model against a split-step run");
    CommonFlags vf;
    add_common(val, vf);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*mom) return cmd_moments(files, tol, mom_out);
        if (*nli) return cmd_nli(nf);
        if (*sweep) return cmd_snr_sweep(sf, pmin, pmax, step);
        if (*sim) return cmd_ssfm(xf, dump_path);
        if (*val) return cmd_validate(vf);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
