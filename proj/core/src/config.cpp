#include "nli4d/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nli4d/constellation.hpp"
#include "nli4d/errors.hpp"
#include "nli4d/formats.hpp"

namespace nli4d {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where + " must be a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) fail("unknown key \"" + it.key() + "\" in " + where);
    }
}

const json& require(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where + " is missing required key \"" + key + "\"");
    return *it;
}

double as_number(const json& v, const std::string& what) {
    if (!v.is_number()) fail(what + " must be a number");
    return v.get<double>();
}

double req_number(const json& obj, const std::string& where, const char* key) {
    return as_number(require(obj, where, key), where + "." + key);
}

std::int64_t as_integer(const json& v, const std::string& what) {
    if (!v.is_number_integer()) fail(what + " must be an integer");
    return v.get<std::int64_t>();
}

std::string as_string(const json& v, const std::string& what) {
    if (!v.is_string()) fail(what + " must be a string");
    return v.get<std::string>();
}

std::uint64_t as_uint(const json& v, const std::string& what) {
    const std::int64_t i = as_integer(v, what);
    if (i < 0) fail(what + " must be >= 0");
    return static_cast<std::uint64_t>(i);
}

LinkSpec parse_link(const json& j) {
    check_keys(j, "link",
               {"dispersion_ps_nm_km", "beta2_ps2_km", "wavelength_nm",
                "gamma_per_w_km", "attenuation_db_km", "span_length_km",
                "num_spans", "amplification", "noise_figure_db"});
    LinkSpec link;

    const bool has_d = j.contains("dispersion_ps_nm_km");
    const bool has_b2 = j.contains("beta2_ps2_km");
    if (has_d == has_b2)
        fail("link needs exactly one of dispersion_ps_nm_km or beta2_ps2_km");
    if (j.contains("wavelength_nm") && !has_d)
        fail("link.wavelength_nm is only meaningful with dispersion_ps_nm_km");
    if (has_d) {
        const double disp = as_number(j.at("dispersion_ps_nm_km"),
                                      "link.dispersion_ps_nm_km");
        double lambda_nm = 1550.0;
        if (j.contains("wavelength_nm"))
            lambda_nm = as_number(j.at("wavelength_nm"), "link.wavelength_nm");
        if (lambda_nm <= 0) fail("link.wavelength_nm must be > 0");
        link.fiber.beta2_s2_m = units::beta2_from_dispersion(disp, lambda_nm);
    } else {
        // 1 ps^2/km = 1e-27 s^2/m
        link.fiber.beta2_s2_m =
            as_number(j.at("beta2_ps2_km"), "link.beta2_ps2_km") * 1e-27;
    }

    link.fiber.gamma_per_w_m = req_number(j, "link", "gamma_per_w_km") * 1e-3;
    if (link.fiber.gamma_per_w_m < 0) fail("link.gamma_per_w_km must be >= 0");
    link.fiber.alpha_db_km = req_number(j, "link", "attenuation_db_km");
    if (link.fiber.alpha_db_km < 0) fail("link.attenuation_db_km must be >= 0");
    link.span_length_m = req_number(j, "link", "span_length_km") * 1e3;
    if (link.span_length_m <= 0) fail("link.span_length_km must be > 0");
    const std::int64_t spans =
        as_integer(require(j, "link", "num_spans"), "link.num_spans");
    if (spans < 1) fail("link.num_spans must be >= 1");
    link.num_spans = static_cast<int>(spans);

    link.amplification = amplification_from_string(
        as_string(require(j, "link", "amplification"), "link.amplification"));
    if (link.amplification == Amplification::Lumped) {
        link.noise_figure_db = req_number(j, "link", "noise_figure_db");
    } else if (j.contains("noise_figure_db")) {
        fail("link.noise_figure_db is only meaningful for lumped amplification");
    }
    return link;
}

void parse_grid(const json& j, WdmGrid& grid, std::vector<std::string>& refs) {
    check_keys(j, "grid",
               {"symbol_rate_gbaud", "channel_spacing_ghz", "num_channels",
                "power_dbm", "format"});
    grid.symbol_rate_baud = req_number(j, "grid", "symbol_rate_gbaud") * 1e9;
    if (grid.symbol_rate_baud <= 0) fail("grid.symbol_rate_gbaud must be > 0");
    const std::int64_t n =
        as_integer(require(j, "grid", "num_channels"), "grid.num_channels");
    if (n < 1) fail("grid.num_channels must be >= 1");
    grid.num_channels = static_cast<int>(n);
    grid.channel_spacing_hz = req_number(j, "grid", "channel_spacing_ghz") * 1e9;
    if (grid.num_channels > 1 && grid.channel_spacing_hz <= 0)
        fail("grid.channel_spacing_ghz must be > 0 for more than one channel");

    const json& power = require(j, "grid", "power_dbm");
    grid.power_w.clear();
    if (power.is_array()) {
        if (static_cast<int>(power.size()) != grid.num_channels)
            fail("grid.power_dbm array must have num_channels entries");
        for (const auto& v : power)
            grid.power_w.push_back(
                units::dbm_to_watt(as_number(v, "grid.power_dbm[]")));
    } else {
        grid.power_w.assign(static_cast<std::size_t>(grid.num_channels),
                            units::dbm_to_watt(as_number(power, "grid.power_dbm")));
    }

    const json& fmt = require(j, "grid", "format");
    refs.clear();
    if (fmt.is_array()) {
        if (static_cast<int>(fmt.size()) != grid.num_channels)
            fail("grid.format array must have num_channels entries");
        for (const auto& v : fmt) refs.push_back(as_string(v, "grid.format[]"));
    } else {
        refs.assign(static_cast<std::size_t>(grid.num_channels),
                    as_string(fmt, "grid.format"));
    }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root, "config",
               {"link", "grid", "mode", "coi", "integrator", "ssfm", "validate",
                "assumption_tol"});

    RunConfig cfg;
    cfg.base_dir = base_dir;
    cfg.link = parse_link(require(root, "config", "link"));
    parse_grid(require(root, "config", "grid"), cfg.grid, cfg.format_refs);

    if (root.contains("mode"))
        cfg.mode = model_mode_from_string(as_string(root.at("mode"), "mode"));

    if (root.contains("coi")) {
        const std::int64_t coi = as_integer(root.at("coi"), "coi");
        if (coi < 0 || coi > cfg.grid.num_channels)
            fail("coi must be between 0 (center) and num_channels");
        cfg.coi = static_cast<int>(coi);
    }

    if (root.contains("integrator")) {
        const json& ji = root.at("integrator");
        check_keys(ji, "integrator", {"seed", "budget_3d", "budget_4d", "budget_5d"});
        if (ji.contains("seed"))
            cfg.budgets.seed = as_uint(ji.at("seed"), "integrator.seed");
        if (ji.contains("budget_3d"))
            cfg.budgets.d3 = as_uint(ji.at("budget_3d"), "integrator.budget_3d");
        if (ji.contains("budget_4d"))
            cfg.budgets.d4 = as_uint(ji.at("budget_4d"), "integrator.budget_4d");
        if (ji.contains("budget_5d"))
            cfg.budgets.d5 = as_uint(ji.at("budget_5d"), "integrator.budget_5d");
    }

    if (root.contains("ssfm")) {
        const json& js = root.at("ssfm");
        check_keys(js, "ssfm",
                   {"num_symbols", "guard_symbols", "oversampling",
                    "max_nl_phase_mrad", "seed", "ase"});
        if (js.contains("num_symbols"))
            cfg.ssfm.num_symbols = as_uint(js.at("num_symbols"), "ssfm.num_symbols");
        if (js.contains("guard_symbols"))
            cfg.ssfm.guard_symbols =
                as_uint(js.at("guard_symbols"), "ssfm.guard_symbols");
        if (js.contains("oversampling")) {
            const std::int64_t os =
                as_integer(js.at("oversampling"), "ssfm.oversampling");
            if (os < 0) fail("ssfm.oversampling must be >= 0");
            cfg.ssfm.oversampling = static_cast<int>(os);
        }
        if (js.contains("max_nl_phase_mrad")) {
            const double mrad =
                as_number(js.at("max_nl_phase_mrad"), "ssfm.max_nl_phase_mrad");
            if (mrad <= 0) fail("ssfm.max_nl_phase_mrad must be > 0");
            cfg.ssfm.max_nl_phase_rad = mrad * 1e-3;
        }
        if (js.contains("seed")) cfg.ssfm.seed = as_uint(js.at("seed"), "ssfm.seed");
        if (js.contains("ase")) {
            if (!js.at("ase").is_boolean()) fail("ssfm.ase must be a boolean");
            cfg.ssfm.add_ase = js.at("ase").get<bool>();
        }
    }

    if (root.contains("validate")) {
        const json& jv = root.at("validate");
        check_keys(jv, "validate", {"tolerance_db"});
        if (jv.contains("tolerance_db")) {
            cfg.validate_tolerance_db =
                as_number(jv.at("tolerance_db"), "validate.tolerance_db");
            if (cfg.validate_tolerance_db <= 0)
                fail("validate.tolerance_db must be > 0");
        }
    }

    if (root.contains("assumption_tol")) {
        cfg.assumption_tol = as_number(root.at("assumption_tol"), "assumption_tol");
        if (cfg.assumption_tol <= 0) fail("assumption_tol must be > 0");
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str(),
                            std::filesystem::path(path).parent_path().string());
}

namespace {

// Loads a format reference at unit average power: a file path (relative paths
// resolve against the config directory), a builtin label, or "gaussian"
// (which has no point set).
Constellation4D load_reference(const std::string& ref, const std::string& base_dir) {
    namespace fs = std::filesystem;
    fs::path p(ref);
    if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
    if (fs::exists(p))
        return normalize_power(load_constellation_file(p.string()), 1.0);
    for (const auto& [label, make] : formats::all())
        if (label == ref) return normalize_power(make(), 1.0);
    fail("format \"" + ref + "\" is neither a readable file nor a builtin name");
}

}  // namespace

ChannelPlan resolve_plan(const RunConfig& cfg, bool force) {
    ChannelPlan plan;
    plan.grid = cfg.grid;
    plan.link = cfg.link;
    plan.mode = cfg.mode;
    plan.coi = cfg.coi == 0 ? cfg.grid.center_channel() : cfg.coi;

    std::map<std::string, Constellation4D> cache;
    for (int j = 0; j < cfg.grid.num_channels; ++j) {
        PlanChannel ch;
        ch.format_ref = cfg.format_refs[j];
        ch.power_w = cfg.grid.power_w[j];
        if (ch.format_ref == "gaussian") {
            ch.gaussian = true;
            ch.m = gaussian_moments();
        } else {
            auto it = cache.find(ch.format_ref);
            if (it == cache.end())
                it = cache.emplace(ch.format_ref,
                                   load_reference(ch.format_ref, cfg.base_dir))
                         .first;
            ch.constellation = normalize_power(it->second, ch.power_w);
            const AssumptionReport rep =
                validate_assumptions(ch.constellation, cfg.assumption_tol);
            if (!rep.model_eligible && !force) {
                std::string msg = "format \"" + ch.format_ref +
                                  "\" violates the model symmetry assumptions:";
                for (const auto& c : rep.checks)
                    if (!c.pass) msg += " " + c.name + ";";
                msg += " pass force=true to override";
                fail(msg);
            }
            ch.m = moments(ch.constellation);
        }
        plan.channels.push_back(std::move(ch));
    }
    return plan;
}

SimConfig make_sim_config(const RunConfig& cfg, const ChannelPlan& plan) {
    SimConfig sim;
    sim.grid = cfg.grid;
    sim.link = cfg.link;
    sim.settings = cfg.ssfm;
    for (const auto& ch : plan.channels) {
        if (ch.gaussian)
            fail("the waveform simulator needs a finite alphabet; channel format "
                 "\"gaussian\" cannot be simulated");
        sim.channel_formats.push_back(ch.constellation);
    }
    return sim;
}

}  // namespace nli4d
