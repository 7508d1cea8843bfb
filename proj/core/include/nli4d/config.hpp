#pragma once

// JSON run configuration: the only boundary where engineering units
// (ps/nm/km, dB/km, GBd, GHz, dBm) appear.  Parsing is strict - unknown keys
// are rejected so a typo cannot silently fall back to a default.

#include <string>
#include <vector>

#include "nli4d/integrator.hpp"
#include "nli4d/link.hpp"
#include "nli4d/nli.hpp"
#include "nli4d/ssfm.hpp"

namespace nli4d {

struct RunConfig {
    LinkSpec link;
    WdmGrid grid;
    // Per-channel format reference: a constellation file path (relative to
    // the config file) or the reserved name "gaussian".
    std::vector<std::string> format_refs;
    ModelMode mode = ModelMode::FourD;
    IntegratorBudgets budgets;
    SsfmSettings ssfm;
    int coi = 0;  // 1-based; 0 = center channel
    double assumption_tol = 1e-9;
    double validate_tolerance_db = 0.5;
    std::string base_dir;  // directory of the config file
};

// Loads and validates a config file.  Throws ConfigError on I/O problems,
// malformed JSON, unknown keys, missing required keys or inconsistent values.
RunConfig load_run_config(const std::string& path);

// Parses a config from JSON text (base_dir resolves relative format paths).
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir);

// Loads the per-channel constellations, normalizes them to their launch
// power and verifies the model assumptions.  A channel failing the
// assumption checks throws ConfigError unless force is set.
ChannelPlan resolve_plan(const RunConfig& cfg, bool force = false);

// Builds the simulator configuration for the same plan.  Throws ConfigError
// when a channel uses the "gaussian" reference (it has no alphabet to draw
// symbols from).
SimConfig make_sim_config(const RunConfig& cfg, const ChannelPlan& plan);

}  // namespace nli4d
