#pragma once

// Built-in 4D modulation formats.  Coordinates are generated exactly from
// their defining structure (unit-grid QAM levels, unit-sphere packings,
// golden-ratio shell pairs, ...), unnormalized; use normalize_power() before
// feeding them to the model.  tools/gen_formats writes the same alphabets to
// data/formats/*.txt for use through the CLI.

#include <functional>
#include <string>
#include <vector>

#include "nli4d/constellation.hpp"

namespace nli4d::formats {

// Polarization-multiplexed square QAM (tensor product of two identical 2D
// constellations): 16, 256 and 4096 points.
Constellation4D pm_qpsk();
Constellation4D pm_16qam();
Constellation4D pm_64qam();

// The 8 points (+-1, 0, 0, 0), ..., (0, 0, 0, +-1) of the 4D cross-polytope.
Constellation4D biortho4_8();

// biortho4_8 plus the origin: 9 points, one of them dark.
Constellation4D tetra4_9();

// Set-orthogonal PM-QPSK: PM-QPSK plus a second PM-QPSK shell scaled by the
// golden ratio (32 points, two 4D amplitude levels).
Constellation4D so_pm_qpsk();

// Single-parity-check subset of PM-16QAM: the 128 points whose integer
// coordinates sum to 0 mod 4 (one 4D parity constraint).
Constellation4D sp_qam4_128();

// Polarization-alternating PSK rings: 8-PSK on x with y dark, plus 8-PSK on
// y with x dark (16 points); dicyclic4_24 uses 12-PSK rings.
Constellation4D dicyclic4_16();
Constellation4D dicyclic4_24();

// Two-amplitude 8PSK variant: 8PSK on both polarizations with
// anti-correlated ring radii (ring ratio r), 128 points.
Constellation4D a2_8psk(double ring_ratio = 0.65);

// label -> generator map for tools and tests.
const std::vector<std::pair<std::string, std::function<Constellation4D()>>>& all();

}  // namespace nli4d::formats
