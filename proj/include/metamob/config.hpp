#pragma once

#include "metamob/report.hpp"
#include "metamob/sim.hpp"

namespace metamob {

struct RunConfig {
    SimConfig sim;
    std::string out;  // optional output path carried in the document
};

/// Parse the simulate config document. Every key is optional (paper-scale
/// defaults apply); unknown keys are rejected with a ConfigError naming the
/// key. With a grid and no explicit "locations", the cell count is used.
RunConfig run_config_from_json(const std::string& text);

std::string run_config_to_json(const RunConfig& cfg);

/// Parse analyze options (grid, window, top_fraction, teleport_threshold,
/// curves_dir). Unknown keys rejected.
AnalyzeOptions analyze_options_from_json(const std::string& text);

}  // namespace metamob
