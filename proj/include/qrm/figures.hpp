// Figure-reproduction pipelines: parameter presets, CSV and SVG emission.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qrm/pipeline.hpp"

namespace qrm {

// Known ids: fig1a fig1b fig2a fig2b fig4a fig4b fig5a fig5b fig7a fig7b.
std::vector<std::string> known_figures();

// Runs the figure's parameter set and writes <id>.csv, <id>.svg and, for the
// scaling figures, <id>_fit.csv into out_dir. Returns the written file paths.
std::vector<std::filesystem::path> reproduce(const std::string& figure_id,
                                             const std::filesystem::path& out_dir,
                                             int workers, bool quiet);

} // namespace qrm
