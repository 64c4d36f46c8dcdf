// Scenario configuration: flat key=value files with dotted keys, '#' comments,
// unknown keys rejected.
#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "qrm/pipeline.hpp"

namespace qrm {

enum class FitAbscissa { Axis, DeltaGap, KT };

struct FitStage {
    bool enabled = false;
    FitAbscissa abscissa = FitAbscissa::Axis;
};

struct Scenario {
    PipelinePoint point;
    std::optional<SweepSpec> sweep;
    FitStage fit;
    std::string output_dir = ".";
    int workers = 0; // 0 = hardware concurrency

    void validate() const;
};

Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

// The fully resolved configuration as one "key=value ..." line (recorded as a
// comment in every CSV this scenario produces).
std::string describe_scenario(const Scenario& scenario);

} // namespace qrm
