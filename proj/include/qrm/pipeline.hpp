// Composition of the modules into the measurement pipeline: three evolutions
// for the central difference chi_g, the inverted-variance series, envelope
// maximum, and concurrent parameter sweeps.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qrm/fitting.hpp"
#include "qrm/metrology.hpp"

namespace qrm {

struct InitSpec {
    enum class Type { Standard, Squeezed, Custom };
    Type type = Type::Standard;
    double xi = 0.0;
    Vector amplitudes;
};

PureState make_initial_state(const InitSpec& spec, int trunc_dim);

// Predicts the Fock support needed for the evolution from the exact moment
// closure (two-photon runs use the undamped bound) and returns a truncation
// that keeps roughly support_sigmas standard deviations of the largest
// quadrature excursion inside the basis.
int recommend_trunc_dim(const ModelParams& model, const NoiseParams& noise,
                        const InitSpec& init, double t_max, double support_sigmas,
                        int n_min, int n_max);

struct PipelinePoint {
    ModelParams model;
    NoiseParams noise;
    InitSpec init;
    IntegratorConfig integrator;
    double delta_g = 1e-4;     // central-difference step for chi_g
    double support_sigmas = 5.0;
    int min_trunc_dim = 0;     // floor for auto truncation (0 = spec default)
    int max_trunc_dim = 320;
};

struct PipelineResult {
    FgSeries series;
    // Envelope maximum; absent when the peak fell at the end of the horizon
    // (noise-free runs diverge), with the guard's message in max_error.
    std::optional<MaxResult> max;
    std::string max_error;
    Trajectory nominal;   // trajectory at the nominal g
    int trunc_dim = 0;
    double max_tail = 0.0;
    double max_trace_dev = 0.0;
    double max_herm_dev = 0.0;
    double min_eigenvalue = 0.0;
    double elapsed_seconds = 0.0;
};

// Resolves the truncation (auto when model.trunc_dim == 0), evolves at
// g - dg, g, g + dg with a shared initial state, and assembles F_g.
// workers > 1 runs the three evolutions concurrently.
PipelineResult run_fg_pipeline(const PipelinePoint& point, int workers = 1);

enum class SweepAxis { Kappa, G, Nbar, Xi };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

struct SweepSpec {
    SweepAxis axis = SweepAxis::Kappa;
    std::vector<double> values;
};

struct SweepRecord {
    double axis_value = 0.0;
    double fg_max = 0.0;
    double t_star = 0.0;
    int trunc_dim = 0;
    double max_tail = 0.0;
    double max_trace_dev = 0.0;
    double max_herm_dev = 0.0;
    double min_eigenvalue = 0.0;
};

// Applies the axis value to a copy of the base point.
PipelinePoint apply_axis(const PipelinePoint& base, SweepAxis axis, double value);

// Runs the sweep points concurrently (up to `workers` threads), preserving
// input order. A failing point aborts the sweep after in-flight points drain;
// the error is rethrown annotated with the offending axis value.
std::vector<SweepRecord> run_sweep(const PipelinePoint& base, const SweepSpec& sweep,
                                   int workers, bool quiet);

} // namespace qrm
