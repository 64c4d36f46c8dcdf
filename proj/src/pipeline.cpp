#include "qrm/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

namespace qrm {

PureState make_initial_state(const InitSpec& spec, int trunc_dim) {
    switch (spec.type) {
    case InitSpec::Type::Standard:
        return standard_initial_state(trunc_dim);
    case InitSpec::Type::Squeezed:
        return squeeze_state(standard_initial_state(trunc_dim), spec.xi);
    case InitSpec::Type::Custom: {
        if (spec.amplitudes.size() < 2) {
            throw InvalidParameter("custom initial state needs at least 2 amplitudes");
        }
        if (spec.amplitudes.size() > trunc_dim) {
            throw InvalidParameter("custom initial state longer than trunc_dim");
        }
        Vector amp = Vector::Zero(trunc_dim);
        amp.head(spec.amplitudes.size()) = spec.amplitudes;
        const double norm = amp.norm();
        if (!(norm > 0.0)) {
            throw InvalidParameter("custom initial state has zero norm");
        }
        amp /= norm;
        return PureState{std::move(amp)};
    }
    }
    throw InvalidParameter("unknown init type");
}

namespace {

InitialConditions init_conditions(const InitSpec& spec) {
    // Moments of the initial state; a modest basis is enough for preparation.
    ModelParams probe;
    probe.trunc_dim = 160;
    const OperatorSet ops = build_operators(probe);
    const PureState psi = make_initial_state(spec, probe.trunc_dim);
    return InitialConditions::from_state(psi, ops);
}

} // namespace

int recommend_trunc_dim(const ModelParams& model, const NoiseParams& noise,
                        const InitSpec& init, double t_max, double support_sigmas,
                        int n_min, int n_max) {
    const InitialConditions ic = init_conditions(init);

    // Two-photon relaxation has no moment closure; the undamped system bounds
    // its quadrature excursions from above.
    NoiseParams probe = noise;
    if (noise.kind == RelaxationKind::TwoPhoton) {
        probe.kind = RelaxationKind::SinglePhoton;
        probe.kappa = 0.0;
        probe.nbar = 0.0;
        t_max = std::min(t_max, 4.0 * M_PI / (std::sqrt(model.gap()) * model.omega));
    }

    std::vector<double> grid(801);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = t_max * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
    }
    const std::vector<MomentVector> ms = evolve_moments(ic, model, probe, grid);

    double need = 0.0;
    for (const MomentVector& m : ms) {
        const double vx = m.var_x();
        const double vp = m.var_p();
        const double cov = 0.5 * m.eg - m.ex * m.ep;
        const double mid = 0.5 * (vx + vp);
        const double dev = std::sqrt(0.25 * (vx - vp) * (vx - vp) + cov * cov);
        const double sigma = std::sqrt(std::max(mid + dev, 0.0));
        const double disp = std::sqrt(m.ex * m.ex + m.ep * m.ep);
        const double radius = disp + support_sigmas * sigma;
        need = std::max(need, 0.5 * radius * radius);
    }
    const int n = static_cast<int>(std::ceil(need)) + 10;
    if (n > n_max) {
        throw TruncationOverflow("recommend_trunc_dim: predicted Fock support " +
                                 std::to_string(n) + " exceeds the cap " +
                                 std::to_string(n_max));
    }
    return std::max(n, n_min);
}

namespace {

int resolve_trunc_dim(const PipelinePoint& point, double t_max) {
    if (point.model.trunc_dim > 0) {
        return point.model.trunc_dim;
    }
    int floor = point.min_trunc_dim;
    if (floor <= 0) {
        floor = point.noise.nbar <= 1.0 ? 60 : 100;
    }
    return recommend_trunc_dim(point.model, point.noise, point.init, t_max,
                               point.support_sigmas, floor, point.max_trunc_dim);
}

} // namespace

PipelineResult run_fg_pipeline(const PipelinePoint& point, int workers) {
    const auto t_begin = std::chrono::steady_clock::now();
    point.noise.validate();
    point.integrator.validate();
    if (!(point.delta_g > 0.0)) {
        throw InvalidParameter("run_fg_pipeline: delta_g must be positive");
    }
    if (point.model.g - point.delta_g < 0.0 || point.model.g + point.delta_g >= 1.0) {
        throw InvalidParameter("run_fg_pipeline: g +/- delta_g leaves the normal phase");
    }

    IntegratorConfig cfg = point.integrator;
    if (cfg.t_max <= 0.0) {
        cfg.t_max = default_horizon(point.noise, point.model.omega);
    }
    const int dim = resolve_trunc_dim(point, cfg.t_max);

    const double gs[3] = {point.model.g - point.delta_g, point.model.g,
                          point.model.g + point.delta_g};
    Trajectory trajs[3];
    std::exception_ptr errors[3] = {nullptr, nullptr, nullptr};

    auto run_one = [&](int k) {
        try {
            ModelParams mp = point.model;
            mp.g = gs[k];
            mp.trunc_dim = dim;
            const OperatorSet ops = build_operators(mp);
            const PureState psi = make_initial_state(point.init, dim);
            trajs[k] = evolve(DensityMatrix::from_pure(psi), ops, point.noise, cfg);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    };

    if (workers > 1) {
        std::vector<std::thread> pool;
        for (int k = 0; k < 3; ++k) {
            pool.emplace_back(run_one, k);
        }
        for (auto& th : pool) {
            th.join();
        }
    } else {
        for (int k = 0; k < 3; ++k) {
            run_one(k);
        }
    }
    for (const auto& err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }

    PipelineResult result;
    result.trunc_dim = dim;
    const std::vector<double> chi = chi_g(trajs[0], trajs[1], trajs[2], point.delta_g);
    result.series = inverted_variance(trajs[1].times, chi, trajs[1].var_x_series());
    try {
        result.max = max_inverted_variance(result.series);
    } catch (const PeakAtBoundary& e) {
        result.max_error = e.what();
    }
    for (const Trajectory& tr : trajs) {
        for (const SampleDiagnostics& d : tr.diagnostics) {
            result.max_tail = std::max(result.max_tail, d.tail_pop);
            result.max_trace_dev = std::max(result.max_trace_dev, d.trace_dev);
            result.max_herm_dev = std::max(result.max_herm_dev, d.herm_dev);
        }
        result.min_eigenvalue = std::min(result.min_eigenvalue, tr.min_eigenvalue);
    }
    result.nominal = std::move(trajs[1]);
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return result;
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::Kappa: return "kappa";
    case SweepAxis::G: return "g";
    case SweepAxis::Nbar: return "nbar";
    case SweepAxis::Xi: return "xi";
    }
    return "?";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
    if (name == "kappa") return SweepAxis::Kappa;
    if (name == "g") return SweepAxis::G;
    if (name == "nbar") return SweepAxis::Nbar;
    if (name == "xi") return SweepAxis::Xi;
    throw InvalidParameter("unknown sweep axis '" + name + "'");
}

PipelinePoint apply_axis(const PipelinePoint& base, SweepAxis axis, double value) {
    PipelinePoint point = base;
    switch (axis) {
    case SweepAxis::Kappa:
        point.noise.kappa = value;
        break;
    case SweepAxis::G:
        point.model.g = value;
        break;
    case SweepAxis::Nbar:
        point.noise.nbar = value;
        break;
    case SweepAxis::Xi:
        point.init.type = InitSpec::Type::Squeezed;
        point.init.xi = value;
        break;
    }
    return point;
}

std::vector<SweepRecord> run_sweep(const PipelinePoint& base, const SweepSpec& sweep,
                                   int workers, bool quiet) {
    if (sweep.values.empty()) {
        throw InvalidParameter("run_sweep: empty sweep value list");
    }
    const std::size_t count = sweep.values.size();
    std::vector<SweepRecord> records(count);
    std::vector<std::exception_ptr> failures(count);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::mutex io_mutex;

    auto work = [&]() {
        while (!abort.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                const PipelinePoint point = apply_axis(base, sweep.axis, sweep.values[i]);
                const PipelineResult res = run_fg_pipeline(point);
                if (!res.max) {
                    throw PeakAtBoundary(res.max_error);
                }
                records[i] = SweepRecord{sweep.values[i], res.max->fg_max,  res.max->t_star,
                                         res.trunc_dim,   res.max_tail,     res.max_trace_dev,
                                         res.max_herm_dev, res.min_eigenvalue};
                if (!quiet) {
                    std::lock_guard<std::mutex> lock(io_mutex);
                    std::fprintf(stderr, "  %s=%g fg_max=%.6g t*=%.4g (N=%d, %.1fs)\n",
                                 to_string(sweep.axis).c_str(), sweep.values[i],
                                 res.max->fg_max, res.max->t_star, res.trunc_dim,
                                 res.elapsed_seconds);
                }
            } catch (...) {
                failures[i] = std::current_exception();
                abort.store(true);
                return;
            }
        }
    };

    const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    std::vector<std::thread> pool;
    for (int k = 0; k < n_threads; ++k) {
        pool.emplace_back(work);
    }
    for (auto& th : pool) {
        th.join();
    }

    for (std::size_t i = 0; i < count; ++i) {
        if (failures[i]) {
            const std::string where = "sweep point " + to_string(sweep.axis) + "=" +
                                      std::to_string(sweep.values[i]) + ": ";
            try {
                std::rethrow_exception(failures[i]);
            } catch (const PeakAtBoundary& e) {
                throw PeakAtBoundary(where + e.what());
            } catch (const TruncationOverflow& e) {
                throw TruncationOverflow(where + e.what());
            } catch (const StepFailure& e) {
                throw StepFailure(where + e.what());
            } catch (const Error& e) {
                throw Error(where + e.what());
            }
        }
    }
    return records;
}

} // namespace qrm
