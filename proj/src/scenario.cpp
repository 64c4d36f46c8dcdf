#include "qrm/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace qrm {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value, int line) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError("config line " + std::to_string(line) + ": key '" + key +
                          "' has non-numeric value '" + value + "'", key, line);
    }
    if (used != value.size()) {
        throw ConfigError("config line " + std::to_string(line) + ": key '" + key +
                          "' has trailing junk in '" + value + "'", key, line);
    }
    return out;
}

int parse_int(const std::string& key, const std::string& value, int line) {
    const double d = parse_double(key, value, line);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d) {
        throw ConfigError("config line " + std::to_string(line) + ": key '" + key +
                          "' must be an integer, got '" + value + "'", key, line);
    }
    return i;
}

bool parse_bool(const std::string& key, const std::string& value, int line) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config line " + std::to_string(line) + ": key '" + key +
                      "' must be true/false, got '" + value + "'", key, line);
}

std::vector<double> parse_list(const std::string& key, const std::string& value, int line) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(parse_double(key, item, line));
        }
    }
    if (out.empty()) {
        throw ConfigError("config line " + std::to_string(line) + ": key '" + key +
                          "' has an empty list", key, line);
    }
    return out;
}

// Complex amplitudes as comma-separated re:im pairs, e.g. "0.707:0,0:0.707".
Vector parse_amplitudes(const std::string& key, const std::string& value, int line) {
    std::vector<Complex> amps;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            continue;
        }
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            amps.emplace_back(parse_double(key, item, line), 0.0);
        } else {
            amps.emplace_back(parse_double(key, item.substr(0, colon), line),
                              parse_double(key, item.substr(colon + 1), line));
        }
    }
    Vector v(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = amps[i];
    }
    return v;
}

} // namespace

Scenario parse_scenario_text(const std::string& text) {
    Scenario sc;
    sc.point.model.trunc_dim = 0; // auto unless set explicitly

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::map<std::string, int> seen;
    std::optional<SweepAxis> sweep_axis;
    std::vector<double> sweep_values;

    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key=value, got '" + line + "'", line, line_no);
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": empty key or value", key, line_no);
        }
        if (seen.count(key)) {
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" +
                              key + "' (first at line " + std::to_string(seen[key]) + ")",
                              key, line_no);
        }
        seen[key] = line_no;

        if (key == "model.g") {
            sc.point.model.g = parse_double(key, value, line_no);
        } else if (key == "model.omega") {
            sc.point.model.omega = parse_double(key, value, line_no);
        } else if (key == "model.trunc_dim") {
            sc.point.model.trunc_dim = parse_int(key, value, line_no);
        } else if (key == "noise.kappa") {
            sc.point.noise.kappa = parse_double(key, value, line_no);
        } else if (key == "noise.nbar") {
            sc.point.noise.nbar = parse_double(key, value, line_no);
        } else if (key == "noise.kind") {
            if (value == "single_photon") {
                sc.point.noise.kind = RelaxationKind::SinglePhoton;
            } else if (value == "two_photon") {
                sc.point.noise.kind = RelaxationKind::TwoPhoton;
            } else {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": noise.kind must be single_photon or two_photon",
                                  key, line_no);
            }
        } else if (key == "init.type") {
            if (value == "standard") {
                sc.point.init.type = InitSpec::Type::Standard;
            } else if (value == "squeezed") {
                sc.point.init.type = InitSpec::Type::Squeezed;
            } else if (value == "custom") {
                sc.point.init.type = InitSpec::Type::Custom;
            } else {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": init.type must be standard, squeezed or custom",
                                  key, line_no);
            }
        } else if (key == "init.xi") {
            sc.point.init.xi = parse_double(key, value, line_no);
        } else if (key == "init.amplitudes") {
            sc.point.init.amplitudes = parse_amplitudes(key, value, line_no);
        } else if (key == "integrator.rel_tol") {
            sc.point.integrator.rel_tol = parse_double(key, value, line_no);
        } else if (key == "integrator.abs_tol") {
            sc.point.integrator.abs_tol = parse_double(key, value, line_no);
        } else if (key == "integrator.t_max") {
            sc.point.integrator.t_max = parse_double(key, value, line_no);
        } else if (key == "integrator.n_samples") {
            sc.point.integrator.n_samples = parse_int(key, value, line_no);
        } else if (key == "integrator.tail_tol") {
            sc.point.integrator.tail_tol = parse_double(key, value, line_no);
        } else if (key == "metrology.delta_g") {
            sc.point.delta_g = parse_double(key, value, line_no);
        } else if (key == "run.support_sigmas") {
            sc.point.support_sigmas = parse_double(key, value, line_no);
        } else if (key == "run.max_trunc_dim") {
            sc.point.max_trunc_dim = parse_int(key, value, line_no);
        } else if (key == "run.workers") {
            sc.workers = parse_int(key, value, line_no);
        } else if (key == "sweep.axis") {
            try {
                sweep_axis = sweep_axis_from_string(value);
            } catch (const Error& e) {
                throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what(),
                                  key, line_no);
            }
        } else if (key == "sweep.values") {
            sweep_values = parse_list(key, value, line_no);
        } else if (key == "fit.enabled") {
            sc.fit.enabled = parse_bool(key, value, line_no);
        } else if (key == "fit.abscissa") {
            if (value == "axis") {
                sc.fit.abscissa = FitAbscissa::Axis;
            } else if (value == "delta_gap") {
                sc.fit.abscissa = FitAbscissa::DeltaGap;
            } else if (value == "kt") {
                sc.fit.abscissa = FitAbscissa::KT;
            } else {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": fit.abscissa must be axis, delta_gap or kt", key, line_no);
            }
        } else if (key == "output.dir") {
            sc.output_dir = value;
        } else {
            throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" +
                              key + "'", key, line_no);
        }
    }

    if (sweep_axis.has_value() != !sweep_values.empty()) {
        throw ConfigError("sweep.axis and sweep.values must be given together", "sweep.axis", 0);
    }
    if (sweep_axis) {
        sc.sweep = SweepSpec{*sweep_axis, std::move(sweep_values)};
    }
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'", path.string(), 0);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario_text(buffer.str());
}

namespace {

void check_value(bool ok, const std::string& key, const std::string& why) {
    if (!ok) {
        throw ConfigError("invalid value for key '" + key + "': " + why, key, 0);
    }
}

void check_axis_value(SweepAxis axis, double v) {
    switch (axis) {
    case SweepAxis::Kappa:
        check_value(v >= 0.0, "sweep.values", "kappa must be non-negative");
        break;
    case SweepAxis::G:
        check_value(v >= 0.0 && v < 1.0, "sweep.values", "g must lie in [0, 1)");
        break;
    case SweepAxis::Nbar:
        check_value(v >= 0.0, "sweep.values", "nbar must be non-negative");
        break;
    case SweepAxis::Xi:
        check_value(v >= 0.0, "sweep.values", "xi must be non-negative");
        break;
    }
}

} // namespace

void Scenario::validate() const {
    check_value(point.model.omega > 0.0, "model.omega", "must be positive");
    check_value(point.model.g >= 0.0 && point.model.g < 1.0, "model.g",
                "must lie in [0, 1) (normal phase)");
    check_value(point.model.trunc_dim == 0 || point.model.trunc_dim >= 2, "model.trunc_dim",
                "must be >= 2 (or 0 for automatic)");
    check_value(point.noise.kappa >= 0.0, "noise.kappa", "must be non-negative");
    check_value(point.noise.nbar >= 0.0, "noise.nbar", "must be non-negative");
    check_value(point.init.xi >= 0.0, "init.xi", "must be non-negative");
    check_value(point.integrator.rel_tol > 0.0, "integrator.rel_tol", "must be positive");
    check_value(point.integrator.abs_tol > 0.0, "integrator.abs_tol", "must be positive");
    check_value(point.integrator.n_samples >= 2, "integrator.n_samples", "must be >= 2");
    check_value(point.integrator.tail_tol > 0.0, "integrator.tail_tol", "must be positive");
    check_value(point.delta_g > 0.0, "metrology.delta_g", "must be positive");
    check_value(point.support_sigmas > 0.0, "run.support_sigmas", "must be positive");
    check_value(workers >= 0, "run.workers", "must be non-negative");
    if (sweep) {
        check_value(!sweep->values.empty(), "sweep.values", "must be non-empty");
        for (double v : sweep->values) {
            check_axis_value(sweep->axis, v);
        }
    }
    if (fit.enabled) {
        check_value(sweep.has_value(), "fit.enabled", "fit stage requires a sweep");
        check_value(sweep->values.size() >= 3, "fit.enabled", "fit stage needs >= 3 points");
    }
}

std::string describe_scenario(const Scenario& sc) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "model.g=%g model.omega=%g model.trunc_dim=%d noise.kappa=%g noise.nbar=%g "
                  "noise.kind=%s init.type=%s init.xi=%g integrator.rel_tol=%g "
                  "integrator.abs_tol=%g integrator.t_max=%g integrator.n_samples=%d "
                  "integrator.tail_tol=%g metrology.delta_g=%g",
                  sc.point.model.g, sc.point.model.omega, sc.point.model.trunc_dim,
                  sc.point.noise.kappa, sc.point.noise.nbar,
                  to_string(sc.point.noise.kind).c_str(),
                  sc.point.init.type == InitSpec::Type::Standard   ? "standard"
                  : sc.point.init.type == InitSpec::Type::Squeezed ? "squeezed"
                                                                   : "custom",
                  sc.point.init.xi, sc.point.integrator.rel_tol, sc.point.integrator.abs_tol,
                  sc.point.integrator.t_max, sc.point.integrator.n_samples,
                  sc.point.integrator.tail_tol, sc.point.delta_g);
    std::string out(buf);
    if (sc.sweep) {
        out += " sweep.axis=" + to_string(sc.sweep->axis) + " sweep.values=";
        for (std::size_t i = 0; i < sc.sweep->values.size(); ++i) {
            if (i) {
                out += ",";
            }
            std::snprintf(buf, sizeof(buf), "%g", sc.sweep->values[i]);
            out += buf;
        }
    }
    if (sc.fit.enabled) {
        out += " fit.enabled=true fit.abscissa=";
        out += sc.fit.abscissa == FitAbscissa::Axis       ? "axis"
               : sc.fit.abscissa == FitAbscissa::DeltaGap ? "delta_gap"
                                                          : "kt";
    }
    return out;
}

} // namespace qrm
