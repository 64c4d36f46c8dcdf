#pragma once

#include <string>

#include "qrm/errors.hpp"

namespace qrm {

enum class RelaxationKind { SinglePhoton, TwoPhoton };

std::string to_string(RelaxationKind kind);

// Thermal reservoir coupling: gamma_a = kappa (nbar + 1), gamma_h = kappa nbar,
// so gamma_a - gamma_h = kappa and gamma_a + gamma_h = kappa (2 nbar + 1).
struct NoiseParams {
    double kappa = 0.0; // zero-temperature decay rate, units of omega
    double nbar = 0.0;  // mean thermal photon number
    RelaxationKind kind = RelaxationKind::SinglePhoton;

    double gamma_a() const { return kappa * (nbar + 1.0); }
    double gamma_h() const { return kappa * nbar; }

    void validate() const {
        if (kappa < 0.0) {
            throw InvalidParameter("NoiseParams: kappa must be non-negative");
        }
        if (nbar < 0.0) {
            throw InvalidParameter("NoiseParams: nbar must be non-negative");
        }
    }
};

struct IntegratorConfig {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double t_max = 0.0;    // horizon; <= 0 selects min(8/kappa, 2000/omega)
    int n_samples = 4000;  // output grid size
    double tail_tol = 1e-6; // top-decile Fock population guard

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
            throw InvalidParameter("IntegratorConfig: tolerances must be positive");
        }
        if (n_samples < 2) {
            throw InvalidParameter("IntegratorConfig: n_samples must be >= 2");
        }
        if (!(tail_tol > 0.0)) {
            throw InvalidParameter("IntegratorConfig: tail_tol must be positive");
        }
    }
};

} // namespace qrm
