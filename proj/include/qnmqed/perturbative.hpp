// perturbative.hpp — closed-form Bloch-Siegert results for the resonant
// TLS-cavity system under weak excitation: dressed doublet energies, the
// two dominant spectral linewidths, and the symmetric-linewidth phase.

#pragma once

#include "qnmqed/qnm.hpp"

#include <utility>

namespace qnmqed::pert {

struct BsResult {
    double e_minus = 0.0;  // eV, relative to ground
    double e_plus = 0.0;
    double gamma_minus = 0.0;  // FWHM, eV
    double gamma_plus = 0.0;
};

// Resonant doublet energies E_± = w0 ± w0 |eta| sqrt(1 + (9/4) |eta|^2).
std::pair<double, double> bs_energies(double omega0, double eta_abs);

// Linewidths of the dominant two peaks,
// Gamma_± = (kappa/2) [1 ± (|eta|/2)(1 - 4 Q tan(2 phi0))];
// '+' labels the higher-energy (blue) peak.
std::pair<double, double> bs_linewidths(const qnm::QnmParams& p, double eta_abs);

BsResult bs_result(const qnm::QnmParams& p, double omega0, double eta_abs);

// Phase at which the linewidth asymmetry vanishes to leading order:
// phi0* = atan(1/(4 Q)) / 2 (exact solution of 4 Q tan(2 phi0*) = 1).
double symmetric_phase(double q_factor);

// Large-Q limit 1/(8 Q) of symmetric_phase.
double symmetric_phase_small_angle(double q_factor);

}  // namespace qnmqed::pert
