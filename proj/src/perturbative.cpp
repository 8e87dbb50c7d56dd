#include "qnmqed/perturbative.hpp"

#include <cmath>

namespace qnmqed::pert {

std::pair<double, double> bs_energies(double omega0, double eta_abs) {
    if (eta_abs < 0.0) throw std::invalid_argument("bs_energies: eta_abs must be >= 0");
    const double split = omega0 * eta_abs * std::sqrt(1.0 + 2.25 * eta_abs * eta_abs);
    return {omega0 - split, omega0 + split};
}

std::pair<double, double> bs_linewidths(const qnm::QnmParams& p, double eta_abs) {
    if (eta_abs < 0.0) throw std::invalid_argument("bs_linewidths: eta_abs must be >= 0");
    const double half_kappa = 0.5 * p.kappa_c();
    const double asym =
        0.5 * eta_abs * (1.0 - 4.0 * p.q_factor() * std::tan(2.0 * p.phi0));
    return {half_kappa * (1.0 - asym), half_kappa * (1.0 + asym)};
}

BsResult bs_result(const qnm::QnmParams& p, double omega0, double eta_abs) {
    BsResult r;
    std::tie(r.e_minus, r.e_plus) = bs_energies(omega0, eta_abs);
    std::tie(r.gamma_minus, r.gamma_plus) = bs_linewidths(p, eta_abs);
    return r;
}

double symmetric_phase(double q_factor) {
    if (!(q_factor > 0.0)) throw std::invalid_argument("symmetric_phase: Q must be > 0");
    return 0.5 * std::atan(1.0 / (4.0 * q_factor));
}

double symmetric_phase_small_angle(double q_factor) {
    if (!(q_factor > 0.0)) {
        throw std::invalid_argument("symmetric_phase_small_angle: Q must be > 0");
    }
    return 1.0 / (8.0 * q_factor);
}

}  // namespace qnmqed::pert
