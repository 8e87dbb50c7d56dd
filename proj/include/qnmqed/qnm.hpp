// qnm.hpp — single quasinormal-mode parameters and the closed-form scalar
// quantities built from them: zeta lineshape factor, loss spectral densities,
// broadband/validity criteria, Purcell rates, and coupling-strength estimates.
//
// Unit convention: every frequency, rate, and energy is stored as hbar*omega
// in eV.  Conversions to SI angular frequency happen only inside
// free_space_rate and purcell_rate_multimode.

#pragma once

#include "qnmqed/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qnmqed::qnm {

// One QNM: complex eigenfrequency omega_c - i*gamma_c, projected phase phi0
// at the emitter location, and (optionally) the projected field amplitude
// there in m^-3/2.
struct QnmParams {
    std::string label;
    double omega_c = 0.0;  // eV
    double gamma_c = 0.0;  // eV, half-width, > 0
    double phi0 = 0.0;     // rad, |phi0| < pi/8
    std::optional<cplx> f_amp;  // m^-3/2
    std::string notes;

    double q_factor() const { return omega_c / (2.0 * gamma_c); }
    double kappa_c() const { return 2.0 * gamma_c; }
};

// Validates invariants (gamma_c > 0, omega_c > 0, |phi0| < pi/8) and returns
// the value.  Throws std::invalid_argument on violation.
QnmParams make_qnm_params(QnmParams p);

// JSON parameter file: keys {label, omega_c_eV, gamma_c_eV,
// phi0_rad OR tan_2phi0 (exactly one), f_amp_re, f_amp_im, notes}.
// Unknown keys are rejected.
QnmParams load_qnm_file(const std::string& path);
QnmParams parse_qnm_json(const std::string& text, const std::string& origin);

// zeta_c(phi0, omega) = 1 - 2 Q_c tan(2 phi0) (omega/omega_c - 1).
// Affine in omega; may legitimately go negative (handled downstream).
double zeta_factor(const QnmParams& p, double omega);

enum class DensityKind { AbInitio, PowerLaw, Flat };

// Loss spectral density Lambda^2(omega) of the lossy cavity mode:
//   AbInitio     (gamma_c/pi) (omega_c/omega) zeta_c(phi0, omega)
//   PowerLaw(n)  (kappa_c/2pi) (omega/omega_c)^n [zeta_c if zeta_enabled]
//   Flat         kappa_c/2pi
// AbInitio is identical to PowerLaw(-1) with zeta enabled; the constructor
// enforces that identity.
struct SpectralDensityModel {
    DensityKind kind = DensityKind::AbInitio;
    int exponent = -1;
    bool zeta_enabled = true;
    QnmParams params;

    static SpectralDensityModel ab_initio(const QnmParams& p);
    static SpectralDensityModel power_law(const QnmParams& p, int n, bool zeta);
    static SpectralDensityModel flat(const QnmParams& p);
};

// Lambda^2 can be negative (single-mode breakdown); the flag lets callers
// raise or clamp per policy.
struct SpectralSample {
    double value = 0.0;
    bool negative = false;
};

double spectral_density(const SpectralDensityModel& m, double omega);
SpectralSample spectral_sample(const SpectralDensityModel& m, double omega);

// Broadband-regime onset Omega_BB = 0.1 * min{1, |1 - 4 Q_c tan(2 phi0)|^-1}.
// A degenerate denominator returns the unclamped 0.1 and sets the flag.
struct BroadbandThreshold {
    double value = 0.1;
    bool degenerate_denominator = false;
};
BroadbandThreshold broadband_threshold(const QnmParams& p);

// First-order single-mode validity bound |eta_c^(1)| = 1/|2 Q_c tan(2 phi0)|.
// Returns +infinity for phi0 = 0 (bound is not phase-limited there).
double eta_max_first_order(const QnmParams& p);

// Normalized coupling estimate |eta_c| ~= 9.5e-14 eV^-1/2 m^3/2 *
// (d/d0) * |f_c| / sqrt(omega_c[eV]), with d0 = 1 e*nm.
double eta_from_field(double f_amp_modulus, double omega_c_ev, double d_over_d0);

// Frequency-dependent QNM expansion coefficient
// A_c(omega) = omega / (2 (omega_tilde_c - omega)), omega_tilde = omega_c - i gamma_c.
cplx qnm_expansion_coefficient(const QnmParams& p, double omega);

// Purcell-enhanced decay rate of a weakly coupled dipole versus its
// transition frequency omega0, in the units of g_dipole_mag^2/kappa:
// gamma(omega0) = (4 g^2/kappa) (omega0/omega_c) Lor(omega0) zeta_c(phi0, omega0).
double purcell_rate_single(const QnmParams& p, double g_dipole_mag, double omega0);

// Multimode decay rate from projected QNM fields (SI): dipole_mag in C*m,
// fields in m^-3/2, result in 1/s.
// gamma(omega0) = sum_mu (2 d^2 |f_mu|^2 / (hbar eps0)) Im{A_mu(omega0) e^{2 i phi_mu}}.
struct ProjectedMode {
    QnmParams params;
    cplx field;  // m^-3/2, phase included
};
double purcell_rate_multimode(const std::vector<ProjectedMode>& modes, double dipole_mag,
                              double omega0);

// Lorentzian reference L_c(omega) = gamma_peak * (k^2/4)/((k^2/4)+(omega-omega_c)^2).
double lorentzian_norm(const QnmParams& p, double gamma_at_peak, double omega);

// Free-space decay rate gamma0 = d^2 omega^3 / (3 pi eps0 hbar c^3) in SI
// (dipole_mag in C*m, omega in rad/s, result 1/s).
double free_space_rate(double dipole_mag, double omega_rad_s);

// Near-field detection scaling sqrt(cos 2 phi0) and the pole-approximated
// quantization weight s_c = cos(2 phi0).
double detection_scale(const QnmParams& p);
double quantization_weight(const QnmParams& p);

// electronvolt -> angular frequency (rad/s)
double ev_to_rad_per_s(double energy_ev);

}  // namespace qnmqed::qnm
