// spectra.hpp — steady-state near-field emission spectra via the quantum
// regression theorem (resolvent form), two-Lorentzian linewidth fitting, and
// classical single-QNM scattering spectra for the bosonic correspondence.

#pragma once

#include "qnmqed/liouvillian.hpp"
#include "qnmqed/qnm.hpp"
#include "qnmqed/types.hpp"

#include <string>
#include <vector>

namespace qnmqed::spectra {

struct Grid {
    double omega_min = 0.0;  // eV
    double omega_max = 0.0;
    int points = 2000;

    std::vector<double> values() const;
};

// Default window omega_c * [1 - 3 eta - 6/Q, 1 + 3 eta + 6/Q], clamped to
// positive frequencies; wide enough for the Rabi multiplets at every scale
// used here.
Grid default_grid(double omega_c, double eta_abs, double q_factor, int points = 2000);

enum class Normalization { Raw, Peak };

struct SpectrumResult {
    std::vector<double> omega;  // ascending, eV
    std::vector<double> value;
    Normalization normalization = Normalization::Peak;
    double raw_peak = 0.0;  // peak value before normalization
    std::vector<std::string> warnings;
};

// S(omega) = Re Tr[ X (-L - i omega)^{-1} (rho_ss X^dag) ] with
// X = sum_alpha c_det_alpha |j><k|.  One dense linear solve per grid point;
// the solves share a single Schur reduction of -L, after which each point is
// a triangular back-substitution of the unitarily transformed system.
SpectrumResult emission_spectrum(const liou::Liouvillian& l, const liou::SteadyState& rho_ss,
                                 const dressed::TransitionSet& ts, const Grid& grid,
                                 Normalization norm = Normalization::Peak);

// Reference path: independent PartialPivLU solve of (-L - i omega) at every
// frequency.  Slower; used for cross-validation.
SpectrumResult emission_spectrum_direct(const liou::Liouvillian& l,
                                        const liou::SteadyState& rho_ss,
                                        const dressed::TransitionSet& ts, const Grid& grid,
                                        Normalization norm = Normalization::Peak);

// Time-domain cross-check: RK4 propagation of the regression initial value
// and a one-sided Fourier transform at the requested frequencies (raw units,
// no normalization).
std::vector<double> emission_spectrum_time_domain(const liou::Liouvillian& l,
                                                  const liou::SteadyState& rho_ss,
                                                  const dressed::TransitionSet& ts,
                                                  const std::vector<double>& omegas,
                                                  double t_max, double dt);

struct LinewidthFit {
    double omega_minus = 0.0;  // peak centers, eV; omega_minus < omega_plus
    double omega_plus = 0.0;
    double gamma_minus = 0.0;  // FWHM, eV
    double gamma_plus = 0.0;
    double amp_minus = 0.0;
    double amp_plus = 0.0;
    double residual_rms = 0.0;
};

struct SinglePeakFit {
    double omega0 = 0.0;
    double gamma = 0.0;  // FWHM
    double amp = 0.0;
    double residual_rms = 0.0;
};

// Least-squares fit of S(omega) ~ sum_± A_± (G_±/2)^2/((w-w_±)^2+(G_±/2)^2)
// inside [window_min, window_max].  Initial guesses come from the two largest
// local maxima and their half-height crossings; Levenberg-Marquardt refines
// to relative gradient < 1e-10 (at most 500 iterations).  Throws
// NumericalError when the peaks are unresolved or the fit does not converge.
LinewidthFit fit_two_lorentzians(const SpectrumResult& s, double window_min,
                                 double window_max);

// Same machinery for a single peak.
SinglePeakFit fit_lorentzian(const SpectrumResult& s, double window_min, double window_max);

enum class ClassicalVariant { Bare, Qnm, QnmNegFreq };

// Classical scattered-intensity spectrum |A_c(omega) alpha(omega) E0|^2 for a
// dipole oscillator at omega0 coupled to the mode through eta_c:
//   Bare        alpha0 = 2 omega0 / (omega0^2 - omega^2)
//   Qnm         alpha0 / (1 - K/(omega0^2 - omega^2)),
//               K = 4 omega0 omega_c A_c(omega) eta^2 / s_c
//   QnmNegFreq  K gains the negative-frequency mode term
//               4 omega0 omega_c A_c*(-omega) eta*^2 / s_c
// with s_c = cos(2 phi0).  The Bare variant skips a grid point landing
// exactly on omega0 (with a warning); the coupled variants have no real pole.
SpectrumResult classical_spectrum(const qnm::QnmParams& p, cplx eta_c, double omega0,
                                  double e0, ClassicalVariant variant, const Grid& grid,
                                  Normalization norm = Normalization::Peak);

// Interior local maxima (omega, value), descending by value.
std::vector<std::pair<double, double>> find_peaks(const SpectrumResult& s);

// Integrated spectrum (trapezoid).
double integrated_area(const SpectrumResult& s);

}  // namespace qnmqed::spectra
