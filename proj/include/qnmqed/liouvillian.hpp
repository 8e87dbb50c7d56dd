// liouvillian.hpp — generalized (non-secular) Born-Markov master equation in
// the dressed basis: unitary part, dressed-state dissipator with arbitrary
// loss spectral density and bath-coupling operator, incoherent pump, and the
// steady-state solve.
//
// Vectorization is column-major: rho(i, j) <-> vec index i + M*j.
//
// Dissipator structure, for ordered pairs (alpha, alpha') of positive
// transitions (alpha = alpha' only in secular mode):
//   F [s_a rho s_a'^dag - s_a'^dag s_a rho] + H.c.,
//   F = pi c_a c_a'* Lambda^2(omega_a),
// whose secular diagonal is the plain Lindblad channel with rate
// Gamma_a = 2 pi |c_a|^2 Lambda^2(omega_a), recovering the empty-cavity decay
// Gamma = kappa_c for a flat density.

#pragma once

#include "qnmqed/dressed.hpp"
#include "qnmqed/qnm.hpp"
#include "qnmqed/types.hpp"

#include <string>
#include <vector>

namespace qnmqed::liou {

// Cavity operator coupled to the reservoir.  A (the lowering operator) is the
// physically derived choice; the quadratures are phenomenological comparators.
enum class PiVariant { A, Qquad, Pquad, QplusP, QminusP };

enum class NegativeRatePolicy { Reject, ClampZero, Allow };

enum class PumpTarget { Cavity, Matter };

const char* to_string(PiVariant v);
const char* to_string(NegativeRatePolicy p);

// <j| Pi |k> for one transition, from the stored a / a^dag elements.
cplx pi_element(const dressed::Transition& t, PiVariant v);

struct Term {
    Mat matrix;                           // M^2 x M^2 superoperator contribution
    std::vector<double> clamped_omegas;   // transitions with Lambda^2 < 0 set to 0
    std::vector<std::string> warnings;
};

// Loss dissipator over all ordered pairs of retained transitions.
// policy handles Lambda^2(omega_alpha) < 0: Reject throws PhysicsError
// listing the offending frequencies, ClampZero zeroes them and records a
// warning, Allow keeps them (study mode).
Term dissipator(const dressed::TransitionSet& ts, PiVariant pi,
                const qnm::SpectralDensityModel& sd, bool secular,
                NegativeRatePolicy policy);

// Incoherent pump: raising dissipator built from the drive matrix elements
// with spectral density
//   Cavity:  kappa_c omega_c / (2 pi omega)
//   Matter:  kappa_c omega^2 / (2 pi omega_c^2)
// scaled by pump_fraction = gamma_inc / kappa_c.
Term incoherent_pump(const dressed::TransitionSet& ts, PumpTarget target,
                     double pump_fraction, const qnm::QnmParams& p, bool secular);

struct Liouvillian {
    int dim = 0;  // kept-level count M; matrix is M^2 x M^2
    Mat matrix;
    std::vector<std::string> warnings;
    std::string description;
};

// L(rho) = -i [diag(energies), rho] + sum of dissipator terms.
Liouvillian assemble(const RVec& energies, const std::vector<Term>& terms,
                     std::string description = {});

struct SteadyState {
    Mat rho;  // M x M, Hermitian, unit trace
    double min_eigenvalue = 0.0;
    std::vector<std::string> warnings;
};

// Solves L(rho) = 0 with Tr rho = 1 through a bordered linear system, then
// Hermitizes.  Throws NumericalError when the null space is degenerate
// (reporting its dimension) or the solve fails validation.
SteadyState steady_state(const Liouvillian& l);

// max |Tr L(rho)| over a few random Hermitian test matrices (diagnostic).
double trace_defect(const Liouvillian& l, unsigned seed = 7);

}  // namespace qnmqed::liou
