// hamiltonian.hpp — system Hamiltonians on the truncated product space:
// gauge-corrected Coulomb single mode (exact cos/sin coupling), dipole-gauge
// quantum Rabi model, and the Coulomb-gauge Hopfield model for bosonic matter.
//
// Longitudinal couplings are hard-omitted (transverse mode response assumed
// dominant), and the cavity self-frequency is identified with omega_c.

#pragma once

#include "qnmqed/opalg.hpp"
#include "qnmqed/types.hpp"

namespace qnmqed::ham {

struct CouplingConfig {
    cplx eta_c{0.0, 0.0};  // dimensionless normalized coupling, |eta_c| < 1
    double omega_0 = 1.0;  // matter transition / oscillator frequency (eV)
    double omega_c = 1.0;  // cavity frequency (eV)
    int n_fock = 20;       // cavity Fock truncation (>= 2)
    int n_matter = 12;     // Hopfield matter-boson truncation (unused for TLS)
};

// Validates invariants, throws std::invalid_argument on violation.
CouplingConfig make_coupling_config(CouplingConfig cfg);

// H = w_c a^dag a + (w_0/2)[cos(Phi) sigma_z + sin(Phi) sigma_y] with
// Phi = 2(eta a + eta* a^dag).  Dimension 2*n_fock, Hermitian.
Mat coulomb_single_mode(const CouplingConfig& cfg);

// H = w_c a^dag a + (w_0/2) sigma_z + (g a + g* a^dag) sigma_x with the
// dipole-gauge coupling g = -i w_c eta.  Same spectrum as the Coulomb builder
// at Fock convergence; eigenvectors differ.
Mat dipole_gauge_qrm(const CouplingConfig& cfg);

// Two-oscillator model on the (cavity x matter) space:
// H = w_c a^dag a + w_0 b^dag b + w_0 (l a + l* a^dag)^2
//     + i w_0 (b - b^dag)(l a + l* a^dag).
Mat hopfield_coulomb(const CouplingConfig& cfg, cplx lambda_c);

// Collective coupling from N identical emitters: lambda = sqrt(N) * eta_single.
cplx lambda_from_dicke(cplx eta_single, int n_tls);

// Operators on the full product space, following the (cavity x matter)
// ordering.  `a` is the cavity lowering operator, `det` the near-field
// detection operator i eta a - i eta* a^dag, `drive` the operator whose
// dressed matrix elements feed the incoherent pump.
struct ModelOps {
    Mat a;
    Mat det;
    Mat drive;
};

enum class DriveTarget { Cavity, Matter };

// TLS model: a = a (x) I2, drive = a, det = i eta a - i eta* a^dag (falls
// back to i(a - a^dag) for eta = 0, where the detected shape is the
// phase-free limit).
ModelOps tls_model_ops(const CouplingConfig& cfg);

// Same operator set computed in the dipole gauge: every cavity operator is
// built from the shifted a' = a + i eta* sigma_x.
ModelOps tls_model_ops_dipole_gauge(const CouplingConfig& cfg);

// Hopfield model ops; drive target selects a (cavity) or i(b - b^dag) (matter).
ModelOps hopfield_model_ops(const CouplingConfig& cfg, cplx lambda_c, DriveTarget target);

// Gauge-transformed cavity lowering operator a + i eta* (I (x) sigma_x) on the
// TLS product space.
Mat dipole_gauge_shifted_a(cplx eta_c, int n_fock);

// Detection operator i eta a - i eta* a^dag on a prebuilt full-space lowering
// operator.
Mat detection_operator(cplx eta_c, const Mat& a_full);

// Parity operator exp(i pi a^dag a) (x) sigma_z for the TLS product space.
Mat tls_parity(int n_fock);

// Largest change of any of the lowest `levels` excitation energies
// (relative to the ground level) when the Fock truncation doubles.
double fock_doubling_shift(const CouplingConfig& cfg, int levels, bool dipole_gauge = false);

}  // namespace qnmqed::ham
