#include "qnmqed/hamiltonian.hpp"

#include <cmath>

namespace qnmqed::ham {

namespace {

// Phi = 2(eta a + eta* a^dag) on the bare Fock space
Mat field_phase_operator(cplx eta, int n_fock) {
    const Mat a = ops::annihilation(n_fock);
    return 2.0 * (eta * a + std::conj(eta) * a.adjoint());
}

}  // namespace

CouplingConfig make_coupling_config(CouplingConfig cfg) {
    if (cfg.n_fock < 2) throw std::invalid_argument("CouplingConfig: n_fock must be >= 2");
    if (cfg.n_matter < 2) throw std::invalid_argument("CouplingConfig: n_matter must be >= 2");
    if (!(cfg.omega_0 > 0.0) || !(cfg.omega_c > 0.0)) {
        throw std::invalid_argument("CouplingConfig: frequencies must be > 0");
    }
    if (!(std::abs(cfg.eta_c) < 1.0)) {
        throw std::invalid_argument(
            "CouplingConfig: |eta_c| must be < 1 (deep-strong coupling excluded)");
    }
    return cfg;
}

Mat coulomb_single_mode(const CouplingConfig& cfg) {
    const auto c = make_coupling_config(cfg);
    const Mat phi = field_phase_operator(c.eta_c, c.n_fock);
    const Mat cos_phi = ops::hermitian_function(phi, [](double x) { return std::cos(x); });
    const Mat sin_phi = ops::hermitian_function(phi, [](double x) { return std::sin(x); });
    const Mat i2 = ops::identity(2);
    Mat h = c.omega_c * ops::kron(ops::number(c.n_fock), i2);
    h += 0.5 * c.omega_0 * (ops::kron(cos_phi, ops::pauli(ops::PauliAxis::Z)) +
                            ops::kron(sin_phi, ops::pauli(ops::PauliAxis::Y)));
    return h;
}

Mat dipole_gauge_qrm(const CouplingConfig& cfg) {
    const auto c = make_coupling_config(cfg);
    const cplx g = -kI * c.omega_c * c.eta_c;
    const Mat a = ops::annihilation(c.n_fock);
    const Mat i2 = ops::identity(2);
    Mat h = c.omega_c * ops::kron(ops::number(c.n_fock), i2);
    h += 0.5 * c.omega_0 * ops::kron(ops::identity(c.n_fock), ops::pauli(ops::PauliAxis::Z));
    h += ops::kron(g * a + std::conj(g) * a.adjoint(), ops::pauli(ops::PauliAxis::X));
    return h;
}

Mat hopfield_coulomb(const CouplingConfig& cfg, cplx lambda_c) {
    const auto c = make_coupling_config(cfg);
    const Mat a = ops::annihilation(c.n_fock);
    const Mat b = ops::annihilation(c.n_matter);
    const Mat im = ops::identity(c.n_matter);
    const Mat ic = ops::identity(c.n_fock);
    const Mat quad = lambda_c * a + std::conj(lambda_c) * a.adjoint();
    Mat h = c.omega_c * ops::kron(ops::number(c.n_fock), im);
    h += c.omega_0 * ops::kron(ic, ops::number(c.n_matter));
    h += c.omega_0 * ops::kron(quad * quad, im);
    h += c.omega_0 * ops::kron(quad, kI * (b - b.adjoint()));
    return h;
}

cplx lambda_from_dicke(cplx eta_single, int n_tls) {
    if (n_tls < 1) throw std::invalid_argument("lambda_from_dicke: n_tls must be >= 1");
    return std::sqrt(static_cast<double>(n_tls)) * eta_single;
}

Mat dipole_gauge_shifted_a(cplx eta_c, int n_fock) {
    const Mat a = ops::kron(ops::annihilation(n_fock), ops::identity(2));
    return a + kI * std::conj(eta_c) * ops::kron(ops::identity(n_fock),
                                                 ops::pauli(ops::PauliAxis::X));
}

Mat detection_operator(cplx eta_c, const Mat& a_full) {
    if (eta_c == cplx(0.0, 0.0)) {
        // phase-free unit-scale limit; spectra are shape-normalized
        return kI * (a_full - Mat(a_full.adjoint()));
    }
    return kI * eta_c * a_full - kI * std::conj(eta_c) * Mat(a_full.adjoint());
}

ModelOps tls_model_ops(const CouplingConfig& cfg) {
    const auto c = make_coupling_config(cfg);
    ModelOps m;
    m.a = ops::kron(ops::annihilation(c.n_fock), ops::identity(2));
    m.det = detection_operator(c.eta_c, m.a);
    m.drive = m.a;
    return m;
}

ModelOps tls_model_ops_dipole_gauge(const CouplingConfig& cfg) {
    const auto c = make_coupling_config(cfg);
    ModelOps m;
    m.a = dipole_gauge_shifted_a(c.eta_c, c.n_fock);
    m.det = detection_operator(c.eta_c, m.a);
    m.drive = m.a;
    return m;
}

ModelOps hopfield_model_ops(const CouplingConfig& cfg, cplx lambda_c, DriveTarget target) {
    const auto c = make_coupling_config(cfg);
    ModelOps m;
    m.a = ops::kron(ops::annihilation(c.n_fock), ops::identity(c.n_matter));
    m.det = detection_operator(lambda_c, m.a);
    if (target == DriveTarget::Cavity) {
        m.drive = m.a;
    } else {
        const Mat b = ops::annihilation(c.n_matter);
        m.drive = ops::kron(ops::identity(c.n_fock), kI * (b - b.adjoint()));
    }
    return m;
}

Mat tls_parity(int n_fock) {
    Mat pc = Mat::Zero(n_fock, n_fock);
    for (int n = 0; n < n_fock; ++n) pc(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    return ops::kron(pc, ops::pauli(ops::PauliAxis::Z));
}

double fock_doubling_shift(const CouplingConfig& cfg, int levels, bool dipole_gauge) {
    auto spectrum = [&](int n_fock) {
        CouplingConfig c = cfg;
        c.n_fock = n_fock;
        const Mat h = dipole_gauge ? dipole_gauge_qrm(c) : coulomb_single_mode(c);
        Eigen::SelfAdjointEigenSolver<Mat> solver(h, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) {
            throw NumericalError("fock_doubling_shift: eigensolve failed");
        }
        return RVec(solver.eigenvalues());
    };
    const RVec e1 = spectrum(cfg.n_fock);
    const RVec e2 = spectrum(2 * cfg.n_fock);
    double shift = 0.0;
    const int n = std::min<int>(levels, static_cast<int>(e1.size()) - 1);
    for (int j = 1; j <= n; ++j) {
        shift = std::max(shift, std::abs((e1(j) - e1(0)) - (e2(j) - e2(0))));
    }
    return shift;
}

}  // namespace qnmqed::ham
