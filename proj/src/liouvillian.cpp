#include "qnmqed/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace qnmqed::liou {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInvSqrt2 = 0.70710678118654752440;

}  // namespace

const char* to_string(PiVariant v) {
    switch (v) {
        case PiVariant::A: return "a";
        case PiVariant::Qquad: return "q";
        case PiVariant::Pquad: return "p";
        case PiVariant::QplusP: return "q_plus_p";
        case PiVariant::QminusP: return "q_minus_p";
    }
    return "?";
}

const char* to_string(NegativeRatePolicy p) {
    switch (p) {
        case NegativeRatePolicy::Reject: return "reject";
        case NegativeRatePolicy::ClampZero: return "clamp";
        case NegativeRatePolicy::Allow: return "allow";
    }
    return "?";
}

cplx pi_element(const dressed::Transition& t, PiVariant v) {
    switch (v) {
        case PiVariant::A:
            return t.c_a;
        case PiVariant::Qquad:
            return t.c_a + t.c_adag;
        case PiVariant::Pquad:
            return kI * (t.c_adag - t.c_a);
        case PiVariant::QplusP:
            return ((1.0 - kI) * t.c_a + (1.0 + kI) * t.c_adag) * kInvSqrt2;
        case PiVariant::QminusP:
            return ((1.0 + kI) * t.c_a + (1.0 - kI) * t.c_adag) * kInvSqrt2;
    }
    throw std::logic_error("pi_element: unreachable");
}

Term dissipator(const dressed::TransitionSet& ts, PiVariant pi,
                const qnm::SpectralDensityModel& sd, bool secular, NegativeRatePolicy policy) {
    const int m = ts.kept;
    const int m2 = m * m;
    Term out;
    out.matrix = Mat::Zero(m2, m2);

    const std::size_t n = ts.items.size();
    std::vector<cplx> c(n);
    std::vector<double> lam2(n);
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = pi_element(ts.items[i], pi);
        const auto sample = qnm::spectral_sample(sd, ts.items[i].omega);
        double v = sample.value;
        if (sample.negative) {
            switch (policy) {
                case NegativeRatePolicy::Reject:
                    out.clamped_omegas.push_back(ts.items[i].omega);
                    break;
                case NegativeRatePolicy::ClampZero:
                    out.clamped_omegas.push_back(ts.items[i].omega);
                    v = 0.0;
                    break;
                case NegativeRatePolicy::Allow:
                    break;
            }
        }
        lam2[i] = v;
    }
    if (policy == NegativeRatePolicy::Reject && !out.clamped_omegas.empty()) {
        std::ostringstream msg;
        msg << "dissipator: loss spectral density is negative at " << out.clamped_omegas.size()
            << " retained transition frequencies (single-mode model breakdown); offending "
               "omega_alpha [eV]:";
        const std::size_t shown = std::min<std::size_t>(out.clamped_omegas.size(), 8);
        for (std::size_t i = 0; i < shown; ++i) msg << " " << out.clamped_omegas[i];
        if (shown < out.clamped_omegas.size()) msg << " ...";
        msg << "; rerun with a clamp/allow policy to proceed";
        throw PhysicsError(msg.str());
    }
    if (policy == NegativeRatePolicy::ClampZero && !out.clamped_omegas.empty()) {
        std::ostringstream msg;
        msg << "dissipator: clamped " << out.clamped_omegas.size()
            << " negative-density transitions to zero rate";
        out.warnings.push_back(msg.str());
    }

    Mat& l = out.matrix;
    for (std::size_t ia = 0; ia < n; ++ia) {
        if (lam2[ia] == 0.0) continue;
        const auto& ta = ts.items[ia];
        for (std::size_t ib = 0; ib < n; ++ib) {
            if (secular && ia != ib) continue;
            const auto& tb = ts.items[ib];  // alpha' of the pair
            const cplx f = kPi * c[ia] * std::conj(c[ib]) * lam2[ia];
            // s_a rho s_b^dag : (k_a, k_b) -> (j_a, j_b)
            l(ta.j + m * tb.j, ta.k + m * tb.k) += f;
            // s_b rho s_a^dag : (k_b, k_a) -> (j_b, j_a)   [H.c. part]
            l(tb.j + m * ta.j, tb.k + m * ta.k) += std::conj(f);
            if (ta.j == tb.j) {
                // -s_b^dag s_a rho and -rho s_a^dag s_b
                for (int col = 0; col < m; ++col) l(tb.k + m * col, ta.k + m * col) -= f;
                for (int row = 0; row < m; ++row)
                    l(row + m * tb.k, row + m * ta.k) -= std::conj(f);
            }
        }
    }
    return out;
}

Term incoherent_pump(const dressed::TransitionSet& ts, PumpTarget target, double pump_fraction,
                     const qnm::QnmParams& p, bool secular) {
    if (pump_fraction < 0.0) {
        throw std::invalid_argument("incoherent_pump: pump_fraction must be >= 0");
    }
    const int m = ts.kept;
    const int m2 = m * m;
    Term out;
    out.matrix = Mat::Zero(m2, m2);
    if (pump_fraction == 0.0) return out;

    const double kappa = p.kappa_c();
    auto pump_density = [&](double omega) {
        switch (target) {
            case PumpTarget::Cavity:
                return kappa * p.omega_c / (2.0 * kPi * omega);
            case PumpTarget::Matter:
                return kappa * omega * omega / (2.0 * kPi * p.omega_c * p.omega_c);
        }
        throw std::logic_error("incoherent_pump: unknown target");
    };

    const std::size_t n = ts.items.size();
    Mat& l = out.matrix;
    for (std::size_t ia = 0; ia < n; ++ia) {
        const auto& ta = ts.items[ia];
        const double lam2 = pump_fraction * pump_density(ta.omega);
        for (std::size_t ib = 0; ib < n; ++ib) {
            if (secular && ia != ib) continue;
            const auto& tb = ts.items[ib];
            // raising channels pair sigma_a^dag with the conjugated element
            const cplx f = kPi * std::conj(ta.c_drive) * tb.c_drive * lam2;
            // s_a^dag rho s_b : (j_a, j_b) -> (k_a, k_b)
            l(ta.k + m * tb.k, ta.j + m * tb.j) += f;
            // s_b^dag rho s_a : (j_b, j_a) -> (k_b, k_a)   [H.c. part]
            l(tb.k + m * ta.k, tb.j + m * ta.j) += std::conj(f);
            if (ta.k == tb.k) {
                // -s_b s_a^dag rho and -rho s_a s_b^dag
                for (int col = 0; col < m; ++col) l(tb.j + m * col, ta.j + m * col) -= f;
                for (int row = 0; row < m; ++row)
                    l(row + m * tb.j, row + m * ta.j) -= std::conj(f);
            }
        }
    }
    return out;
}

Liouvillian assemble(const RVec& energies, const std::vector<Term>& terms,
                     std::string description) {
    const int m = static_cast<int>(energies.size());
    const int m2 = m * m;
    Liouvillian l;
    l.dim = m;
    l.description = std::move(description);
    l.matrix = Mat::Zero(m2, m2);
    // unitary part: d rho_ij / dt = -i (w_i - w_j) rho_ij
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            l.matrix(i + m * j, i + m * j) = -kI * (energies(i) - energies(j));
        }
    }
    for (const auto& term : terms) {
        if (term.matrix.rows() != m2) {
            throw std::invalid_argument("assemble: term dimension mismatch");
        }
        l.matrix += term.matrix;
        l.warnings.insert(l.warnings.end(), term.warnings.begin(), term.warnings.end());
    }
    return l;
}

SteadyState steady_state(const Liouvillian& l) {
    const int m = l.dim;
    const int m2 = m * m;
    Mat sys = l.matrix;
    Vec rhs = Vec::Zero(m2);
    // replace the d rho_00/dt row with the trace constraint
    sys.row(0).setZero();
    for (int i = 0; i < m; ++i) sys(0, i + m * i) = 1.0;
    rhs(0) = 1.0;

    Eigen::PartialPivLU<Mat> lu(sys);
    Vec sol = lu.solve(rhs);

    // a singular bordered system signals a null space the trace row cannot fix
    const auto udiag = lu.matrixLU().diagonal().cwiseAbs();
    const bool suspicious = udiag.minCoeff() < 1e-12 * std::max(udiag.maxCoeff(), 1e-300);

    const double lscale = std::max(l.matrix.cwiseAbs().maxCoeff(), 1e-300);
    const double residual = (l.matrix * sol).norm() / (lscale * std::max(sol.norm(), 1e-300));
    if (!sol.allFinite() || residual > 1e-8 || suspicious) {
        // diagnose: a surviving rank deficiency means a degenerate null space
        Eigen::FullPivLU<Mat> flu(l.matrix);
        flu.setThreshold(1e-10);
        const int null_dim = static_cast<int>(flu.dimensionOfKernel());
        if (null_dim > 1) {
            std::ostringstream msg;
            msg << "steady_state: null space is degenerate (dimension " << null_dim
                << "); disconnected sectors — lower omega_floor or add a pump";
            throw NumericalError(msg.str());
        }
        if (!sol.allFinite() || residual > 1e-8) {
            std::ostringstream msg;
            msg << "steady_state: bordered solve failed validation (relative residual "
                << residual << ")";
            throw NumericalError(msg.str());
        }
    }

    SteadyState out;
    out.rho = Eigen::Map<const Mat>(sol.data(), m, m);
    out.rho = 0.5 * (out.rho + Mat(out.rho.adjoint()));
    const double tr = out.rho.trace().real();
    out.rho /= tr;

    Eigen::SelfAdjointEigenSolver<Mat> es(out.rho, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    if (out.min_eigenvalue < -1e-8) {
        std::ostringstream msg;
        msg << "steady_state: density matrix has negative eigenvalue " << out.min_eigenvalue
            << " beyond tolerance (non-secular positivity violation)";
        out.warnings.push_back(msg.str());
    }
    return out;
}

double trace_defect(const Liouvillian& l, unsigned seed) {
    const int m = l.dim;
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 4; ++trial) {
        Mat rho(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) rho(i, j) = cplx(gauss(rng), gauss(rng));
        rho = 0.5 * (rho + Mat(rho.adjoint()));
        rho /= rho.cwiseAbs().maxCoeff();
        const Vec v = Eigen::Map<const Vec>(rho.data(), m * m);
        const Vec lv = l.matrix * v;
        cplx tr = 0.0;
        for (int i = 0; i < m; ++i) tr += lv(i + m * i);
        worst = std::max(worst, std::abs(tr));
    }
    return worst;
}

}  // namespace qnmqed::liou
