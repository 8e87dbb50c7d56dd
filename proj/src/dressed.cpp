#include "qnmqed/dressed.hpp"

#include "qnmqed/opalg.hpp"

#include <algorithm>
#include <cmath>

namespace qnmqed::dressed {

Mat DressedSystem::to_kept_basis(const Mat& op_full) const {
    const auto u = states.leftCols(kept);
    return u.adjoint() * op_full * u;
}

DressedSystem diagonalize(const Mat& h, int keep) {
    ops::require_hermitian(h);
    const int dim = static_cast<int>(h.rows());
    if (keep < 2 || keep > dim) {
        throw std::invalid_argument("diagonalize: keep must lie in [2, dim]");
    }
    Eigen::SelfAdjointEigenSolver<Mat> solver(h);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("diagonalize: eigendecomposition failed");
    }
    DressedSystem ds;
    ds.energies = solver.eigenvalues().array() - solver.eigenvalues()(0);
    ds.states = solver.eigenvectors();
    ds.kept = keep;
    return ds;
}

TransitionSet transitions(const DressedSystem& ds, const TransitionOps& ops, double drop_tol,
                          double omega_floor) {
    const int m = ds.kept;
    const Mat a = ds.to_kept_basis(ops.a);
    const Mat adag = ds.to_kept_basis(ops.a.adjoint());
    const Mat det = ds.to_kept_basis(ops.det);
    const Mat drive = ds.to_kept_basis(ops.drive);

    TransitionSet ts;
    ts.kept = m;
    ts.energies = ds.energies.head(m);
    for (int j = 0; j < m; ++j) {
        for (int k = j + 1; k < m; ++k) {
            const double omega = ds.energies(k) - ds.energies(j);
            if (!(omega > omega_floor)) continue;
            Transition t;
            t.j = j;
            t.k = k;
            t.omega = omega;
            t.c_a = a(j, k);
            t.c_adag = adag(j, k);
            t.c_det = det(j, k);
            t.c_drive = drive(j, k);
            const double mag =
                std::max({std::abs(t.c_a), std::abs(t.c_det), std::abs(t.c_drive)});
            if (mag < drop_tol) continue;
            ts.items.push_back(t);
        }
    }
    return ts;
}

Mat detection_operator_elements(const DressedSystem& ds, const Mat& a_full, cplx eta_c) {
    const Mat x_det = kI * eta_c * a_full - kI * std::conj(eta_c) * Mat(a_full.adjoint());
    return ds.to_kept_basis(x_det);
}

double kept_frobenius_sq(const DressedSystem& ds, const Mat& op_full) {
    return ds.to_kept_basis(op_full).squaredNorm();
}

}  // namespace qnmqed::dressed
