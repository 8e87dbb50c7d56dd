#include "qnmqed/opalg.hpp"

#include <cmath>
#include <sstream>

namespace qnmqed::ops {

Mat annihilation(int n_fock) {
    if (n_fock < 2) {
        throw std::invalid_argument("annihilation: Fock truncation must be >= 2, got " +
                                    std::to_string(n_fock));
    }
    Mat a = Mat::Zero(n_fock, n_fock);
    for (int m = 1; m < n_fock; ++m) {
        a(m - 1, m) = std::sqrt(static_cast<double>(m));
    }
    return a;
}

Mat creation(int n_fock) { return annihilation(n_fock).adjoint(); }

Mat number(int n_fock) {
    if (n_fock < 2) {
        throw std::invalid_argument("number: Fock truncation must be >= 2");
    }
    Mat n = Mat::Zero(n_fock, n_fock);
    for (int m = 0; m < n_fock; ++m) n(m, m) = static_cast<double>(m);
    return n;
}

Mat identity(int dim) {
    if (dim < 1) throw std::invalid_argument("identity: dimension must be >= 1");
    return Mat::Identity(dim, dim);
}

Mat pauli(PauliAxis axis) {
    Mat s = Mat::Zero(2, 2);
    switch (axis) {
        case PauliAxis::X:
            s(0, 1) = 1.0;
            s(1, 0) = 1.0;
            break;
        case PauliAxis::Y:
            s(0, 1) = -kI;
            s(1, 0) = kI;
            break;
        case PauliAxis::Z:
            s(0, 0) = 1.0;
            s(1, 1) = -1.0;
            break;
    }
    return s;
}

Mat kron(const Mat& a, const Mat& b) {
    const Eigen::Index ra = a.rows(), ca = a.cols();
    const Eigen::Index rb = b.rows(), cb = b.cols();
    Mat out(ra * rb, ca * cb);
    for (Eigen::Index i = 0; i < ra; ++i) {
        for (Eigen::Index j = 0; j < ca; ++j) {
            out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
        }
    }
    return out;
}

double hermiticity_error(const Mat& h) {
    return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

void require_hermitian(const Mat& h, double tol_rel) {
    if (h.rows() != h.cols()) {
        throw std::invalid_argument("require_hermitian: matrix must be square");
    }
    const double scale = h.cwiseAbs().maxCoeff();
    const double err = hermiticity_error(h);
    if (err > tol_rel * std::max(scale, 1e-300)) {
        std::ostringstream msg;
        msg << "matrix is not Hermitian: max|H - H^dag| = " << err
            << " exceeds " << tol_rel << " * max|H| = " << tol_rel * scale;
        throw std::invalid_argument(msg.str());
    }
}

bool all_finite(const Mat& m) {
    return m.allFinite();
}

Mat hermitian_function(const Mat& h, const std::function<double(double)>& f, double tol_rel) {
    require_hermitian(h, tol_rel);
    Eigen::SelfAdjointEigenSolver<Mat> solver(h);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("hermitian_function: eigendecomposition failed");
    }
    RVec vals = solver.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = f(vals(i));
    return solver.eigenvectors() * vals.asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace qnmqed::ops
