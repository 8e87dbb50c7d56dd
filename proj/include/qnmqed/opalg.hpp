// opalg.hpp — operator algebra on truncated Fock x two-level product spaces
//
// Basis ordering convention, fixed project-wide: tensor products are always
// (cavity factor) x (matter factor), i.e. kron(cavity_op, matter_op).  The
// matter factor is a two-level system with basis {|e>, |g>} (index 0 = |e>),
// so sigma_z |e> = +|e>, or a truncated matter boson for Hopfield models.

#pragma once

#include "qnmqed/types.hpp"

#include <functional>

namespace qnmqed::ops {

enum class PauliAxis { X, Y, Z };

// n_fock x n_fock lowering operator, <m-1|a|m> = sqrt(m).  Requires n_fock >= 2.
Mat annihilation(int n_fock);

// Adjoint of annihilation(n_fock).
Mat creation(int n_fock);

// Diagonal number operator a^dag a.
Mat number(int n_fock);

Mat identity(int dim);

// Standard 2x2 Pauli matrix in the {|e>, |g>} basis.
Mat pauli(PauliAxis axis);

// Tensor product; dimension = dim(a) * dim(b).  Cavity factor first.
Mat kron(const Mat& a, const Mat& b);

// Largest absolute deviation from Hermiticity, max|H - H^dag|.
double hermiticity_error(const Mat& h);

// Throws std::invalid_argument naming the violation magnitude when
// max|h - h^dag| > tol_rel * max|h|.
void require_hermitian(const Mat& h, double tol_rel = 1e-10);

bool all_finite(const Mat& m);

// Spectral calculus: diagonalize h = U L U^dag and return U f(L) U^dag.
// Input must be Hermitian within tol_rel * max|h|; result is Hermitian for
// real-valued f.
Mat hermitian_function(const Mat& h, const std::function<double(double)>& f,
                       double tol_rel = 1e-10);

}  // namespace qnmqed::ops
