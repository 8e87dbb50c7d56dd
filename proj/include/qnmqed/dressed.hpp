// dressed.hpp — eigen-decomposition of a system Hamiltonian, enumeration of
// dressed-state transitions, and the transition matrix elements that feed
// dissipators, pumps, and detection.

#pragma once

#include "qnmqed/types.hpp"

#include <vector>

namespace qnmqed::dressed {

// Full eigensystem with energies shifted so the ground level sits at zero.
// All levels are retained in the record; `kept` low-lying levels are used for
// transition enumeration and master-equation assembly.
struct DressedSystem {
    RVec energies;  // ascending, energies(0) == 0
    Mat states;     // unitary, eigenvectors as columns
    int kept = 0;

    int dim() const { return static_cast<int>(energies.size()); }
    // <j| A |k> over all pairs of kept levels
    Mat to_kept_basis(const Mat& op_full) const;
};

// Hermitian eigensolve; `keep` clamps to [2, dim].
DressedSystem diagonalize(const Mat& h, int keep);

// One positive-frequency transition alpha = (j, k), omega_k > omega_j,
// with its dressed matrix elements.
struct Transition {
    int j = 0;
    int k = 0;
    double omega = 0.0;  // eV, > 0
    cplx c_a;            // <j| a |k>
    cplx c_adag;         // <j| a^dag |k>
    cplx c_det;          // <j| x_det |k>
    cplx c_drive;        // <j| drive |k>
};

struct TransitionOps {
    Mat a;
    Mat det;
    Mat drive;
};

struct TransitionSet {
    std::vector<Transition> items;
    int kept = 0;
    RVec energies;  // kept-level energies, ground-referenced
};

inline constexpr double kDefaultDropTol = 1e-10;
inline constexpr double kDefaultOmegaFloor = 1e-9;  // eV

// Enumerates all pairs j < k among kept levels with omega_alpha above the
// floor; transitions whose a/det/drive elements are all below drop_tol are
// dropped.
TransitionSet transitions(const DressedSystem& ds, const TransitionOps& ops,
                          double drop_tol = kDefaultDropTol,
                          double omega_floor = kDefaultOmegaFloor);

// Matrix elements of x_det = i eta a - i eta* a^dag between kept dressed
// states, as a kept x kept matrix.
Mat detection_operator_elements(const DressedSystem& ds, const Mat& a_full, cplx eta_c);

// sum over all kept pairs |<j|A|k>|^2 (completeness diagnostic)
double kept_frobenius_sq(const DressedSystem& ds, const Mat& op_full);

}  // namespace qnmqed::dressed
