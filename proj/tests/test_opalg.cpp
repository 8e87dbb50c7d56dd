#include "qnmqed/opalg.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace qnmqed;
using ops::PauliAxis;

TEST_CASE("annihilation ladder structure") {
    const Mat a2 = ops::annihilation(2);
    CHECK(a2(0, 1).real() == doctest::Approx(1.0));
    CHECK(std::abs(a2(0, 0)) == 0.0);
    CHECK(std::abs(a2(1, 0)) == 0.0);
    CHECK(std::abs(a2(1, 1)) == 0.0);

    const Mat a3 = ops::annihilation(3);
    CHECK(a3(1, 2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    CHECK_THROWS_AS(ops::annihilation(1), std::invalid_argument);
}

TEST_CASE("canonical commutator on the truncated space") {
    const int n = 8;
    const Mat a = ops::annihilation(n);
    const Mat comm = a * a.adjoint() - a.adjoint() * a;
    // identity on the top-left (n-1) block; the corner carries the truncation
    for (int i = 0; i < n - 1; ++i) {
        for (int j = 0; j < n - 1; ++j) {
            const double expected = (i == j) ? 1.0 : 0.0;
            CHECK(std::abs(comm(i, j) - expected) < 1e-13);
        }
    }
}

TEST_CASE("number operator spectrum is 0..n-1") {
    const int n = 7;
    const Mat num = ops::creation(n) * ops::annihilation(n);
    Eigen::SelfAdjointEigenSolver<Mat> es(num, Eigen::EigenvaluesOnly);
    for (int i = 0; i < n; ++i) {
        CHECK(es.eigenvalues()(i) == doctest::Approx(static_cast<double>(i)).epsilon(1e-12));
    }
}

TEST_CASE("pauli algebra") {
    const Mat sx = ops::pauli(PauliAxis::X);
    const Mat sy = ops::pauli(PauliAxis::Y);
    const Mat sz = ops::pauli(PauliAxis::Z);

    CHECK((sx * sx - ops::identity(2)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((sx * sy - kI * sz).cwiseAbs().maxCoeff() < 1e-15);

    Eigen::SelfAdjointEigenSolver<Mat> es(sz, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()(1) == doctest::Approx(1.0));

    // sigma_z |e> = +|e> with |e> the first basis vector
    CHECK(sz(0, 0).real() == doctest::Approx(1.0));
}

TEST_CASE("kron dimensions and identity") {
    const Mat i2 = ops::identity(2);
    CHECK((ops::kron(i2, i2) - ops::identity(4)).cwiseAbs().maxCoeff() == 0.0);

    const Mat a = ops::annihilation(3);
    const Mat big = ops::kron(a, ops::identity(2));
    CHECK(big.rows() == 6);
    CHECK(big.cols() == 6);
}

TEST_CASE("kron factors on different slots commute") {
    const Mat a = ops::kron(ops::annihilation(4), ops::identity(2));
    const Mat sx = ops::kron(ops::identity(4), ops::pauli(PauliAxis::X));
    CHECK((a * sx - sx * a).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("kron associativity") {
    const Mat a = oracles::random_hermitian(2, 11);
    const Mat b = oracles::random_hermitian(3, 12);
    const Mat c = oracles::random_hermitian(2, 13);
    const Mat left = ops::kron(ops::kron(a, b), c);
    const Mat right = ops::kron(a, ops::kron(b, c));
    CHECK((left - right).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("hermitian_function basics") {
    const Mat zero = Mat::Zero(3, 3);
    const Mat cos_zero = ops::hermitian_function(zero, [](double x) { return std::cos(x); });
    CHECK((cos_zero - ops::identity(3)).cwiseAbs().maxCoeff() < 1e-14);

    Mat diag = Mat::Zero(2, 2);
    diag(0, 0) = 3.14159265358979323846;
    const Mat cos_diag = ops::hermitian_function(diag, [](double x) { return std::cos(x); });
    CHECK(cos_diag(0, 0).real() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(cos_diag(1, 1).real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hermitian_function rejects non-Hermitian input") {
    Mat bad = Mat::Zero(2, 2);
    bad(0, 1) = 1.0;  // strictly upper triangular
    CHECK_THROWS_WITH_AS(ops::hermitian_function(bad, [](double x) { return x; }),
                         doctest::Contains("not Hermitian"), std::invalid_argument);
}

TEST_CASE("cos of the field-phase operator matches its Taylor series") {
    const int n = 20;
    const double eta = 0.1;
    const Mat a = ops::annihilation(n);
    const Mat phi = 2.0 * eta * (a + Mat(a.adjoint()));
    const Mat via_spectral = ops::hermitian_function(phi, [](double x) { return std::cos(x); });
    const Mat via_taylor = oracles::taylor_cos(phi, 12);
    CHECK((via_spectral - via_taylor).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("cos^2 + sin^2 operator identity for random Hermitian inputs") {
    for (unsigned seed : {21u, 22u, 23u, 24u}) {
        const int dim = 2 + static_cast<int>(seed % 14);
        const Mat h = oracles::random_hermitian(dim, seed, 1.5);
        const Mat c = ops::hermitian_function(h, [](double x) { return std::cos(x); });
        const Mat s = ops::hermitian_function(h, [](double x) { return std::sin(x); });
        CHECK((c * c + s * s - ops::identity(dim)).cwiseAbs().maxCoeff() < 1e-10);
    }
}
