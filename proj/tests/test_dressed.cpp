#include "qnmqed/dressed.hpp"

#include "qnmqed/hamiltonian.hpp"
#include "qnmqed/opalg.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

using namespace qnmqed;

namespace {

ham::CouplingConfig tls_cfg(cplx eta, double omega0 = 1.0, double omega_c = 1.0,
                            int n_fock = 20) {
    ham::CouplingConfig cfg;
    cfg.eta_c = eta;
    cfg.omega_0 = omega0;
    cfg.omega_c = omega_c;
    cfg.n_fock = n_fock;
    return cfg;
}

dressed::TransitionSet tls_transitions(const ham::CouplingConfig& cfg, int keep) {
    const Mat h = ham::coulomb_single_mode(cfg);
    const auto ds = dressed::diagonalize(h, keep);
    const auto mops = ham::tls_model_ops(cfg);
    return dressed::transitions(ds, {mops.a, mops.det, mops.drive});
}

}  // namespace

TEST_CASE("diagonalize validates input and sorts energies") {
    Mat bad = Mat::Zero(3, 3);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(dressed::diagonalize(bad, 2), std::invalid_argument);

    const auto cfg = tls_cfg(0.0, 0.8, 1.0, 5);
    const Mat h = ham::coulomb_single_mode(cfg);
    const auto ds = dressed::diagonalize(h, 6);
    CHECK(ds.energies(0) == 0.0);
    CHECK(std::is_sorted(ds.energies.data(), ds.energies.data() + ds.energies.size()));
    // decoupled: levels are {n w_c ± w_0/2} above the ground -w_0/2
    CHECK(ds.energies(1) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(ds.energies(2) == doctest::Approx(1.0).epsilon(1e-12));

    // unitarity and reconstruction
    const int d = ds.dim();
    CHECK((ds.states.adjoint() * ds.states - Mat::Identity(d, d)).cwiseAbs().maxCoeff() <
          1e-10);
    const Mat rebuilt =
        ds.states * (ds.energies.cast<cplx>().asDiagonal() * ds.states.adjoint());
    const Mat shifted = h - Mat::Identity(d, d) * (h.eigenvalues().real().minCoeff());
    // compare spectra through the ground-referenced shift
    Eigen::SelfAdjointEigenSolver<Mat> es(rebuilt, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Mat> es2(h, Eigen::EigenvaluesOnly);
    for (int i = 0; i < d; ++i) {
        CHECK(es.eigenvalues()(i) ==
              doctest::Approx(es2.eigenvalues()(i) - es2.eigenvalues()(0)).epsilon(1e-9));
    }

    CHECK_THROWS_AS(dressed::diagonalize(h, 1), std::invalid_argument);
    CHECK_THROWS_AS(dressed::diagonalize(h, 99), std::invalid_argument);
}

TEST_CASE("empty-cavity transition structure") {
    // cavity ladder only: keep the lowest two cavity-TLS-ground levels
    const auto cfg = tls_cfg(0.0, 5.0, 1.0, 6);  // TLS far detuned upward
    const Mat h = ham::coulomb_single_mode(cfg);
    const auto ds = dressed::diagonalize(h, 2);
    const auto mops = ham::tls_model_ops(cfg);
    const auto ts = dressed::transitions(ds, {mops.a, mops.det, mops.drive});
    REQUIRE(ts.items.size() == 1);
    CHECK(ts.items[0].omega == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(ts.items[0].c_a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(ts.items[0].c_adag) < 1e-12);
}

TEST_CASE("transitions store only positive frequencies above the floor") {
    const auto ts = tls_transitions(tls_cfg(0.1), 12);
    for (const auto& t : ts.items) {
        CHECK(t.omega > 0.0);
        CHECK(t.j < t.k);
    }
}

TEST_CASE("keep = dim enumerates every nondegenerate pair at zero drop tolerance") {
    const auto cfg = tls_cfg(0.17, 0.8, 1.0, 4);  // off-resonant: no degeneracies
    const Mat h = ham::coulomb_single_mode(cfg);
    const int dim = static_cast<int>(h.rows());
    const auto ds = dressed::diagonalize(h, dim);
    const auto mops = ham::tls_model_ops(cfg);
    const auto ts = dressed::transitions(ds, {mops.a, mops.det, mops.drive}, 0.0);
    CHECK(static_cast<int>(ts.items.size()) == dim * (dim - 1) / 2);
}

TEST_CASE("degenerate resonant levels keep observable weights") {
    // eta = 0, w_0 = w_c: |1,g> and |0,e> are exactly degenerate; the split of
    // |c_a|^2 between them is basis-dependent but the total weight is fixed
    const auto cfg = tls_cfg(0.0, 1.0, 1.0, 8);
    const Mat h = ham::coulomb_single_mode(cfg);
    const auto ds = dressed::diagonalize(h, 3);
    const auto mops = ham::tls_model_ops(cfg);
    const auto ts = dressed::transitions(ds, {mops.a, mops.det, mops.drive});
    double total = 0.0;
    for (const auto& t : ts.items) {
        if (t.j == 0) total += std::norm(t.c_a);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("weak-coupling polaritons split the lowering weight evenly") {
    const auto ts = tls_transitions(tls_cfg(0.01), 8);
    // the two dominant ground transitions carry |c_a|^2 ~ 1/2 each
    std::vector<double> ground_weights;
    for (const auto& t : ts.items) {
        if (t.j == 0 && std::norm(t.c_a) > 0.1) ground_weights.push_back(std::norm(t.c_a));
    }
    REQUIRE(ground_weights.size() == 2);
    CHECK(ground_weights[0] == doctest::Approx(0.5).epsilon(0.1));
    CHECK(ground_weights[1] == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("kept-subspace completeness of matrix elements") {
    const auto cfg = tls_cfg(cplx(0.25, 0.1));
    const Mat h = ham::coulomb_single_mode(cfg);
    const auto ds = dressed::diagonalize(h, 10);
    const auto mops = ham::tls_model_ops(cfg);
    const Mat a_kept = ds.to_kept_basis(mops.a);
    // basis invariance of the Frobenius norm on the kept block
    double sum_sq = 0.0;
    for (int j = 0; j < 10; ++j)
        for (int k = 0; k < 10; ++k) sum_sq += std::norm(a_kept(j, k));
    CHECK(sum_sq == doctest::Approx(dressed::kept_frobenius_sq(ds, mops.a)).epsilon(1e-12));
}

TEST_CASE("transition data converge as keep doubles") {
    const auto cfg = tls_cfg(0.2);
    const auto ts1 = tls_transitions(cfg, 12);
    const auto ts2 = tls_transitions(cfg, 24);
    // every retained transition of the smaller set appears unchanged
    std::map<std::pair<int, int>, const dressed::Transition*> lookup;
    for (const auto& t : ts2.items) lookup[{t.j, t.k}] = &t;
    for (const auto& t : ts1.items) {
        auto it = lookup.find({t.j, t.k});
        REQUIRE(it != lookup.end());
        CHECK(std::abs(t.omega - it->second->omega) < 1e-8);
        CHECK(std::abs(std::abs(t.c_a) - std::abs(it->second->c_a)) < 1e-8);
    }
}

TEST_CASE("detection elements") {
    const auto cfg = tls_cfg(0.0, 5.0, 1.0, 6);
    const Mat h = ham::coulomb_single_mode(cfg);
    const auto ds = dressed::diagonalize(h, 2);
    const auto mops = ham::tls_model_ops(cfg);

    // real eta, empty cavity: <0| x_det |1> = i eta <0|a|1> = i eta
    const double eta = 0.37;
    const Mat el = dressed::detection_operator_elements(ds, mops.a, eta);
    CHECK(el(0, 1).real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(el(0, 1).imag() == doctest::Approx(eta).epsilon(1e-10));

    // linear scaling in |eta|
    const Mat el2 = dressed::detection_operator_elements(ds, mops.a, 2.0 * eta);
    CHECK(std::abs(el2(0, 1)) == doctest::Approx(2.0 * std::abs(el(0, 1))).epsilon(1e-12));
}

TEST_CASE("ground diagonal of the detection operator vanishes by parity") {
    const auto cfg = tls_cfg(0.3);
    const Mat h = ham::coulomb_single_mode(cfg);
    const auto ds = dressed::diagonalize(h, 6);
    const auto mops = ham::tls_model_ops(cfg);
    const Mat el = dressed::detection_operator_elements(ds, mops.a, cfg.eta_c);
    CHECK(std::abs(el(0, 0)) < 1e-10);
}

TEST_CASE("cross-gauge agreement of transition data") {
    const cplx eta(0.4, 0.0);
    const auto cfg = tls_cfg(eta, 1.0, 1.0, 60);
    const int keep = 8;

    const auto ds_c = dressed::diagonalize(ham::coulomb_single_mode(cfg), keep);
    const auto ops_c = ham::tls_model_ops(cfg);
    const auto ts_c = dressed::transitions(ds_c, {ops_c.a, ops_c.det, ops_c.drive});

    const auto ds_d = dressed::diagonalize(ham::dipole_gauge_qrm(cfg), keep);
    const auto ops_d = ham::tls_model_ops_dipole_gauge(cfg);
    const auto ts_d = dressed::transitions(ds_d, {ops_d.a, ops_d.det, ops_d.drive});

    std::map<std::pair<int, int>, const dressed::Transition*> lookup;
    for (const auto& t : ts_d.items) lookup[{t.j, t.k}] = &t;
    int compared = 0;
    for (const auto& t : ts_c.items) {
        auto it = lookup.find({t.j, t.k});
        if (it == lookup.end()) continue;
        CHECK(std::abs(t.omega - it->second->omega) < 1e-6);
        // magnitudes of the lowering elements are gauge-invariant
        if (std::abs(t.c_a) > 1e-6) {
            CHECK(std::abs(t.c_a) ==
                  doctest::Approx(std::abs(it->second->c_a)).epsilon(1e-6));
            ++compared;
        }
    }
    CHECK(compared > 5);
}
