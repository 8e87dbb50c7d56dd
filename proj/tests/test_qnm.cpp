#include "qnmqed/qnm.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

using namespace qnmqed;

namespace {

qnm::QnmParams from_q(double omega_c, double q, double tan_2phi0,
                      std::optional<cplx> f = std::nullopt) {
    qnm::QnmParams p;
    p.label = "test";
    p.omega_c = omega_c;
    p.gamma_c = omega_c / (2.0 * q);
    p.phi0 = 0.5 * std::atan(tan_2phi0);
    p.f_amp = f;
    return qnm::make_qnm_params(p);
}

std::string data_dir() { return std::string(QNMQED_SOURCE_DIR) + "/data/qnm"; }

}  // namespace

TEST_CASE("parameter invariants") {
    CHECK_THROWS_AS(from_q(1.0, -3.0, 0.0), std::invalid_argument);
    qnm::QnmParams bad;
    bad.omega_c = 1.0;
    bad.gamma_c = 0.01;
    bad.phi0 = 0.5;  // above pi/8
    CHECK_THROWS_AS(qnm::make_qnm_params(bad), std::invalid_argument);

    const auto p = from_q(2.620, 26.22, 0.0191);
    CHECK(p.q_factor() == doctest::Approx(26.22));
    CHECK(p.kappa_c() == doctest::Approx(2.0 * p.gamma_c));
}

TEST_CASE("zeta factor") {
    const auto p = from_q(1.0, 26.22, 0.0191);
    CHECK(qnm::zeta_factor(p, p.omega_c) == doctest::Approx(1.0).epsilon(1e-14));

    const auto p0 = from_q(1.0, 26.22, 0.0);
    CHECK(qnm::zeta_factor(p0, 1.7) == doctest::Approx(1.0).epsilon(1e-14));

    // hand evaluation: 1 - 2 * 26.22 * 0.0191 * 0.1 = 0.89984
    CHECK(qnm::zeta_factor(p, 1.1) == doctest::Approx(0.89984).epsilon(1e-6));
}

TEST_CASE("zeta factor is affine in omega") {
    const auto p = from_q(1.3, 40.0, 0.01);
    const double h = 0.05;
    for (double w : {0.8, 1.0, 1.4, 2.0}) {
        const double second_diff = qnm::zeta_factor(p, w + h) - 2.0 * qnm::zeta_factor(p, w) +
                                   qnm::zeta_factor(p, w - h);
        CHECK(std::abs(second_diff) < 1e-13);
    }
}

TEST_CASE("spectral densities") {
    const auto p = from_q(1.0, 26.22, 0.0191);
    const auto ab = qnm::SpectralDensityModel::ab_initio(p);
    const auto flat = qnm::SpectralDensityModel::flat(p);
    const double base = p.kappa_c() / (2.0 * oracles::kPi);

    CHECK(qnm::spectral_density(ab, p.omega_c) == doctest::Approx(base).epsilon(1e-14));
    CHECK(qnm::spectral_density(flat, 1.7) == doctest::Approx(base).epsilon(1e-14));
    CHECK(qnm::spectral_density(ab, p.omega_c) ==
          doctest::Approx(qnm::spectral_density(flat, p.omega_c)).epsilon(1e-14));

    // compose the 1/omega factor with the zeta example above
    CHECK(qnm::spectral_density(ab, 1.1) ==
          doctest::Approx(base * (1.0 / 1.1) * 0.89984).epsilon(1e-6));

    // the n = -1 power law with zeta IS the ab-initio density
    const auto pl = qnm::SpectralDensityModel::power_law(p, -1, true);
    CHECK(pl.kind == qnm::DensityKind::AbInitio);
    for (double w : {0.7, 1.0, 1.4}) {
        CHECK(qnm::spectral_density(pl, w) ==
              doctest::Approx(qnm::spectral_density(ab, w)).epsilon(1e-14));
    }

    // negative values are tagged, not thrown
    const auto steep = from_q(1.0, 100.0, 0.05);
    const auto ab2 = qnm::SpectralDensityModel::ab_initio(steep);
    const auto sample = qnm::spectral_sample(ab2, 1.5);
    CHECK(sample.negative);
    CHECK(sample.value < 0.0);
}

TEST_CASE("broadband threshold reproduces the tabulated criteria") {
    // two-significant-figure targets for (Q, tan 2phi0) inputs
    struct Row {
        double q, tan2phi, eta1, bb;
    };
    const Row rows[] = {
        {26.22, 0.0191, 1.0, 0.1},        // ellipsoid dimer
        {159.3, 0.00708, 0.44, 0.028},    // bowtie
        {1549.0, -0.00435, 0.074, 0.0036},  // 2D PC
        {1.012e5, -5.63e-5, 0.088, 0.0042}, // WGM
        {9.34, 0.0237, 2.3, 0.1},         // cylinder dimer
    };
    for (const auto& r : rows) {
        const auto p = from_q(1.0, r.q, r.tan2phi);
        const double eta1 = qnm::eta_max_first_order(p);
        const double bb = qnm::broadband_threshold(p).value;
        CHECK(eta1 == doctest::Approx(r.eta1).epsilon(0.05));
        CHECK(bb == doctest::Approx(r.bb).epsilon(0.05));
    }

    // the nanobeam row: the formula gives 0.1/|1 - 4*2182*0.00519| = 0.0023
    const auto beam = from_q(1.598, 2182.0, 0.00519);
    CHECK(qnm::eta_max_first_order(beam) == doctest::Approx(0.044).epsilon(0.05));
    CHECK(qnm::broadband_threshold(beam).value == doctest::Approx(0.0023).epsilon(0.05));
}

TEST_CASE("broadband threshold bounds and degenerate cases") {
    const auto p0 = from_q(1.0, 20.0, 0.0);
    CHECK(qnm::broadband_threshold(p0).value == doctest::Approx(0.1));
    CHECK(qnm::eta_max_first_order(p0) == std::numeric_limits<double>::infinity());

    // degenerate denominator 1 - 4 Q tan(2 phi0) = 0
    qnm::QnmParams pd;
    pd.omega_c = 1.0;
    pd.gamma_c = 0.025;  // Q = 20
    pd.phi0 = 0.5 * std::atan(1.0 / 80.0);
    const auto bb = qnm::broadband_threshold(qnm::make_qnm_params(pd));
    CHECK(bb.degenerate_denominator);
    CHECK(bb.value == doctest::Approx(0.1));

    // always <= 0.1, equal iff the denominator magnitude is <= 1
    for (double t : {-0.02, -0.001, 0.0, 0.004, 0.05}) {
        const auto p = from_q(1.0, 50.0, t);
        const auto v = qnm::broadband_threshold(p).value;
        CHECK(v <= 0.1 + 1e-15);
        const double denom = std::abs(1.0 - 4.0 * 50.0 * t);
        if (denom <= 1.0) CHECK(v == doctest::Approx(0.1));
        else CHECK(v < 0.1);
    }
}

TEST_CASE("coupling estimate from the projected field") {
    // 9.5e-14 * |f| / sqrt(omega_c), d = d0
    CHECK(qnm::eta_from_field(9.009e10, 2.070, 1.0) ==
          doctest::Approx(0.006).epsilon(0.01));  // 5.95e-3 to one figure
    CHECK(qnm::eta_from_field(2.235e9, 0.7987, 1.0) ==
          doctest::Approx(2.38e-4).epsilon(0.01));
    CHECK(qnm::eta_from_field(2.670e11, 2.620, 1.0) ==
          doctest::Approx(1.567e-2).epsilon(0.01));
    CHECK_THROWS_AS(qnm::eta_from_field(-1.0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("expansion coefficient") {
    const auto p = from_q(1.0, 20.0, 0.0);
    // on resonance: w_c / (2 (-i gamma)) = i Q
    const cplx on_res = qnm::qnm_expansion_coefficient(p, p.omega_c);
    CHECK(on_res.real() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(on_res.imag() == doctest::Approx(20.0).epsilon(1e-12));

    CHECK(std::abs(qnm::qnm_expansion_coefficient(p, 1e-9)) < 1e-8);

    // Im{A e^{2 i phi0}} at phi0 = 0, omega = omega_c equals Q
    CHECK(oracles::im_a_exp2iphi(p.omega_c, p.gamma_c, 0.0, p.omega_c) ==
          doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("purcell rate and lorentzian reference") {
    const auto p = from_q(1.0, 20.0, 0.009);
    const double g = 0.01;
    const double kappa = p.kappa_c();

    CHECK(qnm::purcell_rate_single(p, g, p.omega_c) ==
          doctest::Approx(4.0 * g * g / kappa).epsilon(1e-12));

    CHECK(qnm::lorentzian_norm(p, 1.0, p.omega_c) == doctest::Approx(1.0));
    CHECK(qnm::lorentzian_norm(p, 1.0, p.omega_c + 0.5 * kappa) == doctest::Approx(0.5));
    CHECK(qnm::lorentzian_norm(p, 1.0, p.omega_c + 3.0 * kappa) ==
          doctest::Approx(1.0 / 37.0).epsilon(1e-12));

    // algebraic identity gamma(w)/L(w) = (w/w_c) zeta(w), with matched peaks
    const double gamma_peak = qnm::purcell_rate_single(p, g, p.omega_c);
    for (double w : {0.9, 0.97, 1.0, 1.06, 1.2}) {
        const double ratio = qnm::purcell_rate_single(p, g, w) /
                             qnm::lorentzian_norm(p, gamma_peak, w);
        const double expected = (w / p.omega_c) * qnm::zeta_factor(p, w);
        CHECK(ratio == doctest::Approx(expected).epsilon(1e-12));
    }

    // phi0 = 0: the ratio reduces to w/w_c
    const auto p0 = from_q(1.0, 20.0, 0.0);
    const double peak0 = qnm::purcell_rate_single(p0, g, p0.omega_c);
    CHECK(qnm::purcell_rate_single(p0, g, 1.15) /
              qnm::lorentzian_norm(p0, peak0, 1.15) ==
          doctest::Approx(1.15).epsilon(1e-12));
}

TEST_CASE("multimode purcell rate") {
    constexpr double d = 1.602176634e-28;  // 1 e*nm in C*m
    const double q = 9.34, omega_c = 2.070;
    const cplx field(9.009e10, 1.066e9);
    const auto p = from_q(omega_c, q, 2.0 * std::tan(std::arg(field)));

    // single-mode list vs the closed form with g = omega_c * eta * sqrt(cos 2 phi0);
    // the projected-field phase must match the parameter phase for the identity
    qnm::QnmParams pm = p;
    pm.phi0 = std::arg(field);
    pm = qnm::make_qnm_params(pm);
    // exact dimensionless coupling d |f| / sqrt(2 eps0 hbar w_c), from constants
    const double eta = d * std::abs(field) /
                       std::sqrt(2.0 * oracles::kEps0 * oracles::kE * omega_c);
    const double g_ev = omega_c * eta * qnm::detection_scale(pm);

    std::vector<qnm::ProjectedMode> single = {{pm, field}};
    for (double w : {2.0, 2.07, 2.2}) {
        const double si = qnm::purcell_rate_multimode(single, d, w);
        const double ev = qnm::purcell_rate_single(pm, g_ev, w);
        // both are rates in their own units; the shapes must agree exactly,
        // so compare through the eV->1/s conversion of the closed form
        const double ev_to_si = qnm::ev_to_rad_per_s(1.0);
        CHECK(si == doctest::Approx(ev * ev_to_si).epsilon(1e-9));
    }

    // two identical modes double the rate
    std::vector<qnm::ProjectedMode> pair = {{pm, field}, {pm, field}};
    CHECK(qnm::purcell_rate_multimode(pair, d, 2.1) ==
          doctest::Approx(2.0 * qnm::purcell_rate_multimode(single, d, 2.1)).epsilon(1e-13));

    // a far-detuned second mode contributes, relative to its own resonant
    // strength, at most a Lorentzian-tail fraction of order gamma_2/|w0 - w_2|
    qnm::QnmParams far = pm;
    far.omega_c = 6.0;
    far.gamma_c = 0.05;
    std::vector<qnm::ProjectedMode> far_only = {{far, field}};
    const double w0 = 2.07;
    const double tail = std::abs(qnm::purcell_rate_multimode(far_only, d, w0));
    const double own_peak = std::abs(qnm::purcell_rate_multimode(far_only, d, far.omega_c));
    const double detuning = std::abs(w0 - far.omega_c);
    CHECK(tail / own_peak < far.gamma_c / detuning);

    CHECK_THROWS_AS(qnm::purcell_rate_multimode({}, d, 1.0), std::invalid_argument);
}

TEST_CASE("free-space rate") {
    constexpr double d = 1.602176634e-28;  // 1 e*nm
    const double w = qnm::ev_to_rad_per_s(1.0);

    CHECK(qnm::free_space_rate(2.0 * d, w) ==
          doctest::Approx(4.0 * qnm::free_space_rate(d, w)).epsilon(1e-13));
    CHECK(qnm::free_space_rate(d, 2.0 * w) ==
          doctest::Approx(8.0 * qnm::free_space_rate(d, w)).epsilon(1e-13));

    // SI-constant evaluation, computed independently here
    const double expected = oracles::free_space_rate_si(d, w);
    CHECK(qnm::free_space_rate(d, w) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(3.796e8).epsilon(1e-3));
}

TEST_CASE("detection scale") {
    const auto p0 = from_q(1.0, 20.0, 0.0);
    CHECK(qnm::detection_scale(p0) == doctest::Approx(1.0));

    qnm::QnmParams p;
    p.omega_c = 1.0;
    p.gamma_c = 0.025;
    p.phi0 = 0.02;
    const auto pv = qnm::make_qnm_params(p);
    CHECK(qnm::detection_scale(pv) == doctest::Approx(std::sqrt(std::cos(0.04))).epsilon(1e-12));
    CHECK(qnm::detection_scale(pv) == doctest::Approx(0.99960).epsilon(1e-5));

    // quantization weight decreases monotonically with |phi0|
    double prev = 1.0;
    for (double phi : {0.05, 0.15, 0.25, 0.35}) {
        qnm::QnmParams q;
        q.omega_c = 1.0;
        q.gamma_c = 0.025;
        q.phi0 = phi;
        const double w = qnm::quantization_weight(qnm::make_qnm_params(q));
        CHECK(w < prev);
        prev = w;
    }
}

TEST_CASE("parameter file loader") {
    const auto p = qnm::load_qnm_file(data_dir() + "/ellipsoid_dimer.json");
    CHECK(p.omega_c == doctest::Approx(2.620));
    CHECK(p.q_factor() == doctest::Approx(26.22).epsilon(1e-3));
    CHECK(std::tan(2.0 * p.phi0) == doctest::Approx(0.0191).epsilon(1e-12));
    REQUIRE(p.f_amp.has_value());
    CHECK(std::abs(*p.f_amp) == doctest::Approx(2.670e11).epsilon(1e-3));

    // phase given directly
    const auto p2 = qnm::load_qnm_file(data_dir() + "/secondary/ellipsoid_dimer_qnm2.json");
    CHECK(p2.phi0 == doctest::Approx(0.00616));
    CHECK_FALSE(p2.f_amp.has_value());

    CHECK_THROWS_AS(qnm::load_qnm_file(data_dir() + "/does_not_exist.json"), ConfigError);
    CHECK_THROWS_WITH_AS(
        qnm::parse_qnm_json(R"({"label":"x","omega_c_eV":1.0,"gamma_c_eV":0.1,)"
                            R"("phi0_rad":0.0,"tan_2phi0":0.0})",
                            "inline"),
        doctest::Contains("exactly one"), ConfigError);
    CHECK_THROWS_WITH_AS(
        qnm::parse_qnm_json(R"({"label":"x","omega_c_eV":1.0,"gamma_c_eV":0.1,)"
                            R"("phi0_rad":0.0,"bogus":3})",
                            "inline"),
        doctest::Contains("unknown key"), ConfigError);
}
