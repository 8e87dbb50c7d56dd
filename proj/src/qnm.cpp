#include "qnmqed/qnm.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace qnmqed::qnm {

namespace {

// CODATA 2018
constexpr double kElementaryCharge = 1.602176634e-19;    // C
constexpr double kHbar = 1.054571817e-34;                // J s
constexpr double kEpsilon0 = 8.8541878128e-12;           // F/m
constexpr double kSpeedOfLight = 2.99792458e8;           // m/s

constexpr double kEtaPrefactor = 9.5e-14;  // eV^-1/2 m^3/2, for d0 = 1 e*nm

}  // namespace

double ev_to_rad_per_s(double energy_ev) {
    return energy_ev * kElementaryCharge / kHbar;
}

QnmParams make_qnm_params(QnmParams p) {
    if (!(p.omega_c > 0.0)) {
        throw std::invalid_argument("QnmParams '" + p.label + "': omega_c must be > 0");
    }
    if (!(p.gamma_c > 0.0)) {
        throw std::invalid_argument("QnmParams '" + p.label + "': gamma_c must be > 0");
    }
    if (!(std::abs(p.phi0) < std::numbers::pi / 8.0)) {
        std::ostringstream msg;
        msg << "QnmParams '" << p.label << "': |phi0| = " << std::abs(p.phi0)
            << " must be < pi/8 (projected-phase validity bound)";
        throw std::invalid_argument(msg.str());
    }
    return p;
}

QnmParams parse_qnm_json(const std::string& text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(origin + ": JSON parse failure: " + e.what());
    }
    if (!j.is_object()) throw ConfigError(origin + ": expected a JSON object");

    static const std::set<std::string> known = {"label",    "omega_c_eV", "gamma_c_eV",
                                                "phi0_rad", "tan_2phi0",  "f_amp_re",
                                                "f_amp_im", "notes"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) {
            throw ConfigError(origin + ": unknown key '" + key + "'");
        }
    }
    for (const char* req : {"label", "omega_c_eV", "gamma_c_eV"}) {
        if (!j.contains(req)) throw ConfigError(origin + ": missing key '" + std::string(req) + "'");
    }
    const bool has_phi = j.contains("phi0_rad");
    const bool has_tan = j.contains("tan_2phi0");
    if (has_phi == has_tan) {
        throw ConfigError(origin + ": exactly one of phi0_rad / tan_2phi0 is required");
    }
    if (j.contains("f_amp_re") != j.contains("f_amp_im")) {
        throw ConfigError(origin + ": f_amp_re and f_amp_im must be given together");
    }

    QnmParams p;
    try {
        p.label = j.at("label").get<std::string>();
        p.omega_c = j.at("omega_c_eV").get<double>();
        p.gamma_c = j.at("gamma_c_eV").get<double>();
        p.phi0 = has_phi ? j.at("phi0_rad").get<double>()
                         : 0.5 * std::atan(j.at("tan_2phi0").get<double>());
        if (j.contains("f_amp_re")) {
            p.f_amp = cplx(j.at("f_amp_re").get<double>(), j.at("f_amp_im").get<double>());
        }
        if (j.contains("notes")) p.notes = j.at("notes").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(origin + ": bad value type: " + e.what());
    }
    try {
        return make_qnm_params(std::move(p));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

QnmParams load_qnm_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open QNM parameter file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_qnm_json(buf.str(), path);
}

double zeta_factor(const QnmParams& p, double omega) {
    return 1.0 - 2.0 * p.q_factor() * std::tan(2.0 * p.phi0) * (omega / p.omega_c - 1.0);
}

SpectralDensityModel SpectralDensityModel::ab_initio(const QnmParams& p) {
    SpectralDensityModel m;
    m.kind = DensityKind::AbInitio;
    m.exponent = -1;
    m.zeta_enabled = true;
    m.params = p;
    return m;
}

SpectralDensityModel SpectralDensityModel::power_law(const QnmParams& p, int n, bool zeta) {
    SpectralDensityModel m;
    // power law n = -1 with zeta is the ab-initio density by identity
    if (n == -1 && zeta) return ab_initio(p);
    m.kind = DensityKind::PowerLaw;
    m.exponent = n;
    m.zeta_enabled = zeta;
    m.params = p;
    return m;
}

SpectralDensityModel SpectralDensityModel::flat(const QnmParams& p) {
    SpectralDensityModel m;
    m.kind = DensityKind::Flat;
    m.zeta_enabled = false;
    m.params = p;
    return m;
}

double spectral_density(const SpectralDensityModel& m, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("spectral_density: omega must be > 0");
    const double base = m.params.kappa_c() / (2.0 * std::numbers::pi);
    switch (m.kind) {
        case DensityKind::Flat:
            return base;
        case DensityKind::AbInitio:
            return base * (m.params.omega_c / omega) * zeta_factor(m.params, omega);
        case DensityKind::PowerLaw: {
            double v = base * std::pow(omega / m.params.omega_c, m.exponent);
            if (m.zeta_enabled) v *= zeta_factor(m.params, omega);
            return v;
        }
    }
    throw std::logic_error("spectral_density: unreachable");
}

SpectralSample spectral_sample(const SpectralDensityModel& m, double omega) {
    const double v = spectral_density(m, omega);
    return SpectralSample{v, v < 0.0};
}

BroadbandThreshold broadband_threshold(const QnmParams& p) {
    BroadbandThreshold out;
    const double denom = std::abs(1.0 - 4.0 * p.q_factor() * std::tan(2.0 * p.phi0));
    if (denom == 0.0) {
        out.value = 0.1;
        out.degenerate_denominator = true;
        return out;
    }
    out.value = 0.1 * std::min(1.0, 1.0 / denom);
    return out;
}

double eta_max_first_order(const QnmParams& p) {
    const double t = 2.0 * p.q_factor() * std::tan(2.0 * p.phi0);
    if (t == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / std::abs(t);
}

double eta_from_field(double f_amp_modulus, double omega_c_ev, double d_over_d0) {
    if (!(f_amp_modulus > 0.0) || !(omega_c_ev > 0.0) || !(d_over_d0 > 0.0)) {
        throw std::invalid_argument("eta_from_field: all inputs must be > 0");
    }
    return kEtaPrefactor * d_over_d0 * f_amp_modulus / std::sqrt(omega_c_ev);
}

cplx qnm_expansion_coefficient(const QnmParams& p, double omega) {
    if (!(omega > 0.0)) {
        throw std::invalid_argument("qnm_expansion_coefficient: omega must be > 0");
    }
    const cplx omega_tilde(p.omega_c, -p.gamma_c);
    return omega / (2.0 * (omega_tilde - omega));
}

double purcell_rate_single(const QnmParams& p, double g_dipole_mag, double omega0) {
    if (!(omega0 > 0.0)) throw std::invalid_argument("purcell_rate_single: omega0 must be > 0");
    if (g_dipole_mag < 0.0) {
        throw std::invalid_argument("purcell_rate_single: coupling magnitude must be >= 0");
    }
    const double kappa = p.kappa_c();
    const double lor = (kappa * kappa / 4.0) /
                       (kappa * kappa / 4.0 + (omega0 - p.omega_c) * (omega0 - p.omega_c));
    return (4.0 * g_dipole_mag * g_dipole_mag / kappa) * (omega0 / p.omega_c) * lor *
           zeta_factor(p, omega0);
}

double purcell_rate_multimode(const std::vector<ProjectedMode>& modes, double dipole_mag,
                              double omega0) {
    if (modes.empty()) {
        throw std::invalid_argument("purcell_rate_multimode: mode list must be nonempty");
    }
    double rate = 0.0;
    for (const auto& mode : modes) {
        const double f2 = std::norm(mode.field);
        const double phase = std::arg(mode.field);
        const cplx a = qnm_expansion_coefficient(mode.params, omega0);
        rate += 2.0 * dipole_mag * dipole_mag * f2 / (kHbar * kEpsilon0) *
                std::imag(a * std::exp(cplx(0.0, 2.0 * phase)));
    }
    return rate;
}

double lorentzian_norm(const QnmParams& p, double gamma_at_peak, double omega) {
    if (!(omega > 0.0)) throw std::invalid_argument("lorentzian_norm: omega must be > 0");
    const double kappa = p.kappa_c();
    return gamma_at_peak * (kappa * kappa / 4.0) /
           (kappa * kappa / 4.0 + (omega - p.omega_c) * (omega - p.omega_c));
}

double free_space_rate(double dipole_mag, double omega_rad_s) {
    if (!(dipole_mag > 0.0) || !(omega_rad_s > 0.0)) {
        throw std::invalid_argument("free_space_rate: inputs must be > 0");
    }
    const double w3 = omega_rad_s * omega_rad_s * omega_rad_s;
    return dipole_mag * dipole_mag * w3 /
           (3.0 * std::numbers::pi * kEpsilon0 * kHbar * kSpeedOfLight * kSpeedOfLight *
            kSpeedOfLight);
}

double detection_scale(const QnmParams& p) { return std::sqrt(std::cos(2.0 * p.phi0)); }

double quantization_weight(const QnmParams& p) { return std::cos(2.0 * p.phi0); }

}  // namespace qnmqed::qnm
