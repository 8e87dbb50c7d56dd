#include "qnmqed/scenario.hpp"

#include "qnmqed/csvio.hpp"
#include "qnmqed/dressed.hpp"
#include "qnmqed/hamiltonian.hpp"
#include "qnmqed/perturbative.hpp"
#include "qnmqed/qnm.hpp"
#include "qnmqed/spectra.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#ifndef QNMQED_DATA_DIR
#define QNMQED_DATA_DIR ""
#endif

namespace qnmqed::scen {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// strict-schema helpers
// ---------------------------------------------------------------------------

// Collects every unknown key instead of failing on the first one.
class KeyChecker {
  public:
    KeyChecker(const json& obj, std::string context) : obj_(obj), context_(std::move(context)) {
        if (!obj.is_object()) {
            throw ConfigError(context_ + ": expected a JSON object");
        }
    }

    template <typename T>
    T require(const std::string& key) {
        mark(key);
        if (!obj_.contains(key)) {
            throw ConfigError(context_ + ": missing required key '" + key + "'");
        }
        return get_as<T>(key);
    }

    template <typename T>
    T value(const std::string& key, T fallback) {
        mark(key);
        if (!obj_.contains(key)) return fallback;
        return get_as<T>(key);
    }

    bool contains(const std::string& key) {
        mark(key);
        return obj_.contains(key);
    }

    json sub(const std::string& key) {
        mark(key);
        return obj_.contains(key) ? obj_.at(key) : json();
    }

    void finish() const {
        std::vector<std::string> offending;
        for (const auto& [key, _] : obj_.items()) {
            if (!allowed_.count(key)) offending.push_back(key);
        }
        if (!offending.empty()) {
            std::ostringstream msg;
            msg << context_ << ": unknown key(s):";
            for (const auto& k : offending) msg << " '" << k << "'";
            throw ConfigError(msg.str());
        }
    }

  private:
    void mark(const std::string& key) { allowed_.insert(key); }

    template <typename T>
    T get_as(const std::string& key) {
        try {
            return obj_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(context_ + ": bad value for '" + key + "': " + e.what());
        }
    }

    const json& obj_;
    std::string context_;
    std::set<std::string> allowed_;
};

liou::PiVariant parse_pi(const std::string& s, const std::string& ctx) {
    if (s == "a") return liou::PiVariant::A;
    if (s == "q") return liou::PiVariant::Qquad;
    if (s == "p") return liou::PiVariant::Pquad;
    if (s == "q_plus_p") return liou::PiVariant::QplusP;
    if (s == "q_minus_p") return liou::PiVariant::QminusP;
    throw ConfigError(ctx + ": pi_variant must be one of a/q/p/q_plus_p/q_minus_p, got '" + s +
                      "'");
}

liou::NegativeRatePolicy parse_policy(const std::string& s, const std::string& ctx) {
    if (s == "reject") return liou::NegativeRatePolicy::Reject;
    if (s == "clamp") return liou::NegativeRatePolicy::ClampZero;
    if (s == "allow") return liou::NegativeRatePolicy::Allow;
    throw ConfigError(ctx + ": policy must be reject/clamp/allow, got '" + s + "'");
}

liou::PumpTarget parse_target(const std::string& s, const std::string& ctx) {
    if (s == "cavity") return liou::PumpTarget::Cavity;
    if (s == "matter") return liou::PumpTarget::Matter;
    throw ConfigError(ctx + ": pump_target must be cavity/matter, got '" + s + "'");
}

struct DensitySpec {
    std::string kind = "ab_initio";
    int exponent = -1;
    bool zeta = true;

    qnm::SpectralDensityModel build(const qnm::QnmParams& p) const {
        if (kind == "ab_initio") return qnm::SpectralDensityModel::ab_initio(p);
        if (kind == "flat") return qnm::SpectralDensityModel::flat(p);
        if (kind == "power_law") return qnm::SpectralDensityModel::power_law(p, exponent, zeta);
        throw ConfigError("density.kind must be ab_initio/flat/power_law, got '" + kind + "'");
    }

    json to_json() const {
        json j;
        j["kind"] = kind;
        if (kind == "power_law") {
            j["exponent"] = exponent;
            j["zeta"] = zeta;
        }
        return j;
    }
};

DensitySpec parse_density(const json& j, const std::string& ctx) {
    DensitySpec d;
    if (j.is_null()) return d;
    KeyChecker kc(j, ctx + ".density");
    d.kind = kc.value<std::string>("kind", "ab_initio");
    d.exponent = kc.value<int>("exponent", -1);
    d.zeta = kc.value<bool>("zeta", true);
    kc.finish();
    if (d.kind != "ab_initio" && d.kind != "flat" && d.kind != "power_law") {
        throw ConfigError(ctx + ".density: unknown kind '" + d.kind + "'");
    }
    return d;
}

struct GridSpec {
    std::optional<double> omega_min;
    std::optional<double> omega_max;
    int points = 2000;

    spectra::Grid resolve(double omega_c, double eta_abs, double q_factor) const {
        spectra::Grid g = spectra::default_grid(omega_c, eta_abs, q_factor, points);
        if (omega_min) g.omega_min = *omega_min;
        if (omega_max) g.omega_max = *omega_max;
        return g;
    }

    json to_json(const spectra::Grid& resolved) const {
        json j;
        j["omega_min_eV"] = resolved.omega_min;
        j["omega_max_eV"] = resolved.omega_max;
        j["points"] = resolved.points;
        return j;
    }
};

GridSpec parse_grid(const json& j, const std::string& ctx, int default_points) {
    GridSpec g;
    g.points = default_points;
    if (j.is_null()) return g;
    KeyChecker kc(j, ctx + ".grid");
    if (kc.contains("omega_min_eV")) g.omega_min = kc.require<double>("omega_min_eV");
    if (kc.contains("omega_max_eV")) g.omega_max = kc.require<double>("omega_max_eV");
    g.points = kc.value<int>("points", default_points);
    kc.finish();
    return g;
}

// QNM block: {"file": path} or inline parameters (gamma_c_eV or q_factor).
qnm::QnmParams parse_qnm_block(const json& j, const std::string& ctx,
                               const std::string& config_dir, const std::string& data_dir) {
    if (j.is_null()) throw ConfigError(ctx + ": missing 'qnm' block");
    KeyChecker kc(j, ctx + ".qnm");
    if (kc.contains("file")) {
        const auto rel = kc.require<std::string>("file");
        kc.finish();
        fs::path p(rel);
        if (p.is_absolute() && fs::exists(p)) return qnm::load_qnm_file(p.string());
        for (const auto& base : {config_dir, data_dir}) {
            const fs::path candidate = fs::path(base) / p;
            if (fs::exists(candidate)) return qnm::load_qnm_file(candidate.string());
        }
        throw ConfigError(ctx + ".qnm: file not found: " + rel + " (searched " + config_dir +
                          " and " + data_dir + ")");
    }
    qnm::QnmParams p;
    p.label = kc.value<std::string>("label", "inline");
    p.omega_c = kc.require<double>("omega_c_eV");
    const bool has_gamma = kc.contains("gamma_c_eV");
    const bool has_q = kc.contains("q_factor");
    if (has_gamma == has_q) {
        throw ConfigError(ctx + ".qnm: exactly one of gamma_c_eV / q_factor is required");
    }
    p.gamma_c = has_gamma ? kc.require<double>("gamma_c_eV")
                          : p.omega_c / (2.0 * kc.require<double>("q_factor"));
    const bool has_phi = kc.contains("phi0_rad");
    const bool has_tan = kc.contains("tan_2phi0");
    if (has_phi == has_tan) {
        throw ConfigError(ctx + ".qnm: exactly one of phi0_rad / tan_2phi0 is required");
    }
    p.phi0 = has_phi ? kc.require<double>("phi0_rad")
                     : 0.5 * std::atan(kc.require<double>("tan_2phi0"));
    if (kc.contains("f_amp_re") || kc.contains("f_amp_im")) {
        p.f_amp = cplx(kc.require<double>("f_amp_re"), kc.require<double>("f_amp_im"));
    }
    kc.finish();
    try {
        return qnm::make_qnm_params(std::move(p));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(ctx + ".qnm: " + e.what());
    }
}

json qnm_to_json(const qnm::QnmParams& p) {
    json j;
    j["label"] = p.label;
    j["omega_c_eV"] = p.omega_c;
    j["gamma_c_eV"] = p.gamma_c;
    j["phi0_rad"] = p.phi0;
    if (p.f_amp) {
        j["f_amp_re"] = p.f_amp->real();
        j["f_amp_im"] = p.f_amp->imag();
    }
    return j;
}

// ---------------------------------------------------------------------------
// quantum pipeline shared by spectrum-producing scenarios
// ---------------------------------------------------------------------------

struct QuantumSettings {
    qnm::QnmParams qp;
    cplx eta;  // eta_c for the TLS model, lambda_c for Hopfield
    double omega0 = 0.0;
    int n_fock = 20;
    int n_matter = 12;
    int keep = 24;
    bool hopfield = false;
    liou::PiVariant pi = liou::PiVariant::A;
    DensitySpec density;
    bool secular = false;
    liou::NegativeRatePolicy policy = liou::NegativeRatePolicy::Reject;
    double pump_fraction = 0.01;
    liou::PumpTarget pump_target = liou::PumpTarget::Cavity;
    bool dipole_gauge = false;
    bool convergence_check = true;
};

struct QuantumRun {
    liou::Liouvillian l;
    liou::SteadyState rho;
    dressed::TransitionSet ts;
    double fock_doubling_shift = 0.0;
    std::vector<std::string> warnings;
};

QuantumRun run_quantum(const QuantumSettings& s) {
    ham::CouplingConfig cfg;
    cfg.eta_c = s.hopfield ? cplx(0.0, 0.0) : s.eta;
    cfg.omega_0 = s.omega0;
    cfg.omega_c = s.qp.omega_c;
    cfg.n_fock = s.n_fock;
    cfg.n_matter = s.n_matter;

    Mat h;
    ham::ModelOps model_ops;
    if (s.hopfield) {
        h = ham::hopfield_coulomb(cfg, s.eta);
        const auto target = s.pump_target == liou::PumpTarget::Matter
                                ? ham::DriveTarget::Matter
                                : ham::DriveTarget::Cavity;
        model_ops = ham::hopfield_model_ops(cfg, s.eta, target);
    } else if (s.dipole_gauge) {
        h = ham::dipole_gauge_qrm(cfg);
        model_ops = ham::tls_model_ops_dipole_gauge(cfg);
    } else {
        h = ham::coulomb_single_mode(cfg);
        model_ops = ham::tls_model_ops(cfg);
    }

    const int dim = static_cast<int>(h.rows());
    const int keep = std::min(s.keep, dim);
    const auto ds = dressed::diagonalize(h, keep);
    dressed::TransitionOps top{model_ops.a, model_ops.det, model_ops.drive};
    auto ts = dressed::transitions(ds, top);

    const auto sd = s.density.build(s.qp);
    std::vector<liou::Term> terms;
    terms.push_back(liou::dissipator(ts, s.pi, sd, s.secular, s.policy));
    terms.push_back(
        liou::incoherent_pump(ts, s.pump_target, s.pump_fraction, s.qp, s.secular));

    std::ostringstream desc;
    desc << (s.hopfield ? "hopfield" : "tls") << " pi=" << liou::to_string(s.pi)
         << " density=" << s.density.kind << " policy=" << liou::to_string(s.policy);

    QuantumRun run;
    run.l = liou::assemble(ts.energies, terms, desc.str());
    run.rho = liou::steady_state(run.l);
    run.warnings = run.l.warnings;
    run.warnings.insert(run.warnings.end(), run.rho.warnings.begin(), run.rho.warnings.end());
    run.ts = std::move(ts);

    if (s.convergence_check) {
        if (s.hopfield) {
            // double both truncations and track the lowest excitation energies
            ham::CouplingConfig big = cfg;
            big.n_fock *= 2;
            big.n_matter *= 2;
            const Mat h2 = ham::hopfield_coulomb(big, s.eta);
            Eigen::SelfAdjointEigenSolver<Mat> s1(h, Eigen::EigenvaluesOnly);
            Eigen::SelfAdjointEigenSolver<Mat> s2(h2, Eigen::EigenvaluesOnly);
            double shift = 0.0;
            for (int j = 1; j <= std::min(5, dim - 1); ++j) {
                shift = std::max(shift, std::abs((s1.eigenvalues()(j) - s1.eigenvalues()(0)) -
                                                 (s2.eigenvalues()(j) - s2.eigenvalues()(0))));
            }
            run.fock_doubling_shift = shift;
        } else {
            run.fock_doubling_shift = ham::fock_doubling_shift(cfg, 5, s.dipole_gauge);
        }
    }
    return run;
}

json settings_to_json(const QuantumSettings& s) {
    json j;
    j["qnm"] = qnm_to_json(s.qp);
    j[s.hopfield ? "lambda_abs" : "eta_abs"] = std::abs(s.eta);
    j[s.hopfield ? "lambda_phase_rad" : "eta_phase_rad"] = std::arg(s.eta);
    j["omega0_eV"] = s.omega0;
    j["n_fock"] = s.n_fock;
    if (s.hopfield) j["n_matter"] = s.n_matter;
    j["keep"] = s.keep;
    j["pi_variant"] = liou::to_string(s.pi);
    j["density"] = s.density.to_json();
    j["secular"] = s.secular;
    j["policy"] = liou::to_string(s.policy);
    j["pump_fraction"] = s.pump_fraction;
    j["pump_target"] = s.pump_target == liou::PumpTarget::Cavity ? "cavity" : "matter";
    return j;
}

// ---------------------------------------------------------------------------
// artifact helpers
// ---------------------------------------------------------------------------

struct ArtifactSink {
    fs::path out_dir;
    std::vector<std::string> artifacts;
    std::vector<std::string> warnings;

    void write_csv(const std::string& name, const csvio::Table& table) {
        const fs::path path = out_dir / name;
        csvio::write_file(path.string(), table.to_csv());
        artifacts.push_back(path.string());
    }

    void write_sidecar(const std::string& name, const json& resolved,
                       const std::vector<std::string>& scenario_warnings,
                       const json& extra = json()) {
        json side;
        side["schema_version"] = 1;
        side["scenario"] = resolved;
        side["warnings"] = scenario_warnings;
        if (!extra.is_null()) side["diagnostics"] = extra;
        json outputs = json::array();
        for (const auto& a : artifacts) outputs.push_back(fs::path(a).filename().string());
        side["outputs"] = outputs;
        const fs::path path = out_dir / name;
        csvio::write_file(path.string(), side.dump(2) + "\n");
        artifacts.push_back(path.string());
    }
};

csvio::Table spectrum_table(const spectra::SpectrumResult& s, double omega_c) {
    csvio::Table t;
    t.header = {"omega_eV", "omega_over_omega_c",
                s.normalization == spectra::Normalization::Peak ? "S_normalized" : "S_raw"};
    for (std::size_t i = 0; i < s.omega.size(); ++i) {
        t.rows.push_back({s.omega[i], s.omega[i] / omega_c, s.value[i]});
    }
    return t;
}

// ---------------------------------------------------------------------------
// scenario definitions
// ---------------------------------------------------------------------------

struct Context {
    std::string config_dir;
    std::string data_dir;
    fs::path out_dir;
    Overrides overrides;
};

QuantumSettings parse_quantum_keys(KeyChecker& kc, const std::string& ctx, const Context& c,
                                   bool hopfield) {
    QuantumSettings s;
    s.hopfield = hopfield;
    s.qp = parse_qnm_block(kc.sub("qnm"), ctx, c.config_dir, c.data_dir);
    const char* mag_key = hopfield ? "lambda_abs" : "eta_abs";
    const char* phase_key = hopfield ? "lambda_phase_rad" : "eta_phase_rad";
    const double mag = kc.require<double>(mag_key);
    const double phase = kc.value<double>(phase_key, 0.0);
    s.eta = std::polar(mag, phase);
    s.omega0 = kc.value<double>("omega0_eV", s.qp.omega_c);
    s.n_fock = kc.value<int>("n_fock", hopfield ? 12 : 20);
    s.n_matter = kc.value<int>("n_matter", 12);
    s.keep = kc.value<int>("keep", hopfield ? 30 : 24);
    s.pi = parse_pi(kc.value<std::string>("pi_variant", "a"), ctx);
    s.density = parse_density(kc.sub("density"), ctx);
    s.secular = kc.value<bool>("secular", false);
    s.policy = parse_policy(kc.value<std::string>("policy", "reject"), ctx);
    s.pump_fraction = kc.value<double>("pump_fraction", hopfield ? 1e-4 : 1e-2);
    s.pump_target = parse_target(kc.value<std::string>("pump_target", "cavity"), ctx);
    s.convergence_check = kc.value<bool>("convergence_check", true);

    if (c.overrides.policy) s.policy = *c.overrides.policy;
    if (c.overrides.secular) s.secular = *c.overrides.secular;
    if (c.overrides.n_fock) s.n_fock = *c.overrides.n_fock;
    if (c.overrides.keep) s.keep = *c.overrides.keep;
    return s;
}

void run_spectrum_scenario(const json& jscen, const std::string& name, const Context& c,
                           ArtifactSink& sink, bool validate_only) {
    const std::string ctx = "scenario '" + name + "'";
    KeyChecker kc(jscen, ctx);
    kc.value<std::string>("kind", "spectrum");
    kc.value<std::string>("name", name);
    auto s = parse_quantum_keys(kc, ctx, c, false);
    const GridSpec gspec = parse_grid(kc.sub("grid"), ctx, 2000);
    const std::string norm_key = kc.value<std::string>("normalization", "peak");
    kc.finish();
    if (norm_key != "peak" && norm_key != "raw") {
        throw ConfigError(ctx + ": normalization must be peak/raw");
    }
    if (validate_only) return;
    const auto norm = norm_key == "peak" ? spectra::Normalization::Peak
                                         : spectra::Normalization::Raw;

    const auto run = run_quantum(s);
    const auto grid = gspec.resolve(s.qp.omega_c, std::abs(s.eta), s.qp.q_factor());
    auto spec = spectra::emission_spectrum(run.l, run.rho, run.ts, grid, norm);

    json resolved = settings_to_json(s);
    resolved["kind"] = "spectrum";
    resolved["name"] = name;
    resolved["grid"] = gspec.to_json(grid);
    resolved["normalization"] = norm_key;

    std::vector<std::string> warnings = run.warnings;
    warnings.insert(warnings.end(), spec.warnings.begin(), spec.warnings.end());

    json extra;
    extra["fock_doubling_shift_eV"] = run.fock_doubling_shift;
    extra["raw_peak"] = spec.raw_peak;
    extra["retained_transitions"] = run.ts.items.size();

    sink.write_csv(name + ".csv", spectrum_table(spec, s.qp.omega_c));
    sink.write_sidecar(name + ".json", resolved, warnings, extra);
}

void run_linewidth_scenario(const json& jscen, const std::string& name, const Context& c,
                            ArtifactSink& sink, bool validate_only) {
    const std::string ctx = "scenario '" + name + "'";
    KeyChecker kc(jscen, ctx);
    kc.value<std::string>("kind", "linewidth_sweep");
    kc.value<std::string>("name", name);
    auto base = parse_quantum_keys(kc, ctx, c, false);
    std::vector<double> phi_list = kc.value<std::vector<double>>("phi0_list", {base.qp.phi0});
    std::vector<double> eta_values = kc.require<std::vector<double>>("eta_values");
    const int points = kc.value<int>("grid_points", 1600);
    kc.finish();
    if (eta_values.empty()) throw ConfigError(ctx + ": eta_values must be nonempty");
    if (validate_only) return;

    std::vector<std::string> warnings;
    json extra;
    extra["curves"] = json::array();

    for (std::size_t pi_idx = 0; pi_idx < phi_list.size(); ++pi_idx) {
        QuantumSettings s = base;
        qnm::QnmParams qp = base.qp;
        qp.phi0 = phi_list[pi_idx];
        s.qp = qnm::make_qnm_params(qp);

        csvio::Table t;
        t.header = {"eta_abs",
                    "omega_minus_eV",
                    "omega_plus_eV",
                    "gamma_minus_eV",
                    "gamma_plus_eV",
                    "gamma_minus_over_kappa",
                    "gamma_plus_over_kappa",
                    "bs_gamma_minus_eV",
                    "bs_gamma_plus_eV",
                    "residual_rms"};
        for (double eta : eta_values) {
            s.eta = std::polar(eta, std::arg(base.eta));
            const auto run = run_quantum(s);
            const auto grid =
                spectra::default_grid(s.qp.omega_c, eta, s.qp.q_factor(), points);
            const auto spec = spectra::emission_spectrum(run.l, run.rho, run.ts, grid,
                                                         spectra::Normalization::Peak);
            const double kappa = s.qp.kappa_c();
            const double wmin = s.omega0 * (1.0 - eta) - 3.0 * kappa;
            const double wmax = s.omega0 * (1.0 + eta) + 3.0 * kappa;
            const auto fit = spectra::fit_two_lorentzians(spec, wmin, wmax);
            const auto bs = pert::bs_linewidths(s.qp, eta);
            t.rows.push_back({eta, fit.omega_minus, fit.omega_plus, fit.gamma_minus,
                              fit.gamma_plus, fit.gamma_minus / kappa, fit.gamma_plus / kappa,
                              bs.first, bs.second, fit.residual_rms});
            for (const auto& w : run.warnings) warnings.push_back(w);
        }
        std::ostringstream fname;
        fname << name << "_phi" << pi_idx << ".csv";
        sink.write_csv(fname.str(), t);
        json curve;
        curve["phi0_rad"] = phi_list[pi_idx];
        curve["file"] = fname.str();
        extra["curves"].push_back(curve);
    }

    json resolved = settings_to_json(base);
    resolved["kind"] = "linewidth_sweep";
    resolved["name"] = name;
    resolved["phi0_list"] = phi_list;
    resolved["eta_values"] = eta_values;
    resolved["grid_points"] = points;
    std::sort(warnings.begin(), warnings.end());
    warnings.erase(std::unique(warnings.begin(), warnings.end()), warnings.end());
    sink.write_sidecar(name + ".json", resolved, warnings, extra);
}

void run_purcell_scenario(const json& jscen, const std::string& name, const Context& c,
                          ArtifactSink& sink, bool validate_only) {
    const std::string ctx = "scenario '" + name + "'";
    KeyChecker kc(jscen, ctx);
    kc.value<std::string>("kind", "purcell");
    kc.value<std::string>("name", name);
    const auto qp = parse_qnm_block(kc.sub("qnm"), ctx, c.config_dir, c.data_dir);
    std::vector<qnm::QnmParams> extra_modes;
    if (kc.contains("extra_modes")) {
        for (const auto& jm : kc.sub("extra_modes")) {
            extra_modes.push_back(parse_qnm_block(jm, ctx, c.config_dir, c.data_dir));
        }
    }
    const double dipole_e_nm = kc.value<double>("dipole_e_nm", 1.0);
    GridSpec gspec = parse_grid(kc.sub("grid"), ctx, 800);
    kc.finish();
    if (validate_only) return;

    if (!qp.f_amp) {
        throw ConfigError(ctx + ": purcell scenario needs a QNM with a field amplitude");
    }
    spectra::Grid grid = spectra::default_grid(qp.omega_c, 0.0, qp.q_factor(), gspec.points);
    grid.omega_min = gspec.omega_min.value_or(std::max(qp.omega_c - 4.0 * qp.kappa_c(),
                                                       0.02 * qp.omega_c));
    grid.omega_max = gspec.omega_max.value_or(qp.omega_c + 4.0 * qp.kappa_c());

    constexpr double kDipoleSI = 1.602176634e-28;  // 1 e*nm in C*m
    const double d_si = dipole_e_nm * kDipoleSI;

    std::vector<qnm::ProjectedMode> modes;
    modes.push_back({qp, *qp.f_amp});
    std::vector<qnm::ProjectedMode> all_modes = modes;
    for (const auto& m : extra_modes) {
        if (!m.f_amp) throw ConfigError(ctx + ": extra mode '" + m.label + "' lacks f_amp");
        all_modes.push_back({m, *m.f_amp});
    }

    // dipole-gauge coupling magnitude for the closed-form rate
    const double eta_mag =
        qnm::eta_from_field(std::abs(*qp.f_amp), qp.omega_c, dipole_e_nm) *
        qnm::detection_scale(qp);
    const double g_mag = qp.omega_c * eta_mag;

    csvio::Table t;
    t.header = {"omega0_eV",        "omega0_over_omega_c", "purcell_single",
                "purcell_multi",    "gamma_over_lorentzian", "zero_phase_line"};
    const double gamma_peak = qnm::purcell_rate_single(qp, g_mag, qp.omega_c);
    for (double w : grid.values()) {
        const double w_rad = qnm::ev_to_rad_per_s(w);
        const double g0 = qnm::free_space_rate(d_si, w_rad);
        const double single_si =
            qnm::purcell_rate_multimode({{qp, *qp.f_amp}}, d_si, w);
        const double multi_si = qnm::purcell_rate_multimode(all_modes, d_si, w);
        const double ratio = qnm::purcell_rate_single(qp, g_mag, w) /
                             qnm::lorentzian_norm(qp, gamma_peak, w);
        t.rows.push_back(
            {w, w / qp.omega_c, single_si / g0, multi_si / g0, ratio, w / qp.omega_c});
    }
    sink.write_csv(name + ".csv", t);

    json resolved;
    resolved["kind"] = "purcell";
    resolved["name"] = name;
    resolved["qnm"] = qnm_to_json(qp);
    json jmodes = json::array();
    for (const auto& m : extra_modes) jmodes.push_back(qnm_to_json(m));
    resolved["extra_modes"] = jmodes;
    resolved["dipole_e_nm"] = dipole_e_nm;
    resolved["grid"] = gspec.to_json(grid);
    sink.write_sidecar(name + ".json", resolved, {}, json());
}

csvio::Table criteria_table(const std::vector<qnm::QnmParams>& entries) {
    csvio::Table t;
    t.header = {"label",     "omega_c_eV", "gamma_c_eV", "kappa_c_eV", "Q_c",
                "tan_2phi0", "phi0_rad",   "eta1_max",   "Omega_BB",   "eta_est"};
    for (const auto& p : entries) {
        std::vector<std::string> row;
        row.push_back(p.label);
        row.push_back(csvio::format_number(p.omega_c));
        row.push_back(csvio::format_number(p.gamma_c));
        row.push_back(csvio::format_number(p.kappa_c()));
        row.push_back(csvio::format_number(p.q_factor()));
        row.push_back(csvio::format_number(std::tan(2.0 * p.phi0)));
        row.push_back(csvio::format_number(p.phi0));
        row.push_back(csvio::format_number(qnm::eta_max_first_order(p)));
        row.push_back(csvio::format_number(qnm::broadband_threshold(p).value));
        row.push_back(p.f_amp ? csvio::format_number(qnm::eta_from_field(
                                    std::abs(*p.f_amp), p.omega_c, 1.0))
                              : std::string());
        t.text_rows.push_back(std::move(row));
    }
    return t;
}

void run_criteria_scenario(const json& jscen, const std::string& name, const Context& c,
                           ArtifactSink& sink, bool validate_only) {
    const std::string ctx = "scenario '" + name + "'";
    KeyChecker kc(jscen, ctx);
    kc.value<std::string>("kind", "criteria");
    kc.value<std::string>("name", name);
    std::vector<qnm::QnmParams> entries;
    if (kc.contains("qnm_files")) {
        for (const auto& jf : kc.sub("qnm_files")) {
            json wrap;
            wrap["file"] = jf.get<std::string>();
            entries.push_back(parse_qnm_block(wrap, ctx, c.config_dir, c.data_dir));
        }
    } else {
        const std::string dir = kc.value<std::string>("qnm_dir", c.data_dir);
        if (!fs::is_directory(dir)) throw ConfigError(ctx + ": not a directory: " + dir);
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (e.is_regular_file() && e.path().extension() == ".json") {
                files.push_back(e.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) entries.push_back(qnm::load_qnm_file(f.string()));
    }
    kc.finish();
    if (validate_only) return;

    sink.write_csv(name + ".csv", criteria_table(entries));
    json resolved;
    resolved["kind"] = "criteria";
    resolved["name"] = name;
    json labels = json::array();
    for (const auto& e : entries) labels.push_back(e.label);
    resolved["entries"] = labels;
    sink.write_sidecar(name + ".json", resolved, {}, json());
}

void run_hopfield_scenario(const json& jscen, const std::string& name, const Context& c,
                           ArtifactSink& sink, bool validate_only) {
    const std::string ctx = "scenario '" + name + "'";
    KeyChecker kc(jscen, ctx);
    kc.value<std::string>("kind", "hopfield");
    kc.value<std::string>("name", name);
    auto s = parse_quantum_keys(kc, ctx, c, true);
    const GridSpec gspec = parse_grid(kc.sub("grid"), ctx, 2000);
    const bool with_classical = kc.value<bool>("classical_comparison", true);
    kc.finish();
    if (validate_only) return;

    const auto run = run_quantum(s);
    spectra::Grid grid = gspec.resolve(s.qp.omega_c, std::abs(s.eta), s.qp.q_factor());
    const auto quantum =
        spectra::emission_spectrum(run.l, run.rho, run.ts, grid, spectra::Normalization::Peak);
    sink.write_csv(name + "_quantum.csv", spectrum_table(quantum, s.qp.omega_c));

    json extra;
    extra["fock_doubling_shift_eV"] = run.fock_doubling_shift;
    auto peaks_json = [](const spectra::SpectrumResult& sp) {
        json out = json::array();
        auto peaks = spectra::find_peaks(sp);
        const std::size_t n = std::min<std::size_t>(peaks.size(), 6);
        for (std::size_t i = 0; i < n; ++i) {
            json p;
            p["omega_eV"] = peaks[i].first;
            p["height"] = peaks[i].second;
            out.push_back(p);
        }
        return out;
    };
    extra["quantum_peaks"] = peaks_json(quantum);

    if (with_classical) {
        const auto cl_qnm = spectra::classical_spectrum(
            s.qp, s.eta, s.omega0, 1.0, spectra::ClassicalVariant::Qnm, grid,
            spectra::Normalization::Peak);
        const auto cl_neg = spectra::classical_spectrum(
            s.qp, s.eta, s.omega0, 1.0, spectra::ClassicalVariant::QnmNegFreq, grid,
            spectra::Normalization::Peak);
        sink.write_csv(name + "_classical_qnm.csv", spectrum_table(cl_qnm, s.qp.omega_c));
        sink.write_csv(name + "_classical_negfreq.csv", spectrum_table(cl_neg, s.qp.omega_c));
        extra["classical_qnm_peaks"] = peaks_json(cl_qnm);
        extra["classical_negfreq_peaks"] = peaks_json(cl_neg);
    }

    json resolved = settings_to_json(s);
    resolved["kind"] = "hopfield";
    resolved["name"] = name;
    resolved["grid"] = gspec.to_json(grid);
    resolved["classical_comparison"] = with_classical;
    std::vector<std::string> warnings = run.warnings;
    warnings.insert(warnings.end(), quantum.warnings.begin(), quantum.warnings.end());
    sink.write_sidecar(name + ".json", resolved, warnings, extra);
}

void run_classical_scenario(const json& jscen, const std::string& name, const Context& c,
                            ArtifactSink& sink, bool validate_only) {
    const std::string ctx = "scenario '" + name + "'";
    KeyChecker kc(jscen, ctx);
    kc.value<std::string>("kind", "classical");
    kc.value<std::string>("name", name);
    const auto qp = parse_qnm_block(kc.sub("qnm"), ctx, c.config_dir, c.data_dir);
    const double mag = kc.require<double>("eta_abs");
    const double phase = kc.value<double>("eta_phase_rad", 0.0);
    const double omega0 = kc.value<double>("omega0_eV", qp.omega_c);
    const double e0 = kc.value<double>("e0", 1.0);
    std::vector<std::string> variants =
        kc.value<std::vector<std::string>>("variants", {"qnm", "qnm_negfreq"});
    const GridSpec gspec = parse_grid(kc.sub("grid"), ctx, 2000);
    kc.finish();

    std::vector<std::pair<std::string, spectra::ClassicalVariant>> selected;
    for (const auto& v : variants) {
        if (v == "bare") selected.emplace_back(v, spectra::ClassicalVariant::Bare);
        else if (v == "qnm") selected.emplace_back(v, spectra::ClassicalVariant::Qnm);
        else if (v == "qnm_negfreq")
            selected.emplace_back(v, spectra::ClassicalVariant::QnmNegFreq);
        else throw ConfigError(ctx + ": unknown variant '" + v + "'");
    }
    if (validate_only) return;

    const spectra::Grid grid = gspec.resolve(qp.omega_c, mag, qp.q_factor());
    std::vector<std::string> warnings;
    for (const auto& [vname, variant] : selected) {
        const auto sp = spectra::classical_spectrum(qp, std::polar(mag, phase), omega0, e0,
                                                    variant, grid,
                                                    spectra::Normalization::Peak);
        warnings.insert(warnings.end(), sp.warnings.begin(), sp.warnings.end());
        sink.write_csv(name + "_" + vname + ".csv", spectrum_table(sp, qp.omega_c));
    }

    json resolved;
    resolved["kind"] = "classical";
    resolved["name"] = name;
    resolved["qnm"] = qnm_to_json(qp);
    resolved["eta_abs"] = mag;
    resolved["eta_phase_rad"] = phase;
    resolved["omega0_eV"] = omega0;
    resolved["e0"] = e0;
    resolved["variants"] = variants;
    resolved["grid"] = gspec.to_json(grid);
    sink.write_sidecar(name + ".json", resolved, warnings, json());
}

void dispatch_scenario(const json& jscen, const Context& c, ArtifactSink& sink,
                       bool validate_only, int index) {
    if (!jscen.is_object()) throw ConfigError("scenario entries must be JSON objects");
    const std::string kind = jscen.value("kind", "");
    std::ostringstream default_name;
    default_name << kind << "_" << index;
    const std::string name = jscen.value("name", default_name.str());

    if (kind == "spectrum") run_spectrum_scenario(jscen, name, c, sink, validate_only);
    else if (kind == "linewidth_sweep")
        run_linewidth_scenario(jscen, name, c, sink, validate_only);
    else if (kind == "purcell") run_purcell_scenario(jscen, name, c, sink, validate_only);
    else if (kind == "criteria") run_criteria_scenario(jscen, name, c, sink, validate_only);
    else if (kind == "hopfield") run_hopfield_scenario(jscen, name, c, sink, validate_only);
    else if (kind == "classical") run_classical_scenario(jscen, name, c, sink, validate_only);
    else {
        throw ConfigError("scenario '" + name + "': unknown kind '" + kind +
                          "' (expected spectrum/linewidth_sweep/purcell/criteria/hopfield/"
                          "classical)");
    }
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

json set_by_path(json scenario, const std::string& axis, double value) {
    json* node = &scenario;
    std::string key = axis;
    for (std::size_t pos = key.find('.'); pos != std::string::npos; pos = key.find('.')) {
        const std::string head = key.substr(0, pos);
        if (!node->contains(head) || !(*node)[head].is_object()) {
            (*node)[head] = json::object();
        }
        node = &(*node)[head];
        key = key.substr(pos + 1);
    }
    if (node->contains(key) && !(*node)[key].is_number()) {
        throw ConfigError("sweep: axis '" + axis + "' is not a numeric parameter");
    }
    (*node)[key] = value;
    return scenario;
}

void run_sweep(const json& jsweep, const Context& c, ArtifactSink& sink, bool validate_only) {
    KeyChecker kc(jsweep, "sweep");
    const std::string axis = kc.require<std::string>("axis");
    std::vector<double> values = kc.require<std::vector<double>>("values");
    int workers = kc.value<int>("workers", 1);
    const json scenario = kc.sub("scenario");
    kc.finish();
    if (scenario.is_null()) throw ConfigError("sweep: missing 'scenario' block");
    if (values.empty()) throw ConfigError("sweep: values must be nonempty");
    if (c.overrides.workers) workers = *c.overrides.workers;
    workers = std::max(1, workers);

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() != values.size() ||
        !std::is_sorted(values.begin(), values.end())) {
        sink.warnings.push_back("sweep: axis values were deduplicated and sorted");
    }

    const std::string base_name = scenario.value("name", std::string("sweep"));

    if (validate_only) {
        // validate the first point's resolved scenario
        ArtifactSink dummy;
        dispatch_scenario(set_by_path(scenario, axis, sorted.front()), c, dummy, true, 0);
        return;
    }

    struct PointOutcome {
        std::vector<std::string> artifacts;
        std::string error;
    };
    std::vector<PointOutcome> outcomes(sorted.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= sorted.size()) return;
            std::ostringstream pname;
            pname << base_name << "_p" << i;
            json point = set_by_path(scenario, axis, sorted[i]);
            point["name"] = pname.str();
            ArtifactSink local;
            local.out_dir = sink.out_dir;
            try {
                dispatch_scenario(point, c, local, false, static_cast<int>(i));
                outcomes[i].artifacts = local.artifacts;
            } catch (const std::exception& e) {
                outcomes[i].error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const int nthreads = std::min<std::size_t>(workers, sorted.size());
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    csvio::Table summary;
    summary.header = {"axis_value", "status", "detail"};
    int failures = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        std::vector<std::string> row;
        row.push_back(csvio::format_number(sorted[i]));
        if (outcomes[i].error.empty()) {
            row.push_back("ok");
            row.push_back(outcomes[i].artifacts.empty()
                              ? std::string()
                              : fs::path(outcomes[i].artifacts.front()).filename().string());
            for (const auto& a : outcomes[i].artifacts) sink.artifacts.push_back(a);
        } else {
            ++failures;
            row.push_back("error");
            std::string msg = outcomes[i].error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            row.push_back(msg);
        }
        summary.text_rows.push_back(std::move(row));
    }
    sink.write_csv(base_name + "_sweep_summary.csv", summary);
    if (failures > 0) {
        std::ostringstream msg;
        msg << "sweep: " << failures << " of " << sorted.size() << " points failed";
        sink.warnings.push_back(msg.str());
    }

    json resolved;
    resolved["kind"] = "sweep";
    resolved["axis"] = axis;
    resolved["values"] = sorted;
    resolved["workers"] = workers;
    resolved["scenario"] = scenario;
    sink.write_sidecar(base_name + "_sweep.json", resolved, sink.warnings, json());
}

// ---------------------------------------------------------------------------
// config entry points
// ---------------------------------------------------------------------------

json load_config(const std::string& config_path) {
    const std::string text = csvio::read_file(config_path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(config_path + ": JSON parse failure: " + e.what());
    }
    if (!j.is_object()) throw ConfigError(config_path + ": expected a JSON object");
    if (!j.contains("schema_version")) {
        throw ConfigError(config_path + ": missing schema_version");
    }
    if (j.at("schema_version") != 1) {
        throw ConfigError(config_path + ": unsupported schema_version (expected 1)");
    }
    static const std::set<std::string> known = {"schema_version", "scenarios", "sweep"};
    std::vector<std::string> offending;
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) offending.push_back(key);
    }
    if (!offending.empty()) {
        std::ostringstream msg;
        msg << config_path << ": unknown key(s):";
        for (const auto& k : offending) msg << " '" << k << "'";
        throw ConfigError(msg.str());
    }
    if (j.contains("scenarios") && j.contains("sweep")) {
        throw ConfigError(config_path + ": give either 'scenarios' or 'sweep', not both");
    }
    return j;
}

Context make_context(const std::string& config_path, const Overrides& overrides) {
    Context c;
    c.config_dir = fs::absolute(fs::path(config_path)).parent_path().string();
    c.data_dir = overrides.data_dir.value_or(default_data_dir());
    c.out_dir = overrides.out_dir.value_or(".");
    c.overrides = overrides;
    return c;
}

RunReport process_config(const std::string& config_path, const Overrides& overrides,
                         bool validate_only) {
    const json j = load_config(config_path);
    Context c = make_context(config_path, overrides);

    ArtifactSink sink;
    sink.out_dir = c.out_dir;
    if (!validate_only) fs::create_directories(sink.out_dir);

    if (j.contains("sweep")) {
        run_sweep(j.at("sweep"), c, sink, validate_only);
    } else {
        const json scenarios = j.value("scenarios", json::array());
        if (!scenarios.is_array()) {
            throw ConfigError(config_path + ": 'scenarios' must be an array");
        }
        if (scenarios.empty()) {
            sink.warnings.push_back("no scenarios in config; nothing to do");
        }
        int index = 0;
        for (const auto& jscen : scenarios) {
            dispatch_scenario(jscen, c, sink, validate_only, index++);
        }
    }
    RunReport report;
    report.artifacts = sink.artifacts;
    report.warnings = sink.warnings;
    return report;
}

}  // namespace

std::string default_data_dir() {
    if (const char* env = std::getenv("QNM_USC_DATA"); env && *env) return env;
    return QNMQED_DATA_DIR;
}

void validate_config(const std::string& config_path, const Overrides& overrides) {
    process_config(config_path, overrides, true);
}

RunReport run_config(const std::string& config_path, const Overrides& overrides) {
    return process_config(config_path, overrides, false);
}

RunReport run_criteria(const std::vector<std::string>& qnm_files, const std::string& out_dir) {
    std::vector<qnm::QnmParams> entries;
    for (const auto& f : qnm_files) entries.push_back(qnm::load_qnm_file(f));
    ArtifactSink sink;
    sink.out_dir = out_dir;
    fs::create_directories(sink.out_dir);
    sink.write_csv("criteria.csv", criteria_table(entries));
    RunReport report;
    report.artifacts = sink.artifacts;
    return report;
}

}  // namespace qnmqed::scen
