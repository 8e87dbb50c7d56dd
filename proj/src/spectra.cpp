#include "qnmqed/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qnmqed::spectra {

namespace {

// X = sum_alpha c_det_alpha |j><k| over retained transitions
Mat detection_matrix(const dressed::TransitionSet& ts) {
    Mat x = Mat::Zero(ts.kept, ts.kept);
    for (const auto& t : ts.items) x(t.j, t.k) += t.c_det;
    return x;
}

struct RegressionProblem {
    Vec b;  // vec(rho_ss X^dag)
    Vec r;  // functional: S = Re(r^T y)
};

RegressionProblem regression_problem(const liou::SteadyState& rho_ss,
                                     const dressed::TransitionSet& ts) {
    const int m = ts.kept;
    const Mat x = detection_matrix(ts);
    const Mat bmat = rho_ss.rho * x.adjoint();
    RegressionProblem p;
    p.b = Eigen::Map<const Vec>(bmat.data(), m * m);
    const Mat xt = x.transpose();
    p.r = Eigen::Map<const Vec>(xt.data(), m * m);
    return p;
}

// back-substitution of (T - i omega I) z = c for upper-triangular T
void shifted_upper_solve(const Mat& t, double omega, const Vec& c, Vec& z) {
    const int n = static_cast<int>(t.rows());
    for (int i = n - 1; i >= 0; --i) {
        cplx acc = c(i);
        for (int j = i + 1; j < n; ++j) acc -= t(i, j) * z(j);
        z(i) = acc / (t(i, i) - cplx(0.0, omega));
    }
}

SpectrumResult finalize(std::vector<double> omega, std::vector<double> value,
                        Normalization norm, std::vector<std::string> warnings) {
    SpectrumResult s;
    s.omega = std::move(omega);
    s.value = std::move(value);
    s.warnings = std::move(warnings);
    s.normalization = norm;
    double peak = 0.0;
    for (double v : s.value) peak = std::max(peak, v);
    s.raw_peak = peak;
    if (peak > 0.0) {
        double floor = 0.0;
        for (double v : s.value) floor = std::min(floor, v);
        if (floor < -1e-8 * peak) {
            std::ostringstream msg;
            msg << "spectrum has negative excursion " << floor / peak
                << " of peak (non-secular terms)";
            s.warnings.push_back(msg.str());
        }
    }
    if (norm == Normalization::Peak && peak > 0.0) {
        for (double& v : s.value) v /= peak;
    }
    return s;
}

}  // namespace

std::vector<double> Grid::values() const {
    if (points < 2) throw std::invalid_argument("Grid: needs at least 2 points");
    if (!(omega_min > 0.0) || !(omega_max > omega_min)) {
        throw std::invalid_argument("Grid: require 0 < omega_min < omega_max");
    }
    std::vector<double> w(points);
    const double step = (omega_max - omega_min) / (points - 1);
    for (int i = 0; i < points; ++i) w[i] = omega_min + step * i;
    return w;
}

Grid default_grid(double omega_c, double eta_abs, double q_factor, int points) {
    Grid g;
    const double span = 3.0 * eta_abs + 6.0 / q_factor;
    g.omega_min = std::max(omega_c * (1.0 - span), 0.02 * omega_c);
    g.omega_max = omega_c * (1.0 + span);
    g.points = points;
    return g;
}

namespace {

// Coordinate subspace reachable from supp(b) under repeated application of a
// (closure over the sparsity pattern); the resolvent applied to b never
// leaves it, so restricting the solve there is exact.
std::vector<int> reachable_closure(const Mat& a, const Vec& b) {
    const int n = static_cast<int>(a.rows());
    const double tol = 1e-300;
    std::vector<char> in(n, 0);
    std::vector<int> stack;
    for (int i = 0; i < n; ++i) {
        if (std::abs(b(i)) > tol) {
            in[i] = 1;
            stack.push_back(i);
        }
    }
    while (!stack.empty()) {
        const int j = stack.back();
        stack.pop_back();
        for (int i = 0; i < n; ++i) {
            if (!in[i] && std::abs(a(i, j)) > tol) {
                in[i] = 1;
                stack.push_back(i);
            }
        }
    }
    std::vector<int> order;
    for (int i = 0; i < n; ++i) {
        if (in[i]) order.push_back(i);
    }
    return order;
}

}  // namespace

SpectrumResult emission_spectrum(const liou::Liouvillian& l, const liou::SteadyState& rho_ss,
                                 const dressed::TransitionSet& ts, const Grid& grid,
                                 Normalization norm) {
    const auto omegas = grid.values();
    const auto prob = regression_problem(rho_ss, ts);
    const Mat a_full = -l.matrix;

    const auto idx = reachable_closure(a_full, prob.b);
    const int ns = static_cast<int>(idx.size());
    Mat a(ns, ns);
    Vec b(ns), r(ns);
    for (int i = 0; i < ns; ++i) {
        b(i) = prob.b(idx[i]);
        r(i) = prob.r(idx[i]);
        for (int j = 0; j < ns; ++j) a(i, j) = a_full(idx[i], idx[j]);
    }

    Eigen::ComplexSchur<Mat> schur(a, true);
    if (schur.info() != Eigen::Success) {
        // rare; fall back to the per-point factorization path
        return emission_spectrum_direct(l, rho_ss, ts, grid, norm);
    }
    const Mat& t = schur.matrixT();
    const Mat& u = schur.matrixU();
    const Vec bu = u.adjoint() * b;
    const Vec ru = u.transpose() * r;

    std::vector<double> value(omegas.size());
    Vec z(ns);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        shifted_upper_solve(t, omegas[i], bu, z);
        value[i] = (ru.transpose() * z).value().real();
        if (!std::isfinite(value[i])) {
            throw NumericalError(
                "emission_spectrum: singular resolvent at omega = " +
                std::to_string(omegas[i]) +
                " eV (undamped frequency; check the negative-rate policy)");
        }
    }
    return finalize(omegas, std::move(value), norm, {});
}

SpectrumResult emission_spectrum_direct(const liou::Liouvillian& l,
                                        const liou::SteadyState& rho_ss,
                                        const dressed::TransitionSet& ts, const Grid& grid,
                                        Normalization norm) {
    const auto omegas = grid.values();
    const auto prob = regression_problem(rho_ss, ts);
    const Mat a = -l.matrix;
    const int n = static_cast<int>(a.rows());

    std::vector<double> value(omegas.size());
    Mat shifted(n, n);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        shifted = a;
        shifted.diagonal().array() -= cplx(0.0, omegas[i]);
        const Vec y = Eigen::PartialPivLU<Mat>(shifted).solve(prob.b);
        if (!y.allFinite()) {
            throw NumericalError(
                "emission_spectrum: singular resolvent at omega = " + std::to_string(omegas[i]) +
                " eV (undamped frequency; check the negative-rate policy)");
        }
        value[i] = (prob.r.transpose() * y).value().real();
    }
    return finalize(omegas, std::move(value), norm, {});
}

std::vector<double> emission_spectrum_time_domain(const liou::Liouvillian& l,
                                                  const liou::SteadyState& rho_ss,
                                                  const dressed::TransitionSet& ts,
                                                  const std::vector<double>& omegas,
                                                  double t_max, double dt) {
    const auto prob = regression_problem(rho_ss, ts);
    const int steps = static_cast<int>(std::ceil(t_max / dt));

    // correlation samples g(t_k) = r^T v(t_k), RK4 propagation of v' = L v
    std::vector<cplx> g(steps + 1);
    Vec v = prob.b;
    g[0] = (prob.r.transpose() * v).value();
    Vec k1, k2, k3, k4;
    for (int s = 1; s <= steps; ++s) {
        k1 = l.matrix * v;
        k2 = l.matrix * (v + 0.5 * dt * k1);
        k3 = l.matrix * (v + 0.5 * dt * k2);
        k4 = l.matrix * (v + dt * k3);
        v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        g[s] = (prob.r.transpose() * v).value();
    }

    std::vector<double> out(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double w = omegas[i];
        // composite Simpson over the sampled integrand e^{i w t} g(t)
        cplx acc = 0.0;
        for (int s = 0; s <= steps; ++s) {
            const cplx f = std::exp(cplx(0.0, w * s * dt)) * g[s];
            double coeff = (s == 0 || s == steps) ? 1.0 : (s % 2 == 1 ? 4.0 : 2.0);
            acc += coeff * f;
        }
        out[i] = (acc * dt / 3.0).real();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Lorentzian fitting (Levenberg-Marquardt with analytic Jacobian)
// ---------------------------------------------------------------------------

namespace {

struct FitData {
    std::vector<double> w;
    std::vector<double> s;
};

// params layout: (amp, center, fwhm) per peak
double cost_and_jacobian(const FitData& data, const RVec& p, RVec* grad,
                         Eigen::MatrixXd* jtj) {
    const int npeaks = static_cast<int>(p.size()) / 3;
    const int n = static_cast<int>(data.w.size());
    double cost = 0.0;
    if (grad) grad->setZero();
    if (jtj) jtj->setZero();
    Eigen::VectorXd row(p.size());
    for (int i = 0; i < n; ++i) {
        const double w = data.w[i];
        double model = 0.0;
        row.setZero();
        for (int k = 0; k < npeaks; ++k) {
            const double amp = p(3 * k), center = p(3 * k + 1), q = 0.5 * p(3 * k + 2);
            const double dw = w - center;
            const double d = dw * dw + q * q;
            model += amp * q * q / d;
            row(3 * k) = q * q / d;
            row(3 * k + 1) = amp * q * q * 2.0 * dw / (d * d);
            row(3 * k + 2) = amp * q * dw * dw / (d * d);  // d model / d fwhm
        }
        const double resid = model - data.s[i];
        cost += resid * resid;
        if (grad) *grad += resid * row;
        if (jtj) jtj->selfadjointView<Eigen::Lower>().rankUpdate(row);
    }
    if (jtj) *jtj = jtj->selfadjointView<Eigen::Lower>();
    return 0.5 * cost;
}

RVec levenberg_marquardt(const FitData& data, RVec p, int max_iter, double grad_tol,
                         double* final_cost) {
    const int np = static_cast<int>(p.size());
    RVec grad(np);
    Eigen::MatrixXd jtj(np, np);
    double cost = cost_and_jacobian(data, p, &grad, &jtj);
    double lambda = 1e-3;

    for (int iter = 0; iter < max_iter; ++iter) {
        const double scale = std::max(cost, 1e-300);
        double grad_rel = 0.0;
        for (int i = 0; i < np; ++i) {
            grad_rel = std::max(grad_rel, std::abs(grad(i)) * std::max(std::abs(p(i)), 1.0));
        }
        if (grad_rel / scale < grad_tol) break;

        Eigen::MatrixXd damped = jtj;
        damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
        const RVec step = damped.ldlt().solve(-grad);
        if (!step.allFinite()) {
            lambda *= 10.0;
            continue;
        }
        const RVec candidate = p + step;
        const double new_cost = cost_and_jacobian(data, candidate, nullptr, nullptr);
        if (new_cost < cost) {
            p = candidate;
            lambda = std::max(lambda * 0.3, 1e-14);
            cost = cost_and_jacobian(data, p, &grad, &jtj);
            if (step.norm() < 1e-15 * (p.norm() + 1e-15)) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e14) break;
        }
    }
    if (final_cost) *final_cost = cost;
    return p;
}

struct PeakSeed {
    double center;
    double height;
    double width;
};

std::vector<PeakSeed> seed_peaks(const FitData& data, int want) {
    const int n = static_cast<int>(data.w.size());
    std::vector<int> maxima;
    for (int i = 1; i + 1 < n; ++i) {
        if (data.s[i] > data.s[i - 1] && data.s[i] >= data.s[i + 1]) maxima.push_back(i);
    }
    std::sort(maxima.begin(), maxima.end(),
              [&](int a, int b) { return data.s[a] > data.s[b]; });
    if (static_cast<int>(maxima.size()) < want) {
        std::ostringstream msg;
        msg << "peaks unresolved: found " << maxima.size() << " local maxima in window, need "
            << want;
        throw NumericalError(msg.str());
    }
    maxima.resize(want);

    std::vector<PeakSeed> seeds;
    for (int idx : maxima) {
        PeakSeed seed;
        seed.center = data.w[idx];
        seed.height = data.s[idx];
        const double half = 0.5 * seed.height;
        double left = data.w.front(), right = data.w.back();
        for (int i = idx; i >= 1; --i) {
            if (data.s[i - 1] < half) {
                const double t = (data.s[i] - half) / (data.s[i] - data.s[i - 1]);
                left = data.w[i] - t * (data.w[i] - data.w[i - 1]);
                break;
            }
        }
        for (int i = idx; i + 1 < n; ++i) {
            if (data.s[i + 1] < half) {
                const double t = (data.s[i] - half) / (data.s[i] - data.s[i + 1]);
                right = data.w[i] + t * (data.w[i + 1] - data.w[i]);
                break;
            }
        }
        seed.width = std::max(right - left, 2.0 * (data.w[1] - data.w[0]));
        seeds.push_back(seed);
    }
    return seeds;
}

FitData window_data(const SpectrumResult& s, double wmin, double wmax) {
    if (!(wmin < wmax)) {
        throw std::invalid_argument("fit window: require window_min < window_max");
    }
    FitData data;
    for (std::size_t i = 0; i < s.omega.size(); ++i) {
        if (s.omega[i] >= wmin && s.omega[i] <= wmax) {
            data.w.push_back(s.omega[i]);
            data.s.push_back(s.value[i]);
        }
    }
    if (data.w.size() < 8) {
        throw std::invalid_argument("fit window contains too few samples");
    }
    return data;
}

RVec run_fit(const FitData& data, int npeaks, double* residual_rms) {
    const auto seeds = seed_peaks(data, npeaks);
    RVec p(3 * npeaks);
    for (int k = 0; k < npeaks; ++k) {
        p(3 * k) = seeds[k].height;
        p(3 * k + 1) = seeds[k].center;
        p(3 * k + 2) = seeds[k].width;
    }
    const double seed_cost = cost_and_jacobian(data, p, nullptr, nullptr);
    double cost = 0.0;
    p = levenberg_marquardt(data, p, 500, 1e-10, &cost);

    *residual_rms = std::sqrt(2.0 * cost / static_cast<double>(data.w.size()));
    // residual_rms stays nonzero when the data are not an exact Lorentzian
    // sum (interference between overlapping lines); that is reported, not an
    // error.  Fail only on genuinely broken solves.
    const double span = data.w.back() - data.w.front();
    bool sane = p.allFinite() && cost <= seed_cost * (1.0 + 1e-12);
    for (int k = 0; sane && k < npeaks; ++k) {
        const double center = p(3 * k + 1);
        if (center < data.w.front() - span || center > data.w.back() + span) sane = false;
    }
    if (!sane) {
        std::ostringstream msg;
        msg << "lorentzian fit did not converge: residual_rms = " << *residual_rms;
        throw NumericalError(msg.str());
    }
    // widths enter the model through (fwhm/2)^2; report the positive branch
    for (int k = 0; k < npeaks; ++k) {
        p(3 * k + 2) = std::abs(p(3 * k + 2));
        p(3 * k) = std::abs(p(3 * k));
    }
    return p;
}

}  // namespace

LinewidthFit fit_two_lorentzians(const SpectrumResult& s, double window_min,
                                 double window_max) {
    const FitData data = window_data(s, window_min, window_max);
    double residual = 0.0;
    RVec p = run_fit(data, 2, &residual);
    const int lo = p(1) <= p(4) ? 0 : 1;
    const int hi = 1 - lo;
    LinewidthFit fit;
    fit.amp_minus = p(3 * lo);
    fit.omega_minus = p(3 * lo + 1);
    fit.gamma_minus = p(3 * lo + 2);
    fit.amp_plus = p(3 * hi);
    fit.omega_plus = p(3 * hi + 1);
    fit.gamma_plus = p(3 * hi + 2);
    fit.residual_rms = residual;
    return fit;
}

SinglePeakFit fit_lorentzian(const SpectrumResult& s, double window_min, double window_max) {
    const FitData data = window_data(s, window_min, window_max);
    double residual = 0.0;
    RVec p = run_fit(data, 1, &residual);
    SinglePeakFit fit;
    fit.amp = p(0);
    fit.omega0 = p(1);
    fit.gamma = p(2);
    fit.residual_rms = residual;
    return fit;
}

// ---------------------------------------------------------------------------
// Classical comparator
// ---------------------------------------------------------------------------

SpectrumResult classical_spectrum(const qnm::QnmParams& p, cplx eta_c, double omega0,
                                  double e0, ClassicalVariant variant, const Grid& grid,
                                  Normalization norm) {
    const auto omegas = grid.values();
    const double s_c = qnm::quantization_weight(p);
    const cplx omega_tilde(p.omega_c, -p.gamma_c);

    std::vector<double> w_out;
    std::vector<double> value;
    std::vector<std::string> warnings;
    w_out.reserve(omegas.size());
    value.reserve(omegas.size());

    for (double w : omegas) {
        const cplx a_c = w / (2.0 * (omega_tilde - w));
        const double d2 = omega0 * omega0 - w * w;
        cplx alpha;
        switch (variant) {
            case ClassicalVariant::Bare: {
                if (d2 == 0.0) {
                    warnings.push_back("bare variant: skipped grid point at the dipole pole");
                    continue;
                }
                alpha = 2.0 * omega0 / d2;
                break;
            }
            case ClassicalVariant::Qnm: {
                const cplx k = 4.0 * omega0 * p.omega_c * a_c * eta_c * eta_c / s_c;
                alpha = 2.0 * omega0 / (d2 - k);
                break;
            }
            case ClassicalVariant::QnmNegFreq: {
                const cplx a_neg = -w / (2.0 * (std::conj(omega_tilde) + w));
                const cplx k = 4.0 * omega0 * p.omega_c *
                               (a_c * eta_c * eta_c + a_neg * std::conj(eta_c) * std::conj(eta_c)) /
                               s_c;
                alpha = 2.0 * omega0 / (d2 - k);
                break;
            }
        }
        w_out.push_back(w);
        value.push_back(std::norm(a_c * alpha * e0));
    }
    return finalize(std::move(w_out), std::move(value), norm, std::move(warnings));
}

std::vector<std::pair<double, double>> find_peaks(const SpectrumResult& s) {
    std::vector<std::pair<double, double>> peaks;
    for (std::size_t i = 1; i + 1 < s.omega.size(); ++i) {
        if (s.value[i] > s.value[i - 1] && s.value[i] >= s.value[i + 1]) {
            peaks.emplace_back(s.omega[i], s.value[i]);
        }
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const auto& a, const auto& b) { return a.second > b.second; });
    return peaks;
}

double integrated_area(const SpectrumResult& s) {
    double area = 0.0;
    for (std::size_t i = 1; i < s.omega.size(); ++i) {
        area += 0.5 * (s.value[i] + s.value[i - 1]) * (s.omega[i] - s.omega[i - 1]);
    }
    return area;
}

}  // namespace qnmqed::spectra
