#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlb/drift.hpp"
#include "hlb/pricing.hpp"
#include "hlb/spectral.hpp"

namespace hlb {

/// Observed (maturity, yield) pairs; maturities strictly increasing, decimals.
struct EmpiricalCurve {
    std::vector<YieldPoint> points;
    std::string label;

    void validate() const {
        if (points.empty()) throw std::invalid_argument("EmpiricalCurve: no points");
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!(points[i].maturity > 0.0) || !std::isfinite(points[i].yield_value))
                throw std::invalid_argument("EmpiricalCurve: bad point");
            if (i > 0 && points[i].maturity <= points[i - 1].maturity)
                throw std::invalid_argument(
                    "EmpiricalCurve: maturities must be strictly increasing");
        }
    }

    std::vector<double> maturities() const {
        std::vector<double> m;
        m.reserve(points.size());
        for (const auto& p : points) m.push_back(p.maturity);
        return m;
    }
};

/// Root-mean-squared difference of two curves on matching maturities (decimals).
inline double rmse(const std::vector<YieldPoint>& a, const std::vector<YieldPoint>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("rmse: size mismatch");
    double ss = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::fabs(a[i].maturity - b[i].maturity) > 1e-9)
            throw std::invalid_argument("rmse: maturity mismatch");
        const double d = a[i].yield_value - b[i].yield_value;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(a.size()));
}

struct CalibrationResult {
    double z = 0.0;
    double beta = 0.0;
    double r0 = 0.0;
    double sigma = 0.0;  // sqrt(2 beta^3)
    double rmse = 0.0;
    std::vector<YieldPoint> model_yields;
    std::vector<YieldPoint> residual_yields;  // empirical - model
    bool converged = false;
    int n_restarts_used = 0;
    long objective_evals = 0;
};

struct CalibrationConfig {
    double r_min = 0.0;          // admissibility floor on r0 + beta |xi_1|
    double min_maturity = 0.0;   // filter: keep maturities >= this
    int n_levels = 300;
    double obj_tol = 1e-10;
    int max_iter = 2000;
    double penalty_weight = 1e6;
};

namespace detail {

// Standard Nelder-Mead on R^dim; deterministic for fixed inputs.
struct NelderMeadOutcome {
    std::vector<double> x;
    double fx = std::numeric_limits<double>::infinity();
    bool converged = false;
    long evals = 0;
};

inline NelderMeadOutcome nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, const std::vector<double>& step, double fatol,
    int max_iter) {
    const std::size_t dim = x0.size();
    struct Vertex {
        std::vector<double> x;
        double fx;
    };
    NelderMeadOutcome out;
    std::vector<Vertex> simplex;
    simplex.reserve(dim + 1);
    simplex.push_back({x0, f(x0)});
    ++out.evals;
    for (std::size_t d = 0; d < dim; ++d) {
        auto x = x0;
        x[d] += step[d];
        simplex.push_back({x, f(x)});
        ++out.evals;
    }
    const auto by_fx = [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; };

    for (int it = 0; it < max_iter; ++it) {
        std::sort(simplex.begin(), simplex.end(), by_fx);
        if (std::fabs(simplex.back().fx - simplex.front().fx) <= fatol) {
            out.converged = true;
            break;
        }
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t v = 0; v < dim; ++v)
            for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[v].x[d];
        for (double& c : centroid) c /= static_cast<double>(dim);

        const auto blend = [&](double coef) {
            std::vector<double> x(dim);
            for (std::size_t d = 0; d < dim; ++d)
                x[d] = centroid[d] + coef * (simplex.back().x[d] - centroid[d]);
            return x;
        };

        auto xr = blend(-1.0);
        const double fr = f(xr);
        ++out.evals;
        if (fr < simplex.front().fx) {
            auto xe = blend(-2.0);
            const double fe = f(xe);
            ++out.evals;
            simplex.back() = (fe < fr) ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr < simplex[dim - 1].fx) {
            simplex.back() = {xr, fr};
        } else {
            const bool outside = fr < simplex.back().fx;
            auto xc = blend(outside ? -0.5 : 0.5);
            const double fc = f(xc);
            ++out.evals;
            if (fc < std::min(fr, simplex.back().fx)) {
                simplex.back() = {xc, fc};
            } else {
                // shrink toward the best vertex
                for (std::size_t v = 1; v <= dim; ++v) {
                    for (std::size_t d = 0; d < dim; ++d)
                        simplex[v].x[d] =
                            simplex[0].x[d] + 0.5 * (simplex[v].x[d] - simplex[0].x[d]);
                    simplex[v].fx = f(simplex[v].x);
                    ++out.evals;
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(), by_fx);
    out.x = simplex.front().x;
    out.fx = simplex.front().fx;
    return out;
}

}  // namespace detail

/// Fit (z, beta, r0) to an empirical curve by RMSE under nu == 0, multi-start
/// Nelder-Mead over a fixed 9-point grid: beta in {0.05, 0.15, 0.30} x
/// r0 in {-0.25, -0.12, -0.03}, z started at 0.005 (middle of the searched
/// z range [-0.01, 0.02]); simplex steps (0.005, 0.05, 0.05). Admissibility
/// r0 + beta |xi_1| >= r_min enters as a quadratic penalty and is asserted on
/// the returned optimum.
inline CalibrationResult calibrate(const EmpiricalCurve& curve_in,
                                   const CalibrationConfig& cfg = {}) {
    curve_in.validate();
    EmpiricalCurve curve;
    curve.label = curve_in.label;
    for (const auto& p : curve_in.points)
        if (p.maturity >= cfg.min_maturity) curve.points.push_back(p);
    if (curve.points.size() < 4)
        throw std::invalid_argument("calibrate: need at least 4 points");

    const double xi1 = std::fabs(ai_prime_zeros(1).front());
    const auto mats = curve.maturities();
    std::vector<double> emp;
    emp.reserve(curve.points.size());
    for (const auto& p : curve.points) emp.push_back(p.yield_value);

    PricingConfig pcfg;
    pcfg.n_levels = cfg.n_levels;

    long evals = 0;
    const auto objective = [&](const std::vector<double>& p) {
        const double z = p[0], beta = p[1], r0 = p[2];
        ++evals;
        double penalty = 0.0;
        if (beta < 1e-4) penalty += cfg.penalty_weight * (1e-4 - beta) * (1e-4 - beta) + 1.0;
        if (z < r0) penalty += cfg.penalty_weight * (r0 - z) * (r0 - z) + 1.0;
        const double adm = r0 + std::max(beta, 0.0) * xi1;
        if (adm < cfg.r_min)
            penalty += cfg.penalty_weight * (cfg.r_min - adm) * (cfg.r_min - adm);
        if (penalty > 0.0 && (beta < 1e-4 || z < r0)) return 10.0 + penalty;
        try {
            const SemiSpectrum spec = build_semi_spectrum(std::sqrt(2.0 * beta * beta * beta),
                                                          cfg.n_levels);
            const DriftCurve flat = DriftCurve::constant(r0);
            double ss = 0.0;
            for (std::size_t i = 0; i < mats.size(); ++i) {
                const double pv = bond_price_semi(z, 0.0, mats[i], spec, flat, pcfg);
                const double y = yield_from_price(pv, mats[i]);
                const double d = y - emp[i];
                ss += d * d;
            }
            return std::sqrt(ss / static_cast<double>(mats.size())) + penalty;
        } catch (const std::exception&) {
            return 10.0 + penalty;
        }
    };

    const std::array<double, 3> beta_grid{0.05, 0.15, 0.30};
    const std::array<double, 3> r0_grid{-0.25, -0.12, -0.03};
    const std::vector<double> step{0.005, 0.05, 0.05};

    detail::NelderMeadOutcome best;
    int starts = 0;
    for (double b0 : beta_grid) {
        for (double r00 : r0_grid) {
            ++starts;
            auto o = detail::nelder_mead(objective, {0.005, b0, r00}, step,
                                         cfg.obj_tol, cfg.max_iter);
            const bool better =
                o.fx < best.fx ||
                (o.fx == best.fx && o.x < best.x);  // deterministic tie-break
            if (better) best = o;
        }
    }

    CalibrationResult res;
    res.z = best.x[0];
    res.beta = best.x[1];
    res.r0 = best.x[2];
    res.sigma = std::sqrt(2.0 * res.beta * res.beta * res.beta);
    res.converged = best.converged;
    res.n_restarts_used = starts;
    res.objective_evals = evals;

    // a soft quadratic penalty leaves the optimizer epsilon inside the
    // constraint when it is active; snap such points onto the boundary
    const double violation = cfg.r_min - (res.r0 + res.beta * xi1);
    if (violation > 1e-5)
        throw std::runtime_error(
            "calibrate: no admissible optimum found (best penalized point: beta=" +
            std::to_string(res.beta) + ", r0=" + std::to_string(res.r0) + ")");
    if (violation > 0.0) res.r0 += violation;

    const SemiSpectrum spec = build_semi_spectrum(res.sigma, cfg.n_levels);
    const DriftCurve flat = DriftCurve::constant(res.r0);
    for (std::size_t i = 0; i < mats.size(); ++i) {
        const double pv = bond_price_semi(res.z, 0.0, mats[i], spec, flat, pcfg);
        res.model_yields.push_back({mats[i], yield_from_price(pv, mats[i])});
        res.residual_yields.push_back(
            {mats[i], emp[i] - res.model_yields.back().yield_value});
    }
    res.rmse = rmse(curve.points, res.model_yields);
    return res;
}

/// Residual yields R_r = R_e - R_m on the calibration maturities.
inline std::vector<YieldPoint> residual_yield(const EmpiricalCurve& curve,
                                              const CalibrationResult& result) {
    if (curve.points.size() != result.model_yields.size())
        throw std::invalid_argument("residual_yield: curve/result maturity mismatch");
    std::vector<YieldPoint> out;
    out.reserve(curve.points.size());
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        if (std::fabs(curve.points[i].maturity - result.model_yields[i].maturity) > 1e-9)
            throw std::invalid_argument("residual_yield: maturity mismatch");
        out.push_back({curve.points[i].maturity,
                       curve.points[i].yield_value -
                           result.model_yields[i].yield_value});
    }
    return out;
}

namespace detail {

// Second derivatives M_i of the cubic spline through (x_i, y_i) with a
// clamped left end (y'(x_0) = 0, forced by the definition of eta) and a
// natural right end.
inline std::vector<double> spline_second_derivs(const std::vector<double>& x,
                                                const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        d[i] = (y[i + 1] - y[i]) / h[i];
    }
    std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
    diag[0] = h[0] / 3.0;
    upper[0] = h[0] / 6.0;
    rhs[0] = d[0];  // y'(x_0) = 0
    for (std::size_t i = 1; i + 1 < n; ++i) {
        lower[i] = h[i - 1] / 6.0;
        diag[i] = (h[i - 1] + h[i]) / 3.0;
        upper[i] = h[i] / 6.0;
        rhs[i] = d[i] - d[i - 1];
    }
    diag[n - 1] = 1.0;  // natural right end: M = 0
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> m(n);
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
    return m;
}

}  // namespace detail

/// Reconstruct the implied drift from residual yields:
///   eta(t, s) = R_r(t,s) (s - t), interpolated by a C^2 cubic spline with
///   eta(t,t) = 0 and the defining end condition d eta/ds|_{s=t} = 0;
///   chi(s) = d eta/ds + chi_t, nu = chi'. Repricing with the result
///   reproduces the spline at the knots exactly, and nu stays continuous.
inline DriftCurve reconstruct_drift(const std::vector<YieldPoint>& residuals,
                                    double t, double chi_t) {
    if (residuals.size() < 3)
        throw std::invalid_argument("reconstruct_drift: need at least 3 maturities");
    std::vector<double> s{t}, etav{0.0};
    for (const auto& r : residuals) {
        if (!(r.maturity > t))
            throw std::invalid_argument("reconstruct_drift: maturities must exceed t");
        s.push_back(r.maturity);
        etav.push_back(r.yield_value * (r.maturity - t));
    }
    const auto m = detail::spline_second_derivs(s, etav);

    // chi on piece i is the spline derivative plus chi_t:
    //   eta'(u) = d_i - h_i (2 M_i + M_{i+1})/6 + M_i u + (M_{i+1}-M_i) u^2/(2h_i)
    std::vector<double> starts;
    std::vector<DriftCurve::Piece> pieces;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double h = s[i + 1] - s[i];
        const double d = (etav[i + 1] - etav[i]) / h;
        DriftCurve::Piece p;
        p.c0 = chi_t + d - h * (2.0 * m[i] + m[i + 1]) / 6.0;
        p.c1 = m[i];
        p.c2 = (m[i + 1] - m[i]) / (2.0 * h);
        p.c3 = 0.0;
        starts.push_back(s[i]);
        pieces.push_back(p);
    }
    if (t != 0.0) {
        // chi is only meaningful on [t, T]; pad flat back to 0 so the curve
        // remains a valid [0, ...) object
        starts.insert(starts.begin(), 0.0);
        pieces.insert(pieces.begin(), DriftCurve::Piece{chi_t + m[0], 0.0, 0.0, 0.0});
    }
    return DriftCurve::piecewise(std::move(starts), std::move(pieces), s.back(),
                                 DriftCurve::Extension::kConstant);
}

struct CubicFit {
    std::array<double, 4> coeff{};  // yield = a0 + a1 T + a2 T^2 + a3 T^3
    std::vector<YieldPoint> fitted;
    double rmse = 0.0;
};

/// Ordinary least squares of yield on {1, T, T^2, T^3} via Householder QR.
inline CubicFit cubic_baseline(const EmpiricalCurve& curve) {
    curve.validate();
    const std::size_t n = curve.points.size();
    if (n < 5) throw std::invalid_argument("cubic_baseline: need at least 5 points");
    constexpr std::size_t kCols = 4;
    std::vector<double> A(n * kCols);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double T = curve.points[i].maturity;
        A[i * kCols + 0] = 1.0;
        A[i * kCols + 1] = T;
        A[i * kCols + 2] = T * T;
        A[i * kCols + 3] = T * T * T;
        b[i] = curve.points[i].yield_value;
    }
    // Householder QR, reducing A in place and applying reflectors to b
    for (std::size_t k = 0; k < kCols; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += A[i * kCols + k] * A[i * kCols + k];
        norm = std::sqrt(norm);
        if (norm < 1e-14)
            throw std::runtime_error("cubic_baseline: rank-deficient design matrix");
        const double akk = A[k * kCols + k];
        const double alpha = (akk >= 0.0) ? -norm : norm;
        std::vector<double> v(n, 0.0);
        v[k] = akk - alpha;
        for (std::size_t i = k + 1; i < n; ++i) v[i] = A[i * kCols + k];
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 < 1e-300) continue;
        for (std::size_t j = k; j < kCols; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i] * A[i * kCols + j];
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < n; ++i) A[i * kCols + j] -= f * v[i];
        }
        double dotb = 0.0;
        for (std::size_t i = k; i < n; ++i) dotb += v[i] * b[i];
        const double fb = 2.0 * dotb / vnorm2;
        for (std::size_t i = k; i < n; ++i) b[i] -= fb * v[i];
    }
    CubicFit fit;
    for (int k = 3; k >= 0; --k) {
        double acc = b[static_cast<std::size_t>(k)];
        for (std::size_t j = static_cast<std::size_t>(k) + 1; j < kCols; ++j)
            acc -= A[static_cast<std::size_t>(k) * kCols + j] * fit.coeff[j];
        fit.coeff[static_cast<std::size_t>(k)] = acc / A[static_cast<std::size_t>(k) * kCols + k];
    }
    double ss = 0.0;
    for (const auto& p : curve.points) {
        const double T = p.maturity;
        const double y = fit.coeff[0] + T * (fit.coeff[1] + T * (fit.coeff[2] + T * fit.coeff[3]));
        fit.fitted.push_back({T, y});
        ss += (y - p.yield_value) * (y - p.yield_value);
    }
    fit.rmse = std::sqrt(ss / static_cast<double>(n));
    return fit;
}

}  // namespace hlb
