#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "hlb/airy.hpp"
#include "hlb/airy_integrals.hpp"

namespace hlb {

/// sigma with the derived Airy scalings alpha = (2 sigma)^{1/3},
/// beta = sigma/alpha = (sigma^2/2)^{1/3}.
struct ModelParams {
    double sigma;
    double alpha;
    double beta;

    static ModelParams from_sigma(double sigma) {
        if (!(sigma > 0.0)) throw std::invalid_argument("ModelParams: sigma must be > 0");
        ModelParams p;
        p.sigma = sigma;
        p.alpha = std::cbrt(2.0 * sigma);
        p.beta = sigma / p.alpha;
        return p;
    }

    static ModelParams from_beta(double beta) {
        if (!(beta > 0.0)) throw std::invalid_argument("ModelParams: beta must be > 0");
        return from_sigma(std::sqrt(2.0 * beta * beta * beta));
    }
};

namespace detail {

// Parameter-free half-line claim data: xi_n, Ai(xi_n), Gi'(xi_n) and the
// T-bond series weight pi Gi'(xi_n)/(|xi_n| Ai(xi_n)). Shared by every
// SemiSpectrum and by the pricing auto-extension at short maturities.
struct SemiClaimEntry {
    double xi;
    double ai_at_xi;
    double gi_prime_at_xi;
    double weight;
};

inline std::shared_ptr<const std::vector<SemiClaimEntry>> semi_claim_table(
    std::size_t n) {
    static std::mutex mu;
    static std::shared_ptr<const std::vector<SemiClaimEntry>> cache =
        std::make_shared<std::vector<SemiClaimEntry>>();
    std::lock_guard<std::mutex> lk(mu);
    if (cache->size() >= n) return cache;
    auto next = std::make_shared<std::vector<SemiClaimEntry>>(*cache);
    const auto xs = ai_prime_zeros(static_cast<int>(n));
    for (std::size_t k = next->size(); k < n; ++k) {
        SemiClaimEntry e;
        e.xi = xs[k];
        e.ai_at_xi = airy_eval(e.xi).ai;
        e.gi_prime_at_xi = scorer_gi_prime(e.xi);
        e.weight = M_PI * e.gi_prime_at_xi / (std::fabs(e.xi) * e.ai_at_xi);
        next->push_back(e);
    }
    cache = next;
    return cache;
}

}  // namespace detail

/// Half-line eigensystem: e_n = -xi_n, normalization a_n, unit-claim
/// coefficient c_n, and the pricing weight c_n a_n.
struct SemiLevel {
    double e;       // = |xi_n|
    double a;       // a_n, from a_n^{-2} = |xi_n| Ai(xi_n)^2 / alpha
    double c;       // c_n = (pi/alpha) a_n Ai(xi_n) Gi'(xi_n)
    double weight;  // c_n a_n = pi Gi'(xi_n)/(|xi_n| Ai(xi_n))
};

struct SemiSpectrum {
    ModelParams params;
    std::vector<SemiLevel> levels;
    int n_levels = 0;
};

inline SemiSpectrum build_semi_spectrum(double sigma, int n_levels = 300) {
    if (n_levels < 1) throw std::invalid_argument("build_semi_spectrum: n_levels >= 1");
    SemiSpectrum s;
    s.params = ModelParams::from_sigma(sigma);
    s.n_levels = n_levels;
    auto tab = detail::semi_claim_table(static_cast<std::size_t>(n_levels));
    s.levels.reserve(static_cast<std::size_t>(n_levels));
    for (int k = 0; k < n_levels; ++k) {
        const auto& t = (*tab)[static_cast<std::size_t>(k)];
        SemiLevel lv;
        lv.e = -t.xi;
        const double a_inv_sq = lv.e * t.ai_at_xi * t.ai_at_xi / s.params.alpha;
        lv.a = 1.0 / std::sqrt(a_inv_sq);
        lv.c = (M_PI / s.params.alpha) * lv.a * t.ai_at_xi * t.gi_prime_at_xi;
        lv.weight = t.weight;
        s.levels.push_back(lv);
    }
    return s;
}

/// Interval (two reflecting barriers) eigensystem.
struct IntervalLevel {
    double e;     // eigenvalue, Q(L,e) = Q(0,e)
    double q0;    // Q(0,e_n) evaluated from the well-conditioned side
    double a;     // normalization
    double b;     // T-bond coefficient b_n = c_n a_n
    double phi0;  // phi_n(0)
    double phiL;  // phi_n(L)
};

struct IntervalSpectrum {
    ModelParams params;
    double L = 0.0;   // barrier separation in x
    double aL = 0.0;  // alpha L
    std::vector<IntervalLevel> levels;
};

namespace detail {

// Eigencondition as an entire function (no Bi' poles):
//   G(e) = Ai'(aL - e) Bi'(-e) - Ai'(-e) Bi'(aL - e),
// evaluated in scaled form when aL - e > 0 so values stay O(1).
inline double interval_eigen_fn(double e, double aL) {
    const double a1 = aL - e;
    const AiryValues v0 = airy_eval(-e);
    if (a1 > 0.0) {
        const auto s = airy_eval_scaled(a1);
        const double damp = std::exp(-2.0 * s.zeta);  // underflows gracefully
        return s.aip_s * damp * v0.bi_prime - v0.ai_prime * s.bip_s;
    }
    const AiryValues v1 = airy_eval(a1);
    return v1.ai_prime * v0.bi_prime - v0.ai_prime * v1.bi_prime;
}

// Brent-style bracketing root refinement on [a, b] with f(a) f(b) < 0.
template <typename F>
double brent_root(F&& f, double a, double b, double fa, double fb,
                  double xtol = 1e-14) {
    double c = a, fc = fa, d = b - a, e = d;
    while (fb != 0.0) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double xm = 0.5 * (c - b);
        const double tol1 = 2.0 * 2.22e-16 * std::fabs(b) + 0.5 * xtol;
        if (std::fabs(xm) <= tol1 || fb == 0.0) break;
        if (std::fabs(e) < tol1 || std::fabs(fa) <= std::fabs(fb)) {
            d = e = xm;
        } else {
            double p, q;
            const double s = fb / fa;
            if (a != c) {
                q = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            } else {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < 3.0 * xm * q - std::fabs(tol1 * q) &&
                p < std::fabs(0.5 * e * q)) {
                e = d;
                d = p / q;
            } else {
                d = e = xm;
            }
        }
        a = b;
        fa = fb;
        b += (std::fabs(d) > tol1) ? d : std::copysign(tol1, xm);
        fb = f(b);
    }
    return b;
}

}  // namespace detail

/// Scan e > 0 for the eigenvalue tower of the two-barrier model and build
/// normalizations and bond coefficients. n_levels = 0 selects the default:
/// all levels with e_n <= |xi_300|.
inline IntervalSpectrum build_interval_spectrum(double sigma, double L,
                                                int n_levels = 0) {
    if (!(L > 0.0)) throw std::invalid_argument("build_interval_spectrum: L must be > 0");
    IntervalSpectrum s;
    s.params = ModelParams::from_sigma(sigma);
    s.L = L;
    s.aL = s.params.alpha * L;
    if (s.aL > 100.0)
        throw std::invalid_argument(
            "build_interval_spectrum: alpha*L > 100 exceeds the representable Bi' range");

    double e_cap = std::numeric_limits<double>::infinity();
    std::size_t want = static_cast<std::size_t>(n_levels);
    if (n_levels <= 0) {
        e_cap = -ai_prime_zeros(300).back();
        want = static_cast<std::size_t>(-1);
    }

    const auto f = [&](double e) { return detail::interval_eigen_fn(e, s.aL); };
    std::vector<double> roots;
    double e = 1e-9;
    double fe = f(e);
    double last_gap_start = 0.0;
    while (roots.size() < want && e < e_cap + 1.0) {
        // half the asymptotic level spacing; the WKB state density is
        // dN/de = [sqrt(e) - sqrt(e - aL)]/pi, so spacing grows ~ 2 sqrt(e)/aL
        // once e clears the top of the box
        const double dens = std::sqrt(std::max(e, 1e-4)) -
                            std::sqrt(std::max(e - s.aL, 0.0));
        const double step = std::min(0.1, 0.5 * M_PI / std::max(dens, 1e-8));
        const double e2 = e + step;
        const double fe2 = f(e2);
        if (fe == 0.0) {
            roots.push_back(e);
        } else if ((fe > 0.0) != (fe2 > 0.0)) {
            roots.push_back(detail::brent_root(f, e, e2, fe, fe2));
            // missed-root guard: spacing against twice the asymptotic prediction
            if (roots.size() >= 2) {
                const double gap = roots.back() - last_gap_start;
                const double pred =
                    M_PI / std::max(std::sqrt(roots.back()) -
                                        std::sqrt(std::max(roots.back() - s.aL, 0.0)),
                                    1e-8);
                if (gap > 2.0 * (pred + 0.5))
                    throw std::runtime_error(
                        "build_interval_spectrum: level gap exceeds asymptotic prediction (missed root)");
            }
            last_gap_start = roots.back();
        }
        e = e2;
        fe = fe2;
        if (roots.size() >= want) break;
        if (n_levels <= 0 && !roots.empty() && roots.back() > e_cap) {
            roots.pop_back();
            break;
        }
    }
    if (roots.empty()) throw std::runtime_error("build_interval_spectrum: no levels found");

    for (double en : roots) {
        if (!(en > 0.0))
            throw std::runtime_error("build_interval_spectrum: nonpositive eigenvalue");
        IntervalLevel lv;
        lv.e = en;
        const double a1 = s.aL - en;
        const AiryValues v0 = airy_eval(-en);
        if (a1 > 0.0) {
            // Q from the L side in scaled form; phi(L) via the Wronskian,
            // exact under the eigencondition and free of cancellation.
            const auto sc = airy_eval_scaled(a1);
            lv.q0 = (sc.aip_s / sc.bip_s) * std::exp(-2.0 * sc.zeta);
            lv.phiL = 1.0 / (M_PI * (sc.bip_s * std::exp(sc.zeta)));
        } else {
            lv.q0 = v0.ai_prime / v0.bi_prime;
            const AiryValues v1 = airy_eval(a1);
            lv.phiL = v1.ai - lv.q0 * v1.bi;
        }
        lv.phi0 = v0.ai - lv.q0 * v0.bi;
        const double norm = (en * lv.phi0 * lv.phi0 + (s.aL - en) * lv.phiL * lv.phiL);
        if (!(norm > 0.0))
            throw std::runtime_error("build_interval_spectrum: nonpositive normalization");
        lv.a = std::sqrt(s.params.alpha / norm);
        lv.b = M_PI *
               (lv.phi0 * scorer_gi_prime(-en) - lv.phiL * scorer_gi_prime(a1)) /
               norm;
        s.levels.push_back(lv);
    }
    return s;
}

/// phi_n(x) = Ai(alpha x - e_n) - Q(0,e_n) Bi(alpha x - e_n), evaluated with
/// scaled Airy values where the argument is in the growth region.
inline double interval_phi(const IntervalSpectrum& s, const IntervalLevel& lv,
                           double x) {
    const double a = s.params.alpha * x - lv.e;
    if (a > 0.0) {
        const auto sc = airy_eval_scaled(a);
        const double grow = lv.q0 * std::exp(sc.zeta);
        return sc.ai_s * std::exp(-sc.zeta) - grow * sc.bi_s;
    }
    const AiryValues v = airy_eval(a);
    return v.ai - lv.q0 * v.bi;
}

/// Claim coefficients c_n = int psi_n(x) Y(x) dx for a general terminal claim
/// Y(x) on the half line. The payoff must decay (or at least stay bounded)
/// for the quadrature to converge; the unit claim reproduces the stored c_n.
template <typename ClaimFn>
std::vector<double> semi_claim_coefficients(const SemiSpectrum& s, ClaimFn&& y,
                                            double abs_tol = 1e-10) {
    std::vector<double> out;
    out.reserve(s.levels.size());
    for (const auto& lv : s.levels) {
        // integrate to where the eigenfunction has decayed: alpha x - e_n ~ 10
        const double x_hi = (lv.e + 10.0) / s.params.alpha;
        const double c = integrate(
            [&](double x) {
                return lv.a * airy_eval(s.params.alpha * x - lv.e).ai * y(x);
            },
            0.0, x_hi, abs_tol);
        out.push_back(c);
    }
    return out;
}

/// Interval analogue: c_n = int_0^L psi_n(x) Y(x) dx.
template <typename ClaimFn>
std::vector<double> interval_claim_coefficients(const IntervalSpectrum& s,
                                                ClaimFn&& y,
                                                double abs_tol = 1e-10) {
    std::vector<double> out;
    out.reserve(s.levels.size());
    for (const auto& lv : s.levels) {
        const double c = integrate(
            [&](double x) { return lv.a * interval_phi(s, lv, x) * y(x); }, 0.0,
            s.L, abs_tol);
        out.push_back(c);
    }
    return out;
}


/// Appendix-style constant-drift model with the reflecting barrier on the
/// rate itself (Robin condition on the transformed function).
struct RobinLevel {
    double e;       // root of Ai'(y_* - e) = gamma_r Ai(y_* - e)
    double d;       // claim coefficient
    double lambda;  // beta (gamma_r^2 + e)
};

struct RobinSpectrum {
    ModelParams params;
    double nu = 0.0;
    double r_star = 0.0;
    double gamma_r = 0.0;  // nu / (2 sigma^4)^{1/3}
    double y_star = 0.0;   // r_* / beta
    std::vector<RobinLevel> levels;
};

inline RobinSpectrum build_robin_spectrum(double sigma, double nu, double r_star,
                                          int n_levels = 300) {
    if (n_levels < 1) throw std::invalid_argument("build_robin_spectrum: n_levels >= 1");
    RobinSpectrum s;
    s.params = ModelParams::from_sigma(sigma);
    s.nu = nu;
    s.r_star = r_star;
    s.gamma_r = nu / std::cbrt(2.0 * sigma * sigma * sigma * sigma);
    s.y_star = r_star / s.params.beta;
    const double g = s.gamma_r;

    const auto cond = [g](double u) {
        const AiryValues v = airy_eval(u);
        return v.ai_prime - g * v.ai;
    };

    const auto xs = ai_prime_zeros(n_levels + 1);
    const auto zs = ai_zeros(n_levels + 1);
    std::vector<double> us;
    us.reserve(static_cast<std::size_t>(n_levels));
    for (int k = 0; k < n_levels; ++k) {
        double lo, hi;
        if (g == 0.0) {
            us.push_back(xs[k]);
            continue;
        }
        if (g > 0.0) {
            // u_n in (zeta_n, xi_n)
            lo = zs[k];
            hi = xs[k];
        } else if (k == 0) {
            // lowest root sits right of xi_1; the condition turns negative
            // once u > gamma^2
            lo = xs[0];
            hi = g * g + 1.0;
        } else {
            lo = xs[k];
            hi = zs[k - 1];
        }
        const double eps = 1e-12 * std::max(1.0, std::fabs(lo));
        double flo = cond(lo + eps), fhi = cond(hi - eps);
        if ((flo > 0.0) == (fhi > 0.0))
            throw std::runtime_error("build_robin_spectrum: bracket failed");
        us.push_back(detail::brent_root(cond, lo + eps, hi - eps, flo, fhi));
    }

    const double itil = laplace_ai(g);
    for (double u : us) {
        RobinLevel lv;
        lv.e = s.y_star - u;
        lv.lambda = s.params.beta * (g * g + lv.e);
        const double denom_scale = lv.e - s.y_star + g * g;  // = -u + g^2
        const double ai_u = airy_eval(u).ai;
        if (std::fabs(denom_scale) < 1e-12)
            throw std::runtime_error(
                "build_robin_spectrum: degenerate d_n denominator; perturb gamma");
        // int_{y_*}^inf e^{gamma y} Ai(y - e_n) dy = e^{gamma e_n} [I(gamma, e_n - y_*) + I~(gamma)]
        double iy;
        if (lv.e >= s.y_star) {
            iy = exp_weighted_ai(g, lv.e - s.y_star);
        } else {
            // boundary above the turning level (strongly negative drift): signed integral
            iy = -integrate(
                [g](double w) { return std::exp(g * w) * airy_eval(w).ai; }, 0.0,
                s.y_star - lv.e, 1e-12);
        }
        lv.d = std::exp(g * lv.e) * (iy + itil) / (denom_scale * ai_u * ai_u);
        s.levels.push_back(lv);
    }
    std::sort(s.levels.begin(), s.levels.end(),
              [](const RobinLevel& a, const RobinLevel& b) { return a.e < b.e; });
    return s;
}

}  // namespace hlb
