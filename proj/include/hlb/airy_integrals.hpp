#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "hlb/airy.hpp"
#include "hlb/dd.hpp"
#include "hlb/quadrature.hpp"

namespace hlb {

namespace detail {

// Cumulative integrals of Ai and Bi from the Ai'-zero breakpoints up to 0:
//   A_k = int_{xi_k}^0 Ai,  B_k = int_{xi_k}^0 Bi.
// Grown on demand; arbitrary int_{-u}^0 queries then only integrate one
// sub-oscillation fragment.
struct AiryCumTables {
    std::vector<double> xi;       // breakpoints (negative, decreasing)
    std::vector<double> cum_ai;
    std::vector<double> cum_bi;
};

inline std::shared_ptr<const AiryCumTables> airy_cum_snapshot(std::size_t n) {
    static std::mutex mu;
    static std::shared_ptr<const AiryCumTables> cache =
        std::make_shared<AiryCumTables>();
    std::lock_guard<std::mutex> lk(mu);
    if (cache->xi.size() >= n) return cache;
    auto next = std::make_shared<AiryCumTables>(*cache);
    const std::size_t have = next->xi.size();
    const auto xs = ai_prime_zeros(static_cast<int>(n));
    for (std::size_t k = have; k < n; ++k) {
        const double hi = (k == 0) ? 0.0 : next->xi[k - 1];
        const double lo = xs[k];
        const double da = integrate([](double w) { return airy_eval(w).ai; }, lo, hi, 1e-13);
        const double db = integrate([](double w) { return airy_eval(w).bi; }, lo, hi, 1e-13);
        const double pa = (k == 0) ? 0.0 : next->cum_ai[k - 1];
        const double pb = (k == 0) ? 0.0 : next->cum_bi[k - 1];
        next->xi.push_back(lo);
        next->cum_ai.push_back(pa + da);
        next->cum_bi.push_back(pb + db);
    }
    cache = next;
    return cache;
}

// int_{y}^{0} f for y < 0, f in {Ai, Bi}, via the cumulative tables.
inline void airy_int_neg_pair(double y, double& int_ai, double& int_bi) {
    if (y >= 0.0) {
        int_ai = int_bi = 0.0;
        return;
    }
    // how many breakpoints lie in [y, 0)?  xi_k ~ -((3pi/8)(4k-3))^{2/3}
    const double t = std::pow(-y, 1.5) / (3.0 * M_PI / 8.0);
    const std::size_t need = static_cast<std::size_t>(std::max(1.0, (t + 3.0) / 4.0 + 2.0));
    auto tab = airy_cum_snapshot(need);
    // last breakpoint >= y (xi decreasing)
    std::size_t k = 0;
    while (k < tab->xi.size() && tab->xi[k] >= y) ++k;
    double base_a = 0.0, base_b = 0.0, from = 0.0;
    if (k > 0) {
        base_a = tab->cum_ai[k - 1];
        base_b = tab->cum_bi[k - 1];
        from = tab->xi[k - 1];
    }
    int_ai = base_a + integrate([](double w) { return airy_eval(w).ai; }, y, from, 1e-12);
    int_bi = base_b + integrate([](double w) { return airy_eval(w).bi; }, y, from, 1e-12);
}

}  // namespace detail

/// int_y^infty Ai(w) dw. For y >= 0 quadrature plus an analytically bounded
/// exponential tail; for y < 0, 1/3 plus the cached oscillatory part.
inline double ai_integral_from(double y) {
    if (!std::isfinite(y)) throw std::invalid_argument("ai_integral_from: y not finite");
    if (y < 0.0) {
        double ia, ib;
        detail::airy_int_neg_pair(y, ia, ib);
        return 1.0 / 3.0 + ia;
    }
    const double cut = y + 14.0;
    const double body = integrate([](double w) { return airy_eval(w).ai; }, y, cut, 1e-13);
    // tail from Ai ~ e^{-zeta}/(2 sqrt(pi) w^{1/4}):  int_cut^inf ~ e^{-zeta(cut)}/(2 sqrt(pi) cut^{3/4})
    const double zeta = (2.0 / 3.0) * cut * std::sqrt(cut);
    const double tail = std::exp(-zeta) / (2.0 * std::sqrt(M_PI) * std::pow(cut, 0.75));
    return body + tail;
}

/// int_0^y Bi(w) dw, either sign of y (range error once Bi overflows).
inline double bi_integral_on(double y) {
    if (!std::isfinite(y)) throw std::invalid_argument("bi_integral_on: y not finite");
    if (y > detail::kBiOverflowArg)
        throw std::range_error("bi_integral_on: Bi overflows for y > 103.5");
    if (y >= 0.0)
        return integrate([](double w) { return airy_eval(w).bi; }, 0.0, y, 1e-13);
    double ia, ib;
    detail::airy_int_neg_pair(y, ia, ib);
    return -ib;
}

/// Scorer derivative Gi'(y) for any real y.
///   y <= 0: closed quadrature formula
///     pi Gi'(-u) = ([1/3 + A(-u)] Bi'(-u) - B(-u) Ai'(-u)) / W,  W = 1/pi,
///   with an accuracy guard on the computed Wronskian W.
///   y > 0: double-double Maclaurin series up to y = 12, asymptotic series after.
inline double scorer_gi_prime(double y) {
    if (!std::isfinite(y)) throw std::invalid_argument("scorer_gi_prime: y not finite");
    if (y <= 0.0) {
        double ia, ib;  // ia = int_y^0 Ai, ib = int_y^0 Bi
        detail::airy_int_neg_pair(y, ia, ib);
        const AiryValues v = airy_eval(y);
        const double num = (1.0 / 3.0 + ia) * v.bi_prime - ib * v.ai_prime;
        const double den = v.ai * v.bi_prime - v.bi * v.ai_prime;
        if (std::fabs(den - M_1_PI) > 1e-8)
            throw std::runtime_error("scorer_gi_prime: Wronskian check failed (airy accuracy)");
        return num / (M_PI * den);
    }
    if (y <= 12.0) {
        // Gi'(z) = (3^{-2/3}/pi) sum_{k>=1} cos((2k-1)pi/3) G((k+1)/3) 3^{k/3} z^{k-1}/(k-1)!
        using detail::DD;
        static constexpr DD kGamma13{2.6789385347077475, 1.7947798648225244e-16};
        static constexpr DD kGamma23{1.3541179394264005, -4.6231203911366416e-17};
        static constexpr DD kCbrt3{1.4422495703074083, 8.054912676113687e-17};
        static constexpr DD kPref{0.15302743219105738, 4.91291978243704e-18};  // 3^{-2/3}/pi
        // Gamma((k+1)/3) streams, seeded for k = 1, 2, 3
        DD gam[3] = {kGamma23, DD(1.0), detail::div(kGamma13, 3.0)};
        DD p = kCbrt3;  // P_k = 3^{k/3} z^{k-1}/(k-1)!, P_1 = 3^{1/3}
        DD sum(0.0);
        double max_term = 0.0;
        for (int k = 1; k <= 400; ++k) {
            const int r = (k - 1) % 3;
            // cos((2k-1)pi/3) pattern over k mod 3 = 1,2,0 : +1/2, -1, +1/2
            double coef;
            switch (k % 3) {
                case 1: coef = 0.5; break;
                case 2: coef = -1.0; break;
                default: coef = 0.5; break;
            }
            const DD term = detail::mul(detail::mul(gam[r], p), coef);
            sum = detail::add(sum, term);
            const double at = std::fabs(term.hi);
            max_term = std::max(max_term, at);
            if (at < 1e-30 * std::max(1.0, max_term) && k > 8) break;
            // advance P and the Gamma stream this k used; multipliers kept
            // exact ((k+1)/3 rounded to double would poison the dd precision)
            p = detail::div(detail::mul(detail::mul(p, kCbrt3), y), static_cast<double>(k));
            gam[r] = detail::div(detail::mul(gam[r], static_cast<double>(k) + 1.0), 3.0);
        }
        return detail::mul(kPref, sum).value();
    }
    // asymptotic: Gi'(z) = -(1/pi) sum_k (3k+1) (3k)!/(k! 3^k) z^{-3k-2}
    const double z3 = y * y * y;
    double term = 1.0 / (y * y);
    double sum = term;
    double prev = std::fabs(term);
    for (int k = 1; k <= 40; ++k) {
        const double fk = 3.0 * k;
        term *= (fk + 1.0) * (fk - 1.0) / z3;
        if (std::fabs(term) >= prev) break;
        prev = std::fabs(term);
        sum += term;
        if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
    }
    return -sum / M_PI;
}

/// Laplace transform of Ai over the positive axis:
///   I~(gamma) = int_0^inf e^{gamma w} Ai(w) dw = (1/3) sum_n (gamma/3^{1/3})^n / Gamma(n/3+1).
inline double laplace_ai(double gamma) {
    if (!std::isfinite(gamma)) throw std::invalid_argument("laplace_ai: gamma not finite");
    using detail::DD;
    static constexpr DD kGamma13{2.6789385347077475, 1.7947798648225244e-16};
    static constexpr DD kGamma23{1.3541179394264005, -4.6231203911366416e-17};
    const double x = gamma / std::cbrt(3.0);
    // 1/Gamma(n/3+1) streams: n=0: 1/Gamma(1)=1; n=1: 1/Gamma(4/3)=3/Gamma(1/3); n=2: 1/Gamma(5/3)
    DD inv_g[3] = {DD(1.0), detail::div(DD(3.0), kGamma13),
                   detail::div(DD(1.0), detail::mul(kGamma23, 2.0 / 3.0))};
    DD xv(1.0);
    DD sum(0.0);
    double max_term = 0.0;
    bool converged = false;
    for (int n = 0; n <= 3000; ++n) {
        const int r = n % 3;
        const DD term = detail::mul(inv_g[r], xv);
        sum = detail::add(sum, term);
        const double at = std::fabs(term.hi);
        max_term = std::max(max_term, at);
        if (n > 6 && at < 1e-15 * std::fabs(sum.hi) && at < 1e-15 * max_term) {
            converged = true;
            break;
        }
        xv = detail::mul(xv, x);
        // Gamma(n/3+1) -> Gamma((n+3)/3+1) = ((n+3)/3) Gamma(n/3+1)
        inv_g[r] = detail::div(detail::mul(inv_g[r], 3.0), static_cast<double>(n) + 3.0);
    }
    if (!converged)
        throw std::range_error("laplace_ai: series did not converge at this gamma");
    return detail::div(sum, 3.0).value();
}

/// I(gamma, y) = int_{-y}^{0} e^{gamma w} Ai(w) dw, y >= 0.
inline double exp_weighted_ai(double gamma, double y) {
    if (y < 0.0) throw std::invalid_argument("exp_weighted_ai: y must be >= 0");
    if (y == 0.0) return 0.0;
    // split at the cached Ai'-zero breakpoints so panels stay sub-oscillation
    const auto f = [gamma](double w) { return std::exp(gamma * w) * airy_eval(w).ai; };
    const double t = std::pow(y, 1.5) / (3.0 * M_PI / 8.0);
    const std::size_t need = static_cast<std::size_t>(std::max(1.0, (t + 3.0) / 4.0 + 2.0));
    auto zs = ai_prime_zeros(static_cast<int>(need));
    double acc = 0.0;
    double hi = 0.0;
    for (double b : zs) {
        if (b <= -y) break;
        acc += integrate(f, b, hi, 1e-12);
        hi = b;
    }
    acc += integrate(f, -y, hi, 1e-12);
    return acc;
}

}  // namespace hlb
