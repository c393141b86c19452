#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hlb/drift.hpp"
#include "hlb/spectral.hpp"

namespace hlb {

enum class Model { kSemi, kInterval, kRobin };

struct PricingConfig {
    int n_levels = 300;
    double tail_tolerance = 1e-12;  // relative series-tail bound
    Model model = Model::kSemi;

    void validate() const {
        if (n_levels < 1) throw std::invalid_argument("PricingConfig: n_levels >= 1");
        if (!(tail_tolerance > 0.0) || tail_tolerance > 1e-6)
            throw std::invalid_argument("PricingConfig: tail_tolerance in (0, 1e-6]");
    }
};

struct YieldPoint {
    double maturity;     // years
    double yield_value;  // decimal per-year rate (0.02 = 2%)
};

struct PriceDetail {
    double price = 0.0;
    int terms_used = 0;
    double tail_bound = 0.0;  // achieved Leibniz bound at the stopping index
    bool cap_limited = false;
};

namespace detail {

// Leibniz tail envelope u_n e^{-gamma_series n^{2/3}} of the half-line series,
// gamma_series = beta (T-t) (3 pi/2)^{2/3}.
inline double semi_tail_bound(int n, double gamma_series) {
    return std::sqrt(2.0 / (3.0 * n)) *
           std::exp(-gamma_series * std::pow(static_cast<double>(n), 2.0 / 3.0));
}

}  // namespace detail

/// Zero-coupon bond price on the half-line model:
///   v = e^{-eta} sum_n [pi Gi'(xi_n)/(|xi_n| Ai(xi_n))] Ai(alpha x + xi_n)
///       e^{-chi_n (T-t)},  chi_n = chi(t) + beta |xi_n|.
/// Truncation: first n with tail bound < tail_tolerance * |partial sum|,
/// capped at n_levels; at very short maturities (T-t < 0.1y) the cap is
/// raised to 2000 and the final two partial sums are averaged.
inline PriceDetail bond_price_semi_detail(double z, double t, double T,
                                          const SemiSpectrum& spectrum,
                                          const DriftCurve& drift,
                                          const PricingConfig& cfg) {
    cfg.validate();
    if (T < t) throw std::invalid_argument("bond_price_semi: T < t");
    const double beta = spectrum.params.beta;
    const double chi_t = drift.chi(t);
    const double ax = (z - chi_t) / beta;  // alpha x
    if (ax < 0.0)
        throw std::domain_error("bond_price_semi: z - chi(t) < 0 (off the half-line)");
    const double tau = T - t;

    int cap = std::min(cfg.n_levels, spectrum.n_levels);
    if (tau < 0.1) cap = std::max(cap, 2000);
    auto table = detail::semi_claim_table(static_cast<std::size_t>(cap));

    const double gamma_series = beta * tau * std::pow(1.5 * M_PI, 2.0 / 3.0);
    double sum = 0.0, prev_sum = 0.0;
    PriceDetail out;
    int n = 0;
    for (; n < cap; ++n) {
        const auto& e = (*table)[static_cast<std::size_t>(n)];
        const double term = e.weight * airy_eval(ax + e.xi).ai *
                            std::exp(-(chi_t - beta * e.xi) * tau);
        prev_sum = sum;
        sum += term;
        const double bound = detail::semi_tail_bound(n + 1, gamma_series);
        out.tail_bound = bound;
        if (bound < cfg.tail_tolerance * std::fabs(sum) && n >= 1) {
            ++n;
            break;
        }
    }
    out.terms_used = n;
    out.cap_limited = (n >= cap);
    // cap-limited stop: average the last two partial sums (alternating tail)
    out.price = out.cap_limited ? 0.5 * (sum + prev_sum) : sum;
    out.price *= std::exp(-eta(drift, t, T));
    return out;
}

inline double bond_price_semi(double z, double t, double T,
                              const SemiSpectrum& spectrum, const DriftCurve& drift,
                              const PricingConfig& cfg = {}) {
    return bond_price_semi_detail(z, t, T, spectrum, drift, cfg).price;
}

/// Two-barrier model price, v = e^{-eta} sum b_n phi_n(x) e^{-chi_n (T-t)}.
inline PriceDetail bond_price_interval_detail(double z, double t, double T,
                                              const IntervalSpectrum& spectrum,
                                              const DriftCurve& drift,
                                              const PricingConfig& cfg) {
    cfg.validate();
    if (T < t) throw std::invalid_argument("bond_price_interval: T < t");
    const double beta = spectrum.params.beta;
    const double sigma = spectrum.params.sigma;
    const double chi_t = drift.chi(t);
    const double x = (z - chi_t) / sigma;
    if (x < 0.0 || x > spectrum.L)
        throw std::domain_error("bond_price_interval: x outside [0, L]");
    const double tau = T - t;

    const int cap = std::min<std::size_t>(static_cast<std::size_t>(cfg.n_levels),
                                          spectrum.levels.size());
    double sum = 0.0, prev_sum = 0.0;
    PriceDetail out;
    int n = 0;
    for (; n < cap; ++n) {
        const auto& lv = spectrum.levels[static_cast<std::size_t>(n)];
        const double term =
            lv.b * interval_phi(spectrum, lv, x) * std::exp(-(chi_t + beta * lv.e) * tau);
        prev_sum = sum;
        sum += term;
        if (n >= 2 && std::fabs(term) < cfg.tail_tolerance * std::fabs(sum) &&
            beta * lv.e * tau > 1.0) {
            ++n;
            break;
        }
    }
    out.terms_used = n;
    out.cap_limited = (n >= cap);
    out.price = out.cap_limited ? 0.5 * (sum + prev_sum) : sum;
    out.price *= std::exp(-eta(drift, t, T));
    return out;
}

inline double bond_price_interval(double z, double t, double T,
                                  const IntervalSpectrum& spectrum,
                                  const DriftCurve& drift,
                                  const PricingConfig& cfg = {}) {
    return bond_price_interval_detail(z, t, T, spectrum, drift, cfg).price;
}

/// Constant-drift model with the barrier on the rate:
///   v(z,t,T) = psi(z/beta, T-t),  psi(y,tau) = e^{-gamma y} sum d_n Ai(y-e_n) e^{-lambda_n tau}.
inline PriceDetail bond_price_robin_detail(double z, double t, double T,
                                           const RobinSpectrum& spectrum,
                                           const PricingConfig& cfg) {
    cfg.validate();
    if (T < t) throw std::invalid_argument("bond_price_robin: T < t");
    if (z < spectrum.r_star)
        throw std::domain_error("bond_price_robin: z below the reflecting barrier r_*");
    const double beta = spectrum.params.beta;
    const double y = z / beta;
    const double tau = T - t;

    const int cap = std::min<std::size_t>(static_cast<std::size_t>(cfg.n_levels),
                                          spectrum.levels.size());
    double sum = 0.0, prev_sum = 0.0;
    PriceDetail out;
    int n = 0;
    int small_streak = 0;
    for (; n < cap; ++n) {
        const auto& lv = spectrum.levels[static_cast<std::size_t>(n)];
        const double term = lv.d * airy_eval(y - lv.e).ai * std::exp(-lv.lambda * tau);
        prev_sum = sum;
        sum += term;
        small_streak = (std::fabs(term) < cfg.tail_tolerance * std::fabs(sum))
                           ? small_streak + 1
                           : 0;
        if (small_streak >= 3 && lv.lambda * tau > 1.0) {
            ++n;
            break;
        }
    }
    out.terms_used = n;
    out.cap_limited = (n >= cap);
    out.price = (out.cap_limited ? 0.5 * (sum + prev_sum) : sum) *
                std::exp(-spectrum.gamma_r * y);
    return out;
}

inline double bond_price_robin(double z, double t, double T,
                               const RobinSpectrum& spectrum,
                               const PricingConfig& cfg = {}) {
    return bond_price_robin_detail(z, t, T, spectrum, cfg).price;
}

/// Price of a general symmetric claim from its eigen-coefficients
/// (see semi_claim_coefficients): v = e^{-eta} sum c_n psi_n(x) e^{-chi_n tau}.
inline double claim_price_semi(double z, double t, double T,
                               const SemiSpectrum& spectrum,
                               const std::vector<double>& coeffs,
                               const DriftCurve& drift) {
    if (T < t) throw std::invalid_argument("claim_price_semi: T < t");
    if (coeffs.size() > spectrum.levels.size())
        throw std::invalid_argument("claim_price_semi: more coefficients than levels");
    const double beta = spectrum.params.beta;
    const double chi_t = drift.chi(t);
    const double ax = (z - chi_t) / beta;
    if (ax < 0.0) throw std::domain_error("claim_price_semi: off the half-line");
    const double tau = T - t;
    double sum = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        const auto& lv = spectrum.levels[n];
        sum += coeffs[n] * lv.a * airy_eval(ax - lv.e).ai *
               std::exp(-(chi_t + beta * lv.e) * tau);
    }
    return sum * std::exp(-eta(drift, t, T));
}

inline double claim_price_interval(double z, double t, double T,
                                   const IntervalSpectrum& spectrum,
                                   const std::vector<double>& coeffs,
                                   const DriftCurve& drift) {
    if (T < t) throw std::invalid_argument("claim_price_interval: T < t");
    if (coeffs.size() > spectrum.levels.size())
        throw std::invalid_argument("claim_price_interval: more coefficients than levels");
    const double chi_t = drift.chi(t);
    const double x = (z - chi_t) / spectrum.params.sigma;
    if (x < 0.0 || x > spectrum.L)
        throw std::domain_error("claim_price_interval: x outside [0, L]");
    const double tau = T - t;
    double sum = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        const auto& lv = spectrum.levels[n];
        sum += coeffs[n] * lv.a * interval_phi(spectrum, lv, x) *
               std::exp(-(chi_t + spectrum.params.beta * lv.e) * tau);
    }
    return sum * std::exp(-eta(drift, t, T));
}

/// Continuously compounded yield R(t,T) = -ln P / (T-t).
inline double yield_from_price(double price, double tau) {
    if (!(price > 0.0)) throw std::runtime_error("yield: nonpositive price");
    return -std::log(price) / tau;
}

struct YieldCurveResult {
    std::vector<YieldPoint> points;
    std::vector<std::pair<std::size_t, std::string>> failures;  // index, message
};

/// Per-maturity yields; pricing errors are collected per point rather than
/// aborting the curve.
template <typename PriceFn>
YieldCurveResult yield_curve(const std::vector<double>& maturities, double t,
                             PriceFn&& price_at) {
    YieldCurveResult out;
    out.points.reserve(maturities.size());
    for (std::size_t i = 0; i < maturities.size(); ++i) {
        const double T = maturities[i];
        if (!(T > t)) {
            out.failures.emplace_back(i, "maturity not after valuation time");
            out.points.push_back({T, std::nan("")});
            continue;
        }
        try {
            const double p = price_at(T);
            out.points.push_back({T, yield_from_price(p, T - t)});
        } catch (const std::exception& ex) {
            out.failures.emplace_back(i, ex.what());
            out.points.push_back({T, std::nan("")});
        }
    }
    return out;
}

inline YieldCurveResult yield_curve_semi(double z, double t,
                                         const std::vector<double>& maturities,
                                         const SemiSpectrum& spectrum,
                                         const DriftCurve& drift,
                                         const PricingConfig& cfg = {}) {
    return yield_curve(maturities, t, [&](double T) {
        return bond_price_semi(z, t, T, spectrum, drift, cfg);
    });
}

/// Asymptotic yield R_*(t) = chi_*(t) + chi(t) + E_1; for nu == 0 this is
/// r0 + beta |xi_1|. Throws for drifts with divergent chi_*.
inline double asymptotic_yield(const SemiSpectrum& spectrum, const DriftCurve& drift,
                               double t) {
    if (!drift.bounded_tail())
        throw std::domain_error(
            "asymptotic_yield: chi_* diverges for this drift (constant nonzero drift "
            "is not admissible)");
    const double e1 = spectrum.levels.front().e;
    return chi_star(drift, t) + drift.chi(t) + spectrum.params.beta * e1;
}

}  // namespace hlb
