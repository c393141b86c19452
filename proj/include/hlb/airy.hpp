#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "hlb/dd.hpp"

namespace hlb {

/// Ai, Bi and first derivatives at a common argument.
struct AiryValues {
    double ai;
    double bi;
    double ai_prime;
    double bi_prime;
    double y;
};

/// Zeros of Ai' (xi, Neumann levels) and of Ai (zeta), both negative and
/// decreasing, interlaced as 0 > xi[0] > zeta[0] > xi[1] > ...
struct AiryZeroTable {
    std::vector<double> xi;
    std::vector<double> zeta;
    std::size_t count = 0;
};

namespace detail {

// Maclaurin/asymptotic crossover. Below this the double-double series keeps
// >= 18 digits after cancellation; above it the asymptotic series' optimal
// truncation error is below 1e-13 relative.
inline constexpr double kAirySeriesCut = 9.0;

// e^{zeta} with zeta = (2/3)y^{3/2} overflows close to this argument.
inline constexpr double kBiOverflowArg = 103.5;

inline constexpr DD kAi0{0.3550280538878172, 2.05233632436212e-17};    // Ai(0)
inline constexpr DD kMAip0{0.2588194037928068, -2.522243111610832e-17};  // -Ai'(0)
inline constexpr DD kSqrt3{1.7320508075688772, 1.0035084221806903e-16};

struct AiryDD {
    DD ai, bi, aip, bip;
};

// Power-series evaluation of the two Airy basis functions f, g and their
// derivatives, combined into Ai, Bi. Accumulated in double-double because
// Ai = c1 f - c2 g cancels ~e^{2 zeta} at positive y (12+ digits at y = 9).
inline AiryDD airy_series_dd(double y) {
    const DD ydd(y);
    const DD y3 = mul(mul(ydd, ydd), ydd);

    DD f(1.0), g(ydd), fp(0.0), gp(1.0);
    DD tf(1.0), tg(ydd);          // running terms of f, g
    DD tfp(0.0), tgp(1.0);        // running terms of f', g'
    // f' first term is y^2/2 (k = 1)
    DD y2half = div(mul(ydd, ydd), 2.0);

    for (int k = 1; k <= 220; ++k) {
        const double k3 = 3.0 * k;
        tf = div(mul(tf, y3), k3 * (k3 - 1.0));
        tg = div(mul(tg, y3), k3 * (k3 + 1.0));
        if (k == 1) {
            tfp = y2half;
        } else {
            tfp = div(mul(tfp, y3), (k3 - 1.0) * (k3 - 3.0));
        }
        tgp = div(mul(tgp, y3), k3 * (k3 - 2.0));

        f = add(f, tf);
        g = add(g, tg);
        fp = add(fp, tfp);
        gp = add(gp, tgp);

        const double m = std::fabs(tf.hi) + std::fabs(tg.hi) +
                         std::fabs(tfp.hi) + std::fabs(tgp.hi);
        if (m < 1e-24) break;
    }

    AiryDD out;
    const DD c1f = mul(kAi0, f), c2g = mul(kMAip0, g);
    const DD c1fp = mul(kAi0, fp), c2gp = mul(kMAip0, gp);
    out.ai = sub(c1f, c2g);
    out.aip = sub(c1fp, c2gp);
    out.bi = mul(kSqrt3, add(c1f, c2g));
    out.bip = mul(kSqrt3, add(c1fp, c2gp));
    return out;
}

// u_k, v_k coefficient streams of the large-argument expansions:
// su = sum u_k / zeta^k, sv likewise with v_k; *_alt with alternating signs.
inline void airy_asym_uv(double zeta, double& su, double& sv, double& su_alt,
                         double& sv_alt) {
    double u = 1.0, v = 1.0;
    double tk = 1.0;
    su = sv = su_alt = sv_alt = 1.0;
    double prev = 1e300;
    for (int k = 1; k <= 60; ++k) {
        u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
             ((2.0 * k - 1.0) * 216.0 * k);
        v = u * (6.0 * k + 1.0) / (1.0 - 6.0 * k);
        tk /= zeta;
        const double tu = u * tk;
        if (std::fabs(tu) >= prev) break;  // divergence onset
        prev = std::fabs(tu);
        const double sgn = (k & 1) ? -1.0 : 1.0;
        su += tu;
        sv += v * tk;
        su_alt += sgn * tu;
        sv_alt += sgn * v * tk;
        if (std::fabs(tu) < 1e-18) break;
    }
}

struct AiryScaled {
    // Ai = ai_s e^{-zeta}, Ai' = aip_s e^{-zeta}, Bi = bi_s e^{+zeta},
    // Bi' = bip_s e^{+zeta}; valid for y >= 0.
    double ai_s, aip_s, bi_s, bip_s, zeta;
};

inline AiryScaled airy_scaled_pos(double y) {
    if (y < 0.0) throw std::domain_error("airy_scaled_pos: y must be >= 0");
    AiryScaled r{};
    r.zeta = (2.0 / 3.0) * y * std::sqrt(y);
    if (y <= kAirySeriesCut) {
        const AiryDD v = airy_series_dd(y);
        const double ez = std::exp(r.zeta);
        r.ai_s = v.ai.value() * ez;
        r.aip_s = v.aip.value() * ez;
        r.bi_s = v.bi.value() / ez;
        r.bip_s = v.bip.value() / ez;
        return r;
    }
    double su, sv, su_alt, sv_alt;
    airy_asym_uv(r.zeta, su, sv, su_alt, sv_alt);
    const double q = std::pow(y, 0.25);
    const double spi = std::sqrt(M_PI);
    r.ai_s = su_alt / (2.0 * spi * q);
    r.aip_s = -q * sv_alt / (2.0 * spi);
    r.bi_s = su / (spi * q);
    r.bip_s = q * sv / spi;
    return r;
}

inline AiryValues airy_neg_asym(double y) {
    // y <= -kAirySeriesCut
    const double t = -y;
    const double zeta = (2.0 / 3.0) * t * std::sqrt(t);
    double p = 1.0, q = 0.0, rr = 1.0, s = 0.0;
    // P = sum (-1)^k u_{2k} zeta^{-2k},  Q = sum (-1)^k u_{2k+1} zeta^{-2k-1}
    // R, S: same with v coefficients.
    double u = 1.0, v = 1.0, tk = 1.0;
    double prev = 1e300;
    for (int k = 1; k <= 60; ++k) {
        u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
             ((2.0 * k - 1.0) * 216.0 * k);
        v = u * (6.0 * k + 1.0) / (1.0 - 6.0 * k);
        tk /= zeta;
        const double tu = u * tk;
        if (std::fabs(tu) >= prev) break;
        prev = std::fabs(tu);
        const int m = k / 2;               // pair index
        const double sgn = (m & 1) ? -1.0 : 1.0;
        if (k & 1) {                        // odd k -> Q, S streams
            q += sgn * tu;
            s += sgn * v * tk;
        } else {                            // even k -> P, R streams
            p += sgn * tu;
            rr += sgn * v * tk;
        }
        if (std::fabs(tu) < 1e-18) break;
    }
    const double ph = zeta - 0.25 * M_PI;
    const double cp = std::cos(ph), sp = std::sin(ph);
    const double q4 = std::pow(t, 0.25);
    const double spi = std::sqrt(M_PI);
    AiryValues out{};
    out.y = y;
    out.ai = (cp * p + sp * q) / (spi * q4);
    out.ai_prime = (sp * rr - cp * s) * q4 / spi;
    out.bi = (-sp * p + cp * q) / (spi * q4);
    out.bi_prime = (cp * rr + sp * s) * q4 / spi;
    return out;
}

// Positive-side asymptotic branch regardless of the crossover (overlap checks).
inline AiryValues airy_pos_asym(double y) {
    AiryValues out{};
    out.y = y;
    const double zeta = (2.0 / 3.0) * y * std::sqrt(y);
    double su, sv, su_alt, sv_alt;
    airy_asym_uv(zeta, su, sv, su_alt, sv_alt);
    const double q = std::pow(y, 0.25);
    const double spi = std::sqrt(M_PI);
    const double em = std::exp(-zeta), ep = std::exp(zeta);
    out.ai = su_alt * em / (2.0 * spi * q);
    out.ai_prime = -q * sv_alt * em / (2.0 * spi);
    out.bi = su * ep / (spi * q);
    out.bi_prime = q * sv * ep / spi;
    return out;
}

// Series branch regardless of the crossover (overlap checks).
inline AiryValues airy_series_vals(double y) {
    const AiryDD v = airy_series_dd(y);
    return {v.ai.value(), v.bi.value(), v.aip.value(), v.bip.value(), y};
}

}  // namespace detail

/// All four Airy values at y. Relative accuracy ~1e-12 or better across the
/// series/asymptotic crossover. Throws std::range_error once Bi(y) leaves the
/// representable range (y > ~103.5); Ai underflows gracefully to 0 before that.
inline AiryValues airy_eval(double y) {
    if (!std::isfinite(y)) throw std::invalid_argument("airy_eval: y not finite");
    if (y > detail::kBiOverflowArg)
        throw std::range_error("airy_eval: Bi overflows for y > 103.5");
    AiryValues out{};
    out.y = y;
    if (std::fabs(y) <= detail::kAirySeriesCut) {
        const detail::AiryDD v = detail::airy_series_dd(y);
        out.ai = v.ai.value();
        out.bi = v.bi.value();
        out.ai_prime = v.aip.value();
        out.bi_prime = v.bip.value();
        return out;
    }
    if (y > 0.0) {
        const detail::AiryScaled s = detail::airy_scaled_pos(y);
        const double em = std::exp(-s.zeta), ep = std::exp(s.zeta);
        out.ai = s.ai_s * em;
        out.ai_prime = s.aip_s * em;
        out.bi = s.bi_s * ep;
        out.bi_prime = s.bip_s * ep;
        return out;
    }
    return detail::airy_neg_asym(y);
}

/// Exponentially scaled values for y >= 0 (interval-model conditioning):
/// Ai = ai_s e^{-zeta}, Bi = bi_s e^{+zeta}, zeta = (2/3) y^{3/2}.
inline detail::AiryScaled airy_eval_scaled(double y) {
    return detail::airy_scaled_pos(y);
}

namespace detail {

inline double zero_initial_guess(int n, bool of_derivative) {
    // leading large-n asymptotics; exact enough to seed Newton for all n >= 1
    const double t = (3.0 * M_PI / 8.0) * (of_derivative ? (4.0 * n - 3.0)
                                                         : (4.0 * n - 1.0));
    return -std::pow(t, 2.0 / 3.0);
}

// Safeguarded Newton: falls back to bisection when an iterate leaves the
// bracket. f and df evaluated through airy_eval.
template <typename F, typename DF>
double refine_zero(double lo, double hi, double x0, F f, DF df) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::runtime_error("airy zero finder: bracket does not straddle a sign change");
    double x = x0;
    if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        const double d = df(x);
        double xn = (d != 0.0) ? x - fx / d : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::fabs(xn - x) < 1e-15 * std::fabs(x) + 1e-15) {
            x = xn;
            break;
        }
        x = xn;
    }
    return x;
}

struct ZeroTables {
    std::vector<double> xi;    // zeros of Ai'
    std::vector<double> zeta;  // zeros of Ai
};

// Shared grow-on-demand cache; readers take an immutable snapshot.
inline std::shared_ptr<const ZeroTables> zero_tables_snapshot(std::size_t n) {
    static std::mutex mu;
    static std::shared_ptr<const ZeroTables> cache = std::make_shared<ZeroTables>();
    {
        std::lock_guard<std::mutex> lk(mu);
        if (cache->xi.size() >= n) return cache;
        auto next = std::make_shared<ZeroTables>(*cache);
        const auto fa = [](double v) { return airy_eval(v).ai; };
        const auto fap = [](double v) { return airy_eval(v).ai_prime; };
        const auto fapp = [](double v) {
            const auto a = airy_eval(v);
            return v * a.ai;  // Ai'' = y Ai
        };
        for (std::size_t k = next->xi.size() + 1; k <= n; ++k) {
            const int kk = static_cast<int>(k);
            // bracket from guesses of the neighbouring zeros
            const double gx = zero_initial_guess(kk, true);
            double lo = zero_initial_guess(kk, false);            // zeta_k < xi_k
            double hi = (kk == 1) ? 0.0 : next->zeta[k - 2];      // zeta_{k-1} > xi_k
            next->xi.push_back(refine_zero(lo, hi, gx, fap, fapp));
            const double gz = zero_initial_guess(kk, false);
            double zlo = zero_initial_guess(kk + 1, true);        // xi_{k+1} < zeta_k
            double zhi = next->xi[k - 1];                         // xi_k > zeta_k
            next->zeta.push_back(refine_zero(zlo, zhi, gz, fa, fap));
        }
        cache = next;
        return cache;
    }
}

}  // namespace detail

/// First n_max zeros of Ai' (all negative, decreasing); |Ai'(xi_n)| <= 1e-10.
inline std::vector<double> ai_prime_zeros(int n_max) {
    if (n_max < 1) throw std::invalid_argument("ai_prime_zeros: n_max >= 1 required");
    auto t = detail::zero_tables_snapshot(static_cast<std::size_t>(n_max));
    return {t->xi.begin(), t->xi.begin() + n_max};
}

/// First n_max zeros of Ai.
inline std::vector<double> ai_zeros(int n_max) {
    if (n_max < 1) throw std::invalid_argument("ai_zeros: n_max >= 1 required");
    auto t = detail::zero_tables_snapshot(static_cast<std::size_t>(n_max));
    return {t->zeta.begin(), t->zeta.begin() + n_max};
}

inline AiryZeroTable build_zero_table(int n_max) {
    AiryZeroTable tab;
    tab.xi = ai_prime_zeros(n_max);
    tab.zeta = ai_zeros(n_max);
    tab.count = static_cast<std::size_t>(n_max);
    return tab;
}

}  // namespace hlb
