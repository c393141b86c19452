#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "hlb/drift.hpp"

namespace hlb {

struct McConfig {
    std::int64_t n_paths = 100000;
    int steps_per_year = 250;
    std::uint64_t seed = 42;
    bool antithetic = true;
    int n_threads = 0;  // 0 -> hardware concurrency

    void validate() const {
        if (n_paths < 100) throw std::invalid_argument("McConfig: n_paths >= 100");
        if (steps_per_year < 1)
            throw std::invalid_argument("McConfig: steps_per_year >= 1");
    }
};

struct McResult {
    double price = 0.0;
    double std_error = 0.0;
    std::int64_t n_paths = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Triangle fold of the unrestricted Brownian coordinate into [0, L]
// (two-barrier reflection map); L <= 0 selects the half-line fold |x|.
inline double fold_coordinate(double x, double L) {
    if (L <= 0.0) return std::fabs(x);
    const double period = 2.0 * L;
    double y = std::fmod(x, period);
    if (y < 0.0) y += period;
    return (y <= L) ? y : period - y;
}

// One chunk of discounted-payoff statistics. Paths within a chunk share an
// RNG stream seeded from (seed, chunk index) so the estimate is independent
// of the thread count.
struct ChunkStats {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t n = 0;
};

template <typename PathValue>
ChunkStats run_chunk(std::uint64_t seed, std::int64_t chunk_idx, std::int64_t count,
                     bool antithetic, PathValue&& path_value) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(chunk_idx))));
    std::normal_distribution<double> gauss(0.0, 1.0);
    ChunkStats st;
    std::vector<double> draws;
    for (std::int64_t p = 0; p < count; ++p) {
        double v;
        if (antithetic) {
            draws.clear();
            v = 0.5 * (path_value(
                           [&](void) {
                               const double g = gauss(rng);
                               draws.push_back(g);
                               return g;
                           }) +
                       path_value([&, k = std::size_t{0}](void) mutable {
                           return -draws[k++];
                       }));
        } else {
            v = path_value([&](void) { return gauss(rng); });
        }
        st.sum += v;
        st.sum_sq += v * v;
        ++st.n;
    }
    return st;
}

template <typename PathValue>
McResult mc_run(const McConfig& mc, PathValue&& path_value) {
    mc.validate();
    constexpr std::int64_t kChunk = 8192;
    // antithetic pairs count as two paths
    const std::int64_t units =
        mc.antithetic ? (mc.n_paths + 1) / 2 : mc.n_paths;
    const std::int64_t n_chunks = (units + kChunk - 1) / kChunk;
    std::vector<ChunkStats> stats(static_cast<std::size_t>(n_chunks));

    int workers = mc.n_threads > 0
                      ? mc.n_threads
                      : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    workers = static_cast<int>(
        std::min<std::int64_t>(workers, n_chunks));

    const auto work = [&](int w) {
        for (std::int64_t c = w; c < n_chunks; c += workers) {
            const std::int64_t count = std::min(kChunk, units - c * kChunk);
            stats[static_cast<std::size_t>(c)] =
                run_chunk(mc.seed, c, count, mc.antithetic, path_value);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }

    double sum = 0.0, sum_sq = 0.0;
    std::int64_t n = 0;
    for (const auto& st : stats) {  // fixed order: deterministic reduction
        sum += st.sum;
        sum_sq += st.sum_sq;
        n += st.n;
    }
    McResult out;
    out.n_paths = mc.antithetic ? 2 * n : n;
    out.price = sum / static_cast<double>(n);
    const double var =
        std::max(0.0, sum_sq / static_cast<double>(n) - out.price * out.price);
    out.std_error = std::sqrt(var / static_cast<double>(n));
    return out;
}

template <typename Fold>
McResult mc_price_impl(double z, double t, double T, double sigma,
                       const DriftCurve& drift, const McConfig& mc, Fold&& fold,
                       bool stepwise_reflect, double L) {
    if (T < t) throw std::invalid_argument("mc_price: T < t");
    const double x0 = (z - drift.chi(t)) / sigma;
    if (x0 < 0.0 || (L > 0.0 && x0 > L))
        throw std::domain_error("mc_price: start point outside the domain");
    const double tau = T - t;
    if (tau == 0.0) return {1.0, 0.0, mc.n_paths};
    const int n_steps = std::max(1, static_cast<int>(std::lround(tau * mc.steps_per_year)));
    const double dt = tau / n_steps;
    const double sdt = std::sqrt(dt);

    // chi values along the path grid are path-independent
    std::vector<double> chi_grid(static_cast<std::size_t>(n_steps) + 1);
    for (int k = 0; k <= n_steps; ++k) chi_grid[static_cast<std::size_t>(k)] = drift.chi(t + dt * k);

    const auto path_value = [&](auto&& draw) {
        double w = x0;       // folded coordinate (stepwise) or free coordinate
        double r_prev = sigma * fold(x0) + chi_grid[0];
        double integral = 0.0;
        for (int k = 1; k <= n_steps; ++k) {
            const double g = draw();
            if (stepwise_reflect) {
                w = fold(w + sdt * g);
            } else {
                w += sdt * g;
            }
            const double r = sigma * fold(w) + chi_grid[static_cast<std::size_t>(k)];
            integral += 0.5 * (r_prev + r) * dt;  // trapezoid
            r_prev = r;
        }
        return std::exp(-integral);
    };
    return mc_run(mc, path_value);
}

}  // namespace detail

/// Half-line model price by folding |W| (exact in law).
inline McResult mc_price_semi(double z, double t, double T, double sigma,
                              const DriftCurve& drift, const McConfig& mc) {
    return detail::mc_price_impl(
        z, t, T, sigma, drift, mc,
        [](double x) { return detail::fold_coordinate(x, 0.0); }, false, 0.0);
}

/// Half-line model price with per-step reflection at the barrier.
inline McResult mc_price_semi_reflect(double z, double t, double T, double sigma,
                                      const DriftCurve& drift, const McConfig& mc) {
    return detail::mc_price_impl(
        z, t, T, sigma, drift, mc,
        [](double x) { return detail::fold_coordinate(x, 0.0); }, true, 0.0);
}

/// Two-barrier model price by periodic triangle folding (exact in law).
inline McResult mc_price_interval(double z, double t, double T, double sigma, double L,
                                  const DriftCurve& drift, const McConfig& mc) {
    if (!(L > 0.0)) throw std::invalid_argument("mc_price_interval: L must be > 0");
    return detail::mc_price_impl(
        z, t, T, sigma, drift, mc,
        [L](double x) { return detail::fold_coordinate(x, L); }, false, L);
}

/// Two-barrier model price with per-step reflection.
inline McResult mc_price_interval_reflect(double z, double t, double T, double sigma,
                                          double L, const DriftCurve& drift,
                                          const McConfig& mc) {
    if (!(L > 0.0)) throw std::invalid_argument("mc_price_interval: L must be > 0");
    return detail::mc_price_impl(
        z, t, T, sigma, drift, mc,
        [L](double x) { return detail::fold_coordinate(x, L); }, true, L);
}

}  // namespace hlb
