#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hlb/drift.hpp"

namespace hlb {

/// Backward theta-scheme grid for the imaginary-time pricing equation.
struct PdeGrid {
    double x_max = 0.0;   // 0 -> choose automatically (semi-line far field)
    int n_x = 2000;
    int n_t = 2000;
    double theta = 0.5;   // 0.5 = Crank-Nicolson, 1.0 = implicit Euler

    void validate() const {
        if (n_x < 3 || n_t < 1) throw std::invalid_argument("PdeGrid: n_x >= 3, n_t >= 1");
        if (theta < 0.5 || theta > 1.0)
            throw std::invalid_argument("PdeGrid: theta in [0.5, 1]");
    }
};

namespace detail {

inline void thomas_solve(const std::vector<double>& lower, std::vector<double> diag,
                         const std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// 4-point Lagrange interpolation on a uniform grid.
inline double interp_grid(const std::vector<double>& xs, const std::vector<double>& ys,
                          double x) {
    const std::size_t n = xs.size();
    const double h = xs[1] - xs[0];
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>((x - xs[0]) / h);
    i = std::clamp<std::ptrdiff_t>(i - 1, 0, static_cast<std::ptrdiff_t>(n) - 4);
    double acc = 0.0;
    for (std::ptrdiff_t j = i; j < i + 4; ++j) {
        double lj = 1.0;
        for (std::ptrdiff_t k = i; k < i + 4; ++k)
            if (k != j) lj *= (x - xs[static_cast<std::size_t>(k)]) /
                              (xs[static_cast<std::size_t>(j)] - xs[static_cast<std::size_t>(k)]);
        acc += lj * ys[static_cast<std::size_t>(j)];
    }
    return acc;
}

}  // namespace detail

/// Finite-difference price of the zero-coupon claim in Brownian coordinates:
/// integrate psi_tau = (1/2) psi_xx - (sigma x + chi(t)) psi backward from
/// psi = 1 with Neumann ends. model_interval_L > 0 pins x_max = L (two
/// barriers); otherwise x_max is a far-field cutoff >= x0 + 6 sqrt(T-t).
inline double pde_price(double z, double t, double T, double sigma,
                        const DriftCurve& drift, const PdeGrid& grid,
                        double model_interval_L = 0.0) {
    grid.validate();
    if (T < t) throw std::invalid_argument("pde_price: T < t");
    if (!(sigma > 0.0)) throw std::invalid_argument("pde_price: sigma must be > 0");
    const double tau_total = T - t;
    const double x0 = (z - drift.chi(t)) / sigma;
    double xmax = grid.x_max;
    if (model_interval_L > 0.0) {
        xmax = model_interval_L;
        if (x0 < 0.0 || x0 > xmax)
            throw std::domain_error("pde_price: x outside [0, L]");
    } else {
        if (x0 < 0.0) throw std::domain_error("pde_price: x below the barrier");
        const double need = x0 + 6.0 * std::sqrt(std::max(tau_total, 1e-12)) + 1.0;
        if (xmax <= 0.0) xmax = need;
        if (xmax < need)
            throw std::invalid_argument("pde_price: x_max below the far-field rule");
    }
    const std::size_t nx = static_cast<std::size_t>(grid.n_x);
    const double dx = xmax / static_cast<double>(nx);
    const double dtau = tau_total / grid.n_t;

    std::vector<double> x(nx + 1);
    for (std::size_t i = 0; i <= nx; ++i) x[i] = dx * static_cast<double>(i);
    std::vector<double> psi(nx + 1, 1.0);
    if (tau_total == 0.0) return 1.0;

    const double lam = 0.5 * dtau / (dx * dx);  // dtau * (1/2) / dx^2
    const double th = grid.theta;
    std::vector<double> lower(nx + 1), diag(nx + 1), upper(nx + 1), rhs(nx + 1);

    for (int k = 0; k < grid.n_t; ++k) {
        // tau runs 0 -> tau_total; potential evaluated at both time levels
        const double chi_old = drift.chi(T - dtau * k);
        const double chi_new = drift.chi(T - dtau * (k + 1));
        for (std::size_t i = 0; i <= nx; ++i) {
            const double u_new = sigma * x[i] + chi_new;
            const double u_old = sigma * x[i] + chi_old;
            lower[i] = -th * lam;
            upper[i] = -th * lam;
            diag[i] = 1.0 + th * (2.0 * lam + dtau * u_new);
            rhs[i] = (1.0 - (1.0 - th) * (2.0 * lam + dtau * u_old)) * psi[i];
            if (i > 0 && i < nx)
                rhs[i] += (1.0 - th) * lam * (psi[i - 1] + psi[i + 1]);
        }
        // Neumann mirrors: ghost node equals the inner neighbour
        upper[0] = -2.0 * th * lam;
        lower[nx] = -2.0 * th * lam;
        rhs[0] += (1.0 - th) * 2.0 * lam * psi[1];
        rhs[nx] += (1.0 - th) * 2.0 * lam * psi[nx - 1];
        detail::thomas_solve(lower, diag, upper, rhs);
        psi.swap(rhs);
    }
    return detail::interp_grid(x, psi, x0);
}

/// Reflecting-barrier-on-the-rate variant (constant drift): solves
/// v_tau = nu v_z + (1/2) sigma^2 v_zz - z v on [r_*, z_max] with
/// dv/dz = 0 at z = r_*.
inline double pde_price_robin(double z, double t, double T, double sigma, double nu,
                              double r_star, const PdeGrid& grid) {
    grid.validate();
    if (T < t) throw std::invalid_argument("pde_price_robin: T < t");
    if (z < r_star) throw std::domain_error("pde_price_robin: z below the barrier");
    const double tau_total = T - t;
    if (tau_total == 0.0) return 1.0;
    double zmax = grid.x_max;
    const double need = z + 6.0 * sigma * std::sqrt(tau_total) + std::fabs(nu) * tau_total + 0.3;
    if (zmax <= 0.0) zmax = need;
    if (zmax < need) throw std::invalid_argument("pde_price_robin: x_max too small");

    const std::size_t nx = static_cast<std::size_t>(grid.n_x);
    const double dz = (zmax - r_star) / static_cast<double>(nx);
    const double dtau = tau_total / grid.n_t;
    std::vector<double> zg(nx + 1);
    for (std::size_t i = 0; i <= nx; ++i) zg[i] = r_star + dz * static_cast<double>(i);
    std::vector<double> v(nx + 1, 1.0);

    const double th = grid.theta;
    const double dif = 0.5 * sigma * sigma / (dz * dz);  // diffusion/dz^2
    const double adv = 0.5 * nu / dz;                    // central advection
    std::vector<double> lower(nx + 1), diag(nx + 1), upper(nx + 1), rhs(nx + 1);

    for (int k = 0; k < grid.n_t; ++k) {
        for (std::size_t i = 0; i <= nx; ++i) {
            // operator A v = adv-term + dif-term - z v;  (I - th dtau A) v_new = (I + (1-th) dtau A) v_old
            diag[i] = 1.0 + th * dtau * (2.0 * dif + zg[i]);
            lower[i] = -th * dtau * (dif - adv);
            upper[i] = -th * dtau * (dif + adv);
            double r = (1.0 - (1.0 - th) * dtau * (2.0 * dif + zg[i])) * v[i];
            if (i > 0 && i < nx)
                r += (1.0 - th) * dtau * ((dif - adv) * v[i - 1] + (dif + adv) * v[i + 1]);
            rhs[i] = r;
        }
        // Neumann mirror at both ends kills advection and doubles diffusion
        upper[0] = -th * dtau * 2.0 * dif;
        lower[nx] = -th * dtau * 2.0 * dif;
        rhs[0] += (1.0 - th) * dtau * 2.0 * dif * v[1];
        rhs[nx] += (1.0 - th) * dtau * 2.0 * dif * v[nx - 1];
        detail::thomas_solve(lower, diag, upper, rhs);
        v.swap(rhs);
    }
    return detail::interp_grid(zg, v, z);
}

}  // namespace hlb
