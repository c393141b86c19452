#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "hlb/io.hpp"
#include "hlb/pricing.hpp"

using namespace hlb;

namespace {

// JGB semi-line fit parameters (published, rounded)
constexpr double kZ = -0.00184;
constexpr double kBeta = 0.0924;
constexpr double kR0 = -0.05834;

double jgb_sigma() { return std::sqrt(2.0 * kBeta * kBeta * kBeta); }

std::vector<double> jgb_maturities() {
    using std::chrono::year_month_day;
    const year_month_day val = parse_date("2002-02-03");
    const char* dates[] = {"3/20/2003",  "3/22/2004", "3/21/2005", "3/20/2006",
                           "3/20/2007",  "3/20/2008", "3/20/2009", "3/22/2010",
                           "3/21/2011",  "12/20/2011", "9/20/2016", "12/20/2021",
                           "11/20/2031"};
    std::vector<double> out;
    for (const char* d : dates) out.push_back(year_fraction(val, parse_date(d)));
    return out;
}

}  // namespace

TEST_CASE("terminal condition reconstructs the unit claim within truncation") {
    const auto spec = build_semi_spectrum(jgb_sigma(), 300);
    const auto drift = DriftCurve::constant(kR0);
    for (double ax : {0.5, 1.5, 3.0}) {
        const double z = kR0 + kBeta * ax;
        CHECK(bond_price_semi(z, 2.0, 2.0, spec, drift) ==
              Catch::Approx(1.0).margin(0.02));
    }
}

TEST_CASE("published JGB long-maturity yields from the table parameters") {
    const auto spec = build_semi_spectrum(jgb_sigma(), 300);
    const auto drift = DriftCurve::constant(kR0);
    const auto mats = jgb_maturities();
    const auto yc = yield_curve_semi(kZ, 0.0, mats, spec, drift);
    REQUIRE(yc.failures.empty());

    // published model column, percent; the first row of the published table is
    // inconsistent with the converged series (its true value, cross-checked
    // against a finite-difference solve, is -0.107%)
    const double published[] = {-0.1068, 0.106, 0.338, 0.571, 0.788, 0.988, 1.169,
                                1.333,  1.481, 1.584, 2.084, 2.434, 2.801};
    // the 3-4 digit rounding of the published parameters moves the short rows
    // by up to ~0.8 bp; tolerances reflect the measured sensitivity
    const double tol_bp[] = {0.6, 0.4, 1.0, 0.8, 0.6, 0.5, 0.4, 0.4, 0.4, 0.4,
                             0.4, 0.4, 0.4};
    for (std::size_t i = 0; i < mats.size(); ++i) {
        CHECK(yc.points[i].yield_value * 100.0 ==
              Catch::Approx(published[i]).margin(tol_bp[i] * 1e-2));
    }
}

TEST_CASE("interval pricing matches the half line for a wide box") {
    const double sigma = jgb_sigma();
    const double alpha = std::cbrt(2.0 * sigma);
    const auto ispec = build_interval_spectrum(sigma, 40.0 / alpha);  // default depth
    const auto sspec = build_semi_spectrum(sigma, 300);
    const auto drift = DriftCurve::constant(kR0);
    PricingConfig icfg;
    icfg.n_levels = static_cast<int>(ispec.levels.size());
    for (double tau : {1.0, 5.0, 10.0, 30.0}) {
        const double pi_ = bond_price_interval(kZ, 0.0, tau, ispec, drift, icfg);
        const double ps = bond_price_semi(kZ, 0.0, tau, sspec, drift);
        const double yi = yield_from_price(pi_, tau);
        const double ys = yield_from_price(ps, tau);
        CHECK(std::fabs(yi - ys) < 0.1e-4);  // 0.1 bp
    }
}

TEST_CASE("interval terminal condition and asymptotic yield dominance") {
    const double sigma = jgb_sigma();
    const double alpha = std::cbrt(2.0 * sigma);
    const auto ispec = build_interval_spectrum(sigma, 5.0 / alpha);
    const auto drift = DriftCurve::constant(kR0);
    PricingConfig icfg;
    icfg.n_levels = static_cast<int>(ispec.levels.size());
    const double z = kR0 + sigma * (2.0 / alpha);  // x = 2/alpha inside the box
    CHECK(bond_price_interval(z, 1.0, 1.0, ispec, drift, icfg) ==
          Catch::Approx(1.0).margin(0.02));
    // lowest-level dominance: the yield gap to chi_1 decays like
    // -ln(b1 phi1(x))/tau, so (y - chi_1) tau is constant once the higher
    // modes are dead, and y -> chi_1 only on the 1/tau scale
    const double chi1 = kR0 + ispec.params.beta * ispec.levels[0].e;
    const auto gap_tau = [&](double tau) {
        const double y =
            yield_from_price(bond_price_interval(z, 0.0, tau, ispec, drift, icfg), tau);
        return (y - chi1) * tau;
    };
    CHECK(gap_tau(40.0) == Catch::Approx(gap_tau(80.0)).epsilon(1e-2));
    const double y6000 = yield_from_price(
        bond_price_interval(z, 0.0, 6000.0, ispec, drift, icfg), 6000.0);
    CHECK(std::fabs(y6000 - chi1) < 2e-4);
}

TEST_CASE("robin pricer reduces to the half line at nu = 0") {
    const double sigma = jgb_sigma();
    const auto rspec = build_robin_spectrum(sigma, 0.0, kR0, 300);
    const auto sspec = build_semi_spectrum(sigma, 300);
    const auto drift = DriftCurve::constant(kR0);
    for (double tau : {1.0, 5.0, 30.0}) {
        const double pr = bond_price_robin(kZ, 0.0, tau, rspec);
        const double ps = bond_price_semi(kZ, 0.0, tau, sspec, drift);
        CHECK(pr == Catch::Approx(ps).epsilon(1e-8));
    }
    CHECK(bond_price_robin(kZ, 3.0, 3.0, rspec) == Catch::Approx(1.0).margin(0.02));
    CHECK_THROWS_AS(bond_price_robin(kR0 - 0.01, 0.0, 1.0, rspec), std::domain_error);
}

TEST_CASE("semi pricing domain and validation errors") {
    const auto spec = build_semi_spectrum(jgb_sigma(), 50);
    const auto drift = DriftCurve::constant(kR0);
    CHECK_THROWS_AS(bond_price_semi(kR0 - 0.001, 0.0, 1.0, spec, drift),
                    std::domain_error);
    CHECK_THROWS_AS(bond_price_semi(kZ, 2.0, 1.0, spec, drift), std::invalid_argument);
    PricingConfig bad;
    bad.tail_tolerance = 1.0;
    CHECK_THROWS_AS(bond_price_semi(kZ, 0.0, 1.0, spec, drift, bad),
                    std::invalid_argument);
}

TEST_CASE("truncation converges monotonically to the deep sum") {
    const auto spec = build_semi_spectrum(jgb_sigma(), 300);
    const auto drift = DriftCurve::constant(kR0);
    const double tau = 1.5;
    PricingConfig full;
    full.n_levels = 300;
    const double ref = bond_price_semi(kZ, 0.0, tau, spec, drift, full);
    double prev_gap = 1e300;
    for (int n : {50, 100, 150, 200, 250}) {
        PricingConfig cfg;
        cfg.n_levels = n;
        const double p = bond_price_semi(kZ, 0.0, tau, spec, drift, cfg);
        const double gap = std::fabs(p - ref);
        CHECK(gap <= prev_gap + 1e-15);
        const double gamma_series = kBeta * tau * std::pow(1.5 * M_PI, 2.0 / 3.0);
        const double bound =
            std::sqrt(2.0 / (3.0 * n)) * std::exp(-gamma_series * std::pow(n, 2.0 / 3.0));
        CHECK(gap <= bound);
        prev_gap = gap;
    }
}

TEST_CASE("series terms alternate and decay at the predicted rate") {
    const auto spec = build_semi_spectrum(jgb_sigma(), 300);
    const double tau = 5.0;
    // with z = chi(t) (alpha x = 0) the terms sit exactly on the Ai extrema
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    double prev_term = 0.0;
    for (int n = 1; n <= 300; ++n) {
        const auto& lv = spec.levels[static_cast<std::size_t>(n - 1)];
        const double term = lv.weight * airy_eval(-lv.e).ai *
                            std::exp(-(kR0 + kBeta * lv.e) * tau);
        if (n > 5) CHECK(term * prev_term < 0.0);
        prev_term = term;
        if (n >= 100) {
            const double xnn = std::pow(n, 2.0 / 3.0);
            const double ynn = std::log(std::fabs(term));
            sx += xnn; sy += ynn; sxx += xnn * xnn; sxy += xnn * ynn;
            ++count;
        }
    }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    const double gamma_series = kBeta * tau * std::pow(1.5 * M_PI, 2.0 / 3.0);
    CHECK(slope == Catch::Approx(-gamma_series).epsilon(0.05));
}

TEST_CASE("alternating tail constant of the weight sequence") {
    // sum (-1)^{n+1} sqrt(2/(3n)) -> sqrt(2/3)(1 - sqrt 2) zeta(1/2) ~ 0.4939,
    // via averaged partial sums at N = 1e5
    double sum = 0.0, prev = 0.0;
    for (int n = 1; n <= 100000; ++n) {
        prev = sum;
        sum += ((n % 2) ? 1.0 : -1.0) * std::sqrt(2.0 / (3.0 * n));
    }
    CHECK(0.5 * (sum + prev) == Catch::Approx(0.4938976741615809).margin(1e-2));
    CHECK(0.5 * (sum + prev) == Catch::Approx(0.4938976741615809).margin(1e-6));
}

TEST_CASE("asymptotic yield") {
    const auto spec = build_semi_spectrum(jgb_sigma(), 10);
    CHECK(asymptotic_yield(spec, DriftCurve::constant(kR0), 0.0) ==
          Catch::Approx(0.03578).margin(5e-5));
    const auto ust1 = build_semi_spectrum(std::sqrt(2.0 * std::pow(0.2516, 3)), 10);
    CHECK(asymptotic_yield(ust1, DriftCurve::constant(-0.23163), 0.0) ==
          Catch::Approx(0.02470).margin(5e-5));
    // boundary of admissibility
    const double xi1 = spec.levels[0].e;
    CHECK(asymptotic_yield(spec, DriftCurve::constant(-kBeta * xi1), 0.0) ==
          Catch::Approx(0.0).margin(1e-15));
    CHECK_THROWS_AS(
        asymptotic_yield(spec, DriftCurve::constant_drift(kR0, -0.001), 0.0),
        std::domain_error);
}

TEST_CASE("long-maturity yields approach the asymptotic level from below") {
    const auto spec = build_semi_spectrum(jgb_sigma(), 300);
    const auto drift = DriftCurve::constant(kR0);
    const double rstar = asymptotic_yield(spec, drift, 0.0);
    double prev_gap = 1e300;
    for (double tau : {30.0, 60.0, 240.0, 1500.0}) {
        const double p = bond_price_semi(kZ, 0.0, tau, spec, drift);
        CHECK(p > 0.0);
        const double r = yield_from_price(p, tau);
        CHECK(r < rstar);
        CHECK(rstar - r < prev_gap);
        prev_gap = rstar - r;
    }
    CHECK(prev_gap < 2e-4);  // 2 bp by tau = 1500y (the gap decays like 1/tau)
}

TEST_CASE("constant drift shifts yields by nu tau / 2 exactly") {
    const auto spec = build_semi_spectrum(jgb_sigma(), 300);
    const double nu0 = 0.0015;
    const auto flat = DriftCurve::constant(kR0);
    const auto drifted = DriftCurve::constant_drift(kR0, nu0);
    for (double tau : {1.0, 7.0, 25.0}) {
        const double y0 =
            yield_from_price(bond_price_semi(kZ, 0.0, tau, spec, flat), tau);
        const double y1 =
            yield_from_price(bond_price_semi(kZ, 0.0, tau, spec, drifted), tau);
        CHECK(y1 - y0 == Catch::Approx(0.5 * nu0 * tau).epsilon(1e-12));
    }
}

TEST_CASE("yield curve collects per-point failures without aborting") {
    const auto spec = build_semi_spectrum(jgb_sigma(), 100);
    const auto drift = DriftCurve::constant(kR0);
    const std::vector<double> mats{-1.0, 1.0, 5.0};
    const auto yc = yield_curve_semi(kZ, 0.0, mats, spec, drift);
    REQUIRE(yc.points.size() == 3);
    REQUIRE(yc.failures.size() == 1);
    CHECK(yc.failures[0].first == 0);
    CHECK(std::isnan(yc.points[0].yield_value));
    CHECK(std::isfinite(yc.points[1].yield_value));
}

TEST_CASE("UST all-maturity yields at the published parameters (converged series)") {
    // the published short-maturity table values are not reproducible by the
    // converged series; frozen values below are cross-checked against an
    // independent prototype (finite-difference verified)
    const double z = -0.0027, beta = 0.2516, r0 = -0.23163;
    const auto spec = build_semi_spectrum(std::sqrt(2.0 * beta * beta * beta), 300);
    const auto drift = DriftCurve::constant(r0);
    const std::vector<double> mats{1.0 / 12.0, 0.25, 0.5, 1.0, 2.0, 3.0,
                                   5.0,        7.0,  10.0, 20.0, 30.0};
    const auto yc = yield_curve_semi(z, 0.0, mats, spec, drift);
    REQUIRE(yc.failures.empty());
    const double frozen_pct[] = {-0.2737, -0.2982, -0.3146, -0.1835, 0.3014,
                                 0.7433,  1.3214,  1.6347,  1.8833,  2.1765,
                                 2.2743};
    const double tol_bp[] = {0.3, 0.3, 0.3, 0.3, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
    for (std::size_t i = 0; i < mats.size(); ++i)
        CHECK(yc.points[i].yield_value * 100.0 ==
              Catch::Approx(frozen_pct[i]).margin(tol_bp[i] * 1e-2));
}
