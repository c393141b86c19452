#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "hlb/airy.hpp"

using hlb::airy_eval;
using hlb::AiryValues;

namespace {

// --- independent oracles -------------------------------------------------

// Ai(0), Ai'(0) from the oscillatory integral representation
//   Ai(y)  = (1/pi) int_0^inf cos(t^3/3 + y t) dt
//   Ai'(y) = -(1/pi) int_0^inf t sin(t^3/3 + y t) dt
// summed over half-period segments with repeated averaging of the
// alternating partial sums.
double oracle_airy_integral(double y, bool derivative) {
    const auto phase_root = [y](double target, double guess) {
        double t = guess;
        for (int i = 0; i < 80; ++i) {
            const double f = t * t * t / 3.0 + y * t - target;
            const double df = t * t + y;
            const double step = f / df;
            t -= step;
            if (std::fabs(step) < 1e-14 * (1.0 + t)) break;
        }
        return t;
    };
    const auto segment = [&](double a, double b) {
        const int n = 256;
        const double h = (b - a) / n;
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double t = a + h * i;
            const double ph = t * t * t / 3.0 + y * t;
            const double f = derivative ? -t * std::sin(ph) : std::cos(ph);
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * f;
        }
        return acc * h / 3.0;
    };

    const int n_seg = 100;
    std::vector<double> partial;
    double prev_t = 0.0, acc = 0.0;
    double guess = 1.0;
    for (int k = 1; k <= n_seg; ++k) {
        const double tk = phase_root(k * M_PI, std::max(guess, prev_t + 1e-3));
        acc += segment(prev_t, tk);
        partial.push_back(acc);
        prev_t = tk;
        guess = tk * 1.05;
    }
    // repeated pairwise averaging accelerates the alternating tail
    for (int sweep = 0; sweep < 30; ++sweep)
        for (std::size_t i = 0; i + 1 < partial.size(); ++i)
            partial[i] = 0.5 * (partial[i] + partial[i + 1]);
    return partial.front() / M_PI;
}

double oracle_bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    REQUIRE(flo * f(hi) < 0.0);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("airy values at zero against the integral-representation oracle") {
    const double ai0 = oracle_airy_integral(0.0, false);
    const double aip0 = oracle_airy_integral(0.0, true);
    // frozen from the oracle (oracle itself is good to ~1e-9)
    CHECK(ai0 == Catch::Approx(0.3550280538878172).margin(1e-8));
    CHECK(aip0 == Catch::Approx(-0.2588194037928068).margin(1e-8));

    const AiryValues v = airy_eval(0.0);
    CHECK(v.ai == Catch::Approx(0.3550280538878172).epsilon(1e-12));
    CHECK(v.ai_prime == Catch::Approx(-0.2588194037928068).epsilon(1e-12));
    CHECK(v.bi == Catch::Approx(0.6149266274460007).epsilon(1e-12));
    CHECK(v.bi_prime == Catch::Approx(0.4482883573538264).epsilon(1e-12));
}

TEST_CASE("airy integral-representation oracle at a nonzero argument") {
    const double ai1 = oracle_airy_integral(1.0, false);
    CHECK(airy_eval(1.0).ai == Catch::Approx(ai1).margin(1e-8));
}

TEST_CASE("wronskian identity on random points") {
    std::mt19937 rng(20240511u);
    std::uniform_real_distribution<double> u(-10.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const double y = u(rng);
        const AiryValues v = airy_eval(y);
        const double w = v.ai * v.bi_prime - v.ai_prime * v.bi;
        CHECK(w == Catch::Approx(M_1_PI).epsilon(1e-10));
    }
}

TEST_CASE("airy satisfies the defining equation (finite-difference residual)") {
    const double h = 1e-4;
    for (double y = -8.0; y <= 8.0 + 1e-12; y += 0.37) {
        const double am = airy_eval(y - h).ai;
        const double a0 = airy_eval(y).ai;
        const double ap = airy_eval(y + h).ai;
        const double second = (ap - 2.0 * a0 + am) / (h * h);
        CHECK(std::fabs(second - y * a0) <= 1e-5 * std::max(1.0, std::fabs(y * a0)));

        const double bm = airy_eval(y - h).bi;
        const double b0 = airy_eval(y).bi;
        const double bp = airy_eval(y + h).bi;
        const double second_b = (bp - 2.0 * b0 + bm) / (h * h);
        CHECK(std::fabs(second_b - y * b0) <= 1e-5 * std::max(1.0, std::fabs(y * b0)));
    }
}

TEST_CASE("series and asymptotic branches overlap at the crossover") {
    for (double y : {9.0, 9.2, -9.0, -9.3}) {
        const AiryValues s = hlb::detail::airy_series_vals(y);
        const AiryValues a = (y > 0) ? hlb::detail::airy_pos_asym(y)
                                     : hlb::detail::airy_neg_asym(y);
        CHECK(s.ai == Catch::Approx(a.ai).epsilon(1e-11));
        CHECK(s.bi == Catch::Approx(a.bi).epsilon(1e-11));
        CHECK(s.ai_prime == Catch::Approx(a.ai_prime).epsilon(1e-11));
        CHECK(s.bi_prime == Catch::Approx(a.bi_prime).epsilon(1e-11));
    }
}

TEST_CASE("large positive argument matches the asymptotic tail") {
    // the leading term alone carries a u1/zeta ~ 3.3e-3 relative correction at
    // y = 10; the test pins the ratio with and without that first correction
    const double y = 10.0;
    const double zeta = (2.0 / 3.0) * y * std::sqrt(y);
    const double lead = std::exp(-zeta) / (2.0 * std::sqrt(M_PI) * std::pow(y, 0.25));
    CHECK(airy_eval(y).ai / lead == Catch::Approx(1.0).margin(5e-3));
    const double corrected = lead * (1.0 - 5.0 / (72.0 * zeta));
    CHECK(airy_eval(y).ai / corrected == Catch::Approx(1.0).margin(1e-4));
}

TEST_CASE("negative-argument asymptotic forms hold at y = -15 within 1%") {
    const double y = 15.0;
    const AiryValues v = airy_eval(-y);
    const double lead = std::pow(y, -0.25) / std::sqrt(M_PI) *
                        std::sin((2.0 / 3.0) * std::pow(y, 1.5) + 0.25 * M_PI);
    CHECK(v.ai == Catch::Approx(lead).epsilon(1e-2));
}

TEST_CASE("range handling") {
    CHECK_THROWS_AS(airy_eval(150.0), std::range_error);
    CHECK_THROWS_AS(airy_eval(std::nan("")), std::invalid_argument);
    // Ai underflows gracefully just below the Bi limit
    const AiryValues v = airy_eval(100.0);
    CHECK(v.ai >= 0.0);
    CHECK(v.ai < 1e-280);
    CHECK(std::isfinite(v.bi));
}

TEST_CASE("zeros of Ai' by bisection oracle and by the production finder") {
    const auto fap = [](double y) { return airy_eval(y).ai_prime; };
    const double xi1 = oracle_bisect(fap, -2.0, -0.5);
    const double xi2 = oracle_bisect(fap, -3.8, -2.5);
    CHECK(xi1 == Catch::Approx(-1.0187929716).epsilon(1e-9));
    CHECK(xi2 == Catch::Approx(-3.2481975822).epsilon(1e-9));

    const auto xi = hlb::ai_prime_zeros(300);
    CHECK(xi[0] == Catch::Approx(xi1).margin(1e-11));
    CHECK(xi[1] == Catch::Approx(xi2).margin(1e-11));
    for (std::size_t n = 0; n < xi.size(); ++n)
        CHECK(std::fabs(airy_eval(xi[n]).ai_prime) <= 1e-10);
}

TEST_CASE("zeros of Ai and interlacing") {
    const auto fa = [](double y) { return airy_eval(y).ai; };
    const double zeta1 = oracle_bisect(fa, -3.0, -1.5);
    CHECK(zeta1 == Catch::Approx(-2.3381074105).epsilon(1e-9));

    const auto tab = hlb::build_zero_table(300);
    CHECK(tab.zeta[0] == Catch::Approx(zeta1).margin(1e-11));
    CHECK(std::fabs(airy_eval(tab.zeta[49]).ai) <= 1e-10);
    for (std::size_t n = 0; n < tab.count; ++n) {
        CHECK(std::fabs(airy_eval(tab.zeta[n]).ai) <= 1e-10);
        CHECK(tab.xi[n] > tab.zeta[n]);
        if (n + 1 < tab.count) CHECK(tab.zeta[n] > tab.xi[n + 1]);
    }
}

TEST_CASE("large-n zero asymptotics") {
    const auto xi = hlb::ai_prime_zeros(100);
    const double guess = -std::pow((3.0 * M_PI / 8.0) * (4.0 * 100 - 3.0), 2.0 / 3.0);
    CHECK(xi[99] / guess == Catch::Approx(1.0).margin(1e-4));
}

TEST_CASE("zero-table argument validation") {
    CHECK_THROWS_AS(hlb::ai_prime_zeros(0), std::invalid_argument);
    CHECK_THROWS_AS(hlb::ai_zeros(-3), std::invalid_argument);
}
