// hlb: zero-coupon bond pricing and yield-curve calibration for Ho-Lee
// short-rate models with reflecting barriers (half-line, interval, and
// constant-drift rate-barrier variants), spectral series with PDE and
// Monte Carlo cross-checks.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "hlb/airy.hpp"
#include "hlb/calibration.hpp"
#include "hlb/io.hpp"
#include "hlb/monte_carlo.hpp"
#include "hlb/pde.hpp"
#include "hlb/pricing.hpp"
#include "hlb/spectral.hpp"

namespace {

struct CommonModel {
    std::string model = "semi";
    double z = 0.0;
    double sigma = 0.0;
    double beta = 0.0;
    double r0 = 0.0;
    double L = 0.0;   // barrier separation in Brownian units (x)
    double nu = 0.0;  // constant drift (robin; also eta-drift for semi/interval)
    int n_levels = 300;

    double resolve_sigma() const {
        if (sigma > 0.0 && beta > 0.0)
            throw std::invalid_argument("give either --sigma or --beta, not both");
        if (sigma > 0.0) return sigma;
        if (beta > 0.0) return std::sqrt(2.0 * beta * beta * beta);
        throw std::invalid_argument("one of --sigma or --beta is required");
    }
};

void add_model_flags(CLI::App* cmd, CommonModel& m, bool with_levels = true) {
    cmd->add_option("--model", m.model, "semi | interval | robin")
        ->check(CLI::IsMember({"semi", "interval", "robin"}))
        ->capture_default_str();
    cmd->add_option("--z", m.z, "current short rate (decimal)");
    cmd->add_option("--sigma", m.sigma, "volatility (per year^{3/2})");
    cmd->add_option("--beta", m.beta, "(sigma^2/2)^{1/3} (per year)");
    cmd->add_option("--r0", m.r0,
                    "chi(0); for --model robin this is the barrier level r_*");
    cmd->add_option("--L", m.L, "barrier separation in Brownian units (interval)");
    cmd->add_option("--nu", m.nu, "constant drift (decimal per year^2)");
    if (with_levels)
        cmd->add_option("--n-levels", m.n_levels, "series depth")
            ->envname("HLB_N_LEVELS")
            ->capture_default_str();
}

std::vector<double> parse_maturities(const std::string& arg) {
    // comma list of year fractions, or a CSV file with a maturity_years column
    std::vector<double> out;
    if (arg.find(',') == std::string::npos &&
        arg.find_first_not_of("0123456789.eE+-") != std::string::npos) {
        const auto curve = hlb::read_curve_csv_file(arg);
        for (const auto& p : curve.points) out.push_back(p.maturity);
        return out;
    }
    std::size_t pos = 0;
    while (pos <= arg.size()) {
        const auto next = arg.find(',', pos);
        const std::string tok = arg.substr(pos, next - pos);
        if (!tok.empty()) out.push_back(std::stod(tok));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (out.empty()) throw std::invalid_argument("--maturities: nothing parsed");
    return out;
}

FILE* open_output(const std::string& path) {
    if (path.empty()) return stdout;
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::invalid_argument("cannot open output '" + path + "'");
    return f;
}

void close_output(FILE* f) {
    if (f && f != stdout) std::fclose(f);
}

void log_params(const std::string& what, const std::string& detail) {
    std::fprintf(stderr, "# %s: %s\n", what.c_str(), detail.c_str());
}

hlb::EmpiricalCurve load_curve(const std::string& input,
                               const std::string& valuation_date) {
    std::optional<std::chrono::year_month_day> vd;
    if (!valuation_date.empty()) vd = hlb::parse_date(valuation_date);
    return hlb::read_curve_csv_file(input, vd);
}

// ---------------------------------------------------------------- airy ----
int run_airy(const std::string& ys, int zeros, const std::string& out_path) {
    FILE* out = open_output(out_path);
    if (zeros > 0) {
        const auto tab = hlb::build_zero_table(zeros);
        std::fprintf(out, "n,xi_n,zeta_n\n");
        for (int n = 0; n < zeros; ++n)
            std::fprintf(out, "%d,%.10g,%.10g\n", n + 1, tab.xi[n], tab.zeta[n]);
    }
    if (!ys.empty()) {
        std::fprintf(out, "y,ai,bi,ai_prime,bi_prime\n");
        for (double y : parse_maturities(ys)) {
            const auto v = hlb::airy_eval(y);
            std::fprintf(out, "%.10g,%.10g,%.10g,%.10g,%.10g\n", y, v.ai, v.bi,
                         v.ai_prime, v.bi_prime);
        }
    }
    close_output(out);
    return 0;
}

// ------------------------------------------------------------ spectrum ----
int run_spectrum(const CommonModel& m, const std::string& out_path) {
    const double sigma = m.resolve_sigma();
    FILE* out = open_output(out_path);
    log_params("spectrum", "model=" + m.model + " sigma=" + std::to_string(sigma) +
                               " r0=" + std::to_string(m.r0) +
                               " n_levels=" + std::to_string(m.n_levels));
    std::fprintf(out, "n,e_n,E_n,chi_n,coefficient\n");
    if (m.model == "semi") {
        const auto s = hlb::build_semi_spectrum(sigma, m.n_levels);
        for (std::size_t n = 0; n < s.levels.size(); ++n) {
            const auto& lv = s.levels[n];
            std::fprintf(out, "%zu,%.10g,%.10g,%.10g,%.10g\n", n + 1, lv.e,
                         s.params.beta * lv.e, m.r0 + s.params.beta * lv.e, lv.c);
        }
    } else if (m.model == "interval") {
        if (!(m.L > 0.0)) throw std::invalid_argument("--L required for interval");
        const auto s = hlb::build_interval_spectrum(sigma, m.L, m.n_levels);
        for (std::size_t n = 0; n < s.levels.size(); ++n) {
            const auto& lv = s.levels[n];
            std::fprintf(out, "%zu,%.10g,%.10g,%.10g,%.10g\n", n + 1, lv.e,
                         s.params.beta * lv.e, m.r0 + s.params.beta * lv.e, lv.b);
        }
    } else {
        const auto s = hlb::build_robin_spectrum(sigma, m.nu, m.r0, m.n_levels);
        for (std::size_t n = 0; n < s.levels.size(); ++n) {
            const auto& lv = s.levels[n];
            std::fprintf(out, "%zu,%.10g,%.10g,%.10g,%.10g\n", n + 1, lv.e,
                         s.params.beta * lv.e, lv.lambda, lv.d);
        }
    }
    close_output(out);
    return 0;
}

// --------------------------------------------------------------- price ----
int run_price(const CommonModel& m, const std::string& maturities,
              const std::string& out_path) {
    const double sigma = m.resolve_sigma();
    const auto mats = parse_maturities(maturities);
    hlb::PricingConfig cfg;
    cfg.n_levels = m.n_levels;
    const auto drift = (m.model == "robin" || m.nu == 0.0)
                           ? hlb::DriftCurve::constant(m.r0)
                           : hlb::DriftCurve::constant_drift(m.r0, m.nu);
    log_params("price", "model=" + m.model + " z=" + std::to_string(m.z) +
                            " sigma=" + std::to_string(sigma) +
                            " r0=" + std::to_string(m.r0) +
                            " nu=" + std::to_string(m.nu) +
                            " n_levels=" + std::to_string(m.n_levels));

    FILE* out = open_output(out_path);
    std::fprintf(out, "maturity,price,yield_pct\n");
    const auto emit = [&](double T, double p) {
        std::fprintf(out, "%.10g,%.10g,%.6g\n", T, p,
                     100.0 * hlb::yield_from_price(p, T));
    };
    if (m.model == "semi") {
        const auto s = hlb::build_semi_spectrum(sigma, m.n_levels);
        for (double T : mats) emit(T, hlb::bond_price_semi(m.z, 0.0, T, s, drift, cfg));
    } else if (m.model == "interval") {
        if (!(m.L > 0.0)) throw std::invalid_argument("--L required for interval");
        const auto s = hlb::build_interval_spectrum(sigma, m.L, m.n_levels);
        hlb::PricingConfig icfg = cfg;
        icfg.n_levels = static_cast<int>(s.levels.size());
        for (double T : mats)
            emit(T, hlb::bond_price_interval(m.z, 0.0, T, s, drift, icfg));
    } else {
        const auto s = hlb::build_robin_spectrum(sigma, m.nu, m.r0, m.n_levels);
        for (double T : mats) emit(T, hlb::bond_price_robin(m.z, 0.0, T, s, cfg));
    }
    close_output(out);
    return 0;
}

// ----------------------------------------------------------- calibrate ----
int run_calibrate(const std::string& input, const std::string& valuation_date,
                  double min_maturity, double rmin, int n_levels,
                  const std::string& out_path, const std::string& drift_path) {
    const auto curve = load_curve(input, valuation_date);
    hlb::CalibrationConfig cfg;
    cfg.min_maturity = min_maturity;
    cfg.r_min = rmin;
    cfg.n_levels = n_levels;
    log_params("calibrate", "input=" + input + " min_maturity=" +
                                std::to_string(min_maturity) +
                                " rmin=" + std::to_string(rmin) +
                                " n_levels=" + std::to_string(n_levels));
    const auto res = hlb::calibrate(curve, cfg);

    std::printf("calibration report (%s)\n", curve.label.c_str());
    std::printf("  points used:     %zu (maturity >= %g)\n", res.model_yields.size(),
                min_maturity);
    std::printf("  z:               %.10g\n", res.z);
    std::printf("  beta:            %.10g\n", res.beta);
    std::printf("  r0:              %.10g\n", res.r0);
    std::printf("  sigma:           %.10g\n", res.sigma);
    std::printf("  rmse:            %.6g\n", res.rmse);
    std::printf("  asymptotic chi1: %.6g\n",
                res.r0 + res.beta * std::fabs(hlb::ai_prime_zeros(1)[0]));
    std::printf("  converged:       %s\n", res.converged ? "yes" : "no");
    std::printf("  restarts:        %d\n", res.n_restarts_used);
    std::printf("  objective evals: %ld\n", res.objective_evals);

    if (!out_path.empty()) {
        FILE* out = open_output(out_path);
        std::fprintf(out, "maturity,empirical_pct,model_pct,residual_pct\n");
        std::size_t j = 0;
        for (const auto& p : curve.points) {
            if (p.maturity < min_maturity) continue;
            std::fprintf(out, "%.10g,%.6g,%.6g,%.6g\n", p.maturity,
                         100.0 * p.yield_value,
                         100.0 * res.model_yields[j].yield_value,
                         100.0 * res.residual_yields[j].yield_value);
            ++j;
        }
        close_output(out);
    }
    if (!drift_path.empty()) {
        const auto drift = hlb::reconstruct_drift(res.residual_yields, 0.0, res.r0);
        FILE* out = open_output(drift_path);
        std::fprintf(out, "s,chi,nu\n");
        const double s_max = res.residual_yields.back().maturity;
        for (int i = 0; i <= 200; ++i) {
            const double s = s_max * i / 200.0;
            std::fprintf(out, "%.10g,%.10g,%.10g\n", s, drift.chi(s), drift.nu(s));
        }
        close_output(out);
    }
    return 0;
}

// ------------------------------------------------------------ residual ----
int run_residual(const std::string& input, const std::string& valuation_date,
                 const CommonModel& m, const std::string& out_path,
                 const std::string& drift_path) {
    const auto curve = load_curve(input, valuation_date);
    const double sigma = m.resolve_sigma();
    const auto spec = hlb::build_semi_spectrum(sigma, m.n_levels);
    const auto drift0 = hlb::DriftCurve::constant(m.r0);
    hlb::PricingConfig cfg;
    cfg.n_levels = m.n_levels;

    std::vector<hlb::YieldPoint> residuals;
    FILE* out = open_output(out_path);
    std::fprintf(out, "maturity,empirical_pct,model_pct,residual_pct\n");
    for (const auto& p : curve.points) {
        const double pv = hlb::bond_price_semi(m.z, 0.0, p.maturity, spec, drift0, cfg);
        const double ym = hlb::yield_from_price(pv, p.maturity);
        residuals.push_back({p.maturity, p.yield_value - ym});
        std::fprintf(out, "%.10g,%.6g,%.6g,%.6g\n", p.maturity, 100.0 * p.yield_value,
                     100.0 * ym, 100.0 * (p.yield_value - ym));
    }
    close_output(out);
    if (!drift_path.empty()) {
        const auto drift = hlb::reconstruct_drift(residuals, 0.0, m.r0);
        FILE* df = open_output(drift_path);
        std::fprintf(df, "s,chi,nu\n");
        const double s_max = residuals.back().maturity;
        for (int i = 0; i <= 200; ++i) {
            const double s = s_max * i / 200.0;
            std::fprintf(df, "%.10g,%.10g,%.10g\n", s, drift.chi(s), drift.nu(s));
        }
        close_output(df);
    }
    return 0;
}

// -------------------------------------------------------------- oracle ----
int run_oracle(const CommonModel& m, const std::string& maturities,
               const std::string& method, int nx, int nt, std::int64_t paths,
               int steps_per_year, std::uint64_t seed, int threads,
               const std::string& out_path) {
    const double sigma = m.resolve_sigma();
    const auto mats = parse_maturities(maturities);
    const auto drift = (m.model == "robin" || m.nu == 0.0)
                           ? hlb::DriftCurve::constant(m.r0)
                           : hlb::DriftCurve::constant_drift(m.r0, m.nu);
    hlb::PricingConfig cfg;
    cfg.n_levels = m.n_levels;
    log_params("oracle", "method=" + method + " model=" + m.model +
                             " seed=" + std::to_string(seed));

    FILE* out = open_output(out_path);
    std::fprintf(out, "maturity,oracle_price,spectral_price,abs_gap,rel_gap,std_error\n");
    for (double T : mats) {
        double spectral = 0.0, oracle = 0.0, se = 0.0;
        if (m.model == "semi") {
            const auto s = hlb::build_semi_spectrum(sigma, m.n_levels);
            spectral = hlb::bond_price_semi(m.z, 0.0, T, s, drift, cfg);
            if (method == "pde") {
                hlb::PdeGrid grid;
                grid.n_x = nx;
                grid.n_t = nt;
                oracle = hlb::pde_price(m.z, 0.0, T, sigma, drift, grid);
            } else {
                hlb::McConfig mc;
                mc.n_paths = paths;
                mc.steps_per_year = steps_per_year;
                mc.seed = seed;
                mc.n_threads = threads;
                const auto r = hlb::mc_price_semi(m.z, 0.0, T, sigma, drift, mc);
                oracle = r.price;
                se = r.std_error;
            }
        } else if (m.model == "interval") {
            if (!(m.L > 0.0)) throw std::invalid_argument("--L required for interval");
            const auto s = hlb::build_interval_spectrum(sigma, m.L, m.n_levels);
            hlb::PricingConfig icfg = cfg;
            icfg.n_levels = static_cast<int>(s.levels.size());
            spectral = hlb::bond_price_interval(m.z, 0.0, T, s, drift, icfg);
            if (method == "pde") {
                hlb::PdeGrid grid;
                grid.n_x = nx;
                grid.n_t = nt;
                oracle = hlb::pde_price(m.z, 0.0, T, sigma, drift, grid, m.L);
            } else {
                hlb::McConfig mc;
                mc.n_paths = paths;
                mc.steps_per_year = steps_per_year;
                mc.seed = seed;
                mc.n_threads = threads;
                const auto r =
                    hlb::mc_price_interval(m.z, 0.0, T, sigma, m.L, drift, mc);
                oracle = r.price;
                se = r.std_error;
            }
        } else {
            const auto s = hlb::build_robin_spectrum(sigma, m.nu, m.r0, m.n_levels);
            spectral = hlb::bond_price_robin(m.z, 0.0, T, s, cfg);
            if (method != "pde")
                throw std::invalid_argument("oracle --model robin supports --method pde");
            hlb::PdeGrid grid;
            grid.n_x = nx;
            grid.n_t = nt;
            oracle = hlb::pde_price_robin(m.z, 0.0, T, sigma, m.nu, m.r0, grid);
        }
        const double gap = std::fabs(oracle - spectral);
        std::fprintf(out, "%.10g,%.12g,%.12g,%.3g,%.3g,%.3g\n", T, oracle, spectral,
                     gap, gap / std::fabs(spectral), se);
    }
    close_output(out);
    return 0;
}

// ------------------------------------------------------------ baseline ----
int run_baseline(const std::string& input, const std::string& valuation_date,
                 double min_maturity, const std::string& out_path) {
    auto curve = load_curve(input, valuation_date);
    hlb::EmpiricalCurve used;
    used.label = curve.label;
    for (const auto& p : curve.points)
        if (p.maturity >= min_maturity) used.points.push_back(p);
    const auto fit = hlb::cubic_baseline(used);
    std::printf("cubic baseline (%s)\n", used.label.c_str());
    std::printf("  points: %zu\n", used.points.size());
    std::printf("  coefficients: %.10g %.10g %.10g %.10g\n", fit.coeff[0],
                fit.coeff[1], fit.coeff[2], fit.coeff[3]);
    std::printf("  rmse: %.6g\n", fit.rmse);
    if (!out_path.empty()) {
        FILE* out = open_output(out_path);
        std::fprintf(out, "maturity,empirical_pct,fitted_pct\n");
        for (std::size_t i = 0; i < used.points.size(); ++i)
            std::fprintf(out, "%.10g,%.6g,%.6g\n", used.points[i].maturity,
                         100.0 * used.points[i].yield_value,
                         100.0 * fit.fitted[i].yield_value);
        close_output(out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bond pricing and yield-curve calibration for barrier short-rate models"};
    app.require_subcommand(1);

    // airy
    auto* airy = app.add_subcommand("airy", "evaluate Airy values and zeros (CSV)");
    std::string airy_y, airy_out;
    int airy_zeros = 0;
    airy->add_option("--y", airy_y, "comma list of arguments");
    airy->add_option("--zeros", airy_zeros, "emit the first N zeros of Ai' and Ai");
    airy->add_option("--output,-o", airy_out, "output path (default stdout)");

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "eigensystem as CSV");
    CommonModel spec_m;
    std::string spec_out;
    add_model_flags(spectrum, spec_m);
    spectrum->add_option("--output,-o", spec_out, "output path");

    // price
    auto* price = app.add_subcommand("price", "zero-coupon prices and yields");
    CommonModel price_m;
    std::string price_mats, price_out;
    add_model_flags(price, price_m);
    price->add_option("--maturities", price_mats,
                      "comma list of year fractions, or CSV path")
        ->required();
    price->add_option("--output,-o", price_out, "output path");

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "fit (z, beta, r0) to a yield curve");
    std::string cal_in, cal_vd, cal_out, cal_drift;
    double cal_minmat = 0.0, cal_rmin = 0.0;
    int cal_levels = 300;
    cal->add_option("--input", cal_in, "CSV: maturity_years|maturity_date, yield_pct")
        ->required();
    cal->add_option("--valuation-date", cal_vd, "YYYY-MM-DD (for maturity_date files)");
    cal->add_option("--min-maturity", cal_minmat, "drop shorter maturities");
    cal->add_option("--rmin", cal_rmin, "asymptotic-yield floor");
    cal->add_option("--n-levels", cal_levels, "series depth")
        ->envname("HLB_N_LEVELS")
        ->capture_default_str();
    cal->add_option("--output,-o", cal_out, "fit CSV path");
    cal->add_option("--drift-out", cal_drift, "implied drift CSV path");

    // residual
    auto* res = app.add_subcommand("residual",
                                   "residual yields for given (z, beta, r0)");
    CommonModel res_m;
    std::string res_in, res_vd, res_out, res_drift;
    add_model_flags(res, res_m);
    res->add_option("--input", res_in, "curve CSV")->required();
    res->add_option("--valuation-date", res_vd, "YYYY-MM-DD");
    res->add_option("--output,-o", res_out, "output path");
    res->add_option("--drift-out", res_drift, "implied drift CSV path");

    // oracle
    auto* orc = app.add_subcommand("oracle", "PDE / Monte Carlo cross-check");
    CommonModel orc_m;
    std::string orc_mats, orc_method = "pde", orc_out;
    int orc_nx = 2000, orc_nt = 2000, orc_spy = 250, orc_threads = 0;
    std::int64_t orc_paths = 100000;
    std::uint64_t orc_seed = 42;
    add_model_flags(orc, orc_m);
    orc->add_option("--maturities", orc_mats, "comma list")->required();
    orc->add_option("--method", orc_method, "pde | mc")
        ->check(CLI::IsMember({"pde", "mc"}))
        ->capture_default_str();
    orc->add_option("--nx", orc_nx, "PDE spatial points")->capture_default_str();
    orc->add_option("--nt", orc_nt, "PDE time steps")->capture_default_str();
    orc->add_option("--paths", orc_paths, "MC paths")->capture_default_str();
    orc->add_option("--steps-per-year", orc_spy, "MC step density")
        ->capture_default_str();
    orc->add_option("--seed", orc_seed, "MC seed")->capture_default_str();
    orc->add_option("--threads", orc_threads, "MC worker threads (0 = auto)")
        ->capture_default_str();
    orc->add_option("--output,-o", orc_out, "output path");

    // baseline
    auto* base = app.add_subcommand("baseline", "cubic least-squares baseline");
    std::string base_in, base_vd, base_out;
    double base_minmat = 0.0;
    base->add_option("--input", base_in, "curve CSV")->required();
    base->add_option("--valuation-date", base_vd, "YYYY-MM-DD");
    base->add_option("--min-maturity", base_minmat, "drop shorter maturities");
    base->add_option("--output,-o", base_out, "output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (airy->parsed()) return run_airy(airy_y, airy_zeros, airy_out);
        if (spectrum->parsed()) return run_spectrum(spec_m, spec_out);
        if (price->parsed()) return run_price(price_m, price_mats, price_out);
        if (cal->parsed())
            return run_calibrate(cal_in, cal_vd, cal_minmat, cal_rmin, cal_levels,
                                 cal_out, cal_drift);
        if (res->parsed()) return run_residual(res_in, res_vd, res_m, res_out, res_drift);
        if (orc->parsed())
            return run_oracle(orc_m, orc_mats, orc_method, orc_nx, orc_nt, orc_paths,
                              orc_spy, orc_seed, orc_threads, orc_out);
        if (base->parsed()) return run_baseline(base_in, base_vd, base_minmat, base_out);
    } catch (const std::invalid_argument& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    } catch (const std::domain_error& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "numerical error: %s\n", ex.what());
        return 2;
    }
    return 0;
}
