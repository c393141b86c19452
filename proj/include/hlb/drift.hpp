#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hlb {

/// chi(t) = r0 + int_0^t nu(s) ds as a piecewise cubic on [0, domain_end],
/// plus a declared extension beyond. Factories keep chi continuous and C^1.
class DriftCurve {
public:
    enum class Extension {
        kConstant,   // chi(t) = chi(domain_end) beyond the domain (chi_* finite)
        kPolynomial  // last piece extended as-is
    };

    struct Piece {
        double c0, c1, c2, c3;  // chi = c0 + c1 u + c2 u^2 + c3 u^3, u = t - start
    };

    DriftCurve() { *this = constant(0.0); }

    static DriftCurve constant(double r0) {
        return piecewise({0.0}, {{r0, 0.0, 0.0, 0.0}},
                         std::numeric_limits<double>::infinity(),
                         Extension::kPolynomial);
    }

    static DriftCurve constant_drift(double r0, double nu0) {
        return piecewise({0.0}, {{r0, nu0, 0.0, 0.0}},
                         std::numeric_limits<double>::infinity(),
                         Extension::kPolynomial);
    }

    /// starts.size() == pieces.size(); piece i covers [starts[i], starts[i+1]),
    /// the last piece [starts.back(), domain_end].
    static DriftCurve piecewise(std::vector<double> starts, std::vector<Piece> pieces,
                                double domain_end, Extension ext) {
        if (starts.empty() || starts.size() != pieces.size())
            throw std::invalid_argument("DriftCurve: starts/pieces size mismatch");
        if (starts.front() != 0.0)
            throw std::invalid_argument("DriftCurve: curve must start at t = 0");
        for (std::size_t i = 1; i < starts.size(); ++i)
            if (starts[i] <= starts[i - 1])
                throw std::invalid_argument("DriftCurve: piece starts must increase");
        if (!(domain_end > starts.back()))
            throw std::invalid_argument("DriftCurve: domain_end must exceed last start");
        DriftCurve d(raw_tag{});
        d.starts_ = std::move(starts);
        d.pieces_ = std::move(pieces);
        d.end_ = domain_end;
        d.ext_ = ext;
        return d;
    }

    double chi(double t) const {
        check_time(t);
        if (t >= end_ && ext_ == Extension::kConstant) t = end_;
        const std::size_t i = index_of(t);
        return eval(pieces_[i], t - starts_[i]);
    }

    double nu(double t) const {
        check_time(t);
        if (t >= end_ && ext_ == Extension::kConstant) return 0.0;
        const std::size_t i = index_of(t);
        const Piece& p = pieces_[i];
        const double u = t - starts_[i];
        return p.c1 + u * (2.0 * p.c2 + 3.0 * p.c3 * u);
    }

    double r0() const { return pieces_.front().c0; }

    /// Exact int_a^b chi(s) ds.
    double integral_chi(double a, double b) const {
        check_time(a);
        check_time(b);
        if (b < a) throw std::invalid_argument("DriftCurve: integration bounds reversed");
        double acc = 0.0;
        double t = a;
        while (t < b) {
            if (t >= end_ && ext_ == Extension::kConstant) {
                acc += chi(end_) * (b - t);
                break;
            }
            const std::size_t i = index_of(t);
            double seg = b;
            if (i + 1 < starts_.size()) seg = std::min(seg, starts_[i + 1]);
            if (ext_ == Extension::kConstant) seg = std::min(seg, std::max(end_, t));
            if (seg <= t) seg = b;  // t == end_ boundary with constant tail handled above
            acc += primitive(pieces_[i], seg - starts_[i]) -
                   primitive(pieces_[i], t - starts_[i]);
            t = seg;
        }
        return acc;
    }

    /// True when lim chi(s) exists as s -> infinity.
    bool bounded_tail() const {
        if (ext_ == Extension::kConstant) return true;
        const Piece& p = pieces_.back();
        return p.c1 == 0.0 && p.c2 == 0.0 && p.c3 == 0.0;
    }

    double terminal_chi() const {
        if (!bounded_tail())
            throw std::domain_error("DriftCurve: chi(s) unbounded as s -> infinity");
        if (ext_ == Extension::kConstant)
            return eval(pieces_.back(), end_ - starts_.back());
        return pieces_.back().c0;  // constant last piece
    }

    const std::vector<double>& piece_starts() const { return starts_; }
    double domain_end() const { return end_; }
    Extension extension() const { return ext_; }

private:
    struct raw_tag {};
    explicit DriftCurve(raw_tag) {}

    static void check_time(double t) {
        if (!(t >= 0.0))
            throw std::invalid_argument("DriftCurve: time must be finite and >= 0");
    }

    static double eval(const Piece& p, double u) {
        return p.c0 + u * (p.c1 + u * (p.c2 + u * p.c3));
    }

    static double primitive(const Piece& p, double u) {
        return u * (p.c0 + u * (p.c1 / 2.0 + u * (p.c2 / 3.0 + u * p.c3 / 4.0)));
    }

    std::size_t index_of(double t) const {
        if (t >= starts_.back()) return starts_.size() - 1;
        std::size_t lo = 0, hi = starts_.size() - 1;
        while (lo + 1 < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (starts_[mid] <= t)
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    }

    std::vector<double> starts_;
    std::vector<Piece> pieces_;
    double end_ = std::numeric_limits<double>::infinity();
    Extension ext_ = Extension::kPolynomial;
};

/// eta(t, T) = int_t^T [chi(s) - chi(t)] ds, exact.
inline double eta(const DriftCurve& drift, double t, double T) {
    if (T < t) throw std::invalid_argument("eta: T < t");
    return drift.integral_chi(t, T) - drift.chi(t) * (T - t);
}

/// chi_*(t) = lim_{T->inf} eta(t,T)/(T-t); throws for an unbounded chi tail
/// (e.g. nonzero constant drift).
inline double chi_star(const DriftCurve& drift, double t) {
    return drift.terminal_chi() - drift.chi(t);
}

}  // namespace hlb
