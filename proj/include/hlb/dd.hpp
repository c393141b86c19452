#pragma once

#include <cmath>

namespace hlb::detail {

// Double-double value: hi + lo with |lo| <= ulp(hi)/2.
// Used where a power series loses 10+ digits to cancellation
// (Airy and Scorer Maclaurin series at moderate |y|).
struct DD {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DD() = default;
    constexpr DD(double h) : hi(h), lo(0.0) {}
    constexpr DD(double h, double l) : hi(h), lo(l) {}

    double value() const { return hi + lo; }
};

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline DD quick_two_sum(double a, double b) {
    // requires |a| >= |b|
    double s = a + b;
    return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline DD add(const DD& a, const DD& b) {
    DD s = two_sum(a.hi, b.hi);
    double lo = s.lo + a.lo + b.lo;
    return quick_two_sum(s.hi, lo);
}

inline DD add(const DD& a, double b) {
    DD s = two_sum(a.hi, b);
    double lo = s.lo + a.lo;
    return quick_two_sum(s.hi, lo);
}

inline DD sub(const DD& a, const DD& b) {
    return add(a, DD{-b.hi, -b.lo});
}

inline DD mul(const DD& a, const DD& b) {
    DD p = two_prod(a.hi, b.hi);
    double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
    return quick_two_sum(p.hi, lo);
}

inline DD mul(const DD& a, double b) {
    DD p = two_prod(a.hi, b);
    double lo = p.lo + a.lo * b;
    return quick_two_sum(p.hi, lo);
}

inline DD div(const DD& a, double b) {
    double q1 = a.hi / b;
    DD p = two_prod(q1, b);
    double r = (a.hi - p.hi) - p.lo + a.lo;
    double q2 = r / b;
    return quick_two_sum(q1, q2);
}

inline DD div(const DD& a, const DD& b) {
    double q1 = a.hi / b.hi;
    DD r = sub(a, mul(b, q1));
    double q2 = r.hi / b.hi;
    r = sub(r, mul(b, q2));
    double q3 = r.hi / b.hi;
    DD q = quick_two_sum(q1, q2);
    return add(q, q3);
}

inline DD neg(const DD& a) { return {-a.hi, -a.lo}; }

}  // namespace hlb::detail
