#pragma once

#include <cmath>

// Error-free transformations for double-double accumulation.
namespace nlcs::simd::detail {

struct DD {
  double hi = 0.0;
  double lo = 0.0;
};

// s + e == a + b exactly.
inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

// p + e == a * b exactly.
inline DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD fast_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

// (x_hi + x_lo) * (w_hi + w_lo) to double-double accuracy.
inline DD dd_mul(DD x, DD w) {
  const DD p = two_prod(x.hi, w.hi);
  return fast_two_sum(p.hi, p.lo + (x.hi * w.lo + x.lo * w.hi));
}

inline DD dd_add(DD a, DD b) {
  const DD s = two_sum(a.hi, b.hi);
  return fast_two_sum(s.hi, s.lo + a.lo + b.lo);
}

// conj(a) * b * w summed into (re, im) accumulators.
inline void cdot_term(double ar, double ai, double br, double bi, DD w, DD& re, DD& im) {
  const DD p1 = two_prod(ar, br);
  const DD p2 = two_prod(ai, bi);
  const DD p3 = two_prod(ar, bi);
  const DD p4 = two_prod(ai, br);
  DD t = two_sum(p1.hi, p2.hi);
  t.lo += p1.lo + p2.lo;
  re = dd_add(re, dd_mul(t, w));
  DD u = two_sum(p3.hi, -p4.hi);
  u.lo += p3.lo - p4.lo;
  im = dd_add(im, dd_mul(u, w));
}

}  // namespace nlcs::simd::detail
