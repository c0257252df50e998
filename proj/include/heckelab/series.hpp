#pragma once
// Truncated Laurent series in q = e^{2 pi i z / lambda}: arithmetic (add,
// mul, div, fractional powers), the q d/dq and d/dz derivations, and
// evaluation. Coefficients are complex over a templated real scalar so the
// series tower can run in the 50-digit engine.

#include "heckelab/scalar.hpp"
#include <vector>
#include <stdexcept>
#include <algorithm>
#include <string>

namespace heckelab {

template <class R> struct LaurentSeries {
  using C = complex_of<R>;
  int lead = 0;            // lowest exponent
  std::vector<C> coeffs;   // coeffs[j] multiplies q^{lead+j}
  R lambda = R(0);         // period of the exponential variable
  int group_order = 0;

  int size() const { return int(coeffs.size()); }
  int window_end() const { return lead + size(); } // one past the last exponent

  C coefficient(int exponent) const {
    int j = exponent - lead;
    if (j < 0 || j >= size()) return C(0);
    return coeffs[size_t(j)];
  }

  bool compatible(const LaurentSeries& o) const {
    return group_order == o.group_order;
  }

  LaurentSeries shifted(int e) const {
    LaurentSeries out = *this;
    out.lead += e;
    return out;
  }

  LaurentSeries scaled(const C& s) const {
    LaurentSeries out = *this;
    for (auto& c : out.coeffs) c = c * s;
    return out;
  }

  // Drop leading coefficients below tol * (max magnitude); keeps the
  // invariant that coeffs[0] is the genuine lead of a nonzero series.
  LaurentSeries stripped(double tol = 1e-30) const {
    double m = 0;
    using std::abs;
    for (const auto& c : coeffs) m = std::max(m, to_double(abs(c)));
    LaurentSeries out = *this;
    size_t drop = 0;
    while (drop < out.coeffs.size() &&
           to_double(abs(out.coeffs[drop])) <= tol * std::max(m, 1e-300))
      ++drop;
    out.coeffs.erase(out.coeffs.begin(), out.coeffs.begin() + drop);
    out.lead += int(drop);
    return out;
  }
};

template <class R>
LaurentSeries<R> make_series(int lead, std::vector<complex_of<R>> coeffs,
                             const R& lambda, int group_order) {
  LaurentSeries<R> s;
  s.lead = lead;
  s.coeffs = std::move(coeffs);
  s.lambda = lambda;
  s.group_order = group_order;
  return s;
}

namespace series_ops {

template <class R>
void check_compat(const LaurentSeries<R>& a, const LaurentSeries<R>& b) {
  if (!a.compatible(b))
    throw std::invalid_argument("series belong to different group contexts");
}

template <class R>
LaurentSeries<R> add(const LaurentSeries<R>& a, const LaurentSeries<R>& b) {
  check_compat(a, b);
  if (a.coeffs.empty()) return b;
  if (b.coeffs.empty()) return a;
  // The sum is trustworthy only where both windows are known.
  int lead = std::min(a.lead, b.lead);
  int end = std::min(a.window_end(), b.window_end());
  LaurentSeries<R> out;
  out.lead = lead;
  out.lambda = a.lambda;
  out.group_order = a.group_order;
  out.coeffs.assign(size_t(std::max(0, end - lead)), complex_of<R>(0));
  for (int e = lead; e < end; ++e)
    out.coeffs[size_t(e - lead)] = a.coefficient(e) + b.coefficient(e);
  return out;
}

template <class R>
LaurentSeries<R> sub(const LaurentSeries<R>& a, const LaurentSeries<R>& b) {
  return add(a, b.scaled(complex_of<R>(-1)));
}

template <class R>
LaurentSeries<R> mul(const LaurentSeries<R>& a, const LaurentSeries<R>& b) {
  check_compat(a, b);
  LaurentSeries<R> out;
  out.lead = a.lead + b.lead;
  out.lambda = a.lambda;
  out.group_order = a.group_order;
  int n = std::min(a.size(), b.size());
  out.coeffs.assign(size_t(std::max(0, n)), complex_of<R>(0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; i + j < n && j < b.size(); ++j)
      out.coeffs[size_t(i + j)] = out.coeffs[size_t(i + j)] +
                                  a.coeffs[size_t(i)] * b.coeffs[size_t(j)];
  return out;
}

template <class R>
LaurentSeries<R> div(const LaurentSeries<R>& a, const LaurentSeries<R>& b) {
  check_compat(a, b);
  using std::abs;
  if (b.coeffs.empty() || !(abs(b.coeffs[0]) > R(0)))
    throw std::invalid_argument("division by a zero leading coefficient");
  LaurentSeries<R> out;
  out.lead = a.lead - b.lead;
  out.lambda = a.lambda;
  out.group_order = a.group_order;
  int n = std::min(a.size(), b.size());
  out.coeffs.assign(size_t(std::max(0, n)), complex_of<R>(0));
  std::vector<complex_of<R>> rem(a.coeffs.begin(),
                                 a.coeffs.begin() + std::max(0, n));
  for (int i = 0; i < n; ++i) {
    complex_of<R> c = rem[size_t(i)] / b.coeffs[0];
    out.coeffs[size_t(i)] = c;
    for (int j = 0; i + j < n && j < b.size(); ++j)
      rem[size_t(i + j)] = rem[size_t(i + j)] - c * b.coeffs[size_t(j)];
  }
  return out;
}

// a^{p/q} for integer p, q: requires lead * p divisible by q. Uses the
// binomial-derivation recurrence on the unit-constant factor:
// n b_n = sum_{k=1..n} ((r+1)k - n) a_k b_{n-k}, r = p/q.
template <class R>
LaurentSeries<R> fracpow(const LaurentSeries<R>& a, int p, int q) {
  using std::abs;
  using std::pow;
  if (q <= 0) throw std::invalid_argument("fracpow exponent denominator <= 0");
  if (a.coeffs.empty() || !(abs(a.coeffs[0]) > R(0)))
    throw std::invalid_argument("fracpow of a zero leading coefficient");
  if ((int64_t(a.lead) * p) % q != 0)
    throw std::invalid_argument("fracpow would produce a non-integer exponent");
  R r = R(p) / R(q);
  int n = a.size();
  // normalize to 1 + sum a_k q^k
  complex_of<R> c0 = a.coeffs[0];
  std::vector<complex_of<R>> u(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) u[size_t(i)] = a.coeffs[size_t(i)] / c0;
  std::vector<complex_of<R>> b(static_cast<size_t>(n), complex_of<R>(0));
  b[0] = complex_of<R>(1);
  for (int m = 1; m < n; ++m) {
    complex_of<R> s(0);
    for (int k = 1; k <= m; ++k)
      s = s + ((r + R(1)) * R(k) - R(m)) * u[size_t(k)] * b[size_t(m - k)];
    b[size_t(m)] = s / R(m);
  }
  LaurentSeries<R> out;
  out.lead = int(int64_t(a.lead) * p / q);
  out.lambda = a.lambda;
  out.group_order = a.group_order;
  out.coeffs = std::move(b);
  complex_of<R> scale = pow(c0, r);
  for (auto& c : out.coeffs) c = c * scale;
  return out;
}

// q d/dq: multiplies the coefficient of q^e by e.
template <class R>
LaurentSeries<R> qdq(const LaurentSeries<R>& a) {
  LaurentSeries<R> out = a;
  for (int j = 0; j < out.size(); ++j)
    out.coeffs[size_t(j)] = out.coeffs[size_t(j)] * R(out.lead + j);
  return out;
}

// d/dz = (2 pi i / lambda) q d/dq.
template <class R>
LaurentSeries<R> dz(const LaurentSeries<R>& a) {
  LaurentSeries<R> out = qdq(a);
  complex_of<R> f = complex_of<R>(R(0), R(2) * const_pi<R>()) / a.lambda;
  for (auto& c : out.coeffs) c = c * f;
  return out;
}

template <class R>
complex_of<R> eval_q(const LaurentSeries<R>& a, const complex_of<R>& q) {
  // Horner on the regular part, then the lead monomial.
  complex_of<R> s(0);
  for (int j = a.size() - 1; j >= 0; --j) s = s * q + a.coeffs[size_t(j)];
  complex_of<R> qe(1);
  int e = a.lead;
  complex_of<R> base = e >= 0 ? q : complex_of<R>(1) / q;
  for (int i = 0; i < std::abs(e); ++i) qe = qe * base;
  return s * qe;
}

template <class R>
complex_of<R> eval_at(const LaurentSeries<R>& a, const complex_of<R>& z) {
  using std::exp;
  complex_of<R> q =
      exp(complex_of<R>(R(0), R(2) * const_pi<R>()) * z / a.lambda);
  return eval_q(a, q);
}

} // namespace series_ops

// Truncation length so that |q|^N < 1e-14 at the lowest imaginary part used
// (|q| = e^{-2 pi im_min / lambda}).
template <class R>
int truncation_for(const R& lambda, double im_min, double tol = 1e-14) {
  double rate = 2.0 * M_PI * im_min / to_double(lambda);
  return std::max(8, int(std::ceil(-std::log(tol) / rate)) + 2);
}

} // namespace heckelab
