#pragma once
// Triangle-group layer: generator matrices for the group generated by
// z -> -1/z and z -> z + lambda (lambda = 2 cos(pi/l)), words over the
// generators, formal integer combinations of words, and the group-algebra
// identity that drives the Fourier eigenfunction construction.

#include "heckelab/scalar.hpp"
#include <array>
#include <vector>
#include <map>
#include <stdexcept>
#include <cstdint>
#include <cmath>

namespace heckelab {

template <class R> struct Mat22 {
  R a, b, c, d; // [[a,b],[c,d]]
  friend Mat22 operator*(const Mat22& x, const Mat22& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  R det() const { return a * d - b * c; }
  static Mat22 identity() { return {R(1), R(0), R(0), R(1)}; }
  // Mobius action on the upper half-plane.
  template <class C> C apply(const C& z) const {
    return (a * z + b) / (c * z + d);
  }
};

enum class Letter { S, T, Tinv, V, Vinv };

template <class R = double> struct HeckeContext {
  int order = 0;           // l
  R lambda;                // 2 cos(pi/l)
  R sin_corner;            // sin(pi/l)
  complex_of<R> w1, w2;    // corner points on the unit circle
  Mat22<R> S, T, V;        // V = T*S

  Mat22<R> letter_matrix(Letter L) const {
    switch (L) {
      case Letter::S: return S;
      case Letter::T: return T;
      case Letter::Tinv: return {R(1), -lambda, R(0), R(1)};
      case Letter::V: return V;
      case Letter::Vinv: return {R(0), R(-1), R(1), -lambda};
    }
    throw std::logic_error("unreachable");
  }

  // Interpolation node radius sqrt(2n/lambda).
  R node_radius(int n) const {
    using std::sqrt;
    return sqrt(R(2) * R(n) / lambda);
  }
};

template <class R = double> HeckeContext<R> make_context(int l) {
  if (l < 6 || l % 4 != 2)
    throw std::invalid_argument(
        "order must be >= 6 and congruent to 2 mod 4 (weight-1 theory)");
  HeckeContext<R> ctx;
  ctx.order = l;
  R pi = const_pi<R>();
  using std::cos;
  using std::sin;
  R cl = cos(pi / R(l)), sl = sin(pi / R(l));
  ctx.lambda = R(2) * cl;
  ctx.sin_corner = sl;
  ctx.w1 = complex_of<R>(-cl, sl);
  ctx.w2 = complex_of<R>(cl, sl);
  ctx.S = {R(0), R(1), R(-1), R(0)};
  ctx.T = {R(1), ctx.lambda, R(0), R(1)};
  ctx.V = ctx.T * ctx.S; // [[-lambda, 1], [-1, 0]]
  return ctx;
}

struct GroupWord {
  std::vector<Letter> letters;
  GroupWord() = default;
  GroupWord(std::initializer_list<Letter> ls) : letters(ls) {}
  GroupWord& append(Letter L) {
    letters.push_back(L);
    return *this;
  }
  GroupWord concat(const GroupWord& w) const {
    GroupWord out = *this;
    out.letters.insert(out.letters.end(), w.letters.begin(), w.letters.end());
    return out;
  }
};

// Ordered product of the letter matrices.
template <class R>
Mat22<R> expand_word(const HeckeContext<R>& ctx, const GroupWord& w) {
  Mat22<R> m = Mat22<R>::identity();
  for (Letter L : w.letters) m = m * ctx.letter_matrix(L);
  return m;
}

// Finite integer combination of words, supporting right multiplication.
struct GroupAlgebraElement {
  std::vector<std::pair<int, GroupWord>> terms;

  GroupAlgebraElement& add(int coeff, GroupWord w) {
    terms.emplace_back(coeff, std::move(w));
    return *this;
  }
  GroupAlgebraElement times_word(const GroupWord& w) const {
    GroupAlgebraElement out;
    for (const auto& [c, u] : terms) out.add(c, u.concat(w));
    return out;
  }
  GroupAlgebraElement times(const GroupAlgebraElement& e) const {
    GroupAlgebraElement out;
    for (const auto& [c, u] : terms)
      for (const auto& [d, v] : e.terms) out.add(c * d, u.concat(v));
    return out;
  }
  GroupAlgebraElement negate() const {
    GroupAlgebraElement out;
    for (const auto& [c, u] : terms) out.add(-c, u);
    return out;
  }
};

// (T^{-1} - I) * (I + V + ... + V^{l-1})
inline GroupAlgebraElement difference_average_element(int l) {
  GroupAlgebraElement out;
  for (int i = 0; i < l; ++i) {
    GroupWord vi;
    for (int j = 0; j < i; ++j) vi.append(Letter::V);
    out.add(1, GroupWord{Letter::Tinv}.concat(vi));
    out.add(-1, vi);
  }
  return out;
}

namespace detail {
// Canonical integer key for a matrix modulo global sign.
template <class R>
std::array<int64_t, 4> projective_key(const Mat22<R>& m) {
  std::array<double, 4> e = {to_double(m.a), to_double(m.b), to_double(m.c),
                             to_double(m.d)};
  double sign = 0;
  for (double v : e)
    if (std::abs(v) > 1e-9) { sign = v > 0 ? 1.0 : -1.0; break; }
  if (sign == 0) sign = 1.0;
  std::array<int64_t, 4> k;
  for (int i = 0; i < 4; ++i) k[i] = llround(sign * e[i] * 1e9);
  return k;
}
} // namespace detail

// Expand an algebra element into coefficient sums per projective matrix.
template <class R>
std::map<std::array<int64_t, 4>, int> algebra_matrix_profile(
    const HeckeContext<R>& ctx, const GroupAlgebraElement& e) {
  std::map<std::array<int64_t, 4>, int> out;
  for (const auto& [c, w] : e.terms) {
    auto key = detail::projective_key(expand_word(ctx, w));
    out[key] += c;
    if (out[key] == 0) out.erase(key);
  }
  return out;
}

// Checks S*(T^{-1}-I)*(I+V+...+V^{l-1}) == -(T^{-1}-I)*(I+V+...+V^{l-1})
// as finite matrix combinations modulo projective sign.
template <class R>
bool verify_key_identity(const HeckeContext<R>& ctx) {
  GroupAlgebraElement base = difference_average_element(ctx.order);
  GroupAlgebraElement lhs;
  for (const auto& [c, w] : base.terms)
    lhs.add(c, GroupWord{Letter::S}.concat(w));
  return algebra_matrix_profile(ctx, lhs) ==
         algebra_matrix_profile(ctx, base.negate());
}

enum class Region { CORE, OUTSIDE };

// CORE: both Im(tau) and Im(-1/tau) exceed sin(pi/l); the region where the
// interpolation expansion of a Gaussian converges.
template <class R>
Region region_classify(const HeckeContext<R>& ctx, const complex_of<R>& tau) {
  if (!(tau.imag() > R(0)))
    throw std::invalid_argument("region_classify requires Im(tau) > 0");
  R n = tau.real() * tau.real() + tau.imag() * tau.imag();
  R im_inv = tau.imag() / n;
  return (tau.imag() > ctx.sin_corner && im_inv > ctx.sin_corner)
             ? Region::CORE
             : Region::OUTSIDE;
}

} // namespace heckelab
