#pragma once
// The Hauptmodul J for the (2, l, infinity) triangle group: q-expansion
// solved order-by-order from the Schwarzian relation of the triangle
// uniformization (angles pi/2, pi/l, 0), then scale-normalized so that
// J(w2) = 0 and the q^{-1} coefficient is 1. The scale is fixed by locating
// the critical point of the gauge solution (dJ/dz = 0 at z = i); the value
// J(i) equals the relation's constant rho and is exposed alongside the
// series. The recurrence runs in a 120-digit guard engine (see
// haupt_detail::work_mp below) and the result is rounded to the 50-digit
// type; the gauge stage's coefficients decay like rho^{-n} and would
// underflow IEEE double, so no stage uses hardware floats.

#include "heckelab/hecke.hpp"
#include "heckelab/series.hpp"
#include <map>
#include <mutex>

namespace heckelab {

namespace haupt_detail {

// Guard precision for the coefficient recurrence. Perturbations excite
// parasitic solutions of the third-order relation that are singular at the
// interior special point z = i, so errors grow by a factor e^{2 pi / lambda}
// (~38 for order 6) per coefficient; 120 digits keeps the series clean
// through q^{80} with a wide margin over the 50-digit output.
using work_mp =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<120>>;

using SMap = std::map<int, work_mp>;

inline SMap smul(const SMap& a, const SMap& b, int window) {
  SMap out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      int e = ea + eb;
      if (e > window) continue;
      out[e] += ca * cb;
    }
  return out;
}

inline SMap sadd(const SMap& a, const SMap& b, const work_mp& s) {
  SMap out = a;
  for (const auto& [e, c] : b) out[e] += s * c;
  return out;
}

inline SMap sD(const SMap& a, int k = 1) {
  SMap out;
  for (const auto& [e, c] : a) {
    work_mp f = 1;
    for (int i = 0; i < k; ++i) f *= work_mp(e);
    out[e] = c * f;
  }
  return out;
}

// Coefficient-level residual of the third-order relation satisfied by J:
// 2 J^2 (J-rho)^2 [D3J*DJ - (3/2)(D2J)^2]
//   + (DJ)^4 [(1-1/l^2)(J-rho)^2 + (3/4)J^2 - (3/4-1/l^2)J(J-rho)],
// D = q d/dq. Vanishes identically on the true expansion.
inline SMap residual(const SMap& J, int window, int l, const work_mp& rho) {
  SMap DJ = sD(J), D2J = sD(J, 2), D3J = sD(J, 3);
  SMap A = sadd(smul(D3J, DJ, window), smul(D2J, D2J, window),
                work_mp(-3) / 2);
  SMap Jm = J;
  Jm[0] -= rho;
  SMap J2 = smul(J, J, window), Jm2 = smul(Jm, Jm, window);
  SMap t1 = smul(smul(J2, Jm2, window), A, window);
  for (auto& [e, c] : t1) c *= 2;
  work_mp il2 = work_mp(1) / (work_mp(l) * work_mp(l));
  work_mp c1 = 1 - il2, c2 = work_mp(3) / 4, c3 = work_mp(3) / 4 - il2;
  SMap P;
  for (const auto& [e, c] : Jm2) P[e] += c1 * c;
  for (const auto& [e, c] : J2) P[e] += c2 * c;
  for (const auto& [e, c] : smul(J, Jm, window)) P[e] -= c3 * c;
  SMap DJ2 = smul(DJ, DJ, window);
  SMap t2 = smul(smul(DJ2, DJ2, window), P, window);
  return sadd(t1, t2, work_mp(1));
}

// Solve J = q^{-1} + sum_{n>=0} c_n q^n order by order for a given rho:
// the window-n residual determines c_n through the linear factor 2(n+1)^3.
inline SMap solve_with_rho(int l, const work_mp& rho, int ncoef) {
  SMap J;
  J[-1] = 1;
  for (int n = 0; n < ncoef; ++n) {
    SMap R = residual(J, n, l, rho);
    work_mp r = 0;
    if (auto it = R.find(n - 5); it != R.end()) r = it->second;
    J[n] = r / (2 * boost::multiprecision::pow(work_mp(n + 1), 3));
  }
  return J;
}

inline work_mp eval_real(const SMap& a, const work_mp& x) {
  work_mp s = 0;
  for (const auto& [e, c] : a)
    s += c * boost::multiprecision::pow(x, e);
  return s;
}

// Locate the normalization scale: in the gauge rho = 1, the derivative
// series g(x) = sum_{m>=1} m c_m x^{m+1} crosses 1 at the image of z = i
// (that crossing is the vanishing of dJ/dz at the order-2 special point).
// The root is regular, so bisection to ~1e-95 relative is exact for our
// purposes; accuracy is limited by the gauge truncation, whose tail at the
// root is ~e^{-200} for 70 retained coefficients.
inline work_mp find_rho(int l, const SMap& gauge) {
  work_mp lambda = 2 * cos(const_pi<work_mp>() / l);
  work_mp qi = exp(-2 * const_pi<work_mp>() / lambda);
  auto g = [&](const work_mp& x) {
    work_mp s = 0;
    for (const auto& [m, c] : gauge)
      if (m >= 1) s += work_mp(m) * c * boost::multiprecision::pow(x, m + 1);
    return s;
  };
  work_mp hi = 1;
  int guard = 0;
  while (g(hi) < 1) {
    hi *= 2;
    if (++guard > 200)
      throw std::runtime_error("normalization scale search diverged");
  }
  work_mp lo = hi / 2;
  for (int it = 0; it < 400 && (hi - lo) > hi * work_mp(1e-95); ++it) {
    work_mp mid = (lo + hi) / 2;
    (g(mid) < 1 ? lo : hi) = mid;
  }
  return (lo + hi) / 2 / qi;
}

} // namespace haupt_detail

template <class R> struct HauptmodulData {
  LaurentSeries<R> J;
  R rho; // J(i); also the value with J(w2) = 0 forced
};

// Construct J to q^{N}: gauge solve, scale search, then the final solve in
// the true normalization, rounded to the 50-digit type. Note the naive
// polish iteration rho <- J_rho(i) is useless here: along the scaling
// family J_rho(q) = rho*g(rho*q) its derivative at the solution is
// g(x*) + x*g'(x*) = 1 + 0, a neutral fixed point. The scale search alone
// carries all the accuracy, so the gauge series must be long (70 terms).
inline HauptmodulData<real_mp> hauptmodul_compute(int l, int N) {
  using namespace haupt_detail;
  if (N < 4) throw std::invalid_argument("truncation order must be >= 4");
  make_context<real_mp>(l); // validates l

  SMap gauge = solve_with_rho(l, work_mp(1), 70);
  work_mp rho = find_rho(l, gauge);
  SMap J = solve_with_rho(l, rho, N + 1);

  HauptmodulData<real_mp> out;
  out.rho = real_mp(rho);
  out.J.lead = -1;
  out.J.lambda = 2 * cos(const_pi<real_mp>() / l);
  out.J.group_order = l;
  out.J.coeffs.assign(size_t(N + 2), complex_mp(0));
  for (const auto& [e, c] : J)
    out.J.coeffs[size_t(e + 1)] = complex_mp(real_mp(c));
  return out;
}

// Process-wide cache keyed by (l, N); series are immutable once built.
inline const HauptmodulData<real_mp>& hauptmodul_cached(int l, int N) {
  static std::map<std::pair<int, int>, HauptmodulData<real_mp>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(l, N);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, hauptmodul_compute(l, N)).first;
  return it->second;
}

template <class R>
LaurentSeries<R> downcast_series(const LaurentSeries<real_mp>& s) {
  if constexpr (std::is_same_v<R, real_mp>) {
    return s;
  } else {
    LaurentSeries<R> out;
    out.lead = s.lead;
    out.lambda = R(to_double(s.lambda));
    out.group_order = s.group_order;
    out.coeffs.reserve(s.coeffs.size());
    for (const auto& c : s.coeffs) out.coeffs.push_back(to_cdouble(c));
    return out;
  }
}

// Public constructors at the requested scalar precision.
template <class R = double>
LaurentSeries<R> hauptmodul_J(const HeckeContext<R>& ctx, int N) {
  return downcast_series<R>(hauptmodul_cached(ctx.order, N).J);
}

template <class R = double>
R hauptmodul_rho(const HeckeContext<R>& ctx, int N = 46) {
  return R(to_double(hauptmodul_cached(ctx.order, N).rho));
}
template <>
inline real_mp hauptmodul_rho<real_mp>(const HeckeContext<real_mp>& ctx,
                                       int N) {
  return hauptmodul_cached(ctx.order, N).rho;
}

// d/dz = (2 pi i / lambda) q d/dq of the Hauptmodul (or any series).
template <class R>
LaurentSeries<R> j_prime(const HeckeContext<R>&, const LaurentSeries<R>& J) {
  return series_ops::dz(J);
}

// Reduce z to the fundamental domain |Re z| <= lambda/2, |z| >= 1 by
// alternating translations and inversions.
template <class R>
complex_of<R> reduce_to_fundamental(const HeckeContext<R>& ctx,
                                    complex_of<R> z) {
  using std::abs;
  using std::floor;
  for (int it = 0; it < 500; ++it) {
    R n = floor(z.real() / ctx.lambda + R(1) / 2);
    z = z - n * ctx.lambda;
    R n2 = z.real() * z.real() + z.imag() * z.imag();
    if (n2 < R(1) - R(1e-14))
      z = -complex_of<R>(1) / z;
    else
      return z;
  }
  throw std::runtime_error("fundamental-domain reduction did not terminate");
}

} // namespace heckelab
