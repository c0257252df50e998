#pragma once
// Radial interpolation basis on the plane for the (2, l, infinity) groups:
//
//   a_{n,k}^eps(x) = (1/lambda) int_arc phi_{n,k}^eps(z)
//                        e^{i pi z x^2} / (i z pi)^k dz,
//
// together with its u-derivatives (u = x^2), the Fourier eigenfunction
// check through the radial Hankel transform, and the two-variable function
//
//   F_k^eps(tau, x) = sum_n a_{n,k}^eps(x) e^{2 pi i tau n / lambda},
//
// evaluated either by that q-expansion (large Im tau), by the arc kernel
// integral (tau in the fundamental strip), or by the chord kernel integral
// plus an explicit reflection term (tau in the core overlap region). The
// arc endpoints differ by exactly one period lambda = 2 cos(pi/l), so the
// order-k u-derivative of a_{n,k} at the node x_m = sqrt(2m/lambda) extracts
// the q^{-m} coefficient of phi_n, which is delta_{nm} by the normal form.
//
// phi_n values come from the pointwise recurrence evaluator (see
// forms.hpp); the handle's scalar parameter selects the arithmetic for the
// whole basis integral (evaluation, nodes, weights, summation), because
// coefficient extraction at high index must resolve cancellation across
// integrand mass of order e^{2 pi n / lambda}.

#include "heckelab/forms.hpp"
#include "heckelab/quadrature.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace heckelab {

namespace interp_detail {

using cd = std::complex<double>;

// b^e for integer e (negative allowed); repeated squaring in any complex
// scalar.
template <class CT> CT ipow_t(CT b, int e) {
  if (e < 0) return CT(1) / ipow_t(b, -e);
  CT r(1);
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

inline cd ipow(cd b, int e) { return ipow_t(b, e); }

} // namespace interp_detail

// e^{i pi z u} / (i z pi)^k: the radial Gaussian profile e^{i pi z |x|^2}
// with the k-fold u-antiderivative normalization. Its order-k u-derivative
// is the plain exponential e^{i pi z u}.
inline std::complex<double> gaussian_kernel(std::complex<double> z, double u,
                                            int k) {
  using interp_detail::ipow;
  std::complex<double> ipz = std::complex<double>(0.0, 1.0) * M_PI * z;
  return std::exp(ipz * u) * ipow(ipz, -k);
}

// The interpolation nodes x_m = sqrt(2m / lambda).
template <class R>
double interpolation_node(const HeckeContext<R>& ctx, int m) {
  if (m < 0) throw std::invalid_argument("node index must be >= 0");
  return std::sqrt(2.0 * m / to_double(ctx.lambda));
}

// A prepared evaluator for one basis function a_{n,k}^eps: the pointwise
// phi recurrence plus the arc contour it is integrated over.
//
// The arc is the minimax contour for this family: |phi_n| grows like
// e^{2 pi n Im(z) * 2 / lambda} through the reflection channel below
// |z| = 1 and like |q|^{-n} above it, and the two balance on |z| = 1.
// Even there the integrand reaches e^{2 pi n / lambda} (e^{29} at n = 8)
// while the node values are O(1), so the scalar R of the handle selects
// the arithmetic for the whole integral - phi evaluation, nodes, weights
// and summation. R = double resolves basis values to roughly
// 1e-14 * e^{2 pi n / lambda} absolute error, enough for function
// evaluation up to n ~ 12 but not for the near-zero off-diagonal node
// values at higher n; the 50-digit instantiation handles those.
template <class R = double> struct BasisFunctionHandle {
  int l = 0, n = 0, k = 0, eps = 0, d = 0;
  double lambda = 0.0;
  PhiEvaluator<R> phi;
  ContourSpec contour;
};

template <class R>
BasisFunctionHandle<R> make_basis_handle(const HeckeContext<R>& ctx, int n,
                                         int k, int eps,
                                         QuadratureSettings quad = {}) {
  BasisFunctionHandle<R> h;
  h.l = ctx.order;
  h.n = n;
  h.k = k;
  h.eps = eps;
  h.lambda = to_double(ctx.lambda);
  h.phi = phi_evaluator(ctx, n, k, eps); // validates n against [d, 60]
  h.d = h.phi.d;
  h.contour = make_contour(ctx, ContourKind::ARC, quad);
  return h;
}

// Order-`order` derivative in u = x^2 of a_{n,k}^eps at radius x. Each
// u-derivative multiplies the integrand by (i pi z); at order = k the
// kernel collapses to phi_n(z) q_z^m at the nodes, which extracts the
// q^{-m} coefficient.
template <class R>
double a_basis_deriv(const BasisFunctionHandle<R>& h, double x, int order) {
  if (x < 0.0)
    throw std::invalid_argument("radial argument must be >= 0");
  if (order < 0)
    throw std::invalid_argument("derivative order must be >= 0");
  using CT = complex_of<R>;
  R pi = const_pi<R>();
  R u = R(x) * R(x);
  CT val = contour_integral_t<R>(h.contour, [&](const CT& z) {
    CT ipz = CT(0, 1) * pi * z;
    using std::exp;
    return h.phi.value(z, h.n) * exp(ipz * u) *
           interp_detail::ipow_t(ipz, order - h.k);
  });
  return to_double((val / R(h.lambda)).real());
}

template <class R>
double a_basis_eval(const BasisFunctionHandle<R>& h, double x) {
  return a_basis_deriv(h, x, 0);
}

// Radial Fourier eigenfunction check: for a radial function on the plane
// the Fourier transform is the order-zero Hankel transform
//   \hat a(x) = 2 pi int_0^R a(r) J_0(2 pi r x) r dr,
// and the basis functions satisfy \hat a = eps * a. The integrand decays
// like a Gaussian, so a modest radial cutoff already leaves only rounding.
struct EigenfunctionCheck {
  double transform = 0.0; // \hat a(x)
  double direct = 0.0;    // a(x)
  double residual = 0.0;  // |transform - eps * direct|
};

template <class R>
EigenfunctionCheck eigenfunction_check(const BasisFunctionHandle<R>& h,
                                       double x, double radial_cutoff = 6.0) {
  QuadratureSettings outer;
  outer.panels = 12;
  outer.tol = 1e-9;
  std::complex<double> hankel = line_integral(
      [&](double r) {
        return a_basis_eval(h, r) * std::cyl_bessel_j(0.0, 2.0 * M_PI * r * x) *
               r;
      },
      0.0, radial_cutoff, outer);
  EigenfunctionCheck out;
  out.transform = 2.0 * M_PI * hankel.real();
  out.direct = a_basis_eval(h, x);
  out.residual = std::abs(out.transform - h.eps * out.direct);
  return out;
}

// Raw kernel integral over one contour (no reflection term, no translation
// reduction):
//   (1/lambda) f_{d-1}(tau) int phi_d(z) G_k(z, x) / (J(tau) - J(z)) dz.
// Points closer than 1e-3 to the contour are refused outright, and a
// near-vanishing kernel denominator on the contour is a hard error: the
// formulas hold on open regions, not on their boundaries.
inline std::complex<double> F_contour_integral(const HeckeContext<double>& ctx,
                                               int k, int eps,
                                               ContourKind kind,
                                               std::complex<double> tau,
                                               double x,
                                               QuadratureSettings quad = {}) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  if (eps != 1 && eps != -1)
    throw std::invalid_argument("eps must be +1 or -1");
  if (x < 0.0) throw std::invalid_argument("radial argument must be >= 0");
  if (tau.imag() <= 0.0)
    throw std::invalid_argument("tau must lie in the upper half plane");

  auto spec = make_contour(ctx, kind, quad);
  if (contour_distance(spec, tau) < 1e-3)
    throw std::runtime_error(
        "evaluation point is too close to the integration contour");

  const int N = 60;
  auto J = hauptmodul_J(ctx, N);
  int d = dim_odd_forms(ctx, k, -eps);
  LaurentSeries<double> fs = d == 0
                                 ? special_f_minus_one(ctx, N)
                                 : canonical_f_basis(ctx, k, eps, N).back();
  auto phid = phi_basis(ctx, d, k, eps, N);

  double u = x * x;
  std::complex<double> Jtau = series_ops::eval_at(J, tau);
  std::complex<double> ftau = series_ops::eval_at(fs, tau);
  std::complex<double> integral =
      contour_integral(spec, [&](std::complex<double> z) {
        std::complex<double> den = Jtau - series_ops::eval_at(J, z);
        if (std::abs(den) < 1e-8 * (1.0 + std::abs(Jtau)))
          throw std::runtime_error("kernel pole encountered on the contour");
        return series_ops::eval_at(phid, z) * gaussian_kernel(z, u, k) / den;
      });
  return ftau * integral / ctx.lambda;
}

enum class FMode { AUTO, ARC, CHORD, SERIES };

// F_k^eps(tau, x). The evaluation strategies:
//  - SERIES: truncated q-expansion sum_n a_n(x) q_tau^n, with the length
//    chosen so the coefficient growth bound (rate 2 pi sin(pi/l)(1+1/4) /
//    lambda) leaves a tail below 1e-13;
//  - ARC: kernel integral over the arc, valid for tau in the fundamental
//    strip interior (|tau_reduced| > 1);
//  - CHORD: kernel integral over the chord plus the reflection term
//    eps (i/tau)^{2k+1} G_k(-1/tau, x) and, in the corner pockets, the
//    matching terms at tau -+ lambda; valid on the core region except the
//    slivers below the unit circle whose inverted point falls in a pocket
//    (those are refused; AUTO covers them);
//  - AUTO: reduce tau to the fundamental domain, evaluate by the arc
//    formula (chord as a near-arc fallback), and unwind one reflection
//    identity per inversion; reaches every tau with Im(tau) above the
//    corner height sin(pi/l).
// tau is always reduced by integer multiples of lambda first; F is
// lambda-periodic so this is exact.
inline std::complex<double> F_eval(const HeckeContext<double>& ctx, int k,
                                   int eps, std::complex<double> tau, double x,
                                   FMode mode = FMode::AUTO,
                                   QuadratureSettings quad = {}) {
  using interp_detail::ipow;
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  if (eps != 1 && eps != -1)
    throw std::invalid_argument("eps must be +1 or -1");
  if (x < 0.0) throw std::invalid_argument("radial argument must be >= 0");
  if (tau.imag() <= 0.0)
    throw std::invalid_argument("tau must lie in the upper half plane");

  double lambda = ctx.lambda;
  double shift = std::round(tau.real() / lambda);
  std::complex<double> taur = tau - shift * lambda;
  double u = x * x;

  // One reflected Gaussian eps (i/w)^{2k+1} G_k(-1/w, x) per kernel pole
  // -1/w lying between the chord and the arc.
  auto reflected = [&](std::complex<double> w) {
    std::complex<double> pref =
        ipow(std::complex<double>(0.0, 1.0) / w, 2 * k + 1);
    return double(eps) * pref * gaussian_kernel(-1.0 / w, u, k);
  };
  // w maps to a pole between the contours iff |w| > 1 and Im(-1/w) exceeds
  // the corner height, i.e. |2 sin(pi/l) w - i| < 1.
  auto pole_between = [&](std::complex<double> w) {
    return std::abs(w) > 1.0 &&
           std::abs(2.0 * ctx.sin_corner * w -
                    std::complex<double>(0.0, 1.0)) < 1.0;
  };
  auto chord_value = [&](std::complex<double> t) {
    std::complex<double> out =
        F_contour_integral(ctx, k, eps, ContourKind::CHORD, t, x, quad);
    out += reflected(t); // -1/tau, present on the whole core region
    // Near the corners the corner rotation sweeps one translated copy of
    // the region between the contours back over the core, so the kernel
    // picks up a second pole at -1/(tau -+ lambda); its residue is the
    // same reflected term at the translated point.
    if (pole_between(t - lambda)) out += reflected(t - lambda);
    if (pole_between(t + lambda)) out += reflected(t + lambda);
    return out;
  };
  auto arc_value = [&](std::complex<double> t) {
    return F_contour_integral(ctx, k, eps, ContourKind::ARC, t, x, quad);
  };

  switch (mode) {
  case FMode::SERIES: {
    double decay = 2.0 * M_PI * taur.imag() / lambda;
    double growth = 2.0 * M_PI * ctx.sin_corner * 1.25 / lambda;
    int d = dim_odd_forms(ctx, k, -eps);
    if (decay <= growth)
      throw std::invalid_argument(
          "series mode requires Im(tau) above the coefficient growth rate");
    int N = int(std::ceil(std::log(1e13) / (decay - growth)));
    N = std::max(N, d);
    if (N > 60)
      throw std::invalid_argument(
          "series mode would need more terms than the supported window");
    auto ev = phi_evaluator(ctx, N, k, eps);
    // on the arc the term magnitudes e^{2 pi n / lambda} |q_tau|^n decay
    // once Im(tau) > 1, so the summed integrand keeps O(1) mass
    auto spec = make_contour(ctx, ContourKind::ARC, quad);
    std::complex<double> qt =
        std::exp(std::complex<double>(0.0, 2.0 * M_PI) * taur / lambda);
    // sum_n a_n(x) qt^n with every a_n from its defining integral; the
    // shared nodes let one pass integrate the whole truncated sum.
    std::complex<double> integral =
        contour_integral(spec, [&](std::complex<double> z) {
          auto vals = ev.values(z, N);
          std::complex<double> qp = ipow(qt, d);
          std::complex<double> s(0.0, 0.0);
          for (const auto& v : vals) {
            s += v * qp;
            qp *= qt;
          }
          return s * gaussian_kernel(z, u, k);
        });
    return integral / lambda;
  }
  case FMode::ARC: {
    if (std::abs(taur) <= 1.0)
      throw std::invalid_argument(
          "arc formula requires the fundamental strip interior");
    return arc_value(taur);
  }
  case FMode::CHORD: {
    if (region_classify(ctx, taur) != Region::CORE)
      throw std::invalid_argument("chord formula requires the core region");
    if (std::abs(taur) < 1.0) {
      // Below the unit circle the inverted point can itself fall in a
      // corner pocket, which drags a second-generation kernel pole between
      // the contours; the single-correction chord formula stops there.
      std::complex<double> s = -1.0 / taur;
      if (pole_between(s - lambda) || pole_between(s + lambda))
        throw std::invalid_argument(
            "chord formula does not cover the corner slivers below the "
            "unit circle; use AUTO");
    }
    return chord_value(taur);
  }
  case FMode::AUTO: {
    // F is single-valued and analytic on the half plane above the corner
    // height, is lambda-periodic, and satisfies the weight-(2k+1)
    // reflection equation. So: reduce tau to the fundamental domain by the
    // standard translate/invert loop (each inversion strictly raises the
    // imaginary part, which never drops below the corner height along the
    // way), evaluate there by whichever formula converges, and unwind one
    // exact reflection step per recorded inversion. This reaches every
    // point of the slab, including the corner slivers where a fixed
    // contour formula would face kernel poles arbitrarily close to the
    // contour.
    if (taur.imag() <= ctx.sin_corner)
      throw std::invalid_argument(
          "tau must lie above the corner height sin(pi/l)");
    std::vector<std::complex<double>> inversions;
    std::complex<double> w = taur;
    for (int guard = 0;; ++guard) {
      if (guard >= 64)
        throw std::runtime_error(
            "fundamental-domain reduction did not terminate (tau is too "
            "close to a corner point)");
      w -= lambda * std::round(w.real() / lambda);
      if (std::abs(w) >= 1.0) break;
      inversions.push_back(w);
      w = -1.0 / w;
    }
    std::complex<double> val;
    try {
      val = arc_value(w);
    } catch (const std::runtime_error&) {
      // w hugs the arc; the chord formula at w converges there instead
      if (region_classify(ctx, w) != Region::CORE) throw;
      val = chord_value(w);
    }
    // F(v) = G(v) + eps (i/v)^{2k+1} (G(-1/v) - F(-1/v))
    for (auto it = inversions.rbegin(); it != inversions.rend(); ++it) {
      std::complex<double> v = *it;
      std::complex<double> pref =
          double(eps) * ipow(std::complex<double>(0.0, 1.0) / v, 2 * k + 1);
      val = gaussian_kernel(v, u, k) +
            pref * (gaussian_kernel(-1.0 / v, u, k) - val);
    }
    return val;
  }
  }
  throw std::logic_error("unreachable F_eval mode");
}

// Weighted supremum table for the basis functions: row n reports
// sup_x |a_{n,k}(x)| e^{pi sin(pi/l) x^2} over a grid x in [0, 5], plus a
// least-squares growth rate across n >= max(d, 1). The rate must stay at or
// below 2 pi sin(pi/l) (1 + delta) / lambda.
struct GrowthReport {
  int d = 0;
  std::vector<int> index;
  std::vector<double> weighted_sup;
  double fitted_rate = 0.0;
  double rate_bound = 0.0;
};

inline GrowthReport coefficient_growth_report(const HeckeContext<double>& ctx,
                                              int k, int eps, int n_max,
                                              double delta = 0.25) {
  GrowthReport rep;
  rep.rate_bound = 2.0 * M_PI * ctx.sin_corner * (1.0 + delta) / ctx.lambda;
  QuadratureSettings quad;
  quad.tol = 1e-15;   // weighted sups at large x are small in absolute terms
  quad.noise = 1e-10; // double-precision phi recurrence evaluation error
  bool first = true;
  for (int n = 0; n <= n_max; ++n) {
    BasisFunctionHandle<double> h;
    try {
      h = make_basis_handle(ctx, n, k, eps, quad);
    } catch (const std::invalid_argument&) {
      continue; // below the principal-part gap for this family
    }
    if (first) {
      rep.d = h.d;
      first = false;
    }
    double sup = 0.0;
    for (int i = 0; i <= 20; ++i) {
      double x = 0.25 * i;
      double w = std::abs(a_basis_eval(h, x)) *
                 std::exp(M_PI * ctx.sin_corner * x * x);
      sup = std::max(sup, w);
    }
    rep.index.push_back(n);
    rep.weighted_sup.push_back(sup);
  }
  // least-squares slope of log(sup) against n, skipping the n = 0 row
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (size_t i = 0; i < rep.index.size(); ++i) {
    if (rep.index[i] < std::max(rep.d, 1)) continue;
    double xn = rep.index[i], yn = std::log(rep.weighted_sup[i]);
    sx += xn;
    sy += yn;
    sxx += xn * xn;
    sxy += xn * yn;
    ++cnt;
  }
  if (cnt >= 2)
    rep.fitted_rate = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  return rep;
}

} // namespace heckelab
