#pragma once
// Composite Gauss-Legendre quadrature along the two contours bounding the
// core overlap region of the (2, l, infinity) fundamental domain:
//   ARC   - the unit-circle arc from w1 = e^{i(pi - pi/l)} to w2 = e^{i pi/l},
//   CHORD - the horizontal segment at height sin(pi/l) joining the same
//           corner points.
// Integrals refine by doubling the per-panel order until two successive
// passes agree to the requested tolerance (relative to max(1, |value|));
// exhausting the refinement budget is a hard error, never a silent result.
// The whole stack is templated on the working scalar: coefficient
// extraction integrands carry cancelling mass up to e^{2 pi n / lambda},
// and once that exceeds ~1e14 only wider arithmetic (nodes, weights and
// summation all in the 50-digit type) can resolve the value. The plain
// double entry points below remain the default.

#include "heckelab/hecke.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

namespace heckelab {

namespace quad_detail {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], by
// Newton iteration on the Legendre three-term recurrence. Results are
// cached per order behind a mutex; the returned reference is stable.
inline const std::pair<std::vector<double>, std::vector<double>>&
gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>>
      cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  std::vector<double> x(static_cast<size_t>(order));
  std::vector<double> w(static_cast<size_t>(order));
  int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = xi;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2 * j - 1) * xi * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      double step = p1 / dp;
      xi -= step;
      if (std::abs(step) < 1e-15) {
        // one polishing pass after convergence
        p0 = 1.0;
        p1 = xi;
        for (int j = 2; j <= n; ++j) {
          double p2 = ((2 * j - 1) * xi * p1 - (j - 1) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        xi -= p1 / dp;
        break;
      }
    }
    x[size_t(i)] = -xi; // enumerate left-to-right
    x[size_t(n - 1 - i)] = xi;
    double wi = 2.0 / ((1.0 - xi * xi) * dp * dp);
    w[size_t(i)] = wi;
    w[size_t(n - 1 - i)] = wi;
  }
  if (n % 2 == 1) x[size_t(n / 2)] = 0.0;
  return cache.emplace(order, std::make_pair(std::move(x), std::move(w)))
      .first->second;
}

// Scalar-T rule: the converged double nodes re-polished by Newton steps
// carried out in T, with the weights recomputed in T. One or two steps
// square the residual from ~1e-16 down to the T epsilon.
template <class T>
const std::pair<std::vector<T>, std::vector<T>>& gauss_legendre_t(int order) {
  if constexpr (std::is_same_v<T, double>) {
    return gauss_legendre(order);
  } else {
    static std::map<int, std::pair<std::vector<T>, std::vector<T>>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it != cache.end()) return it->second;

    const auto& base = gauss_legendre(order);
    int n = order;
    std::vector<T> x(static_cast<size_t>(order));
    std::vector<T> w(static_cast<size_t>(order));
    for (int i = 0; i < n; ++i) {
      T xi = T(base.first[size_t(i)]);
      T dp(0);
      for (int iter = 0; iter < 6; ++iter) {
        T p0(1), p1 = xi;
        for (int j = 2; j <= n; ++j) {
          T p2 = ((2 * j - 1) * xi * p1 - (j - 1) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        if (xi == T(0)) { // center node of an odd rule is exact
          dp = n * (xi * p1 - p0) / (xi * xi - 1);
          break;
        }
        dp = n * (xi * p1 - p0) / (xi * xi - 1);
        T step = p1 / dp;
        xi -= step;
        using std::abs;
        if (abs(step) <= abs(xi) * std::numeric_limits<T>::epsilon() * 8)
          break;
      }
      x[size_t(i)] = xi;
      w[size_t(i)] = 2 / ((1 - xi * xi) * dp * dp);
    }
    return cache.emplace(order, std::make_pair(std::move(x), std::move(w)))
        .first->second;
  }
}

// One composite pass: fixed per-panel order over [0, 1] in parameter space.
// Sample(t) must return integrand(gamma(t)) * gamma'(t). Also accumulates
// the L1 mass of the sampled integrand, which bounds the roundoff the
// summation can possibly achieve in the working scalar.
template <class T, class Sample>
std::pair<complex_of<T>, T> composite_pass_t(int panels, int order,
                                             const Sample& sample) {
  const auto& [xs, ws] = gauss_legendre_t<T>(order);
  complex_of<T> total(0, 0);
  T l1(0);
  for (int p = 0; p < panels; ++p) {
    T a = T(p) / panels, b = T(p + 1) / panels;
    T mid = (a + b) / 2, half = (b - a) / 2;
    complex_of<T> acc(0, 0);
    T acc1(0);
    for (size_t i = 0; i < xs.size(); ++i) {
      complex_of<T> v = sample(mid + half * xs[i]);
      acc += ws[i] * v;
      using std::abs;
      acc1 += ws[i] * abs(v);
    }
    total += half * acc;
    l1 += half * acc1;
  }
  return {total, l1};
}

// Doubling driver shared by the contour and real-interval integrals. Two
// successive refinements must agree to tol relative to max(1, |value|);
// when the integrand carries large cancelling mass, agreement below the
// roundoff floor is accepted instead, since no refinement can beat it. The
// floor is (64 eps + noise) times the L1 mass: eps models the summation
// roundoff in the working scalar, and `noise` is the caller's bound on the
// relative error of individual integrand evaluations (recurrence-based
// integrands are not exact to eps, and their evaluation error scales with
// the integrand magnitude, not with the integral's value).
template <class T, class Sample>
complex_of<T> refine_t(int panels, int base_order, int max_order, double tol,
                       double noise, const Sample& sample) {
  int order = base_order;
  auto pass = composite_pass_t<T>(panels, order, sample);
  complex_of<T> prev = pass.first;
  while (true) {
    order *= 2;
    if (order > max_order)
      throw std::runtime_error(
          "quadrature did not converge within the refinement budget");
    auto [cur, l1] = composite_pass_t<T>(panels, order, sample);
    using std::abs;
    T floor = (64 * std::numeric_limits<T>::epsilon() + T(noise)) * l1;
    T scale = abs(cur);
    if (scale < T(1)) scale = T(1);
    T bound = T(tol) * scale;
    if (bound < floor) bound = floor;
    if (abs(cur - prev) <= bound) return cur;
    prev = cur;
  }
}

template <class Sample>
std::pair<std::complex<double>, double>
composite_pass(int panels, int order, const Sample& sample) {
  return composite_pass_t<double>(panels, order, sample);
}

template <class Sample>
std::complex<double> refine(int panels, int base_order, int max_order,
                            double tol, double noise, const Sample& sample) {
  return refine_t<double>(panels, base_order, max_order, tol, noise, sample);
}

} // namespace quad_detail

struct QuadratureSettings {
  int panels = 8;
  int base_order = 32;
  int max_order = 512; // per-panel order ceiling before giving up
  double tol = 1e-12;  // relative to max(1, |value|)
  double noise = 0.0;  // relative per-evaluation error of the integrand
};

enum class ContourKind { ARC, CHORD };

// A parameterized contour from w1 to w2; t runs over [0, 1].
struct ContourSpec {
  ContourKind kind = ContourKind::ARC;
  int l = 0;
  double lambda = 0.0;
  std::complex<double> w1, w2;
  double theta1 = 0.0, theta2 = 0.0; // arc angles at t = 0 and t = 1
  QuadratureSettings quad;

  std::complex<double> point(double t) const {
    if (kind == ContourKind::ARC)
      return std::polar(1.0, theta1 + t * (theta2 - theta1));
    return w1 + t * (w2 - w1);
  }

  std::complex<double> tangent(double t) const {
    if (kind == ContourKind::ARC) {
      std::complex<double> z = point(t);
      return std::complex<double>(0.0, 1.0) * z * (theta2 - theta1);
    }
    return w2 - w1;
  }
};

template <class R>
ContourSpec make_contour(const HeckeContext<R>& ctx, ContourKind kind,
                         QuadratureSettings quad = {}) {
  ContourSpec spec;
  spec.kind = kind;
  spec.l = ctx.order;
  spec.lambda = to_double(ctx.lambda);
  spec.w1 = to_cdouble(ctx.w1);
  spec.w2 = to_cdouble(ctx.w2);
  spec.theta1 = M_PI - M_PI / ctx.order;
  spec.theta2 = M_PI / ctx.order;
  spec.quad = quad;
  return spec;
}

// Contour samples recomputed from the group order in the scalar T, so the
// wide-precision path is not throttled by double-rounded geometry.
template <class T>
complex_of<T> contour_point_t(const ContourSpec& spec, const T& t) {
  T pi = const_pi<T>();
  using std::cos;
  using std::sin;
  if (spec.kind == ContourKind::ARC) {
    T th1 = pi - pi / spec.l, th2 = pi / spec.l;
    T th = th1 + t * (th2 - th1);
    return complex_of<T>(cos(th), sin(th));
  }
  T c = cos(pi / spec.l), s = sin(pi / spec.l);
  return complex_of<T>(-c + t * (2 * c), s);
}

template <class T>
complex_of<T> contour_tangent_t(const ContourSpec& spec, const T& t) {
  T pi = const_pi<T>();
  using std::cos;
  if (spec.kind == ContourKind::ARC) {
    T th1 = pi - pi / spec.l, th2 = pi / spec.l;
    return complex_of<T>(0, 1) * contour_point_t<T>(spec, t) * (th2 - th1);
  }
  return complex_of<T>(2 * cos(pi / spec.l), 0);
}

// Integral of f along the contour (f takes the point z, the parameterization
// jacobian is applied internally). Throws std::runtime_error if successive
// refinements never agree to spec.quad.tol.
template <class T, class F>
complex_of<T> contour_integral_t(const ContourSpec& spec, F&& f) {
  auto sample = [&](const T& t) {
    return f(contour_point_t<T>(spec, t)) * contour_tangent_t<T>(spec, t);
  };
  return quad_detail::refine_t<T>(spec.quad.panels, spec.quad.base_order,
                                  spec.quad.max_order, spec.quad.tol,
                                  spec.quad.noise, sample);
}

template <class F>
std::complex<double> contour_integral(const ContourSpec& spec, F&& f) {
  auto sample = [&](double t) { return f(spec.point(t)) * spec.tangent(t); };
  return quad_detail::refine(spec.quad.panels, spec.quad.base_order,
                             spec.quad.max_order, spec.quad.tol,
                             spec.quad.noise, sample);
}

// Integral of f over the real interval [a, b] with the same refinement
// scheme; f may return a complex value.
template <class F>
std::complex<double> line_integral(F&& f, double a, double b,
                                   QuadratureSettings quad = {}) {
  auto sample = [&](double t) {
    return std::complex<double>(f(a + t * (b - a))) * (b - a);
  };
  return quad_detail::refine(quad.panels, quad.base_order, quad.max_order,
                             quad.tol, quad.noise, sample);
}

// Euclidean distance from tau to the contour (used to refuse evaluation
// points so close that the kernel denominator degenerates).
inline double contour_distance(const ContourSpec& spec,
                               std::complex<double> tau) {
  if (spec.kind == ContourKind::ARC) {
    double ang = std::arg(tau);
    if (ang >= spec.theta2 && ang <= spec.theta1)
      return std::abs(std::abs(tau) - 1.0);
    return std::min(std::abs(tau - spec.w1), std::abs(tau - spec.w2));
  }
  std::complex<double> dir = spec.w2 - spec.w1;
  double len2 = std::norm(dir);
  double t = ((tau - spec.w1) * std::conj(dir)).real() / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(tau - (spec.w1 + t * dir));
}

} // namespace heckelab
