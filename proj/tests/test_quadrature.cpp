#include "heckelab/quadrature.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

using namespace heckelab;
using cd = std::complex<double>;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("gauss-legendre nodes and weights are sane") {
  for (int order : {4, 32, 33, 64}) {
    const auto& [x, w] = quad_detail::gauss_legendre(order);
    REQUIRE(int(x.size()) == order);
    double wsum = 0.0;
    for (double wi : w) {
      REQUIRE(wi > 0.0);
      wsum += wi;
    }
    CHECK(std::abs(wsum - 2.0) < 1e-14);
    for (size_t i = 0; i < x.size(); ++i) {
      CHECK(x[i] > -1.0);
      CHECK(x[i] < 1.0);
      if (i > 0) CHECK(x[i] > x[i - 1]);
      // symmetric rule
      CHECK(std::abs(x[i] + x[x.size() - 1 - i]) < 1e-15);
    }
  }

  // order-n rule integrates degree 2n-1 exactly: x^62 with the 32-point rule
  const auto& [x, w] = quad_detail::gauss_legendre(32);
  double v = 0.0;
  for (size_t i = 0; i < x.size(); ++i) v += w[i] * std::pow(x[i], 62);
  CHECK(std::abs(v - 2.0 / 63.0) < 1e-15);
}

TEST_CASE("contour endpoints coincide with the corner points") {
  auto ctx = make_context<double>(6);
  for (auto kind : {ContourKind::ARC, ContourKind::CHORD}) {
    auto spec = make_contour(ctx, kind);
    CHECK(std::abs(spec.point(0.0) - ctx.w1) < 1e-14);
    CHECK(std::abs(spec.point(1.0) - ctx.w2) < 1e-14);
  }
  // corner height is sin(pi/6) = 1/2 exactly
  CHECK(std::abs(ctx.w1.imag() - 0.5) < 1e-15);
  CHECK(std::abs(ctx.w2.imag() - 0.5) < 1e-15);
}

TEST_CASE("polynomial integrands match their antiderivatives") {
  auto ctx = make_context<double>(6);
  cd w1 = ctx.w1, w2 = ctx.w2;
  for (auto kind : {ContourKind::ARC, ContourKind::CHORD}) {
    auto spec = make_contour(ctx, kind);

    cd one = contour_integral(spec, [](cd) { return cd(1.0, 0.0); });
    CHECK(std::abs(one - (w2 - w1)) < 1e-12);
    CHECK(std::abs(one - std::sqrt(3.0)) < 1e-12);

    // antiderivative z^2/2; the symmetric endpoints w1 = -conj(w2) make the
    // value purely imaginary: i sin(2 pi / l)
    cd lin = contour_integral(spec, [](cd z) { return z; });
    cd expect = 0.5 * (w2 * w2 - w1 * w1);
    CHECK(std::abs(lin - expect) < 1e-12);
    CHECK(std::abs(expect - cd(0.0, std::sin(2.0 * kPi / 6.0))) < 1e-15);

    cd cub = contour_integral(spec, [](cd z) { return z * z * z; });
    cd quart1 = 0.25 * w1 * w1 * w1 * w1, quart2 = 0.25 * w2 * w2 * w2 * w2;
    CHECK(std::abs(cub - (quart2 - quart1)) < 1e-12);
  }
}

TEST_CASE("reciprocal integrand measures the subtended angle") {
  auto ctx = make_context<double>(6);
  cd expect(0.0, -(kPi - 2.0 * kPi / 6.0)); // -2 pi i / 3 for l = 6
  // both contours avoid the origin and are homotopic in the upper half
  // plane, so the values agree with the arc-angle formula and each other
  cd on_arc = contour_integral(make_contour(ctx, ContourKind::ARC),
                               [](cd z) { return 1.0 / z; });
  cd on_chord = contour_integral(make_contour(ctx, ContourKind::CHORD),
                                 [](cd z) { return 1.0 / z; });
  CHECK(std::abs(on_arc - expect) < 1e-12);
  CHECK(std::abs(on_chord - expect) < 1e-12);
  CHECK(std::abs(on_arc - on_chord) < 1e-12);
}

TEST_CASE("entire integrands are contour independent") {
  auto ctx8 = make_context<double>(6);
  auto arc = make_contour(ctx8, ContourKind::ARC);
  auto chord = make_contour(ctx8, ContourKind::CHORD);

  auto check_same = [&](auto f) {
    cd a = contour_integral(arc, f);
    cd c = contour_integral(chord, f);
    CHECK(std::abs(a - c) <= 1e-10 * std::max(1.0, std::abs(a)));
  };
  check_same([](cd z) { return std::exp(z); });
  check_same([](cd z) { return std::cos(z); });
  check_same([](cd z) { return z * z * z + 2.0 * z; });
  check_same([](cd z) { return std::exp(cd(0.0, 4.0) * z * z); });
}

TEST_CASE("oscillatory integrand still converges under refinement") {
  auto ctx = make_context<double>(6);
  auto spec = make_contour(ctx, ContourKind::ARC);
  cd iw(0.0, 30.0);
  cd got = contour_integral(spec, [&](cd z) { return std::exp(iw * z); });
  cd expect = (std::exp(iw * ctx.w2) - std::exp(iw * ctx.w1)) / iw;
  CHECK(std::abs(got - expect) < 1e-10);
}

TEST_CASE("an unreachable tolerance exhausts the refinement budget") {
  auto ctx = make_context<double>(6);
  QuadratureSettings q;
  q.tol = 0.0;   // only the roundoff floor could ever stop refinement
  q.panels = 3;  // kink lands strictly inside the middle panel
  auto spec = make_contour(ctx, ContourKind::ARC, q);
  // |Re z|^(1/2) has a derivative singularity where the arc crosses the
  // imaginary axis; per-panel Gauss rules then converge only algebraically,
  // so successive doublings keep differing above the roundoff floor.
  CHECK_THROWS_AS(
      contour_integral(spec,
                       [](cd z) { return std::sqrt(std::abs(z.real())); }),
      std::runtime_error);
}

TEST_CASE("real-interval integrals share the refinement engine") {
  // int_0^pi sin = 2
  cd s = line_integral([](double t) { return std::sin(t); }, 0.0, kPi);
  CHECK(std::abs(s - 2.0) < 1e-12);
  // complex-valued integrand: int_0^1 e^{2 pi i t} dt = 0
  cd e = line_integral(
      [](double t) { return std::exp(cd(0.0, 2.0 * kPi * t)); }, 0.0, 1.0);
  CHECK(std::abs(e) < 1e-12);
}

TEST_CASE("distance to the contours") {
  auto ctx = make_context<double>(6);
  auto arc = make_contour(ctx, ContourKind::ARC);
  auto chord = make_contour(ctx, ContourKind::CHORD);

  CHECK(contour_distance(arc, cd(0.0, 1.0)) < 1e-15);        // on the arc
  CHECK(std::abs(contour_distance(arc, cd(0.0, 1.2)) - 0.2) < 1e-14);
  CHECK(std::abs(contour_distance(arc, cd(0.0, 0.9)) - 0.1) < 1e-14);
  // beyond the right corner angle: nearest point is the corner itself
  cd outside = std::polar(2.0, kPi / 12.0);
  CHECK(std::abs(contour_distance(arc, outside) - std::abs(outside - ctx.w2)) <
        1e-14);

  CHECK(contour_distance(chord, cd(0.3, 0.5)) < 1e-15);      // on the chord
  CHECK(std::abs(contour_distance(chord, cd(0.0, 1.0)) - 0.5) < 1e-14);
  cd past(ctx.w2.real() + 0.1, 0.5); // past the right endpoint
  CHECK(std::abs(contour_distance(chord, past) - 0.1) < 1e-14);
}
