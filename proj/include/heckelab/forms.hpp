#pragma once
// Odd-weight form spaces for the (2, l, infinity) triangle groups:
//  - dimension formula for the two multiplier signs,
//  - triangle-generator forms f_w, f_i as fractional-power combinations of
//    the Hauptmodul with unit leading coefficients,
//  - canonical echelon bases f_{i,k} = q^i + O(q^d) of the holomorphic
//    spaces, built from monomials f_w^a f_i^b and row reduction,
//  - the weight-1 weakly holomorphic series with expansion q^{-1} + O(1),
//  - the interpolation family phi_n = q^{-n} + O(q^{-d+1}) via a Faber-style
//    multiply-by-J recurrence from the seed phi_d * f_{d-1} = -(lambda/2 pi i) J',
//  - duality pairing and the generating-kernel comparison.
// All series are constructed internally in the 50-digit engine (the q^{-1}
// coefficient recurrences amplify roundoff) and downcast to the requested
// scalar at the API boundary. Double-precision results are disk-cached.

#include "heckelab/cache.hpp"
#include "heckelab/hauptmodul.hpp"
#include "heckelab/linalg.hpp"

#include <numeric>
#include <optional>

namespace heckelab {

// Weight / multiplier / pole bookkeeping that is multiplicative under
// series multiplication. Weights are exact rationals.
struct FormLabel {
  int weight_num = 0;
  int weight_den = 1;
  int multiplier = 1;
  int pole_order = 0; // pole order at the cusp (= -lead exponent)
};

inline FormLabel normalized(FormLabel f) {
  int g = std::gcd(std::abs(f.weight_num), std::abs(f.weight_den));
  if (g > 1) {
    f.weight_num /= g;
    f.weight_den /= g;
  }
  if (f.weight_den < 0) {
    f.weight_den = -f.weight_den;
    f.weight_num = -f.weight_num;
  }
  return f;
}

inline FormLabel label_mul(const FormLabel& a, const FormLabel& b) {
  return normalized({a.weight_num * b.weight_den + b.weight_num * a.weight_den,
                     a.weight_den * b.weight_den, a.multiplier * b.multiplier,
                     a.pole_order + b.pole_order});
}

inline FormLabel label_div(const FormLabel& a, const FormLabel& b) {
  return normalized({a.weight_num * b.weight_den - b.weight_num * a.weight_den,
                     a.weight_den * b.weight_den, a.multiplier * b.multiplier,
                     a.pole_order - b.pole_order});
}

inline FormLabel label_pow(FormLabel a, int e) {
  FormLabel out{0, 1, e % 2 == 0 ? 1 : a.multiplier, a.pole_order * e};
  out.weight_num = a.weight_num * e;
  out.weight_den = a.weight_den;
  return normalized(out);
}

// Labels of the library's named objects. The fractional-power constructions
// fix the multiplier signs by the divisor bookkeeping: f_w carries +1,
// f_i carries -1, and J' carries -1.
template <class R> FormLabel f_w_label(const HeckeContext<R>& ctx) {
  return normalized({4, ctx.order - 2, +1, 0});
}
template <class R> FormLabel f_i_label(const HeckeContext<R>& ctx) {
  return normalized({2 * ctx.order, ctx.order - 2, -1, 0});
}
template <class R> FormLabel j_prime_label(const HeckeContext<R>&) {
  return {2, 1, -1, 1};
}

// dim M_{2k+1}^{multiplier}: with m = (2k+multiplier)(l-2)/4, the space is
// trivial for m < 1 and has dimension 1 + floor((m+(multiplier-1)/2)/l)
// otherwise.
template <class R>
int dim_odd_forms(const HeckeContext<R>& ctx, int k, int multiplier) {
  if (k < 0) throw std::invalid_argument("negative weight index");
  if (multiplier != 1 && multiplier != -1)
    throw std::invalid_argument("multiplier must be +1 or -1");
  int l = ctx.order;
  int m = (2 * k + multiplier) * (l - 2) / 4;
  if (m < 1) return 0;
  return 1 + (m + (multiplier - 1) / 2) / l;
}

namespace forms_detail {

using Series = LaurentSeries<real_mp>;

inline Series pow_series(const Series& a, int e) {
  if (e < 0) throw std::invalid_argument("negative series power");
  Series out = a;
  if (e == 0) {
    out.lead = 0;
    out.coeffs.assign(out.coeffs.size(), complex_mp(0));
    out.coeffs[0] = complex_mp(1);
    return out;
  }
  for (int i = 1; i < e; ++i) out = series_ops::mul(out, a);
  return out;
}

inline Series unit_normalized(Series s) {
  return s.scaled(complex_mp(1) / s.coeffs.at(0));
}

inline Series trim_to(const Series& s, int N, const char* what) {
  if (s.window_end() <= N) // need the coefficient at exponent N itself
    throw std::invalid_argument(std::string("insufficient truncation for ") +
                                what);
  Series out = s;
  out.coeffs.resize(size_t(N - s.lead + 1));
  return out;
}

// Everything derived from J for one (l, k, eps), in the 50-digit engine.
// phis[j] holds phi_{d+j}; the list grows on demand.
struct Engine {
  int l = 0, k = 0, eps = 0;
  int d = 0;
  static constexpr int NJ = 80; // J window; see hauptmodul.hpp for limits
  Series J, DJ;
  Series fw, fi;
  std::vector<Series> fbasis;
  Series fseed; // f_{d-1}, or the q^{-1} special series when d = 0
  std::vector<Series> phis;
  // steps[j] records the clearing coefficients (m, c) used when building
  // phis[j+1] = J * phis[j] - sum c * phi_m. Replaying this recurrence at a
  // point z rebuilds phi_n(z) from J(z) and phi_d(z) alone, which stays
  // accurate near the boundary arc where the high-index q-series themselves
  // lose all significance (their coefficients grow like exp(c*sqrt(n*m))).
  std::vector<std::vector<std::pair<int, complex_mp>>> steps;

  Engine(int l_, int k_, int eps_) : l(l_), k(k_), eps(eps_) {
    auto ctx = make_context<real_mp>(l);
    J = hauptmodul_J(ctx, NJ);
    real_mp rho = hauptmodul_rho<real_mp>(ctx, NJ);
    DJ = series_ops::qdq(J);
    Series Jm = J;
    Jm.coeffs.at(1) -= complex_mp(rho); // exponent 0 sits at index 1

    fw = unit_normalized(series_ops::fracpow(
        series_ops::div(series_ops::mul(DJ, DJ), series_ops::mul(J, Jm)), 1,
        l - 2));
    fi = unit_normalized(series_ops::fracpow(
        series_ops::div(pow_series(DJ, l),
                        series_ops::mul(pow_series(J, l - 1), Jm)),
        1, l - 2));

    d = dim_odd_forms(ctx, k, -eps);
    build_fbasis();
    if (d > 0) {
      fseed = fbasis.at(size_t(d - 1));
    } else {
      fseed = series_ops::div(DJ, pow_series(fw, (l - 2) / 4)).scaled(
          complex_mp(-1));
    }
    phis.push_back(
        unit_normalized(series_ops::div(DJ, fseed).scaled(complex_mp(-1))));
  }

  // Span of monomials f_w^a f_i^b with (4a+2lb)/(l-2) = 2k+1 and multiplier
  // (+1)^a(-1)^b = -eps, row-reduced so fbasis[i] = q^i + O(q^d). The
  // monomial count and the reduction rank must both equal the dimension
  // formula; a mismatch aborts (it would mean the construction is wrong,
  // not the input).
  void build_fbasis() {
    if (d == 0) return;
    int S = (2 * k + 1) * (l - 2);
    std::vector<std::pair<int, int>> powers;
    for (int a = 0; 4 * a <= S; ++a) {
      int rem = S - 4 * a;
      if (rem % (2 * l) != 0) continue;
      int b = rem / (2 * l);
      int mult = b % 2 == 0 ? 1 : -1;
      if (mult == -eps) powers.emplace_back(a, b);
    }
    if (int(powers.size()) != d)
      throw std::runtime_error("monomial count disagrees with the dimension");
    std::vector<Series> mono;
    int wend = NJ + 1; // last exponent we can trust across all monomials
    for (auto [a, b] : powers) {
      mono.push_back(series_ops::mul(pow_series(fw, a), pow_series(fi, b)));
      wend = std::min(wend, mono.back().window_end() - 1);
    }
    linalg::Matrix<complex_mp> m(d, wend + 1);
    for (int i = 0; i < d; ++i)
      for (int e = 0; e <= wend; ++e) m(i, e) = mono[size_t(i)].coefficient(e);
    auto ech = linalg::reduced_row_echelon(m, 1e-25);
    bool pivots_ok = ech.rank == d;
    for (int i = 0; i < ech.rank && pivots_ok; ++i)
      pivots_ok = ech.pivot_cols[size_t(i)] == i;
    if (!pivots_ok)
      throw std::runtime_error("basis reduction rank disagrees with the "
                               "dimension");
    for (int i = 0; i < d; ++i) {
      Series f;
      f.lead = i;
      f.lambda = J.lambda;
      f.group_order = l;
      for (int e = i; e <= wend; ++e) f.coeffs.push_back(m(i, e));
      fbasis.push_back(std::move(f));
    }
  }

  // Faber-style step: multiply the top element by J, then clear exponents
  // -(n-1) .. -d with previously built phis and renormalize the lead.
  void ensure_phi(int n) {
    while (d + int(phis.size()) <= n) {
      Series p = series_ops::mul(J, phis.back());
      int pn = -p.lead; // index of the element being built
      std::vector<std::pair<int, complex_mp>> used;
      for (int m = pn - 1; m >= d; --m) {
        complex_mp c = p.coefficient(-m);
        if (abs(c) > 0) {
          p = series_ops::sub(p, phis[size_t(m - d)].scaled(c));
          used.emplace_back(m, c);
        }
      }
      // The lead coefficient of J * phi is exactly 1*1 and clearing never
      // touches it, so the normalization below is a no-op and the recorded
      // step reproduces the new element exactly.
      phis.push_back(unit_normalized(p));
      steps.push_back(std::move(used));
    }
  }

  const Series& phi(int n) {
    if (n < d) throw std::invalid_argument("phi index below the gap bound");
    if (n > 60)
      throw std::invalid_argument("phi index beyond the supported window");
    ensure_phi(n);
    return phis[size_t(n - d)];
  }
};

inline Engine& engine(int l, int k, int eps) {
  static std::map<std::tuple<int, int, int>, std::unique_ptr<Engine>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(l, k, eps);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<Engine>(l, k, eps)).first;
  return *it->second;
}

inline std::mutex& engine_mutex() {
  static std::mutex mu;
  return mu;
}

template <class R> const char* precision_mode() {
  return std::is_same_v<R, real_mp> ? "dd" : "double";
}

} // namespace forms_detail

// The canonical basis of M_{2k+1}^{-eps}: d series with f_i = q^i + O(q^d),
// coefficients through exponent N.
template <class R>
std::vector<LaurentSeries<R>> canonical_f_basis(const HeckeContext<R>& ctx,
                                                int k, int eps, int N) {
  using namespace forms_detail;
  int d = dim_odd_forms(ctx, k, -eps);
  if (d == 0)
    throw std::invalid_argument(
        "dimension zero: use special_f_minus_one instead");
  std::lock_guard<std::mutex> lock(engine_mutex());
  Engine& eng = engine(ctx.order, k, eps);
  std::vector<LaurentSeries<R>> out;
  for (const auto& f : eng.fbasis)
    out.push_back(downcast_series<R>(trim_to(f, N, "canonical_f_basis")));
  return out;
}

// The weight-1 series with expansion q^{-1} + O(1):
// -(lambda/2 pi i) J' / f_w^{(l-2)/4}, leading coefficient 1.
template <class R>
LaurentSeries<R> special_f_minus_one(const HeckeContext<R>& ctx, int N) {
  using namespace forms_detail;
  std::lock_guard<std::mutex> lock(engine_mutex());
  Engine& eng = engine(ctx.order, 0, +1); // the d = 0 family
  return downcast_series<R>(trim_to(eng.fseed, N, "special_f_minus_one"));
}

// phi_{n,k}^eps = q^{-n} + O(q^{-d+1}), coefficients through exponent N.
template <class R>
LaurentSeries<R> phi_basis(const HeckeContext<R>& ctx, int n, int k, int eps,
                           int N) {
  using namespace forms_detail;
  SeriesCacheKey key{"phi", ctx.order, k, eps, n, N, precision_mode<R>()};
  if constexpr (std::is_same_v<R, double>) {
    if (auto hit = cache_load_series(key)) return *hit;
  }
  LaurentSeries<R> out;
  {
    std::lock_guard<std::mutex> lock(engine_mutex());
    Engine& eng = engine(ctx.order, k, eps);
    out = downcast_series<R>(trim_to(eng.phi(n), N, "phi_basis"));
  }
  if constexpr (std::is_same_v<R, double>) cache_store_series(key, out);
  return out;
}

// Pointwise evaluator for the interpolation family. Direct summation of the
// phi_n q-series loses accuracy near the boundary arc once n is moderate:
// the coefficients grow like exp(c*sqrt(n*m)) in the exponent m, so at
// |q| = exp(-2 pi sin(pi/l)/lambda) the partial sums need far more terms
// than any fixed window provides and cancel catastrophically. Replaying the
// multiply-by-J recurrence at the point instead only ever evaluates the J
// and phi_d series (both comfortably convergent on the arc) and combines
// them through mildly conditioned linear steps, so even double precision
// keeps ~12 significant digits for n in the working range.
template <class R> struct PhiEvaluator {
  int l = 0, k = 0, eps = 0, d = 0, n_max = 0;
  LaurentSeries<R> J, phi_d;
  std::vector<std::vector<std::pair<int, complex_of<R>>>> steps;

  // phi_m(z) for m = d .. n_hi, indexed by m - d.
  std::vector<complex_of<R>> values(const complex_of<R>& z, int n_hi) const {
    if (n_hi < d || n_hi > n_max)
      throw std::invalid_argument("phi evaluator: index out of range");
    complex_of<R> Jz = series_ops::eval_at(J, z);
    std::vector<complex_of<R>> v;
    v.reserve(size_t(n_hi - d + 1));
    v.push_back(series_ops::eval_at(phi_d, z));
    for (int j = 0; d + j < n_hi; ++j) {
      complex_of<R> next = Jz * v.back();
      for (const auto& [m, c] : steps.at(size_t(j)))
        next -= c * v.at(size_t(m - d));
      v.push_back(next);
    }
    return v;
  }

  complex_of<R> value(const complex_of<R>& z, int n) const {
    return values(z, n).back();
  }
};

template <class R>
PhiEvaluator<R> phi_evaluator(const HeckeContext<R>& ctx, int n, int k,
                              int eps) {
  using namespace forms_detail;
  std::lock_guard<std::mutex> lock(engine_mutex());
  Engine& eng = engine(ctx.order, k, eps);
  eng.phi(n); // validates the range and materializes the recurrence steps
  PhiEvaluator<R> ev;
  ev.l = ctx.order;
  ev.k = k;
  ev.eps = eps;
  ev.d = eng.d;
  ev.n_max = n;
  ev.J = downcast_series<R>(eng.J);
  ev.phi_d = downcast_series<R>(eng.phis.front());
  for (int j = 0; eng.d + j < n; ++j) {
    std::vector<std::pair<int, complex_of<R>>> row;
    for (const auto& [m, c] : eng.steps.at(size_t(j))) {
      if constexpr (std::is_same_v<R, real_mp>)
        row.emplace_back(m, c);
      else
        row.emplace_back(m, to_cdouble(c));
    }
    ev.steps.push_back(std::move(row));
  }
  return ev;
}

// Sum of a_n b_{-n} over the exponent range both windows cover. Errors if
// either series is not known far enough to cover the other's principal part.
template <class R>
complex_of<R> duality_pairing(const LaurentSeries<R>& f,
                              const LaurentSeries<R>& phi) {
  if (!f.compatible(phi))
    throw std::invalid_argument("pairing of incompatible series");
  // f must be known through exponent -phi.lead and phi through -f.lead
  // (window_end is one past the last stored exponent).
  if (f.window_end() <= -phi.lead || phi.window_end() <= -f.lead)
    throw std::invalid_argument("insufficient truncation overlap");
  complex_of<R> s(0);
  int lo = std::max(f.lead, -(phi.window_end() - 1));
  int hi = std::min(f.window_end() - 1, -phi.lead);
  for (int n = lo; n <= hi; ++n) s += f.coefficient(n) * phi.coefficient(-n);
  return s;
}

template <class R> struct KernelComparison {
  complex_of<R> lhs; // truncated generating series sum_{n>=d} phi_n(z) q_tau^n
  complex_of<R> rhs; // phi_d(z) f_{d-1}(tau) / (J(tau) - J(z))
};

template <class R>
KernelComparison<R> kernel_check(const HeckeContext<R>& ctx, int k, int eps,
                                 complex_of<R> z, complex_of<R> tau,
                                 int N_sum) {
  using namespace forms_detail;
  if (!(tau.imag() > z.imag()))
    throw std::invalid_argument(
        "generating series requires Im(tau) > Im(z)");
  std::lock_guard<std::mutex> lock(engine_mutex());
  Engine& eng = engine(ctx.order, k, eps);
  eng.phi(std::max(N_sum, eng.d)); // extend the family
  auto Jz = series_ops::eval_at(downcast_series<R>(eng.J), z);
  auto Jtau = series_ops::eval_at(downcast_series<R>(eng.J), tau);
  using std::abs;
  if (!(abs(Jtau - Jz) > R(1e-10)))
    throw std::invalid_argument("kernel pole: J(tau) too close to J(z)");
  KernelComparison<R> out;
  auto phi_d = downcast_series<R>(eng.phis.front());
  auto fs = downcast_series<R>(eng.fseed);
  out.rhs = series_ops::eval_at(phi_d, z) * series_ops::eval_at(fs, tau) /
            (Jtau - Jz);
  out.lhs = complex_of<R>(0);
  const R two_pi = 2 * const_pi<R>();
  for (int n = eng.d; n <= N_sum; ++n) {
    complex_of<R> q_tau_n =
        exp(complex_of<R>(0, 1) * two_pi * tau * R(n) / ctx.lambda);
    out.lhs += series_ops::eval_at(downcast_series<R>(eng.phis[size_t(n - eng.d)]),
                                   z) *
               q_tau_n;
  }
  return out;
}

} // namespace heckelab
