#pragma once
// Finite combinations of normalized Gaussians G_k(tau, x) =
// e^{i pi tau |x|^2} / (i pi tau)^k, closed under the odd-weight slash
// action and the 2D Fourier transform. All identities of the eigenfunction
// construction become finite complex arithmetic on these term lists.
//
// Representation note: a term stores the *evaluated* modular point, so
// applying a generator step to a concrete term list left-multiplies the
// group word. slash_word therefore consumes letters right-to-left; the
// stored point of G | w ends up at the Moebius image w(tau) of the ordered
// matrix product, matching expand_word.

#include "heckelab/hecke.hpp"
#include <algorithm>
#include <string>
#include <sstream>

namespace heckelab {

template <class R> struct GaussianTerm {
  complex_of<R> coeff;
  complex_of<R> tau; // Im(tau) > 0
  int k = 0;
};

template <class R> struct GaussianCombination {
  std::vector<GaussianTerm<R>> terms;
  int k = 0;   // shared Gaussian index; slash weight is 2k+1
  int eps = +1; // Fourier-eigenvalue metadata

  int weight() const { return 2 * k + 1; }
};

namespace detail {

template <class C> C ipow(C base, int n) {
  if (n < 0) return C(1) / ipow(base, -n);
  C out(1);
  while (n--) out = out * base;
  return out;
}

// Odd-weight inversion cocycle: multiplier * (i/tau)^weight. Integer powers
// only, so there is no branch ambiguity anywhere in the chain.
template <class R>
complex_of<R> inversion_factor(const complex_of<R>& tau, int weight,
                               int multiplier) {
  complex_of<R> w = complex_of<R>(R(0), R(1)) / tau;
  return R(multiplier) * ipow(w, weight);
}

} // namespace detail

// One generator step on a single term at the given odd weight. The stored
// point moves by the letter's Moebius action; only the inversion carries a
// cocycle factor (and the multiplier).
template <class R>
GaussianTerm<R> slash_step(const HeckeContext<R>& ctx, GaussianTerm<R> t,
                           Letter L, int weight, int multiplier) {
  switch (L) {
    case Letter::S:
      t.coeff = t.coeff * detail::inversion_factor<R>(t.tau, weight, multiplier);
      t.tau = complex_of<R>(R(-1), R(0)) / t.tau;
      return t;
    case Letter::T:
      t.tau = t.tau + ctx.lambda;
      return t;
    case Letter::Tinv:
      t.tau = t.tau - ctx.lambda;
      return t;
    case Letter::V: // V(tau) = lambda - 1/tau: inversion step, then shift
      t = slash_step(ctx, t, Letter::S, weight, multiplier);
      return slash_step(ctx, t, Letter::T, weight, multiplier);
    case Letter::Vinv: // V^{-1}(tau) = -1/(tau - lambda)
      t = slash_step(ctx, t, Letter::Tinv, weight, multiplier);
      return slash_step(ctx, t, Letter::S, weight, multiplier);
  }
  throw std::logic_error("unreachable");
}

// Slash a term by a whole word (ordered matrix product of its letters):
// letters are consumed right-to-left so that the final stored point is the
// Moebius image under the full product.
template <class R>
GaussianTerm<R> slash_word(const HeckeContext<R>& ctx, GaussianTerm<R> t,
                           const GroupWord& w, int weight, int multiplier) {
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
    t = slash_step(ctx, t, *it, weight, multiplier);
  return t;
}

// Merge terms whose (tau, k) agree within 1e-13 to limit term blow-up.
template <class R>
void coalesce(GaussianCombination<R>& g, double tol = 1e-13) {
  std::vector<GaussianTerm<R>> out;
  for (const auto& t : g.terms) {
    bool merged = false;
    for (auto& o : out) {
      using std::abs;
      double scale = std::max(1.0, to_double(abs(o.tau)));
      if (o.k == t.k && to_double(abs(o.tau - t.tau)) <= tol * scale) {
        o.coeff = o.coeff + t.coeff;
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(t);
  }
  g.terms = std::move(out);
}

// Slash by an integer combination of words at an explicit odd weight.
template <class R>
GaussianCombination<R> slash_apply_weight(const HeckeContext<R>& ctx,
                                          const GaussianCombination<R>& g,
                                          const GroupAlgebraElement& e,
                                          int weight, int multiplier) {
  GaussianCombination<R> out;
  out.k = g.k;
  out.eps = g.eps;
  for (const auto& [c, w] : e.terms)
    for (auto t : g.terms) {
      t = slash_word(ctx, t, w, weight, multiplier);
      t.coeff = t.coeff * R(c);
      if (!(t.tau.imag() > R(0)))
        throw std::runtime_error("slash left the upper half-plane");
      out.terms.push_back(t);
    }
  coalesce(out);
  return out;
}

// Slash at the combination's own weight 2k+1.
template <class R>
GaussianCombination<R> slash_apply(const HeckeContext<R>& ctx,
                                   const GaussianCombination<R>& g,
                                   const GroupAlgebraElement& e,
                                   int multiplier) {
  return slash_apply_weight(ctx, g, e, g.weight(), multiplier);
}

// Termwise 2D Fourier transform: (c, tau, k) -> (c (i/tau)^{2k+1}, -1/tau, k).
// Applying it twice is the identity term-by-term.
template <class R>
GaussianCombination<R> fourier_transform(const GaussianCombination<R>& g) {
  GaussianCombination<R> out = g;
  for (auto& t : out.terms) {
    t.coeff = t.coeff * detail::inversion_factor<R>(t.tau, 2 * t.k + 1, +1);
    t.tau = complex_of<R>(R(-1), R(0)) / t.tau;
  }
  return out;
}

// Radial evaluation: order-th derivative in u = |x|^2 of
// sum c_i e^{i pi tau_i u} / (i pi tau_i)^{k_i}.
template <class R>
complex_of<R> eval_deriv(const GaussianCombination<R>& g, const R& u,
                         int order = 0) {
  using std::exp;
  complex_of<R> sum(R(0), R(0));
  R pi = const_pi<R>();
  for (const auto& t : g.terms) {
    complex_of<R> iptau = complex_of<R>(R(0), pi) * t.tau;
    sum = sum + t.coeff * detail::ipow(iptau, order - t.k) *
                    exp(complex_of<R>(R(0), pi) * t.tau * u);
  }
  return sum;
}

namespace detail {
template <class R>
GaussianCombination<R> seed(const complex_of<R>& tau, int k, int eps) {
  if (!(tau.imag() > R(0)))
    throw std::invalid_argument("Gaussian seed requires Im(tau) > 0");
  GaussianCombination<R> g;
  g.k = k;
  g.eps = eps;
  g.terms.push_back({complex_of<R>(R(1), R(0)), tau, k});
  return g;
}
} // namespace detail

// The 2l-term Fourier eigenfunction: the normalized Gaussian slashed by
// (T^{-1} - I)(I + V + ... + V^{l-1}) * gamma at weight 2k+1. Its k-th
// u-derivative vanishes at every node u = 2n/lambda, and its Fourier
// transform equals eps times itself. The slash multiplier defaults to -eps
// and can be overridden (the two sign conventions in circulation differ
// here).
template <class R>
GaussianCombination<R> r_function(const HeckeContext<R>& ctx,
                                  const GroupWord& gamma,
                                  const complex_of<R>& tau, int k, int eps,
                                  int slash_multiplier = 0) {
  if (slash_multiplier == 0) slash_multiplier = -eps;
  GaussianCombination<R> g = detail::seed<R>(tau, k, eps);
  GroupAlgebraElement e = difference_average_element(ctx.order);
  return slash_apply(ctx, g, e.times_word(gamma), slash_multiplier);
}

// The l-term orbit average G | (I + V + ... + V^{l-1}) * gamma; the order
// (k+1) node derivative of the eigenfunction above equals a single constant
// times this average.
template <class R>
GaussianCombination<R> s_function(const HeckeContext<R>& ctx,
                                  const GroupWord& gamma,
                                  const complex_of<R>& tau, int k, int eps,
                                  int slash_multiplier = 0) {
  if (slash_multiplier == 0) slash_multiplier = -eps;
  GaussianCombination<R> g = detail::seed<R>(tau, k, eps);
  GroupAlgebraElement e;
  for (int i = 0; i < ctx.order; ++i) {
    GroupWord vi;
    for (int j = 0; j < i; ++j) vi.append(Letter::V);
    e.add(1, vi);
  }
  return slash_apply(ctx, g, e.times_word(gamma), slash_multiplier);
}

// Max coefficient magnitude of the coalesced difference a - b; zero iff the
// two combinations agree as term multisets.
template <class R>
double term_multiset_distance(const GaussianCombination<R>& a,
                              const GaussianCombination<R>& b) {
  GaussianCombination<R> diff = a;
  for (auto t : b.terms) {
    t.coeff = -t.coeff;
    diff.terms.push_back(t);
  }
  coalesce(diff);
  double m = 0;
  using std::abs;
  for (const auto& t : diff.terms) m = std::max(m, to_double(abs(t.coeff)));
  return m;
}

template <class R>
double max_coeff_magnitude(const GaussianCombination<R>& g) {
  double m = 0;
  using std::abs;
  for (const auto& t : g.terms) m = std::max(m, to_double(abs(t.coeff)));
  return m;
}

// JSON serialization with 17-significant-digit decimal strings.
template <class R>
std::string to_json(const GaussianCombination<R>& g) {
  std::ostringstream os;
  os << "{\"k\": " << g.k << ", \"eps\": " << g.eps << ", \"terms\": [";
  for (size_t i = 0; i < g.terms.size(); ++i) {
    const auto& t = g.terms[i];
    if (i) os << ", ";
    os << "{\"re_c\": \"" << fmt17(to_double(t.coeff.real()))
       << "\", \"im_c\": \"" << fmt17(to_double(t.coeff.imag()))
       << "\", \"re_tau\": \"" << fmt17(to_double(t.tau.real()))
       << "\", \"im_tau\": \"" << fmt17(to_double(t.tau.imag())) << "\"}";
  }
  os << "]}";
  return os.str();
}

} // namespace heckelab
