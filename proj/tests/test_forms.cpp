#include <catch2/catch_amalgamated.hpp>
#include "heckelab/forms.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

using namespace heckelab;
using cd = std::complex<double>;

namespace {

const HeckeContext<double>& ctx6() {
  static auto c = make_context<double>(6);
  return c;
}
const HeckeContext<real_mp>& ctx6_mp() {
  static auto c = make_context<real_mp>(6);
  return c;
}

// Number of lattice vectors of norm n in the triangular lattice
// (quadratic form x^2 + xy + y^2), by direct enumeration.
int triangular_lattice_count(int n) {
  int count = 0;
  for (int x = -40; x <= 40; ++x)
    for (int y = -40; y <= 40; ++y)
      if (x * x + x * y + y * y == n) ++count;
  return count;
}

} // namespace

TEST_CASE("dimension table for orders 6 and 10") {
  auto c6 = ctx6();
  // weight 2k+1, multiplier +1 / -1
  CHECK(dim_odd_forms(c6, 0, +1) == 1);
  CHECK(dim_odd_forms(c6, 0, -1) == 0);
  CHECK(dim_odd_forms(c6, 1, +1) == 1);
  CHECK(dim_odd_forms(c6, 1, -1) == 1);
  CHECK(dim_odd_forms(c6, 2, +1) == 1);
  CHECK(dim_odd_forms(c6, 2, -1) == 1);
  CHECK(dim_odd_forms(c6, 3, +1) == 2);
  CHECK(dim_odd_forms(c6, 3, -1) == 1);

  auto c10 = make_context<double>(10);
  CHECK(dim_odd_forms(c10, 0, +1) == 1);
  CHECK(dim_odd_forms(c10, 0, -1) == 0);
  CHECK(dim_odd_forms(c10, 1, +1) == 1);
  CHECK(dim_odd_forms(c10, 1, -1) == 1);
  CHECK(dim_odd_forms(c10, 2, +1) == 2);
  CHECK(dim_odd_forms(c10, 2, -1) == 1);

  CHECK_THROWS_AS(dim_odd_forms(c6, -1, +1), std::invalid_argument);
  CHECK_THROWS_AS(dim_odd_forms(c6, 1, 2), std::invalid_argument);
}

TEST_CASE("weight-1 basis element counts triangular lattice vectors") {
  auto basis = canonical_f_basis(ctx6(), 0, -1, 60);
  REQUIRE(basis.size() == 1);
  const auto& theta = basis[0];
  CHECK(theta.lead == 0);
  for (int n = 0; n <= 60; ++n) {
    double expected = triangular_lattice_count(n);
    CHECK(std::abs(theta.coefficient(n) - expected) < 1e-9);
  }
}

TEST_CASE("weight-3 minus-multiplier basis element") {
  // dim 1; the single echelon element is the order-6 analogue of the
  // discriminant-like generator with integer expansion.
  const double want[] = {1,    -36,   -54,   -252,  -468,  -432,
                         -702, -1800, -918,  -2196, -2592};
  auto basis = canonical_f_basis(ctx6(), 1, +1, 10);
  REQUIRE(basis.size() == 1);
  for (int e = 0; e <= 10; ++e) {
    double w = want[e];
    CHECK(std::abs(basis[0].coefficient(e) - w) <=
          1e-9 * std::max(1.0, std::abs(w)));
  }
}

TEST_CASE("weight-1 series with a simple pole at the cusp") {
  const double want[] = {1,       -6,       -747,      -12868,    -118863,
                         -768384, -4016281, -18082116, -72159372, -262498596};
  auto f = special_f_minus_one(ctx6(), 8);
  CHECK(f.lead == -1);
  for (int e = -1; e <= 8; ++e) {
    double w = want[e + 1];
    CHECK(std::abs(f.coefficient(e) - w) <=
          1e-9 * std::max(1.0, std::abs(w)));
  }
}

TEST_CASE("interpolation family: first members and gap structure") {
  // phi_1 of the minus family coincides with the weight-1 simple-pole series
  const double want1[] = {1,       -6,       -747,      -12868,    -118863,
                          -768384, -4016281, -18082116, -72159372, -262498596};
  auto phi1 = phi_basis(ctx6(), 1, 0, -1, 8);
  CHECK(phi1.lead == -1);
  for (int e = -1; e <= 8; ++e) {
    double w = want1[e + 1];
    CHECK(std::abs(phi1.coefficient(e) - w) <=
          1e-9 * std::max(1.0, std::abs(w)));
  }

  // phi_2: lead 1 exactly, exponent -1 cleared exactly, exponent 0 zero by
  // duality with the weight-1 holomorphic element, then known integers.
  const double want2[] = {1, 0, 0, -13376, -767637, -18055872, -262604224};
  auto phi2 = phi_basis(ctx6(), 2, 0, -1, 4);
  CHECK(phi2.lead == -2);
  CHECK(phi2.coefficient(-2) == 1.0);
  CHECK(std::abs(phi2.coefficient(-1)) < 1e-20);
  CHECK(std::abs(phi2.coefficient(0)) < 1e-20);
  for (int e = 1; e <= 4; ++e) {
    double w = want2[e + 2];
    CHECK(std::abs(phi2.coefficient(e) - w) <=
          1e-9 * std::max(1.0, std::abs(w)));
  }

  // lead coefficient exactly 1 and a clean gap for higher members
  for (int n = 3; n <= 12; ++n) {
    auto p = phi_basis(ctx6(), n, 0, -1, 5);
    CHECK(p.lead == -n);
    CHECK(p.coefficient(-n) == 1.0);
    for (int e = -n + 1; e <= -1; ++e) CHECK(std::abs(p.coefficient(e)) == 0.0);
  }
}

TEST_CASE("seed identity: phi_d times the top basis element is -qdq(J)") {
  auto J = hauptmodul_J(ctx6(), 45);
  auto DJ = series_ops::qdq(J);
  const std::pair<int, int> families[] = {{0, -1}, {0, +1}, {1, -1}, {1, +1},
                                          {2, -1}, {2, +1}, {3, -1}, {3, +1}};
  for (auto [k, eps] : families) {
    int d = dim_odd_forms(ctx6(), k, -eps);
    LaurentSeries<double> f =
        d > 0 ? canonical_f_basis(ctx6(), k, eps, 40)[size_t(d - 1)]
              : special_f_minus_one(ctx6(), 40);
    auto phid = phi_basis(ctx6(), d, k, eps, 40);
    auto prod = series_ops::mul(f, phid);
    CHECK(prod.lead == -1);
    for (int e = -1; e <= 28; ++e) {
      double scale = std::max(1.0, std::abs(DJ.coefficient(e)));
      CHECK(std::abs(prod.coefficient(e) + DJ.coefficient(e)) <=
            1e-11 * scale);
    }
  }
}

TEST_CASE("duality: holomorphic elements annihilate the interpolation family") {
  const std::pair<int, int> families[] = {{0, -1}, {1, -1}, {1, +1}, {2, -1},
                                          {2, +1}, {3, -1}, {3, +1}};
  for (auto [k, eps] : families) {
    int d = dim_odd_forms(ctx6_mp(), k, -eps);
    REQUIRE(d >= 1);
    auto fbasis = canonical_f_basis(ctx6_mp(), k, eps, 12);
    for (int n = d; n <= 10; ++n) {
      auto phi = phi_basis(ctx6_mp(), n, k, eps, 12);
      for (int i = 0; i < d; ++i) {
        auto p = duality_pairing(fbasis[size_t(i)], phi);
        // scale by the largest term entering the sum
        double scale = 1.0;
        for (int m = i; m <= n; ++m)
          scale = std::max(scale,
                           std::abs(to_cdouble(fbasis[size_t(i)].coefficient(m)) *
                                    to_cdouble(phi.coefficient(-m))));
        CHECK(to_double(abs(p)) < 1e-30 * scale);
      }
    }
  }
}

TEST_CASE("duality: the simple-pole series pairs to zero against the plus "
          "family") {
  auto fm1 = special_f_minus_one(ctx6_mp(), 12);
  for (int n = 0; n <= 10; ++n) {
    auto phi = phi_basis(ctx6_mp(), n, 0, +1, 12);
    auto p = duality_pairing(fm1, phi);
    double scale = 1.0;
    for (int m = -1; m <= n; ++m)
      scale = std::max(scale, std::abs(to_cdouble(fm1.coefficient(m)) *
                                       to_cdouble(phi.coefficient(-m))));
    CHECK(to_double(abs(p)) < 1e-30 * scale);
  }
  // Against its own (minus) family the pairing is genuinely nonzero: the
  // product transforms with the opposite sign, so no residue cancellation.
  auto phi1m = phi_basis(ctx6_mp(), 1, 0, -1, 12);
  auto p = duality_pairing(fm1, phi1m);
  CHECK(to_double(abs(p - complex_mp(-1458))) < 1e-6);
}

TEST_CASE("pairing mechanics") {
  double lambda = ctx6().lambda;
  auto mk = [&](int lead, std::vector<cd> c) {
    return make_series<double>(lead, std::move(c), lambda, 6);
  };
  // <q, 1/q> = 1
  auto f = mk(1, {cd(1), cd(0)});
  auto phi = mk(-1, {cd(1), cd(0), cd(0)});
  CHECK(std::abs(duality_pairing(f, phi) - cd(1)) < 1e-15);

  // bilinearity on random windows
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  auto rand_series = [&](int lead, int len) {
    std::vector<cd> c;
    for (int i = 0; i < len; ++i) c.emplace_back(dist(rng), dist(rng));
    return mk(lead, std::move(c));
  };
  for (int trial = 0; trial < 10; ++trial) {
    auto a = rand_series(-2, 8);
    auto b = rand_series(-2, 8);
    auto q = rand_series(-4, 10);
    cd alpha(dist(rng), dist(rng));
    auto lhs = duality_pairing(series_ops::add(a.scaled(alpha), b), q);
    auto rhs = alpha * duality_pairing(a, q) + duality_pairing(b, q);
    CHECK(std::abs(lhs - rhs) < 1e-13);
  }

  // unknown coefficients inside the needed range must be rejected
  auto small = mk(0, {cd(1), cd(2), cd(3)});       // known through q^2
  auto deep = mk(-5, std::vector<cd>(8, cd(1)));   // needs f through q^5
  CHECK_THROWS_AS(duality_pairing(small, deep), std::invalid_argument);

  auto other = make_series<double>(0, {cd(1)}, 2 * std::cos(M_PI / 10), 10);
  CHECK_THROWS_AS(duality_pairing(small, other), std::invalid_argument);
}

TEST_CASE("generating kernel: sum matches the closed form") {
  cd z(0.2, 0.8), tau(0.0, 2.0);
  for (int eps : {-1, +1}) {
    auto r = kernel_check(ctx6(), 0, eps, z, tau, 25);
    double rel = std::abs(r.lhs - r.rhs) / std::abs(r.rhs);
    CHECK(rel < 1e-8);
  }

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    cd zr(-0.3 + 0.6 * dist(rng), 0.7 + 0.25 * dist(rng));
    cd tr(-0.5 + 1.0 * dist(rng), 1.8 + 0.7 * dist(rng));
    int k = trial % 2;
    int eps = k == 0 ? -1 : +1;
    auto r = kernel_check(ctx6(), k, eps, zr, tr, 22);
    double rel = std::abs(r.lhs - r.rhs) / std::abs(r.rhs);
    CHECK(rel < 1e-7);
  }

  CHECK_THROWS_AS(kernel_check(ctx6(), 0, -1, z, z, 10), std::invalid_argument);
  CHECK_THROWS_AS(kernel_check(ctx6(), 0, -1, z, cd(0.1, 0.5), 10),
                  std::invalid_argument);
  // tau with J(tau) = J(z): the image of z under the inversion generator
  cd z2(0.3, 0.9);
  cd tau2 = -1.0 / z2;
  CHECK_THROWS_AS(kernel_check(ctx6(), 0, -1, z2, tau2, 10),
                  std::invalid_argument);
}

TEST_CASE("exponential growth bound along the boundary arc") {
  // |phi_n(z)| <= C * e^{2 pi (1+delta) n / lambda} with delta = 1/4:
  // calibrate C on n <= 6, then check members 7..12 stay under the bound.
  double lambda = ctx6().lambda;
  double rate = 2 * M_PI * 1.25 / lambda;
  const double theta_deg[] = {60, 75, 90, 105, 120};
  const std::pair<int, int> families[] = {{0, -1}, {0, +1}, {1, -1}, {1, +1}};
  for (auto [k, eps] : families) {
    int d = dim_odd_forms(ctx6(), k, -eps);
    double C = 0;
    for (int n = d; n <= 6; ++n) {
      auto p = phi_basis(ctx6(), n, k, eps, 65);
      for (double td : theta_deg) {
        cd zz = std::polar(1.0, td * M_PI / 180.0);
        C = std::max(C, std::abs(series_ops::eval_at(p, zz)) /
                            std::exp(rate * n));
      }
    }
    REQUIRE(C > 0);
    for (int n = 7; n <= 12; ++n) {
      auto p = phi_basis(ctx6(), n, k, eps, 65);
      for (double td : theta_deg) {
        cd zz = std::polar(1.0, td * M_PI / 180.0);
        CHECK(std::abs(series_ops::eval_at(p, zz)) <=
              C * std::exp(rate * n) * (1 + 1e-9));
      }
    }
  }
}

TEST_CASE("label bookkeeping") {
  auto c6 = ctx6();
  auto fw = f_w_label(c6); // weight 1, multiplier +1 at order 6
  CHECK(fw.weight_num == 1);
  CHECK(fw.weight_den == 1);
  CHECK(fw.multiplier == 1);
  auto fi = f_i_label(c6); // weight 3, multiplier -1
  CHECK(fi.weight_num == 3);
  CHECK(fi.weight_den == 1);
  CHECK(fi.multiplier == -1);

  auto prod = label_mul(fw, fi);
  CHECK(prod.weight_num == 4);
  CHECK(prod.multiplier == -1);
  auto sq = label_pow(fi, 2);
  CHECK(sq.weight_num == 6);
  CHECK(sq.multiplier == 1);

  // the simple-pole series: J' / f_w^{(l-2)/4} has weight 1, multiplier -1,
  // pole order 1
  auto special = label_div(j_prime_label(c6), label_pow(fw, (c6.order - 2) / 4));
  CHECK(special.weight_num == 1);
  CHECK(special.weight_den == 1);
  CHECK(special.multiplier == -1);
  CHECK(special.pole_order == 1);

  auto c10 = make_context<double>(10);
  auto fw10 = f_w_label(c10);
  CHECK(fw10.weight_num == 1);
  CHECK(fw10.weight_den == 2);
  auto fi10 = f_i_label(c10);
  CHECK(fi10.weight_num == 5);
  CHECK(fi10.weight_den == 2);
}

TEST_CASE("argument validation") {
  CHECK_THROWS_AS(canonical_f_basis(ctx6(), 0, +1, 10), std::invalid_argument);
  CHECK_THROWS_AS(phi_basis(ctx6(), 0, 0, -1, 5), std::invalid_argument);
  CHECK_THROWS_AS(phi_basis(ctx6(), 61, 0, -1, 5), std::invalid_argument);
  CHECK_THROWS_AS(phi_basis(ctx6(), 1, 0, -1, 200), std::invalid_argument);
}

TEST_CASE("disk cache round trip") {
  namespace fs = std::filesystem;
  char tmpl[] = "/tmp/heckelab_cache_XXXXXX";
  char* dir = mkdtemp(tmpl);
  REQUIRE(dir != nullptr);
  setenv("HECKELAB_CACHE", dir, 1);

  auto count_files = [&] {
    size_t n = 0;
    for (auto& e : fs::directory_iterator(dir)) {
      (void)e;
      ++n;
    }
    return n;
  };

  auto a1 = phi_basis(ctx6(), 3, 0, -1, 20);
  fs::path file = fs::path(dir) / "phi_l6_k0_epsm1_n3_N20_double.json";
  CHECK(fs::exists(file));

  auto a2 = phi_basis(ctx6(), 3, 0, -1, 20); // served from disk
  REQUIRE(a2.lead == a1.lead);
  REQUIRE(a2.size() == a1.size());
  for (int j = 0; j < a1.size(); ++j)
    CHECK(a2.coeffs[size_t(j)] == a1.coeffs[size_t(j)]); // bit-exact

  // a corrupt entry is treated as a miss and rewritten
  {
    std::ofstream out(file);
    out << "not json";
  }
  auto a3 = phi_basis(ctx6(), 3, 0, -1, 20);
  for (int j = 0; j < a1.size(); ++j)
    CHECK(a3.coeffs[size_t(j)] == a1.coeffs[size_t(j)]);
  {
    std::ifstream in(file);
    nlohmann::json j;
    in >> j; // parses again after the rewrite
    CHECK(j.at("n").get<int>() == 3);
  }

  // different truncation gets its own entry
  (void)phi_basis(ctx6(), 3, 0, -1, 21);
  CHECK(fs::exists(fs::path(dir) / "phi_l6_k0_epsm1_n3_N21_double.json"));

  // the 50-digit path never touches the disk cache
  size_t before = count_files();
  (void)phi_basis(ctx6_mp(), 5, 0, -1, 20);
  CHECK(count_files() == before);

  // unset: everything is a no-op
  unsetenv("HECKELAB_CACHE");
  (void)phi_basis(ctx6(), 4, 0, -1, 20);
  CHECK(count_files() == before);

  std::error_code ec;
  fs::remove_all(dir, ec);
}

TEST_CASE("two-dimensional space has echelon shape") {
  auto basis = canonical_f_basis(ctx6(), 3, -1, 12);
  REQUIRE(basis.size() == 2);
  CHECK(basis[0].lead == 0);
  CHECK(std::abs(basis[0].coefficient(0) - 1.0) < 1e-25);
  CHECK(std::abs(basis[0].coefficient(1)) < 1e-20);
  CHECK(basis[1].lead == 1);
  CHECK(std::abs(basis[1].coefficient(1) - 1.0) < 1e-25);
  // integer expansions: every listed coefficient is close to an integer
  for (const auto& f : basis)
    for (int e = f.lead; e <= 12; ++e) {
      double re = f.coefficient(e).real();
      CHECK(std::abs(f.coefficient(e).imag()) < 1e-6 * std::max(1.0, std::abs(re)));
      CHECK(std::abs(re - std::round(re)) < 1e-6 * std::max(1.0, std::abs(re)));
    }
}
