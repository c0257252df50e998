#pragma once
// Scalar layer: IEEE double for public evaluation surfaces and a 50-digit
// floating-point engine for series construction and the measure pipeline,
// where intermediate cancellation exceeds double range.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <complex>
#include <string>
#include <sstream>
#include <iomanip>
#include <cmath>

namespace heckelab {

using real_mp = boost::multiprecision::cpp_bin_float_50;
using complex_mp = boost::multiprecision::cpp_complex_50;

template <class R> struct scalar_traits;
template <> struct scalar_traits<double> {
  using complex = std::complex<double>;
  static constexpr int digits10 = 16;
};
template <> struct scalar_traits<real_mp> {
  using complex = complex_mp;
  static constexpr int digits10 = 50;
};

template <class R> using complex_of = typename scalar_traits<R>::complex;

template <class R> R const_pi() {
  using std::acos;
  return acos(R(-1));
}

inline double to_double(double x) { return x; }
inline double to_double(const real_mp& x) { return static_cast<double>(x); }
inline std::complex<double> to_cdouble(const std::complex<double>& z) { return z; }
inline std::complex<double> to_cdouble(const complex_mp& z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

// Decimal string with 17 significant digits (round-trip safe for double).
inline std::string fmt17(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}
inline std::string fmt17(const real_mp& x) { return fmt17(static_cast<double>(x)); }

inline double parse17(const std::string& s) { return std::stod(s); }

} // namespace heckelab
