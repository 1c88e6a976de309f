// Scalar fields: complex double for spectra, exact rationals for identities.
#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>
#include <type_traits>

#include <Eigen/Core>

namespace sov {

using Cplx = std::complex<double>;
using Rat = mpq_class;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rat>;

template <class T>
struct residual_field {
  using type = double;
};
template <>
struct residual_field<Rat> {
  using type = Rat;
};

/// Residual type of a check: exact rational in exact mode (zero means the
/// identity holds symbolically), double in float mode.
template <class T>
using residual_t = typename residual_field<T>::type;

/// mpq_class(num, den) does not canonicalize; always build ratios through
/// this helper when the arguments are computed.
inline Rat ratio(long num, long den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline double to_double(const Rat& x) { return x.get_d(); }
inline double to_double(double x) { return x; }
inline Cplx to_cplx(const Rat& x) { return Cplx(x.get_d(), 0.0); }
inline Cplx to_cplx(const Cplx& x) { return x; }

template <class T>
double abs_approx(const T& x) {
  if constexpr (is_exact_v<T>) {
    return std::abs(x.get_d());
  } else {
    return std::abs(x);
  }
}

template <class T>
T conj_scalar(const T& x) {
  if constexpr (is_exact_v<T>) {
    return x;
  } else {
    return std::conj(x);
  }
}

inline std::string scalar_str(const Rat& x) { return x.get_str(); }
inline std::string scalar_str(const Cplx& x) {
  return "(" + std::to_string(x.real()) + "," + std::to_string(x.imag()) + ")";
}

}  // namespace sov

namespace Eigen {

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
  typedef mpq_class Real;
  typedef mpq_class NonInteger;
  typedef mpq_class Nested;
  typedef mpq_class Literal;
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 6,
    AddCost = 150,
    MulCost = 100
  };
};

}  // namespace Eigen
