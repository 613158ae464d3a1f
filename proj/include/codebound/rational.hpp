#ifndef CODEBOUND_RATIONAL_HPP
#define CODEBOUND_RATIONAL_HPP

#include <string>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace codebound {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Serializes as "p/q" (always with the slash, so round trips are uniform).
std::string to_fraction_string(const Rational& r);

/// Parses "p/q", "p", or a plain integer-like token. Throws std::invalid_argument.
Rational fraction_from_string(const std::string& s);

/// Best continued-fraction convergent of x with denominator <= max_den.
/// Expansion stops early once the convergent reproduces x to ~1e-14 relative,
/// so doubles that encode small fractions snap to them instead of dragging in
/// floating-point noise terms.
Rational rational_from_double(double x, const BigInt& max_den);

/// Dense symmetric rational matrix, row-major.
struct RatMatrix {
  int n = 0;
  std::vector<Rational> a;

  RatMatrix() = default;
  explicit RatMatrix(int size) : n(size), a(static_cast<size_t>(size) * size) {}

  Rational& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  const Rational& at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

  void symmetrize();
  bool is_symmetric() const;
};

}  // namespace codebound

#endif
