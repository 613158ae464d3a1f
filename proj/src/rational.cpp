#include "codebound/rational.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace codebound {

std::string to_fraction_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

Rational fraction_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational token");
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    BigInt num(s.substr(0, slash));
    BigInt den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(num, den);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad rational token: " + s);
  }
}

Rational rational_from_double(double x, const BigInt& max_den) {
  if (max_den < 1) throw std::invalid_argument("max_den must be >= 1");
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
  if (x == 0.0) return Rational(0);

  const double sign = x < 0 ? -1.0 : 1.0;
  const double target = std::abs(x);

  // Convergents p/q of the continued fraction of |x|.
  BigInt p_prev = 0, q_prev = 1;  // h_{-2}/k_{-2}
  BigInt p_cur = 1, q_cur = 0;    // h_{-1}/k_{-1}
  double y = target;
  Rational best(0);
  bool have = false;
  for (int it = 0; it < 64; ++it) {
    const double fl = std::floor(y);
    if (fl > 9.0e17) break;  // term exceeds what a double can meaningfully carry
    const BigInt a(static_cast<long long>(fl));
    BigInt p_next = a * p_cur + p_prev;
    BigInt q_next = a * q_cur + q_prev;
    if (q_next > max_den) break;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = p_next;
    q_cur = q_next;
    best = Rational(p_cur, q_cur);
    have = true;
    const double approx = to_double(best);
    if (std::abs(approx - target) <= 1e-14 * std::max(1.0, target)) break;
    const double frac = y - fl;
    if (frac < 1e-18) break;
    y = 1.0 / frac;
  }
  if (!have) {
    // Even the integer part is too big for max_den; fall back to nearest
    // representable fraction floor(x * max_den) / max_den.
    const Rational scaled = Rational(BigInt(std::llround(target * to_double(Rational(max_den)))), max_den);
    return sign < 0 ? -scaled : scaled;
  }
  return sign < 0 ? -best : best;
}

void RatMatrix::symmetrize() {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Rational avg = (at(i, j) + at(j, i)) / 2;
      at(i, j) = avg;
      at(j, i) = avg;
    }
}

bool RatMatrix::is_symmetric() const {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (at(i, j) != at(j, i)) return false;
  return true;
}

}  // namespace codebound
