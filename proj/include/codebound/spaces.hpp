#ifndef CODEBOUND_SPACES_HPP
#define CODEBOUND_SPACES_HPP

#include <vector>

#include <Eigen/Dense>

#include "codebound/rational.hpp"

namespace codebound {

enum class SpaceKind { Sphere, Hamming };

/// A 2-point-homogeneous space descriptor: the unit sphere S^{n-1} with
/// tau = inner product, or the binary Hamming space F_2^n with tau = Hamming
/// distance.
struct SpaceSpec {
  SpaceKind kind;
  int n;  // sphere dimension (>= 3) or Hamming length (>= 1)

  static SpaceSpec sphere(int dim);
  static SpaceSpec hamming(int length);

  Rational tau0() const { return kind == SpaceKind::Sphere ? Rational(1) : Rational(0); }
  Rational tau_min() const { return kind == SpaceKind::Sphere ? Rational(-1) : Rational(0); }
  Rational tau_max() const { return kind == SpaceKind::Sphere ? Rational(1) : Rational(n); }

  bool operator==(const SpaceSpec& o) const { return kind == o.kind && n == o.n; }
};

/// Zonal spherical function family Phi_0..Phi_kmax with exact rational
/// coefficient table, normalized so Phi_k(tau0) = 1.
struct ZonalFamily {
  SpaceSpec space;
  int k_max = 0;
  std::vector<std::vector<Rational>> coeffs;  // coeffs[k][d], d <= k

  /// Floating evaluation (Horner on a cached double table).
  double eval(int k, double t) const;
  Rational eval_exact(int k, const Rational& t) const;

  /// Monomial coefficients of sum_k f_k Phi_k(t); f may be shorter than k_max+1.
  std::vector<double> combine(const std::vector<double>& f) const;

  void cache_doubles();
  std::vector<std::vector<double>> coeffs_f;
};

/// Gegenbauer family G_k^{(n)} via the three-term recurrence, n >= 3.
ZonalFamily gegenbauer_family(int n, int k_max);

/// Krawtchouk family K_k(t, n) expanded from the binomial sum, k_max <= n.
ZonalFamily krawtchouk_family(int n, int k_max);

/// Entrywise Phi_k over a pairwise-tau matrix. Requires diag(tau) == tau0.
Eigen::MatrixXd zonal_gram(const ZonalFamily& family, const Eigen::MatrixXd& tau, int k);

}  // namespace codebound

#endif
