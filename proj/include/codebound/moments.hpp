#ifndef CODEBOUND_MOMENTS_HPP
#define CODEBOUND_MOMENTS_HPP

#include <vector>

#include <Eigen/Dense>

#include "codebound/rational.hpp"

namespace codebound {

/// Power sums s_0..s_K of pairwise tau values. `normalized` means s_0 = 1
/// (the per-pair average convention).
struct MomentVector {
  std::vector<double> values;
  bool normalized = false;
};

struct RationalMoments {
  std::vector<Rational> values;
  bool normalized = false;
};

struct Atom {
  double t;
  double w;
};

/// Discrete measure: atom locations strictly increasing, weights positive.
struct AtomicDistribution {
  std::vector<Atom> atoms;

  double total_weight() const;
};

MomentVector power_sums(const AtomicDistribution& atoms, int k_max);
RationalMoments power_sums_exact(const std::vector<std::pair<Rational, Rational>>& atoms, int k_max);

/// The three Hankel blocks R_m, F_m^+(a), F_m^-(b) of H_m(a,b).
struct HankelBlocks {
  Eigen::MatrixXd R, Fplus, Fminus;
};
struct RationalHankelBlocks {
  RatMatrix R, Fplus, Fminus;
};

/// Assembles the order-m Hankel blocks of s (raw or normalized; s needs at
/// least 2m entries).
HankelBlocks build_hankel(const MomentVector& s, int m, double a, double b);
RationalHankelBlocks build_hankel_exact(const RationalMoments& s, int m, const Rational& a,
                                        const Rational& b);

/// Floating PSD test: smallest eigenvalue >= -tol * max(1, largest eigenvalue).
bool is_psd(const Eigen::MatrixXd& M, double tol);

/// Membership in Delta_m(a,b): x holds the normalized moments
/// sbar_1..sbar_{2m-1} (sbar_0 = 1 implied).
bool in_delta(const std::vector<double>& x, int m, double a, double b, double tol = 1e-9);

struct RecoverOptions {
  double tol = 1e-8;           // rank threshold and consistency tolerance
  double boundary_clamp = 1e-6;  // absolute window for snapping atoms onto [a,b]
};

/// Recovers an atomic distribution on [a,b] from its power sums via the
/// Hankel-kernel (Prony) polynomial. Throws std::runtime_error with a
/// diagnostic when the moments are not realized by an [a,b]-supported
/// measure at the detected rank.
AtomicDistribution recover_distribution(const MomentVector& s, double a, double b,
                                        const RecoverOptions& opt = {});

}  // namespace codebound

#endif
