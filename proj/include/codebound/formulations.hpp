#ifndef CODEBOUND_FORMULATIONS_HPP
#define CODEBOUND_FORMULATIONS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "codebound/sdpmodel.hpp"
#include "codebound/solver.hpp"
#include "codebound/spaces.hpp"

namespace codebound {

/// Interval endpoint or anchor value: exact rational, or a rationalized
/// approximation of an irrational input (models built from the latter are
/// flagged exact_data = false and cannot be certified exactly).
struct Endpoint {
  Rational value;
  bool exact = true;

  static Endpoint exact_value(Rational r) { return Endpoint{std::move(r), true}; }
  static Endpoint approx(double x);

  double f() const { return to_double(value); }
};

/// Angle as an exact fraction of pi, used for partition cells so cosine
/// endpoints stay exact where they can be.
struct PiFrac {
  long num = 0;
  long den = 1;

  double radians() const;
  static PiFrac of(long num, long den);
};

PiFrac operator+(PiFrac a, PiFrac b);
PiFrac operator-(PiFrac a, PiFrac b);
bool operator<(PiFrac a, PiFrac b);

/// cos(pi * frac) as an Endpoint; exact for the rational-cosine angles
/// (0, pi/3, pi/2, 2pi/3, pi), approximated otherwise.
Endpoint cos_of(PiFrac frac);

struct BoundReport {
  std::string formulation;
  int m = 0;
  double bound = 0.0;
  bool bound_valid = false;
  SolveStatus status = SolveStatus::NumericalLimit;
  std::map<std::string, double> variables;
  std::string notes;
  double objective = 0.0;
  double duality_gap = 0.0;
};

/// (1 + y) / y; throws std::domain_error for y <= 0.
double bound_from_y(double y_star);
Rational bound_from_y_exact(const Rational& y_lower);

SdpModel build_sdp0(const ZonalFamily& family, const Endpoint& a, const Endpoint& b, int m);

/// SDP0 with every odd moment substituted by -y (antipodal spherical codes).
SdpModel build_sdp0_antipodal(const ZonalFamily& family, const Endpoint& a, const Endpoint& b,
                              int m);

/// Cap thresholds t_k = sqrt(cos theta + (1 - cos theta) / (k+1)), k = 1..k_max.
std::vector<double> cap_thresholds(double theta, int k_max);

/// Side constraints valid for every theta-code, rendered into the SDPA-family
/// models as linear blocks.
struct AdConstraint {
  enum class Kind { Pfender, CapCount, LinearCustom };
  Kind kind = Kind::LinearCustom;
  double theta = 0.0;
  int k = 0;  // CapCount order
  // LinearCustom: sum_i coeffs[name] * var + constant >= 0
  std::map<std::string, Rational> coeffs;
  Rational constant{0};

  static AdConstraint pfender(double theta);
  static AdConstraint cap_count(double theta, int k);
  static AdConstraint linear(std::map<std::string, Rational> coeffs, Rational constant);
};

/// SDPA over interval pieces [u_i, u_{i+1}); breakpoints include both ends
/// (u_1 = a, u_{l+1} = b).
SdpModel build_sdpa(const ZonalFamily& family, const std::vector<Endpoint>& breakpoints,
                    const std::vector<AdConstraint>& ad, int m);

/// Fixed anchor points for the subset bounds: pairwise tau values and the
/// per-anchor distance window [alpha_i, beta_i] containing the code.
struct AnchorSpec {
  RatMatrix tau;  // r x r, exact values
  bool tau_exact = true;
  std::vector<std::pair<Endpoint, Endpoint>> intervals;
};

SdpModel build_sdpa_subset(const ZonalFamily& family, const Endpoint& a, const Endpoint& b,
                           const AnchorSpec& anchors, const std::vector<AdConstraint>& ad, int m);

struct Cell {
  PiFrac theta_lo, theta_hi;  // colatitude range about the anchor pole
  std::vector<std::pair<Endpoint, Endpoint>> anchor_tau;  // [alpha_ij, beta_ij] per anchor
};

struct PairInterval {
  Endpoint lo, hi;
  bool empty = false;
};

/// tau range attainable between points of two cells (or within one when
/// same_cell), intersected with [a, b]; spherical triangle inequality.
PairInterval cell_pair_interval(const Cell& ci, const Cell& cj, const Endpoint& a,
                                const Endpoint& b, bool same_cell);

struct PartitionSpec {
  RatMatrix anchor_tau;  // r x r pairwise tau of anchors
  bool anchor_tau_exact = true;
  std::vector<Cell> cells;
  std::vector<std::vector<PairInterval>> pair_intervals;  // d x d, filled by builders
};

/// The hemisphere partition used for one-sided kissing numbers: one anchor
/// (the pole), three colatitude cells covering [0, pi/2].
PartitionSpec one_sided_partition(int n);

SdpModel build_sdphat(const ZonalFamily& family, const Endpoint& a, const Endpoint& b,
                      PartitionSpec partition, const std::vector<AdConstraint>& ad, int m);

/// Discretized Delsarte dual LP with a post-hoc continuous validity check.
BoundReport lp_dual_bound(const ZonalFamily& family, const Endpoint& a, const Endpoint& b, int N,
                          int grid_points, const SolverSettings* settings = nullptr);

/// Validates f = sum f_k Phi_k <= 0 on [a,b] (f_0 > 0, f_k >= 0) and returns
/// f(tau0)/f_0. Throws std::runtime_error naming a witness point on failure.
double lp_polynomial_bound(const ZonalFamily& family, const std::vector<double>& f, double a,
                           double b);

/// Solves a built model and converts the optimum into a code bound according
/// to the model's bound rule.
BoundReport solve_to_bound(const SdpModel& model, const SolverSettings* settings = nullptr,
                           SolveResult* result_out = nullptr);

}  // namespace codebound

#endif
