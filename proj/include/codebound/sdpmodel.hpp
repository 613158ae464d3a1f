#ifndef CODEBOUND_SDPMODEL_HPP
#define CODEBOUND_SDPMODEL_HPP

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "codebound/rational.hpp"

namespace codebound {

/// One coordinate of a symmetric matrix, upper triangle (row <= col).
struct CoordEntry {
  int row;
  int col;
  Rational value;
};

/// Affine symmetric block: value(x) = constant + sum_i x_i * terms[i] >= 0 (PSD).
/// `constant` plays the -T_0 role of the standard LMI form.
struct AffineBlock {
  int size = 0;
  std::vector<CoordEntry> constant;
  std::map<int, std::vector<CoordEntry>> terms;  // variable index -> coords
};

/// Linear equality sum_i coeffs[i] * x_i = rhs, kept separate from the blocks
/// so the certifier can check it exactly.
struct Equality {
  std::map<int, Rational> coeffs;
  Rational rhs;
};

enum class Sense { Min, Max };

/// How the optimal objective converts into a code-size bound.
enum class BoundRule { None, MinYReciprocal, MaxC };

struct SdpModel {
  std::vector<std::string> variables;
  Sense sense = Sense::Min;
  std::vector<Rational> objective;
  std::vector<AffineBlock> blocks;
  std::vector<Equality> equalities;

  std::string formulation;
  std::string notes;
  BoundRule bound_rule = BoundRule::None;
  /// False when some inputs were irrational and had to be rationalized; exact
  /// certification is only offered when true.
  bool exact_data = true;

  int var_index(const std::string& name) const;  // -1 if absent
  int total_block_dim() const;
};

enum class SolveStatus { Optimal, PrimalInfeasible, DualUnbounded, NumericalLimit };

std::string to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalLimit;
  std::vector<double> x;
  double objective = 0.0;
  std::vector<Eigen::MatrixXd> dual;  // per model block
  std::vector<double> eq_multipliers;
  double duality_gap = 0.0;
  int iterations = 0;

  /// Strictly interior dual snapshot (taken before the gap collapses), kept
  /// for certificate rounding; empty when the solve never reached it.
  std::vector<Eigen::MatrixXd> interior_dual;
  std::vector<double> interior_eq_multipliers;
};

/// Validates and canonicalizes a model: unique names, in-range symmetric
/// coordinates, known variables. Throws std::invalid_argument.
SdpModel assemble(std::vector<std::string> variables, Sense sense, std::vector<Rational> objective,
                  std::vector<AffineBlock> blocks, std::vector<Equality> equalities = {});

struct BlockValue {
  Eigen::MatrixXd M;
  double min_eig;
};

/// Evaluates constant + sum_i x_i terms[i] for one block.
BlockValue eval_block(const SdpModel& model, int block_index, const std::vector<double>& x);

/// Dense double view of a block's coefficient matrix for one variable (or the
/// constant when var < 0).
Eigen::MatrixXd block_matrix(const AffineBlock& block, int var);

std::string model_to_json_string(const SdpModel& model);
SdpModel model_from_json_string(const std::string& text);
void save_model(const SdpModel& model, const std::string& path);
SdpModel load_model(const std::string& path);

/// FNV-1a hash of the canonical serialization; binds certificates to models.
std::string model_hash(const SdpModel& model);

}  // namespace codebound

#endif
