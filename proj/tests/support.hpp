#ifndef CODEBOUND_TEST_SUPPORT_HPP
#define CODEBOUND_TEST_SUPPORT_HPP

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "codebound/moments.hpp"

namespace codebound::testing {

using Rng = std::mt19937_64;

/// Rows are unit vectors in R^dim.
Eigen::MatrixXd random_sphere_points(int dim, int count, Rng& rng);

/// Greedy packing: keeps sampled points whose pairwise inner products stay
/// <= cos_theta. Returns at most max_points rows.
Eigen::MatrixXd greedy_theta_code(int dim, double cos_theta, int max_points, int attempts,
                                  Rng& rng);

/// Same, but every point also satisfies <p, e_1> >= 0 (closed hemisphere).
Eigen::MatrixXd greedy_hemisphere_code(int dim, double cos_theta, int max_points, int attempts,
                                       Rng& rng);

/// Pairwise inner-product matrix (diagonal = 1).
Eigen::MatrixXd sphere_tau(const Eigen::MatrixXd& points);

/// Random binary code with pairwise Hamming distance >= min_dist.
std::vector<std::vector<int>> greedy_hamming_code(int length, int min_dist, int max_words,
                                                  int attempts, Rng& rng);

/// Pairwise Hamming distance matrix (diagonal = 0).
Eigen::MatrixXd hamming_tau(const std::vector<std::vector<int>>& words);

/// Normalized power sums xbar_1..xbar_K over off-diagonal pairs of tau.
std::vector<double> normalized_power_sums(const Eigen::MatrixXd& tau, int K);

/// Raw power sums s_0..s_K over off-diagonal pairs with tau value in
/// [lo, hi] (closed) or [lo, hi) when half_open.
std::vector<double> interval_power_sums(const Eigen::MatrixXd& tau, double lo, double hi,
                                        bool half_open, int K);

/// Random atomic distribution with `r` atoms in [a,b], separation >= min_sep.
AtomicDistribution random_distribution(double a, double b, int r, double min_sep, Rng& rng);

}  // namespace codebound::testing

#endif
