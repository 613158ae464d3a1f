#include "support.hpp"

#include <algorithm>
#include <cmath>

namespace codebound::testing {

Eigen::MatrixXd random_sphere_points(int dim, int count, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd pts(count, dim);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd v(dim);
    do {
      for (int j = 0; j < dim; ++j) v(j) = gauss(rng);
    } while (v.norm() < 1e-8);
    pts.row(i) = v.normalized();
  }
  return pts;
}

namespace {

Eigen::MatrixXd greedy_code_impl(int dim, double cos_theta, int max_points, int attempts, Rng& rng,
                                 bool hemisphere) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Eigen::VectorXd> kept;
  for (int it = 0; it < attempts && static_cast<int>(kept.size()) < max_points; ++it) {
    Eigen::VectorXd v(dim);
    for (int j = 0; j < dim; ++j) v(j) = gauss(rng);
    if (v.norm() < 1e-8) continue;
    v.normalize();
    if (hemisphere && v(0) < 0) v = -v;
    bool ok = true;
    for (const auto& u : kept)
      if (u.dot(v) > cos_theta) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(v);
  }
  Eigen::MatrixXd pts(static_cast<int>(kept.size()), dim);
  for (size_t i = 0; i < kept.size(); ++i) pts.row(static_cast<int>(i)) = kept[i];
  return pts;
}

}  // namespace

Eigen::MatrixXd greedy_theta_code(int dim, double cos_theta, int max_points, int attempts,
                                  Rng& rng) {
  return greedy_code_impl(dim, cos_theta, max_points, attempts, rng, false);
}

Eigen::MatrixXd greedy_hemisphere_code(int dim, double cos_theta, int max_points, int attempts,
                                       Rng& rng) {
  return greedy_code_impl(dim, cos_theta, max_points, attempts, rng, true);
}

Eigen::MatrixXd sphere_tau(const Eigen::MatrixXd& points) {
  Eigen::MatrixXd tau = points * points.transpose();
  for (Eigen::Index i = 0; i < tau.rows(); ++i) tau(i, i) = 1.0;
  return tau;
}

std::vector<std::vector<int>> greedy_hamming_code(int length, int min_dist, int max_words,
                                                  int attempts, Rng& rng) {
  std::uniform_int_distribution<int> bit(0, 1);
  std::vector<std::vector<int>> kept;
  for (int it = 0; it < attempts && static_cast<int>(kept.size()) < max_words; ++it) {
    std::vector<int> w(static_cast<size_t>(length));
    for (auto& b : w) b = bit(rng);
    bool ok = true;
    for (const auto& u : kept) {
      int d = 0;
      for (int j = 0; j < length; ++j) d += (u[static_cast<size_t>(j)] != w[static_cast<size_t>(j)]);
      if (d < min_dist) {
        ok = false;
        break;
      }
    }
    if (ok) kept.push_back(std::move(w));
  }
  return kept;
}

Eigen::MatrixXd hamming_tau(const std::vector<std::vector<int>>& words) {
  const int n = static_cast<int>(words.size());
  Eigen::MatrixXd tau = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int d = 0;
      for (size_t k = 0; k < words[static_cast<size_t>(i)].size(); ++k)
        d += (words[static_cast<size_t>(i)][k] != words[static_cast<size_t>(j)][k]);
      tau(i, j) = tau(j, i) = d;
    }
  return tau;
}

std::vector<double> normalized_power_sums(const Eigen::MatrixXd& tau, int K) {
  const Eigen::Index n = tau.rows();
  const double pairs = static_cast<double>(n) * (static_cast<double>(n) - 1.0);
  std::vector<double> out(static_cast<size_t>(K), 0.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      double p = tau(i, j);
      for (int k = 1; k <= K; ++k) {
        out[static_cast<size_t>(k - 1)] += p;
        p *= tau(i, j);
      }
    }
  for (auto& v : out) v /= pairs;
  return out;
}

std::vector<double> interval_power_sums(const Eigen::MatrixXd& tau, double lo, double hi,
                                        bool half_open, int K) {
  std::vector<double> out(static_cast<size_t>(K) + 1, 0.0);
  for (Eigen::Index i = 0; i < tau.rows(); ++i)
    for (Eigen::Index j = 0; j < tau.cols(); ++j) {
      if (i == j) continue;
      const double t = tau(i, j);
      const bool in = half_open ? (t >= lo && t < hi) : (t >= lo && t <= hi);
      if (!in) continue;
      double p = 1.0;
      for (int k = 0; k <= K; ++k) {
        out[static_cast<size_t>(k)] += p;
        p *= t;
      }
    }
  return out;
}

AtomicDistribution random_distribution(double a, double b, int r, double min_sep, Rng& rng) {
  std::uniform_real_distribution<double> loc(a, b);
  std::uniform_real_distribution<double> wgt(0.1, 5.0);
  std::vector<double> ts;
  int guard = 0;
  while (static_cast<int>(ts.size()) < r && guard++ < 100000) {
    const double t = loc(rng);
    bool ok = true;
    for (double u : ts)
      if (std::abs(u - t) < min_sep) {
        ok = false;
        break;
      }
    if (ok) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  AtomicDistribution d;
  for (double t : ts) d.atoms.push_back(Atom{t, wgt(rng)});
  return d;
}

}  // namespace codebound::testing
