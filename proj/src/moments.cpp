#include "codebound/moments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace codebound {

double AtomicDistribution::total_weight() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.w;
  return s;
}

MomentVector power_sums(const AtomicDistribution& atoms, int k_max) {
  if (k_max < 1) throw std::invalid_argument("power_sums: k_max must be >= 1");
  MomentVector out;
  out.values.assign(static_cast<size_t>(k_max) + 1, 0.0);
  for (const auto& atom : atoms.atoms) {
    double p = 1.0;
    for (int k = 0; k <= k_max; ++k) {
      out.values[static_cast<size_t>(k)] += atom.w * p;
      p *= atom.t;
    }
  }
  return out;
}

RationalMoments power_sums_exact(const std::vector<std::pair<Rational, Rational>>& atoms,
                                 int k_max) {
  if (k_max < 1) throw std::invalid_argument("power_sums_exact: k_max must be >= 1");
  RationalMoments out;
  out.values.assign(static_cast<size_t>(k_max) + 1, Rational(0));
  for (const auto& [t, w] : atoms) {
    Rational p(1);
    for (int k = 0; k <= k_max; ++k) {
      out.values[static_cast<size_t>(k)] += w * p;
      p *= t;
    }
  }
  return out;
}

HankelBlocks build_hankel(const MomentVector& s, int m, double a, double b) {
  if (m < 1) throw std::invalid_argument("build_hankel: m must be >= 1");
  if (static_cast<int>(s.values.size()) < 2 * m)
    throw std::invalid_argument("build_hankel: need at least 2m moments");
  if (!(a < b)) throw std::invalid_argument("build_hankel: require a < b");
  HankelBlocks h{Eigen::MatrixXd(m, m), Eigen::MatrixXd(m, m), Eigen::MatrixXd(m, m)};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double sij = s.values[static_cast<size_t>(i + j)];
      const double sij1 = s.values[static_cast<size_t>(i + j + 1)];
      h.R(i, j) = sij;
      h.Fplus(i, j) = sij1 - a * sij;
      h.Fminus(i, j) = b * sij - sij1;
    }
  return h;
}

RationalHankelBlocks build_hankel_exact(const RationalMoments& s, int m, const Rational& a,
                                        const Rational& b) {
  if (m < 1) throw std::invalid_argument("build_hankel_exact: m must be >= 1");
  if (static_cast<int>(s.values.size()) < 2 * m)
    throw std::invalid_argument("build_hankel_exact: need at least 2m moments");
  if (!(a < b)) throw std::invalid_argument("build_hankel_exact: require a < b");
  RationalHankelBlocks h{RatMatrix(m), RatMatrix(m), RatMatrix(m)};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Rational& sij = s.values[static_cast<size_t>(i + j)];
      const Rational& sij1 = s.values[static_cast<size_t>(i + j + 1)];
      h.R.at(i, j) = sij;
      h.Fplus.at(i, j) = sij1 - a * sij;
      h.Fminus.at(i, j) = b * sij - sij1;
    }
  return h;
}

bool is_psd(const Eigen::MatrixXd& M, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  return lo >= -tol * std::max(1.0, hi);
}

bool in_delta(const std::vector<double>& x, int m, double a, double b, double tol) {
  if (static_cast<int>(x.size()) != 2 * m - 1)
    throw std::invalid_argument("in_delta: x must have exactly 2m-1 entries");
  MomentVector s;
  s.values.reserve(x.size() + 1);
  s.values.push_back(1.0);
  s.values.insert(s.values.end(), x.begin(), x.end());
  s.normalized = true;
  const HankelBlocks h = build_hankel(s, m, a, b);
  return is_psd(h.R, tol) && is_psd(h.Fplus, tol) && is_psd(h.Fminus, tol);
}

namespace {

[[noreturn]] void recover_fail(const std::string& what) {
  throw std::runtime_error("recover_distribution: " + what);
}

}  // namespace

AtomicDistribution recover_distribution(const MomentVector& s, double a, double b,
                                        const RecoverOptions& opt) {
  const int len = static_cast<int>(s.values.size());
  if (len < 2) throw std::invalid_argument("recover_distribution: need at least s_0, s_1");
  const int K = len - 1;
  const int m = (len + 1) / 2;

  const double scale = [&] {
    double sc = 0.0;
    for (double v : s.values) sc = std::max(sc, std::abs(v));
    return std::max(1.0, sc);
  }();

  {
    const HankelBlocks h = build_hankel(s, m, a, b);
    if (!is_psd(h.R, opt.tol) || !is_psd(h.Fplus, opt.tol) || !is_psd(h.Fminus, opt.tol))
      recover_fail("H_m blocks are not PSD within tolerance; moments not realizable on [a,b]");
  }

  // Numerical rank of R_m.
  Eigen::MatrixXd R(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) R(i, j) = s.values[static_cast<size_t>(i + j)];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
  const double smax = svd.singularValues()(0);
  int r = 0;
  for (int i = 0; i < m; ++i)
    if (svd.singularValues()(i) > opt.tol * std::max(smax, 1e-300)) ++r;
  if (smax <= opt.tol * scale) r = 0;

  AtomicDistribution out;
  if (r == 0) return out;  // zero measure

  // Kernel vector of the (r+1)-column Hankel matrix -> Prony polynomial.
  const int rows = K - r + 1;
  if (rows < 1) recover_fail("not enough moments for the detected rank");
  Eigen::MatrixXd Hk(rows, r + 1);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j <= r; ++j) Hk(i, j) = s.values[static_cast<size_t>(i + j)];
  Eigen::JacobiSVD<Eigen::MatrixXd> ksvd(Hk, Eigen::ComputeFullV);
  Eigen::VectorXd q = ksvd.matrixV().col(r);
  if (std::abs(q(r)) < 1e-12 * q.norm())
    recover_fail("degenerate Prony kernel polynomial (leading coefficient ~ 0)");
  q /= q(r);

  // Roots via the companion matrix of q(t) = q_0 + q_1 t + ... + t^r.
  std::vector<double> locations;
  if (r == 1) {
    locations.push_back(-q(0));
  } else {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(r, r);
    for (int i = 1; i < r; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < r; ++i) comp(i, r - 1) = -q(i);
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
    for (int i = 0; i < r; ++i) {
      const std::complex<double> z = es.eigenvalues()(i);
      if (std::abs(z.imag()) > opt.tol * std::max(1.0, std::abs(z.real()))) {
        std::ostringstream msg;
        msg << "complex atom location " << z.real() << " + " << z.imag() << "i";
        recover_fail(msg.str());
      }
      locations.push_back(z.real());
    }
  }
  std::sort(locations.begin(), locations.end());

  for (double& t : locations) {
    if (t < a) {
      if (a - t > opt.boundary_clamp + opt.tol) {
        std::ostringstream msg;
        msg << "atom location " << t << " below interval [" << a << "," << b << "]";
        recover_fail(msg.str());
      }
      t = a;
    } else if (t > b) {
      if (t - b > opt.boundary_clamp + opt.tol) {
        std::ostringstream msg;
        msg << "atom location " << t << " above interval [" << a << "," << b << "]";
        recover_fail(msg.str());
      }
      t = b;
    } else {
      if (t - a < opt.boundary_clamp) t = a;
      if (b - t < opt.boundary_clamp) t = b;
    }
  }

  // Weights from the Vandermonde least-squares system.
  Eigen::MatrixXd V(K + 1, r);
  for (int k = 0; k <= K; ++k)
    for (int i = 0; i < r; ++i) V(k, i) = std::pow(locations[static_cast<size_t>(i)], k);
  Eigen::VectorXd rhs(K + 1);
  for (int k = 0; k <= K; ++k) rhs(k) = s.values[static_cast<size_t>(k)];
  Eigen::VectorXd w = V.colPivHouseholderQr().solve(rhs);

  const double wsum = w.cwiseAbs().sum();
  for (int i = 0; i < r; ++i)
    if (w(i) < -opt.tol * std::max(1.0, wsum)) {
      std::ostringstream msg;
      msg << "negative weight " << w(i) << " at atom " << locations[static_cast<size_t>(i)];
      recover_fail(msg.str());
    }

  const double resid = (V * w - rhs).cwiseAbs().maxCoeff();
  if (resid > opt.tol * scale) {
    std::ostringstream msg;
    msg << "reproduced power sums deviate by " << resid;
    recover_fail(msg.str());
  }

  for (int i = 0; i < r; ++i) {
    if (w(i) <= opt.tol * std::max(1.0, wsum)) continue;  // drop numerically-zero atoms
    out.atoms.push_back(Atom{locations[static_cast<size_t>(i)], w(i)});
  }
  return out;
}

}  // namespace codebound
