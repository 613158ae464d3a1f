#include "codebound/spaces.hpp"

#include <stdexcept>

namespace codebound {

SpaceSpec SpaceSpec::sphere(int dim) {
  if (dim < 3) throw std::invalid_argument("sphere dimension must be >= 3");
  return SpaceSpec{SpaceKind::Sphere, dim};
}

SpaceSpec SpaceSpec::hamming(int length) {
  if (length < 1) throw std::invalid_argument("Hamming length must be >= 1");
  return SpaceSpec{SpaceKind::Hamming, length};
}

double ZonalFamily::eval(int k, double t) const {
  const auto& c = coeffs_f[static_cast<size_t>(k)];
  double acc = 0.0;
  for (size_t d = c.size(); d-- > 0;) acc = acc * t + c[d];
  return acc;
}

Rational ZonalFamily::eval_exact(int k, const Rational& t) const {
  const auto& c = coeffs[static_cast<size_t>(k)];
  Rational acc(0);
  for (size_t d = c.size(); d-- > 0;) acc = acc * t + c[d];
  return acc;
}

std::vector<double> ZonalFamily::combine(const std::vector<double>& f) const {
  std::vector<double> mono(f.size(), 0.0);
  for (size_t k = 0; k < f.size(); ++k)
    for (size_t d = 0; d <= k; ++d) mono[d] += f[k] * coeffs_f[k][d];
  return mono;
}

void ZonalFamily::cache_doubles() {
  coeffs_f.clear();
  coeffs_f.reserve(coeffs.size());
  for (const auto& row : coeffs) {
    std::vector<double> r;
    r.reserve(row.size());
    for (const auto& c : row) r.push_back(to_double(c));
    coeffs_f.push_back(std::move(r));
  }
}

namespace {

// Polynomials as coefficient vectors (index = power of t).
using Poly = std::vector<Rational>;

Poly shift_mul_t(const Poly& p) {
  Poly q(p.size() + 1, Rational(0));
  for (size_t i = 0; i < p.size(); ++i) q[i + 1] = p[i];
  return q;
}

Poly mul(const Poly& p, const Poly& q) {
  Poly r(p.size() + q.size() - 1, Rational(0));
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

}  // namespace

ZonalFamily gegenbauer_family(int n, int k_max) {
  if (n < 3) throw std::invalid_argument("gegenbauer_family requires n >= 3");
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  ZonalFamily fam;
  fam.space = SpaceSpec::sphere(n);
  fam.k_max = k_max;
  fam.coeffs.resize(static_cast<size_t>(k_max) + 1);
  fam.coeffs[0] = {Rational(1)};
  if (k_max >= 1) fam.coeffs[1] = {Rational(0), Rational(1)};
  for (int k = 2; k <= k_max; ++k) {
    // G_k = ((2k+n-4) t G_{k-1} - (k-1) G_{k-2}) / (k+n-3)
    const Rational c1(2 * k + n - 4), c2(k - 1), den(k + n - 3);
    Poly tGk1 = shift_mul_t(fam.coeffs[static_cast<size_t>(k) - 1]);
    Poly g(static_cast<size_t>(k) + 1, Rational(0));
    for (size_t d = 0; d < tGk1.size(); ++d) g[d] = c1 * tGk1[d] / den;
    const Poly& gk2 = fam.coeffs[static_cast<size_t>(k) - 2];
    for (size_t d = 0; d < gk2.size(); ++d) g[d] -= c2 * gk2[d] / den;
    fam.coeffs[static_cast<size_t>(k)] = std::move(g);
  }
  fam.cache_doubles();
  return fam;
}

ZonalFamily krawtchouk_family(int n, int k_max) {
  if (n < 1) throw std::invalid_argument("krawtchouk_family requires n >= 1");
  if (k_max < 0 || k_max > n) throw std::invalid_argument("krawtchouk_family requires 0 <= k_max <= n");
  ZonalFamily fam;
  fam.space = SpaceSpec::hamming(n);
  fam.k_max = k_max;
  fam.coeffs.resize(static_cast<size_t>(k_max) + 1);

  // binom(t, j) = t (t-1) ... (t-j+1) / j!  as a polynomial in t
  auto binom_t = [](int j) {
    Poly p = {Rational(1)};
    for (int i = 0; i < j; ++i) p = mul(p, Poly{Rational(-i), Rational(1)});
    Rational fact(1);
    for (int i = 2; i <= j; ++i) fact *= i;
    for (auto& c : p) c /= fact;
    return p;
  };
  // binom(n - t, j) as a polynomial in t
  auto binom_nt = [n](int j) {
    Poly p = {Rational(1)};
    for (int i = 0; i < j; ++i) p = mul(p, Poly{Rational(n - i), Rational(-1)});
    Rational fact(1);
    for (int i = 2; i <= j; ++i) fact *= i;
    for (auto& c : p) c /= fact;
    return p;
  };

  for (int k = 0; k <= k_max; ++k) {
    Poly acc(static_cast<size_t>(k) + 1, Rational(0));
    for (int j = 0; j <= k; ++j) {
      Poly term = mul(binom_t(j), binom_nt(k - j));
      const Rational sgn(j % 2 == 0 ? 1 : -1);
      for (size_t d = 0; d < term.size() && d < acc.size(); ++d) acc[d] += sgn * term[d];
    }
    // divide by binom(n, k)
    Rational cnk(1);
    for (int i = 0; i < k; ++i) cnk = cnk * Rational(n - i) / Rational(i + 1);
    for (auto& c : acc) c /= cnk;
    fam.coeffs[static_cast<size_t>(k)] = std::move(acc);
  }
  fam.cache_doubles();
  return fam;
}

Eigen::MatrixXd zonal_gram(const ZonalFamily& family, const Eigen::MatrixXd& tau, int k) {
  if (k < 0 || k > family.k_max) throw std::invalid_argument("zonal_gram: k out of range");
  if (tau.rows() != tau.cols()) throw std::invalid_argument("zonal_gram: tau must be square");
  const double t0 = to_double(family.space.tau0());
  for (Eigen::Index i = 0; i < tau.rows(); ++i)
    if (std::abs(tau(i, i) - t0) > 1e-12)
      throw std::invalid_argument("zonal_gram: tau diagonal must equal tau0");
  Eigen::MatrixXd out(tau.rows(), tau.cols());
  for (Eigen::Index i = 0; i < tau.rows(); ++i)
    for (Eigen::Index j = 0; j < tau.cols(); ++j) out(i, j) = family.eval(k, tau(i, j));
  return out;
}

}  // namespace codebound
