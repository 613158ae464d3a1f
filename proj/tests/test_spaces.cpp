#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "codebound/spaces.hpp"
#include "support.hpp"

using namespace codebound;
using namespace codebound::testing;

namespace {

// Exact product of two rational coefficient vectors.
std::vector<Rational> poly_mul(const std::vector<Rational>& p, const std::vector<Rational>& q) {
  std::vector<Rational> r(p.size() + q.size() - 1, Rational(0));
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

// Exact integral of a rational polynomial over [-1, 1].
Rational integrate_sym(const std::vector<Rational>& p) {
  Rational acc(0);
  for (size_t d = 0; d < p.size(); ++d)
    if (d % 2 == 0) acc += p[d] * Rational(2, static_cast<int>(d) + 1);
  return acc;
}

}  // namespace

TEST_CASE("gegenbauer base cases and recurrence step") {
  const ZonalFamily f8 = gegenbauer_family(8, 1);
  REQUIRE(f8.coeffs.size() == 2);
  CHECK(f8.coeffs[0] == std::vector<Rational>{Rational(1)});
  CHECK(f8.coeffs[1] == std::vector<Rational>{Rational(0), Rational(1)});

  // One hand step of the recurrence with k=2, n=4: (4t^2 - 1) / 3.
  const ZonalFamily f4 = gegenbauer_family(4, 2);
  CHECK(f4.coeffs[2] == std::vector<Rational>{Rational(-1, 3), Rational(0), Rational(4, 3)});
}

TEST_CASE("gegenbauer normalization Phi_k(1) = 1 exactly") {
  for (int n : {3, 4, 5, 8, 24}) {
    const ZonalFamily fam = gegenbauer_family(n, 11);
    for (int k = 0; k <= fam.k_max; ++k) {
      CHECK(fam.eval_exact(k, Rational(1)) == Rational(1));
      CHECK(fam.coeffs[static_cast<size_t>(k)].back() != Rational(0));  // degree exactly k
    }
  }
}

TEST_CASE("gegenbauer rejects n < 3") {
  CHECK_THROWS_AS(gegenbauer_family(2, 3), std::invalid_argument);
}

TEST_CASE("gegenbauer orthogonality by exact polynomial integration (odd n)") {
  for (int n : {3, 5, 7}) {
    const int e = (n - 3) / 2;
    // weight (1 - t^2)^e as an exact polynomial
    std::vector<Rational> weight = {Rational(1)};
    for (int i = 0; i < e; ++i) weight = poly_mul(weight, {Rational(1), Rational(0), Rational(-1)});
    const ZonalFamily fam = gegenbauer_family(n, 4);
    for (int j = 0; j <= 4; ++j)
      for (int k = j + 1; k <= 4; ++k) {
        auto prod = poly_mul(fam.coeffs[static_cast<size_t>(j)], fam.coeffs[static_cast<size_t>(k)]);
        prod = poly_mul(prod, weight);
        CHECK(integrate_sym(prod) == Rational(0));
      }
  }
}

TEST_CASE("krawtchouk base cases") {
  const ZonalFamily f = krawtchouk_family(7, 7);
  CHECK(f.coeffs[0] == std::vector<Rational>{Rational(1)});
  // K_1(t,n) = 1 - 2t/n
  CHECK(f.coeffs[1] == std::vector<Rational>{Rational(1), Rational(-2, 7)});
  // tau0 = 0 normalization for all k
  for (int k = 0; k <= 7; ++k) CHECK(f.eval_exact(k, Rational(0)) == Rational(1));

  // K_2(t,3) = 1 - 2t + (2/3) t^2 (direct expansion of the binomial sum)
  const ZonalFamily f3 = krawtchouk_family(3, 2);
  CHECK(f3.coeffs[2] == std::vector<Rational>{Rational(1), Rational(-2), Rational(2, 3)});
}

TEST_CASE("krawtchouk rejects k_max > n") {
  CHECK_THROWS_AS(krawtchouk_family(4, 5), std::invalid_argument);
}

TEST_CASE("zonal gram basics") {
  const ZonalFamily fam = gegenbauer_family(8, 3);
  Eigen::MatrixXd one(1, 1);
  one << 1.0;
  CHECK(zonal_gram(fam, one, 2)(0, 0) == doctest::Approx(1.0));

  Eigen::MatrixXd anti(2, 2);
  anti << 1, -1, -1, 1;
  const Eigen::MatrixXd g = zonal_gram(fam, anti, 1);
  CHECK(g(0, 1) == doctest::Approx(-1.0));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
}

TEST_CASE("zonal gram of sampled point sets is PSD (sphere and Hamming)") {
  Rng rng(20240801);
  const ZonalFamily sph = gegenbauer_family(3, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd pts = random_sphere_points(3, 5, rng);
    const Eigen::MatrixXd tau = sphere_tau(pts);
    for (int k = 0; k <= 6; ++k) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(zonal_gram(sph, tau, k),
                                                        Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    }
  }
  const ZonalFamily ham = krawtchouk_family(6, 6);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<int>> words(5, std::vector<int>(6));
    for (auto& w : words)
      for (auto& b : w) b = bit(rng);
    const Eigen::MatrixXd tau = hamming_tau(words);
    for (int k = 0; k <= 6; ++k) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(zonal_gram(ham, tau, k),
                                                        Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    }
  }
}

TEST_CASE("zonal gram rejects a bad diagonal") {
  const ZonalFamily fam = gegenbauer_family(4, 2);
  Eigen::MatrixXd tau(2, 2);
  tau << 0.5, 0.1, 0.1, 0.5;
  CHECK_THROWS_AS(zonal_gram(fam, tau, 1), std::invalid_argument);
}
