#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "bundlecalc/norms.hpp"

using namespace bundlecalc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd vec2(double a, double b) { return Eigen::Vector2d(a, b); }

// Independent oracle for the dual norm: sup <u,v>/eval(v) over many
// random directions (plus coordinate directions).
double dual_sup_oracle(const NormSpec& s, const Eigen::VectorXd& u,
                       int samples = 200000) {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> gauss;
  double sup = 0.0;
  for (int rep = 0; rep < samples; ++rep) {
    Eigen::VectorXd v(u.size());
    for (int i = 0; i < v.size(); ++i) v(i) = gauss(rng);
    const double n = eval(s, v);
    if (n > 0) sup = std::max(sup, std::abs(u.dot(v)) / n);
  }
  return sup;
}

} // namespace

TEST_CASE("eval closed forms") {
  CHECK(eval(NormSpec::euclidean(2), vec2(3, 4)) == doctest::Approx(5.0));

  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 1;
  CHECK(eval(NormSpec::poly_max(A), vec2(3, -4)) == doctest::Approx(4.0));

  Eigen::MatrixXd V(2, 2);
  V << 1, 0, 0, 1; // columns e1, e2: gauge of conv(+-e_i) is l1
  const NormSpec gauge = NormSpec::poly_gauge(V);
  CHECK(eval(gauge, vec2(3, -4)) == doctest::Approx(7.0));
  // l1 oracle on random vectors.
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::VectorXd v = Eigen::VectorXd::Random(2) * 3;
    CHECK(eval(gauge, v) ==
          doctest::Approx(v.cwiseAbs().sum()).epsilon(1e-12));
  }

  const NormSpec wlp_inf =
      NormSpec::weighted_lp(kInf, Eigen::Vector2d(2.0, 1.0));
  CHECK(eval(wlp_inf, vec2(1, -3)) == doctest::Approx(3.0));
  CHECK(eval(wlp_inf, vec2(2, 1)) == doctest::Approx(4.0));
}

TEST_CASE("kernel basis") {
  Eigen::MatrixXd G(2, 2);
  G << 1, 0, 0, 0;
  const auto k1 = kernel_basis(NormSpec::quadratic(G));
  REQUIRE(k1.size() == 1);
  CHECK(std::abs(k1[0](1)) == doctest::Approx(1.0));
  CHECK(std::abs(k1[0](0)) < 1e-12);

  Eigen::MatrixXd A(1, 2);
  A << 1, 1;
  const auto k2 = kernel_basis(NormSpec::poly_max(A));
  REQUIRE(k2.size() == 1);
  CHECK(std::abs(k2[0](0) + k2[0](1)) < 1e-12); // direction (1,-1)
  CHECK(k2[0].norm() == doctest::Approx(1.0));

  CHECK(kernel_basis(NormSpec::euclidean(3)).empty());
  CHECK(is_norm(NormSpec::euclidean(3)));
  CHECK(!is_norm(NormSpec::quadratic(G)));
}

TEST_CASE("dual closed forms against the sup oracle") {
  Eigen::MatrixXd G = Eigen::Vector2d(4, 1).asDiagonal();
  const NormSpec q = NormSpec::quadratic(G);
  CHECK(eval(dual(q), vec2(1, 0)) == doctest::Approx(0.5));
  CHECK(eval(dual(q), vec2(1, 0)) ==
        doctest::Approx(dual_sup_oracle(q, vec2(1, 0))).epsilon(1e-3));

  // l-infinity as PolyMax over +-basis rows; dual is l1.
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 1;
  const NormSpec linf = NormSpec::poly_max(A);
  const NormSpec d = dual(linf);
  CHECK(d.kind == NormKind::PolyGauge);
  CHECK(eval(d, vec2(3, -4)) == doctest::Approx(7.0));
  CHECK(eval(d, vec2(3, -4)) ==
        doctest::Approx(dual_sup_oracle(linf, vec2(3, -4))).epsilon(1e-3));

  CHECK_THROWS_AS((void)dual(NormSpec::quadratic(
                      (Eigen::MatrixXd(2, 2) << 1, 0, 0, 0).finished())),
                  Error);
}

TEST_CASE("dual is an involution on evaluation, all four families") {
  const Eigen::VectorXd v = vec2(1, 2);
  std::vector<NormSpec> specs;
  specs.push_back(NormSpec::quadratic(
      (Eigen::MatrixXd(2, 2) << 2, 0.5, 0.5, 1).finished()));
  specs.push_back(NormSpec::weighted_lp(1.5, Eigen::Vector2d(0.5, 2)));
  specs.push_back(NormSpec::weighted_lp(1.0, Eigen::Vector2d(1, 3)));
  specs.push_back(NormSpec::weighted_lp(kInf, Eigen::Vector2d(1, 3)));
  specs.push_back(NormSpec::poly_max(
      (Eigen::MatrixXd(3, 2) << 1, 0, 0, 1, 1, 1).finished()));
  specs.push_back(NormSpec::poly_gauge(
      (Eigen::MatrixXd(2, 3) << 1, 0, 1, 0, 1, -1).finished()));
  for (const auto& s : specs) {
    CHECK(eval(dual(dual(s)), v) == doctest::Approx(eval(s, v)).epsilon(1e-9));
    // Contract: eval(dual, u) is the sup of the pairing over the unit ball.
    CHECK(eval(dual(s), v) ==
          doctest::Approx(dual_sup_oracle(s, v)).epsilon(2e-3));
  }
}

TEST_CASE("euclid_upper") {
  CHECK(euclid_upper(NormSpec::quadratic(
            Eigen::MatrixXd(Eigen::Vector2d(4, 1).asDiagonal()))) ==
        doctest::Approx(2.0));
  CHECK(euclid_upper(NormSpec::poly_max(
            (Eigen::MatrixXd(2, 2) << 1, 0, 0, 1).finished())) ==
        doctest::Approx(1.0));
  CHECK(euclid_upper(NormSpec::poly_max(
            (Eigen::MatrixXd(1, 2) << 3, 4).finished())) ==
        doctest::Approx(5.0));
  // Sampled-sphere soundness on a mixed bag.
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  for (const auto& s :
       {NormSpec::weighted_lp(1.5, Eigen::Vector2d(0.5, 2)),
        NormSpec::weighted_lp(kInf, Eigen::Vector2d(2, 1)),
        NormSpec::poly_gauge(
            (Eigen::MatrixXd(2, 2) << 0.5, 0, 0, 2).finished())}) {
    const double K = euclid_upper(s);
    for (int rep = 0; rep < 500; ++rep) {
      Eigen::VectorXd v(2);
      v << gauss(rng), gauss(rng);
      CHECK(eval(s, v) <= K * v.norm() + 1e-12);
    }
  }
}

TEST_CASE("polarization detects scalar products") {
  const Eigen::MatrixXd G =
      (Eigen::MatrixXd(2, 2) << 2, 0.5, 0.5, 1).finished();
  const auto r = polarization_is_hilbert(NormSpec::quadratic(G), 64, 1e-9, 3);
  REQUIRE(r.hilbert);
  CHECK((*r.gram - G).cwiseAbs().maxCoeff() < 1e-9);

  // l1 in R^2: polarization gives I, but (1,1) evaluates to 2, not sqrt(2).
  const auto r2 = polarization_is_hilbert(
      NormSpec::weighted_lp(1.0, Eigen::Vector2d(1, 1)), 64, 1e-9, 3);
  CHECK(!r2.hilbert);

  // Every 1-d norm comes from a scalar product.
  CHECK(polarization_is_hilbert(
            NormSpec::weighted_lp(1.0, Eigen::VectorXd::Ones(1)), 16, 1e-9, 3)
            .hilbert);
  CHECK(polarization_is_hilbert(
            NormSpec::poly_max((Eigen::MatrixXd(1, 1) << 2).finished()), 16,
            1e-9, 3)
            .hilbert);
}

TEST_CASE("lipschitz certification") {
  const NormSpec e2 = NormSpec::euclidean(2);
  const auto ok = lipschitz_le_one(Eigen::MatrixXd::Identity(2, 2), e2, e2);
  CHECK(ok.verdict);
  CHECK(ok.method == "exact");

  const auto bad =
      lipschitz_le_one(2 * Eigen::MatrixXd::Identity(2, 2), e2, e2);
  CHECK(!bad.verdict);
  CHECK(bad.method == "exact");

  // diag(1/2,1/2) from l-infinity to l1: hypercube vertices map to l1-norm 1.
  const NormSpec linf = NormSpec::weighted_lp(kInf, Eigen::Vector2d(1, 1));
  const NormSpec l1 = NormSpec::weighted_lp(1.0, Eigen::Vector2d(1, 1));
  const auto half = lipschitz_le_one(
      0.5 * Eigen::MatrixXd::Identity(2, 2), linf, l1);
  CHECK(half.verdict);
  CHECK(half.method == "exact");
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(
      (void)NormSpec::weighted_lp(2.0, Eigen::Vector2d(1, -1)), Error);
  CHECK_THROWS_AS((void)NormSpec::weighted_lp(0.5, Eigen::Vector2d(1, 1)),
                  Error);
  // Non-spanning gauge generators.
  CHECK_THROWS_AS((void)NormSpec::poly_gauge(
                      (Eigen::MatrixXd(2, 1) << 1, 0).finished()),
                  Error);
  // Non-PSD Gram.
  CHECK_THROWS_AS((void)NormSpec::quadratic(
                      (Eigen::MatrixXd(2, 2) << 1, 0, 0, -1).finished()),
                  Error);
}
