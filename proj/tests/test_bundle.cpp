#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "bundlecalc/bundle.hpp"

using namespace bundlecalc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MeasureSpace space(std::initializer_list<double> w) {
  MeasureSpace s;
  s.weights = Eigen::VectorXd(w.size());
  int i = 0;
  for (double x : w) s.weights(i++) = x;
  return s;
}

Bundle euclidean_bundle(const MeasureSpace& sp, int dim) {
  Bundle b;
  b.space = sp;
  for (int i = 0; i < sp.atom_count(); ++i) {
    b.dims.push_back(dim);
    b.norms.push_back(NormSpec::euclidean(dim));
  }
  return b;
}

} // namespace

TEST_CASE("validate_bundle") {
  Bundle b = euclidean_bundle(space({1, 1, 1}), 2);
  b.dims[0] = 1;
  b.norms[0] = NormSpec::euclidean(1);
  CHECK(validate_bundle(b).valid);

  Bundle bad = b;
  bad.norms[1] = NormSpec::euclidean(3); // dim mismatch at atom 1
  const auto rep = validate_bundle(bad);
  CHECK(!rep.valid);
  CHECK(std::find(rep.bad_atoms.begin(), rep.bad_atoms.end(), 1) !=
        rep.bad_atoms.end());

  // Degenerate norm is fine on a zero-weight atom.
  Bundle nullok = euclidean_bundle(space({1, 0}), 2);
  nullok.norms[1] = NormSpec::zero_seminorm(2);
  CHECK(validate_bundle(nullok).valid);
  Bundle nullbad = euclidean_bundle(space({1, 1}), 2);
  nullbad.norms[1] = NormSpec::zero_seminorm(2);
  CHECK(!validate_bundle(nullbad).valid);
}

TEST_CASE("section_norm") {
  const Bundle b = euclidean_bundle(space({1, 1}), 2);
  Section s{{Eigen::Vector2d(3, 4), Eigen::Vector2d(3, 4)}};
  CHECK(section_norm(b, s).values == Eigen::Vector2d(5, 5));
  CHECK(section_norm(b, zero_section(b)).values.isZero(0.0));

  // dim-1 fiber with norm 2|v| at value 3, dim-2 l1 at (1,-1) -> (6, 2).
  Bundle mixed;
  mixed.space = space({1, 1});
  mixed.dims = {1, 2};
  mixed.norms = {NormSpec::quadratic((Eigen::MatrixXd(1, 1) << 4).finished()),
                 NormSpec::weighted_lp(1.0, Eigen::Vector2d(1, 1))};
  Section t{{Eigen::VectorXd::Constant(1, 3.0), Eigen::Vector2d(1, -1)}};
  CHECK(section_norm(mixed, t).values == Eigen::Vector2d(6, 2));
}

TEST_CASE("constant_section") {
  Bundle b;
  b.space = space({1, 1, 1});
  b.dims = {2, 1, 2};
  b.norms = {NormSpec::euclidean(2), NormSpec::euclidean(1),
             NormSpec::euclidean(2)};
  const Section s = constant_section(b, 2, Eigen::Vector2d(1, 0));
  CHECK(s.vectors[0] == Eigen::Vector2d(1, 0));
  CHECK(s.vectors[1].isZero(0.0));
  CHECK(s.vectors[2] == Eigen::Vector2d(1, 0));

  CHECK(section_norm(b, constant_section(b, 5, Eigen::VectorXd::Ones(5)))
            .values.isZero(0.0));

  const Bundle ones = euclidean_bundle(space({1, 1}), 1);
  const Section c7 = constant_section(ones, 1, Eigen::VectorXd::Constant(1, 7));
  CHECK(c7.vectors[0](0) == 7.0);
  CHECK(c7.vectors[1](0) == 7.0);
}

TEST_CASE("section algebra") {
  const Bundle b = euclidean_bundle(space({1, 2, 1}), 2);
  Section s{{Eigen::Vector2d(1, 2), Eigen::Vector2d(-1, 0),
             Eigen::Vector2d(0.5, 3)}};
  const Section minus = scale_by_field(b, ScalarField::constant(3, -1.0), s);
  CHECK(section_norm(b, add(b, s, minus)).values.isZero(0.0));

  const ScalarField two = ScalarField::constant(3, 2.0);
  CHECK(section_norm(b, scale_by_field(b, two, s)).values ==
        2.0 * section_norm(b, s).values);

  const ScalarField chi = ScalarField::indicator(BorelSet::of({1}, 3), 3);
  const Section restricted = scale_by_field(b, chi, s);
  CHECK(restricted.vectors[1] == s.vectors[1]);
  CHECK(restricted.vectors[0].isZero(0.0));
  CHECK(restricted.vectors[2].isZero(0.0));
}

TEST_CASE("gamma_distance") {
  const Bundle b = euclidean_bundle(space({1, 1, 1, 1}), 1);
  Section s{{Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1),
             Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)}};
  CHECK(gamma_distance(b, s, s) == 0.0);

  // |s-t| = 2 on one atom of m'-mass 1/4, truncated to 1.
  Section t = s;
  t.vectors[0](0) = 2.0;
  CHECK(gamma_distance(b, s, t) == doctest::Approx(0.25));

  // |s-t| = 0.5 everywhere.
  Section u = s;
  for (auto& v : u.vectors) v(0) = 0.5;
  CHECK(gamma_distance(b, s, u) == doctest::Approx(0.5));
}

TEST_CASE("glue") {
  const Bundle b = euclidean_bundle(space({1, 1, 1}), 1);
  Section s{{Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 2.0),
             Eigen::VectorXd::Constant(1, 3.0)}};
  Section t{{Eigen::VectorXd::Constant(1, 9.0), Eigen::VectorXd::Constant(1, 8.0),
             Eigen::VectorXd::Constant(1, 7.0)}};
  const Section g =
      glue(b, {{BorelSet::of({0}, 3), s}, {BorelSet::of({1}, 3), t}});
  CHECK(g.vectors[0](0) == 1.0);
  CHECK(g.vectors[1](0) == 8.0);
  CHECK(g.vectors[2](0) == 0.0); // zero-fill off the union

  CHECK(section_norm(b, glue(b, {})).values.isZero(0.0));
  const Section whole = glue(b, {{BorelSet::all(3), s}});
  CHECK(whole.vectors[2](0) == 3.0);

  CHECK_THROWS_AS((void)glue(b, {{BorelSet::of({0, 1}, 3), s},
                                 {BorelSet::of({1}, 3), t}}),
                  Error);
}

TEST_CASE("morphisms") {
  const MeasureSpace sp = space({1, 1});
  Bundle src;
  src.space = sp;
  src.dims = {2, 2};
  src.norms = {NormSpec::weighted_lp(kInf, Eigen::Vector2d(1, 1)),
               NormSpec::weighted_lp(kInf, Eigen::Vector2d(1, 1))};
  Bundle dst;
  dst.space = sp;
  dst.dims = {2, 2};
  dst.norms = {NormSpec::weighted_lp(1.0, Eigen::Vector2d(1, 1)),
               NormSpec::weighted_lp(1.0, Eigen::Vector2d(1, 1))};

  // diag(1/2,1/2) from l-infinity to l1 fibers.
  std::vector<Eigen::MatrixXd> mats(2, 0.5 * Eigen::MatrixXd::Identity(2, 2));
  const BundleMorphism half = make_morphism(src, dst, mats, 1);
  Section s{{Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1)}};
  const Section hs = apply_morphism(half, s);
  CHECK(hs.vectors[0] == Eigen::Vector2d(0.5, 0.5));
  CHECK(section_norm(dst, hs).values(0) <= section_norm(src, s).values(0));

  // Identity and zero morphisms on a Euclidean bundle.
  const Bundle e = euclidean_bundle(sp, 2);
  const BundleMorphism id = make_morphism(
      e, e, {Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)},
      1);
  CHECK(apply_morphism(id, s).vectors[0] == s.vectors[0]);
  const BundleMorphism zero = make_morphism(
      e, e, {Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)}, 1);
  CHECK(section_norm(e, apply_morphism(zero, s)).values.isZero(0.0));

  // Non-contractive maps are rejected on positive-weight atoms...
  CHECK_THROWS_AS((void)make_morphism(e, e,
                                      {2 * Eigen::MatrixXd::Identity(2, 2),
                                       Eigen::MatrixXd::Identity(2, 2)},
                                      1),
                  Error);
  // ...but allowed on null atoms.
  Bundle enull = e;
  enull.space = space({0, 1});
  const Bundle e2 = enull;
  CHECK_NOTHROW((void)make_morphism(e2, e2,
                                    {2 * Eigen::MatrixXd::Identity(2, 2),
                                     Eigen::MatrixXd::Identity(2, 2)},
                                    1));

  // a.e. equality of morphisms.
  CHECK(morphisms_ae_equal(id, id));
  BundleMorphism id2 = id;
  CHECK(morphisms_ae_equal(id, id2));
  id2.mats[0] *= 0.5;
  CHECK(!morphisms_ae_equal(id, id2));
}

TEST_CASE("quantize") {
  const Bundle b = euclidean_bundle(space({1}), 1);
  Section s{{Eigen::VectorXd::Constant(1, M_PI)}};
  const Section q = quantize(b, s, 0.5);
  CHECK(std::abs(q.vectors[0](0) - M_PI) <= 0.125);
  CHECK(gamma_distance(b, s, q) <= 0.5);
  // Grid values are dyadic: scaling by a large power of two gives integers.
  CHECK(std::abs(q.vectors[0](0) * 4096 -
                 std::round(q.vectors[0](0) * 4096)) < 1e-9);

  // Already on the grid -> fixed point.
  const Section q2 = quantize(b, q, 0.5);
  CHECK(q2.vectors[0](0) == q.vectors[0](0));

  // Huge eps is trivially satisfied (and d_Gamma <= 1 anyway).
  CHECK(gamma_distance(b, s, quantize(b, s, 10.0)) <= 1.0);
  CHECK_THROWS_AS((void)quantize(b, s, 0.0), Error);
}
