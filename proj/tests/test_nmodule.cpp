#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "bundlecalc/nmodule.hpp"

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

// The running 3-atom example: g = 2 with zero Gram / diag(1,0) / identity.
PresentedModule three_atom_module() {
  PresentedModule M;
  M.space = space({1, 1, 1});
  M.generators = 2;
  M.seminorms = {NormSpec::zero_seminorm(2),
                 NormSpec::quadratic(
                     (Eigen::MatrixXd(2, 2) << 1, 0, 0, 0).finished()),
                 NormSpec::euclidean(2)};
  return M;
}

Element element(const std::vector<Eigen::Vector2d>& rows) {
  Element e;
  e.coeffs.resize(rows.size(), 2);
  for (size_t i = 0; i < rows.size(); ++i) e.coeffs.row(i) = rows[i];
  return e;
}

} // namespace

TEST_CASE("pnorm") {
  PresentedModule M;
  M.space = space({1});
  M.generators = 2;
  M.seminorms = {NormSpec::poly_max((Eigen::MatrixXd(1, 2) << 1, 1).finished())};

  CHECK(pnorm(M, element({{1, -1}})).values(0) == 0.0);
  CHECK(pnorm(M, element({{1, 0}})).values(0) == doctest::Approx(1.0));

  // Homogeneity under the constant field 3.
  Element e = element({{0.7, 2.1}});
  Element e3 = e;
  e3.coeffs *= 3.0;
  CHECK(pnorm(M, e3).values(0) == doctest::Approx(3.0 * pnorm(M, e).values(0)));

  // Kernel-valued coefficients everywhere give the zero field.
  PresentedModule K = three_atom_module();
  const Element ker = element({{5, -2}, {0, 4}, {0, 0}});
  CHECK(pnorm(K, ker).values.isZero(0.0));
}

TEST_CASE("module_distance") {
  // Weights chosen so the reference measure m' = ((w/(1+w))/Z) is (0.3, 0.7).
  PresentedModule M;
  M.space = space({3.0 / 7.0, 7.0 / 3.0});
  M.generators = 1;
  M.seminorms = {NormSpec::euclidean(1), NormSpec::euclidean(1)};
  Element u, v;
  u.coeffs = Eigen::MatrixXd::Zero(2, 1);
  v = u;
  CHECK(module_distance(M, u, u) == 0.0);

  // Pointwise norm 2 on m'-mass 0.3, truncated at 1.
  v.coeffs(0, 0) = 2.0;
  CHECK(module_distance(M, u, v) == doctest::Approx(0.3));

  // Kernel-valued differences are invisible to the distance.
  PresentedModule K = three_atom_module();
  const Element a = element({{1, 2}, {3, 4}, {0, 0}});
  Element b = a;
  b.coeffs(0, 0) += 9;   // zero seminorm atom
  b.coeffs(1, 1) -= 5;   // kernel coordinate of diag(1,0)
  CHECK(module_distance(K, a, b) == 0.0);
  CHECK(elements_ae_equal(K, a, b));
}

TEST_CASE("decompose") {
  const PresentedModule M = three_atom_module();
  const Decomposition d = decompose(M);
  CHECK(d.dim_per_atom == std::vector<int>{0, 1, 2});
  REQUIRE(d.pieces.count(0) == 1);
  CHECK(d.pieces.at(0).members == std::vector<int>{0});
  CHECK(d.pieces.at(1).members == std::vector<int>{1});
  CHECK(d.pieces.at(2).members == std::vector<int>{2});

  // Generator permutation leaves the dims untouched.
  PresentedModule P = M;
  for (auto& s : P.seminorms) {
    Eigen::MatrixXd G = s.gram;
    G.row(0).swap(G.row(1));
    G.col(0).swap(G.col(1));
    s = NormSpec::quadratic(G);
  }
  CHECK(decompose(P).dim_per_atom == d.dim_per_atom);

  // Rescaling generator 0 by the field f = 3: conjugate by diag(3,1).
  PresentedModule R = M;
  const Eigen::Matrix2d T = Eigen::Vector2d(3, 1).asDiagonal();
  for (auto& s : R.seminorms)
    s = NormSpec::quadratic(T.transpose() * s.gram * T);
  CHECK(decompose(R).dim_per_atom == d.dim_per_atom);
}

TEST_CASE("pivot_chart") {
  const PresentedModule M = three_atom_module();
  const PivotChart c = pivot_chart(M, decompose(M));
  CHECK(c.pivots[0].empty());
  CHECK(c.pivots[1] == std::vector<int>{0}); // diag(1,0): first generator
  CHECK(c.pivots[2] == std::vector<int>{0, 1});

  // G = [[0,0],[0,1]] pivots on the second generator.
  PresentedModule M2;
  M2.space = space({1});
  M2.generators = 2;
  M2.seminorms = {NormSpec::quadratic(
      (Eigen::MatrixXd(2, 2) << 0, 0, 0, 1).finished())};
  CHECK(pivot_chart(M2, decompose(M2)).pivots[0] == std::vector<int>{1});

  // PolyMax row (0,1): same pivot, via the stacked-rows kernel matrix.
  PresentedModule M3 = M2;
  M3.seminorms = {NormSpec::poly_max((Eigen::MatrixXd(1, 2) << 0, 1).finished())};
  CHECK(pivot_chart(M3, decompose(M3)).pivots[0] == std::vector<int>{1});

  // Rank-1 all-ones Gram: lexicographically least pivot is generator 0.
  PresentedModule M4 = M2;
  M4.seminorms = {NormSpec::quadratic(Eigen::MatrixXd::Ones(2, 2))};
  CHECK(pivot_chart(M4, decompose(M4)).pivots[0] == std::vector<int>{0});
}

TEST_CASE("reconstruct") {
  const PresentedModule M = three_atom_module();
  const Reconstruction rec = reconstruct(M);
  CHECK(rec.bundle.dims == std::vector<int>{0, 1, 2});
  CHECK(rec.bundle.norms[1].gram == Eigen::MatrixXd::Ones(1, 1));
  CHECK(rec.bundle.norms[2].gram == Eigen::MatrixXd::Identity(2, 2));

  // Scalar case: g = 1, seminorm 2|c| -> dim 1, fiber norm 2|v|.
  PresentedModule S;
  S.space = space({1});
  S.generators = 1;
  S.seminorms = {NormSpec::quadratic((Eigen::MatrixXd(1, 1) << 4).finished())};
  const Reconstruction rs = reconstruct(S);
  CHECK(rs.bundle.dims == std::vector<int>{1});
  CHECK(eval(rs.bundle.norms[0], Eigen::VectorXd::Constant(1, 3.0)) ==
        doctest::Approx(6.0));

  // A module already of bundle form round-trips with the same dims.
  const PresentedModule gm = gamma_module(rec.bundle);
  CHECK(decompose(gm).dim_per_atom == rec.bundle.dims);
  CHECK(reconstruct(gm).bundle.dims == rec.bundle.dims);
}

TEST_CASE("iso_apply and iso_invert") {
  const PresentedModule M = three_atom_module();
  const Reconstruction rec = reconstruct(M);

  // Zero section <-> zero element.
  const Section z = zero_section(rec.bundle);
  CHECK(iso_apply(rec.iso, z).coeffs.isZero(0.0));
  CHECK(section_norm(rec.bundle, iso_invert(rec.iso, iso_apply(rec.iso, z)))
            .values.isZero(0.0));

  // Constant basis section e_0 on E_1 embeds at the pivot coordinate.
  const Section e0 = constant_section(rec.bundle, 1, Eigen::VectorXd::Unit(1, 0));
  const Element emb = iso_apply(rec.iso, e0);
  CHECK(emb.coeffs(1, 0) == 1.0);
  CHECK(emb.coeffs(1, 1) == 0.0);
  CHECK(emb.coeffs.row(0).isZero(0.0));
  CHECK(emb.coeffs.row(2).isZero(0.0));

  // Kernel + pivot coefficients reduce to the pivot part with equal norms.
  const Element mixed = element({{7, -3}, {2.5, 11}, {1, -1}});
  const Section s = iso_invert(rec.iso, mixed);
  CHECK(s.vectors[1](0) == doctest::Approx(2.5));
  CHECK(s.vectors[2] == Eigen::Vector2d(1, -1));
  const ScalarField a = pnorm(M, mixed);
  const ScalarField b = section_norm(rec.bundle, s);
  for (int i = 0; i < 3; ++i)
    CHECK(a.values(i) == doctest::Approx(b.values(i)).epsilon(1e-10));
  CHECK(elements_ae_equal(M, mixed, iso_apply(rec.iso, s)));
}

TEST_CASE("gamma_module") {
  // dims (1,2): g = 3; on the dim-1 atom the 2-block is in the kernel.
  Bundle b;
  b.space = space({1, 1});
  b.dims = {1, 2};
  b.norms = {NormSpec::euclidean(1), NormSpec::euclidean(2)};
  const PresentedModule gm = gamma_module(b);
  CHECK(gm.generators == 3);
  CHECK(kernel_basis(gm.seminorms[0]).size() == 2);
  CHECK(kernel_basis(gm.seminorms[1]).size() == 1);
  CHECK(decompose(gm).dim_per_atom == b.dims);

  // Uniform dim: g = n and the seminorm is the fiber norm itself.
  Bundle u;
  u.space = space({1, 1});
  u.dims = {2, 2};
  u.norms = {NormSpec::euclidean(2),
             NormSpec::quadratic((Eigen::MatrixXd(2, 2) << 4, 0, 0, 1).finished())};
  const PresentedModule gu = gamma_module(u);
  CHECK(gu.generators == 2);
  CHECK(eval(gu.seminorms[1], Eigen::Vector2d(1, 0)) == doctest::Approx(2.0));

  // Zero bundle: g = 0.
  Bundle z;
  z.space = space({1, 1});
  z.dims = {0, 0};
  z.norms = {NormSpec::zero_seminorm(0), NormSpec::zero_seminorm(0)};
  CHECK(gamma_module(z).generators == 0);
}

TEST_CASE("gamma_hom and lift_hom") {
  const MeasureSpace sp = space({1, 1});
  Bundle b;
  b.space = sp;
  b.dims = {2, 2};
  b.norms = {NormSpec::euclidean(2), NormSpec::euclidean(2)};
  const PresentedModule gm = gamma_module(b);

  const BundleMorphism id = make_morphism(
      b, b, {Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)},
      1);
  const ModuleHom gid = gamma_hom(id);
  CHECK(gid.kernel_respecting);
  CHECK(gid.contractive);
  CHECK(gid.mats[0] == Eigen::MatrixXd::Identity(2, 2));

  const BundleMorphism zero = make_morphism(
      b, b, {Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(2, 2)}, 1);
  CHECK(gamma_hom(zero).mats[1].isZero(0.0));

  // Per-atom contraction transfers to generator elements.
  const BundleMorphism half = make_morphism(
      b, b,
      {0.5 * Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(2, 2)},
      1);
  const ModuleHom gh = gamma_hom(half);
  Element e;
  e.coeffs = (Eigen::MatrixXd(2, 2) << 1, -2, 0.5, 3).finished();
  const ScalarField before = pnorm(gm, e);
  const ScalarField after = pnorm(gm, apply_hom(gh, e));
  for (int i = 0; i < 2; ++i) CHECK(after.values(i) <= before.values(i) + 1e-12);

  // Round trip recovers the fiber matrices exactly.
  const BundleMorphism back = lift_hom(gh, b, b, 1);
  CHECK(back.mats[0] == half.mats[0]);
  CHECK(back.mats[1] == half.mats[1]);
  CHECK(morphisms_ae_equal(back, half));

  // Identity hom lifts to the identity morphism.
  CHECK(morphisms_ae_equal(lift_hom(gid, b, b, 1), id));

  // Scaling a generator by 2 is not contractive -> lift must refuse.
  ModuleHom stretch = gid;
  std::vector<Eigen::MatrixXd> mats = {2 * Eigen::MatrixXd::Identity(2, 2),
                                       Eigen::MatrixXd::Identity(2, 2)};
  stretch = make_hom(gm, gm, mats, 1);
  CHECK(stretch.kernel_respecting);
  CHECK(!stretch.contractive);
  CHECK_THROWS_AS((void)lift_hom(stretch, b, b, 1), Error);
}

TEST_CASE("lift_through") {
  const MeasureSpace sp = space({1});
  auto module_of = [&](int g, NormSpec n) {
    PresentedModule m;
    m.space = sp;
    m.generators = g;
    m.seminorms = {std::move(n)};
    return m;
  };
  const PresentedModule N = module_of(2, NormSpec::euclidean(2));
  const PresentedModule P = module_of(1, NormSpec::euclidean(1));

  // f = identity: the lift is g itself.
  const ModuleHom idN =
      make_hom(N, N, {Eigen::MatrixXd::Identity(2, 2)}, 1);
  const ModuleHom gmap =
      make_hom(N, N, {(Eigen::MatrixXd(2, 2) << 0, 1, 1, 0).finished()}, 1);
  const ModuleHom h0 = lift_through(idN, gmap, 1);
  CHECK(h0.mats[0] == gmap.mats[0]);

  // f = projection (1,0): least-norm preimage of 1 is (1,0).
  const ModuleHom proj =
      make_hom(N, P, {(Eigen::MatrixXd(1, 2) << 1, 0).finished()}, 1);
  const ModuleHom one =
      make_hom(P, P, {(Eigen::MatrixXd(1, 1) << 1).finished()}, 1);
  const ModuleHom h = lift_through(proj, one, 1);
  CHECK(h.mats[0].rows() == 2);
  CHECK(h.mats[0](0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(h.mats[0](1, 0)) < 1e-12);

  // f o h = g on generator elements.
  Element gen;
  gen.coeffs = Eigen::MatrixXd::Identity(1, 1);
  const Element lhs = apply_hom(compose_hom(proj, h, 1), gen);
  CHECK(pnorm(P, element_sub(lhs, apply_hom(one, gen))).values.maxCoeff() <
        1e-9);

  // Non-surjective f has no lift...
  const ModuleHom zerof =
      make_hom(N, P, {Eigen::MatrixXd::Zero(1, 2)}, 1);
  CHECK_THROWS_AS((void)lift_through(zerof, one, 1), Error);

  // ...unless the failure sits on a null atom.
  PresentedModule N2 = N, P2 = P;
  N2.space = P2.space = space({1, 0});
  N2.seminorms.push_back(NormSpec::euclidean(2));
  P2.seminorms.push_back(NormSpec::euclidean(1));
  const ModuleHom projnull = make_hom(
      N2, P2,
      {(Eigen::MatrixXd(1, 2) << 1, 0).finished(), Eigen::MatrixXd::Zero(1, 2)},
      1);
  const ModuleHom onenull = make_hom(
      P2, P2,
      {(Eigen::MatrixXd(1, 1) << 1).finished(), Eigen::MatrixXd::Zero(1, 1)},
      1);
  CHECK_NOTHROW((void)lift_through(projnull, onenull, 1));
}

TEST_CASE("lp bridge") {
  PresentedModule M;
  M.space = space({1, 1, 2});
  M.generators = 1;
  M.seminorms = {NormSpec::euclidean(1), NormSpec::euclidean(1),
                 NormSpec::euclidean(1)};
  Element e;
  e.coeffs = (Eigen::MatrixXd(3, 1) << 1, 2, 0).finished();
  CHECK(lp_norm(M, e, 2.0) == doctest::Approx(std::sqrt(5.0)));
  CHECK(lp_norm(M, e, kInf) == doctest::Approx(2.0));
  CHECK(lp_norm(M, e, 1.0) == doctest::Approx(3.0));
  CHECK_THROWS_AS((void)lp_norm(M, e, 0.5), Error);

  // Section-side bridge and membership (always true on finite atoms).
  Bundle b;
  b.space = M.space;
  b.dims = {1, 1, 1};
  b.norms = M.seminorms;
  Section s{{Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 2.0),
             Eigen::VectorXd::Zero(1)}};
  CHECK(lp_section_norm(b, s, 2.0) == doctest::Approx(std::sqrt(5.0)));
  CHECK(gamma_p_membership(b, s, 1.0));
  CHECK(gamma_p_membership(b, s, kInf));

  // The lp restriction does not change the decomposition.
  CHECK(decompose(M).dim_per_atom == std::vector<int>{1, 1, 1});
}
