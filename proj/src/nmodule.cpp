#include "bundlecalc/nmodule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bundlecalc {

namespace {

constexpr double kRankTol = 1e-10;

void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

int numeric_rank(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  const double top = sv(0);
  if (top == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankTol * top) ++r;
  return r;
}

void check_element(const PresentedModule& M, const Element& e,
                   const char* where) {
  require(e.coeffs.rows() == M.atom_count() && e.coeffs.cols() == M.generators,
          std::string(where) + ": element shape mismatch");
}

// Restriction of a seminorm to a coordinate subset S.
NormSpec restrict_spec(const NormSpec& spec, const std::vector<int>& S) {
  const int k = static_cast<int>(S.size());
  if (spec.kind == NormKind::Quadratic) {
    Eigen::MatrixXd G(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) G(a, b) = spec.gram(S[a], S[b]);
    return NormSpec::quadratic(std::move(G));
  }
  Eigen::MatrixXd A(spec.functionals.rows(), k);
  for (int b = 0; b < k; ++b) A.col(b) = spec.functionals.col(S[b]);
  return NormSpec::poly_max(std::move(A));
}

} // namespace

void PresentedModule::validate() const {
  space.validate();
  require(generators >= 0, "presented module: negative generator count");
  require(static_cast<int>(seminorms.size()) == atom_count(),
          "presented module: one seminorm per atom required");
  for (const auto& s : seminorms) {
    require(s.kind == NormKind::Quadratic || s.kind == NormKind::PolyMax,
            "presented module: seminorms must be Quadratic or PolyMax");
    require(s.dim() == generators,
            "presented module: seminorm dimension must equal generator count");
  }
}

ScalarField pnorm(const PresentedModule& M, const Element& e) {
  check_element(M, e, "pnorm");
  Eigen::VectorXd out(M.atom_count());
  for (int i = 0; i < M.atom_count(); ++i)
    out(i) = eval(M.seminorms[i], e.coeffs.row(i).transpose());
  return ScalarField{std::move(out)};
}

double module_distance(const PresentedModule& M, const Element& u,
                       const Element& v) {
  const ScalarField d = pnorm(M, element_sub(u, v));
  const ReferenceMeasure mp = reference_measure(M.space);
  double out = 0.0;
  for (int i = 0; i < M.atom_count(); ++i)
    out += mp.probs(i) * std::min(d.values(i), 1.0);
  return out;
}

Element element_sub(const Element& u, const Element& v) {
  require(u.coeffs.rows() == v.coeffs.rows() && u.coeffs.cols() == v.coeffs.cols(),
          "element_sub: shape mismatch");
  return Element{u.coeffs - v.coeffs};
}

bool elements_ae_equal(const PresentedModule& M, const Element& u,
                       const Element& v, double tol) {
  const ScalarField d = pnorm(M, element_sub(u, v));
  for (int i = 0; i < M.atom_count(); ++i)
    if (!M.space.null_atom(i) && d.values(i) > tol) return false;
  return true;
}

Decomposition decompose(const PresentedModule& M) {
  M.validate();
  Decomposition dec;
  dec.dim_per_atom.reserve(M.atom_count());
  for (int i = 0; i < M.atom_count(); ++i)
    dec.dim_per_atom.push_back(numeric_rank(kernel_matrix(M.seminorms[i])));
  for (int i = 0; i < M.atom_count(); ++i) {
    auto& piece = dec.pieces[dec.dim_per_atom[i]];
    piece.members.push_back(i);
  }
  return dec;
}

PivotChart pivot_chart(const PresentedModule& M, const Decomposition& dec) {
  require(static_cast<int>(dec.dim_per_atom.size()) == M.atom_count(),
          "pivot_chart: decomposition shape mismatch");
  PivotChart chart;
  chart.pivots.resize(M.atom_count());
  for (int i = 0; i < M.atom_count(); ++i) {
    const Eigen::MatrixXd K = kernel_matrix(M.seminorms[i]);
    const int r = dec.dim_per_atom[i];
    auto& S = chart.pivots[i];
    // Greedy lowest-index-first column selection; greedy is optimal for
    // matroid independence, so the result is the lexicographically-least
    // independent set.
    for (int j = 0; j < M.generators && static_cast<int>(S.size()) < r; ++j) {
      Eigen::MatrixXd cols(K.rows(), S.size() + 1);
      for (size_t t = 0; t < S.size(); ++t) cols.col(t) = K.col(S[t]);
      cols.col(S.size()) = K.col(j);
      if (numeric_rank(cols) == static_cast<int>(S.size()) + 1) S.push_back(j);
    }
  }
  return chart;
}

Reconstruction reconstruct(const PresentedModule& M) {
  Decomposition dec = decompose(M);
  PivotChart chart = pivot_chart(M, dec);
  Bundle b;
  b.space = M.space;
  b.dims = dec.dim_per_atom;
  b.norms.reserve(M.atom_count());
  for (int i = 0; i < M.atom_count(); ++i)
    b.norms.push_back(restrict_spec(M.seminorms[i], chart.pivots[i]));
  Reconstruction rec;
  rec.iso = Iso{M, b, std::move(dec), std::move(chart)};
  rec.bundle = std::move(b);
  return rec;
}

Element iso_apply(const Iso& iso, const Section& s) {
  require(static_cast<int>(s.vectors.size()) == iso.module.atom_count(),
          "iso_apply: section shape mismatch");
  Element e{Eigen::MatrixXd::Zero(iso.module.atom_count(),
                                  iso.module.generators)};
  for (int i = 0; i < iso.module.atom_count(); ++i) {
    const auto& S = iso.chart.pivots[i];
    require(s.vectors[i].size() == static_cast<int>(S.size()),
            "iso_apply: fiber dimension mismatch");
    for (size_t t = 0; t < S.size(); ++t)
      e.coeffs(i, S[t]) = s.vectors[i](t);
  }
  return e;
}

Section iso_invert(const Iso& iso, const Element& e) {
  check_element(iso.module, e, "iso_invert");
  Section s;
  s.vectors.reserve(iso.module.atom_count());
  for (int i = 0; i < iso.module.atom_count(); ++i) {
    const auto& S = iso.chart.pivots[i];
    if (S.empty()) { // zero fiber
      s.vectors.push_back(Eigen::VectorXd::Zero(0));
      continue;
    }
    const Eigen::MatrixXd K = kernel_matrix(iso.module.seminorms[i]);
    Eigen::MatrixXd KS(K.rows(), S.size());
    for (size_t t = 0; t < S.size(); ++t) KS.col(t) = K.col(S[t]);
    // K_S y = K c is solvable exactly: the pivot columns span col(K).
    const Eigen::VectorXd rhs = K * e.coeffs.row(i).transpose();
    s.vectors.push_back(
        KS.completeOrthogonalDecomposition().solve(rhs).eval());
  }
  return s;
}

GammaLayout GammaLayout::of(const Bundle& b) {
  GammaLayout layout;
  for (int n : b.distinct_dims()) {
    layout.offset[n] = layout.generators;
    layout.block_dims.push_back(n);
    layout.generators += n;
  }
  return layout;
}

PresentedModule gamma_module(const Bundle& b) {
  const GammaLayout layout = GammaLayout::of(b);
  PresentedModule M;
  M.space = b.space;
  M.generators = layout.generators;
  M.seminorms.reserve(b.atom_count());
  for (int i = 0; i < b.atom_count(); ++i) {
    const int n = b.dims[i];
    const int off = layout.offset.at(n);
    const NormSpec& fiber = b.norms[i];
    const int g = layout.generators;
    switch (fiber.kind) {
      case NormKind::Quadratic: {
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(g, g);
        G.block(off, off, n, n) = fiber.gram;
        M.seminorms.push_back(NormSpec::quadratic(std::move(G)));
        break;
      }
      case NormKind::PolyMax: {
        Eigen::MatrixXd A =
            Eigen::MatrixXd::Zero(fiber.functionals.rows(), g);
        A.block(0, off, A.rows(), n) = fiber.functionals;
        M.seminorms.push_back(NormSpec::poly_max(std::move(A)));
        break;
      }
      case NormKind::WeightedLp: {
        if (fiber.p == 2.0) {
          Eigen::MatrixXd G = Eigen::MatrixXd::Zero(g, g);
          for (int c = 0; c < n; ++c) G(off + c, off + c) = fiber.weights(c);
          M.seminorms.push_back(NormSpec::quadratic(std::move(G)));
          break;
        }
        if (fiber.p == std::numeric_limits<double>::infinity()) {
          Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, g);
          for (int c = 0; c < n; ++c) A(c, off + c) = fiber.weights(c);
          M.seminorms.push_back(NormSpec::poly_max(std::move(A)));
          break;
        }
        throw Error("gamma_module: weighted-lp fiber with p not in {2, inf} "
                    "has no exact-kernel presentation");
      }
      case NormKind::PolyGauge:
        throw Error("gamma_module: poly-gauge fibers have no exact-kernel "
                    "presentation; convert to poly-max via the dual first");
    }
  }
  return M;
}

ModuleHom gamma_hom(const BundleMorphism& phi) {
  const GammaLayout l1 = GammaLayout::of(phi.source);
  const GammaLayout l2 = GammaLayout::of(phi.target);
  ModuleHom hom;
  hom.source = gamma_module(phi.source);
  hom.target = gamma_module(phi.target);
  hom.mats.reserve(phi.mats.size());
  for (size_t i = 0; i < phi.mats.size(); ++i) {
    const int n1 = phi.source.dims[i];
    const int n2 = phi.target.dims[i];
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(l2.generators, l1.generators);
    mat.block(l2.offset.at(n2), l1.offset.at(n1), n2, n1) = phi.mats[i];
    hom.mats.push_back(std::move(mat));
  }
  hom.kernel_respecting = true;
  hom.contractive = true;
  hom.contractive_method = "inherited";
  return hom;
}

BundleMorphism lift_hom(const ModuleHom& hom, const Bundle& b1,
                        const Bundle& b2, std::uint64_t seed) {
  const GammaLayout l1 = GammaLayout::of(b1);
  const GammaLayout l2 = GammaLayout::of(b2);
  require(hom.source.generators == l1.generators &&
              hom.target.generators == l2.generators,
          "lift_hom: hom does not match the section-module presentations");
  require(static_cast<int>(hom.mats.size()) == b1.atom_count(),
          "lift_hom: atom count mismatch");
  std::vector<Eigen::MatrixXd> mats;
  mats.reserve(hom.mats.size());
  for (int i = 0; i < b1.atom_count(); ++i) {
    const int n1 = b1.dims[i];
    const int n2 = b2.dims[i];
    mats.push_back(
        hom.mats[i].block(l2.offset.at(n2), l1.offset.at(n1), n2, n1));
  }
  try {
    return make_morphism(b1, b2, std::move(mats), seed);
  } catch (const Error&) {
    throw Error("lift_hom: hom is not contractive on a positive-weight atom");
  }
}

ModuleHom make_hom(PresentedModule source, PresentedModule target,
                   std::vector<Eigen::MatrixXd> mats, std::uint64_t seed) {
  source.validate();
  target.validate();
  require(same_space(source.space, target.space),
          "make_hom: same underlying space required");
  require(static_cast<int>(mats.size()) == source.atom_count(),
          "make_hom: one matrix per atom required");
  ModuleHom hom;
  hom.kernel_respecting = true;
  hom.contractive = true;
  hom.contractive_method = "exact";
  for (int i = 0; i < source.atom_count(); ++i) {
    require(mats[i].rows() == target.generators &&
                mats[i].cols() == source.generators,
            "make_hom: matrix shape mismatch at atom " + std::to_string(i));
    if (source.space.null_atom(i)) continue;
    const Eigen::MatrixXd Kt = kernel_matrix(target.seminorms[i]);
    for (const auto& k : kernel_basis(source.seminorms[i])) {
      if ((Kt * (mats[i] * k)).cwiseAbs().maxCoeff() > 1e-9)
        hom.kernel_respecting = false;
    }
    const auto cert =
        lipschitz_le_one(mats[i], source.seminorms[i], target.seminorms[i],
                         seed + static_cast<std::uint64_t>(i));
    if (!cert.verdict) hom.contractive = false;
    if (cert.method == "sampled") hom.contractive_method = "sampled";
  }
  if (!hom.contractive) hom.contractive_method.clear();
  hom.source = std::move(source);
  hom.target = std::move(target);
  hom.mats = std::move(mats);
  return hom;
}

Element apply_hom(const ModuleHom& hom, const Element& e) {
  check_element(hom.source, e, "apply_hom");
  Element out{Eigen::MatrixXd::Zero(hom.target.atom_count(),
                                    hom.target.generators)};
  for (int i = 0; i < hom.target.atom_count(); ++i)
    out.coeffs.row(i) = (hom.mats[i] * e.coeffs.row(i).transpose()).transpose();
  return out;
}

ModuleHom compose_hom(const ModuleHom& f, const ModuleHom& g,
                      std::uint64_t seed) {
  require(f.source.generators == g.target.generators,
          "compose_hom: shape mismatch");
  std::vector<Eigen::MatrixXd> mats;
  mats.reserve(f.mats.size());
  for (size_t i = 0; i < f.mats.size(); ++i)
    mats.push_back(f.mats[i] * g.mats[i]);
  return make_hom(g.source, f.target, std::move(mats), seed);
}

ModuleHom lift_through(const ModuleHom& f, const ModuleHom& g,
                       std::uint64_t seed) {
  require(f.target.generators == g.target.generators &&
              same_space(f.target.space, g.target.space),
          "lift_through: f and g must share the target module");
  require(f.kernel_respecting && g.kernel_respecting,
          "lift_through: plain homomorphisms must respect kernels");
  const PresentedModule& P = f.target;
  std::vector<Eigen::MatrixXd> mats;
  mats.reserve(P.atom_count());
  for (int i = 0; i < P.atom_count(); ++i) {
    if (f.mats[i].size() == 0 || g.mats[i].size() == 0) {
      mats.push_back(Eigen::MatrixXd::Zero(f.mats[i].cols(), g.mats[i].cols()));
      continue;
    }
    // Prefer an outright solution of F H = G: when f is surjective (not
    // just modulo the kernel) the lift defect is then small as a vector,
    // not merely in kernel coordinates, which keeps pnorm of the defect
    // at machine scale even for degenerate quadratic seminorms.
    Eigen::MatrixXd H =
        f.mats[i].completeOrthogonalDecomposition().solve(g.mats[i]);
    const double direct_scale = std::max(1.0, g.mats[i].cwiseAbs().maxCoeff());
    if ((f.mats[i] * H - g.mats[i]).cwiseAbs().maxCoeff() >
        1e-10 * direct_scale) {
      const Eigen::MatrixXd Kp = kernel_matrix(P.seminorms[i]);
      const Eigen::MatrixXd B = Kp * f.mats[i]; // range test modulo ker P
      const Eigen::MatrixXd rhs = Kp * g.mats[i];
      H = B.completeOrthogonalDecomposition().solve(rhs);
      if (!P.space.null_atom(i)) {
        const double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
        if (((B * H - rhs).cwiseAbs().maxCoeff()) > 1e-9 * scale)
          throw Error("lift_through: f is not surjective modulo the kernel on "
                      "atom " + std::to_string(i));
      }
    }
    mats.push_back(std::move(H));
  }
  return make_hom(g.source, f.source, std::move(mats), seed);
}

double lp_norm(const PresentedModule& M, const Element& e, double p) {
  require(p >= 1.0, "lp_norm: p must be in [1, inf]");
  const ScalarField n = pnorm(M, e);
  if (p == std::numeric_limits<double>::infinity()) {
    double m = 0.0;
    for (int i = 0; i < M.atom_count(); ++i)
      if (!M.space.null_atom(i)) m = std::max(m, n.values(i));
    return m;
  }
  double s = 0.0;
  for (int i = 0; i < M.atom_count(); ++i)
    s += M.space.weights(i) * std::pow(n.values(i), p);
  return std::pow(s, 1.0 / p);
}

double lp_section_norm(const Bundle& b, const Section& s, double p) {
  require(p >= 1.0, "lp_section_norm: p must be in [1, inf]");
  const ScalarField n = section_norm(b, s);
  if (p == std::numeric_limits<double>::infinity()) {
    double m = 0.0;
    for (int i = 0; i < b.atom_count(); ++i)
      if (!b.space.null_atom(i)) m = std::max(m, n.values(i));
    return m;
  }
  double acc = 0.0;
  for (int i = 0; i < b.atom_count(); ++i)
    acc += b.space.weights(i) * std::pow(n.values(i), p);
  return std::pow(acc, 1.0 / p);
}

bool gamma_p_membership(const Bundle& b, const Section& s, double p) {
  return std::isfinite(lp_section_norm(b, s, p));
}

} // namespace bundlecalc
