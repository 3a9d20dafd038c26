#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "bundlecalc/bundle.hpp"

namespace bundlecalc {

/// Finitely-presented normed module: g generators and a per-atom seminorm
/// on the coefficient space R^g. Only the exact-kernel families
/// (Quadratic-PSD, PolyMax) are admitted, so that dimensional
/// decomposition is rank computation rather than tolerance chasing.
struct PresentedModule {
  MeasureSpace space;
  int generators = 0;
  std::vector<NormSpec> seminorms;

  int atom_count() const { return space.atom_count(); }
  void validate() const;
};

/// Module element: one coefficient row per atom (atom_count x g).
struct Element {
  Eigen::MatrixXd coeffs;
};

struct Decomposition {
  std::vector<int> dim_per_atom;
  std::map<int, BorelSet> pieces; // E_n, nonempty entries only
};

struct PivotChart {
  std::vector<std::vector<int>> pivots; // per atom, sorted generator indices
};

/// Norm-preserving isomorphism between a presented module and its bundle.
struct Iso {
  PresentedModule module;
  Bundle bundle;
  Decomposition decomposition;
  PivotChart chart;
};

struct Reconstruction {
  Bundle bundle;
  Iso iso;
};

/// Module homomorphism given by per-atom matrices g_tgt x g_src acting on
/// coefficients. Flags record the two regimes the theory distinguishes:
/// plain homomorphisms (kernel_respecting) vs norm contractions.
struct ModuleHom {
  PresentedModule source;
  PresentedModule target;
  std::vector<Eigen::MatrixXd> mats;
  bool kernel_respecting = false;
  bool contractive = false;
  std::string contractive_method; // "exact", "sampled" or "" when not claimed
};

ScalarField pnorm(const PresentedModule& M, const Element& e);
double module_distance(const PresentedModule& M, const Element& u,
                       const Element& v);
Element element_sub(const Element& u, const Element& v);
bool elements_ae_equal(const PresentedModule& M, const Element& u,
                       const Element& v, double tol = 1e-9);

/// Per-atom dimension = g - dim(seminorm kernel); E_inf is structurally
/// empty for finite presentations.
Decomposition decompose(const PresentedModule& M);

/// Lexicographically-least local basis indices per atom.
PivotChart pivot_chart(const PresentedModule& M, const Decomposition& dec);

/// The bundle side of the equivalence: fiber norm = seminorm restricted
/// to the pivot coordinates, together with the norm-preserving iso.
Reconstruction reconstruct(const PresentedModule& M);

/// Embeds fiber coordinates at the pivot indices (zeros elsewhere);
/// pnorm(iso_apply(s)) equals section_norm(s) atom by atom.
Element iso_apply(const Iso& iso, const Section& s);

/// Reduces coefficients modulo the per-atom kernel to the unique
/// pivot-supported representative.
Section iso_invert(const Iso& iso, const Element& e);

/// Generator layout of a section module: one block of width n per
/// distinct fiber dimension n, in ascending order.
struct GammaLayout {
  std::vector<int> block_dims;
  std::map<int, int> offset; // block dimension -> first coefficient index
  int generators = 0;

  static GammaLayout of(const Bundle& b);
};

/// Section module of a bundle, presented on the constant basis sections.
PresentedModule gamma_module(const Bundle& b);

/// Functor on morphisms: per-atom block embedding of the fiber matrices.
ModuleHom gamma_hom(const BundleMorphism& phi);

/// Inverse on morphisms (full-faithfulness): extracts the fiber blocks of
/// a hom between two section modules; throws if the extracted map fails
/// its 1-Lipschitz certificate on a positive-weight atom.
BundleMorphism lift_hom(const ModuleHom& hom, const Bundle& b1,
                        const Bundle& b2, std::uint64_t seed = 0);

/// Builds a hom and verifies its flags (kernel respect exactly via kernel
/// bases; contractivity via lipschitz_le_one). Never throws for flag
/// failures; the flags just record the findings.
ModuleHom make_hom(PresentedModule source, PresentedModule target,
                   std::vector<Eigen::MatrixXd> mats, std::uint64_t seed = 0);

Element apply_hom(const ModuleHom& hom, const Element& e);
ModuleHom compose_hom(const ModuleHom& f, const ModuleHom& g,
                      std::uint64_t seed = 0);

/// Projective lifting: h with f o h = g modulo the target kernel, for f
/// surjective modulo kernel. Deterministic via minimum-Euclidean-norm
/// preimages. Contractivity is not required of f and g.
ModuleHom lift_through(const ModuleHom& f, const ModuleHom& g,
                       std::uint64_t seed = 0);

/// Lp bridge: (sum_i w_i pnorm(e)(x_i)^p)^{1/p}, ess-sup for p = inf.
double lp_norm(const PresentedModule& M, const Element& e, double p);
double lp_section_norm(const Bundle& b, const Section& s, double p);
bool gamma_p_membership(const Bundle& b, const Section& s, double p);

} // namespace bundlecalc
