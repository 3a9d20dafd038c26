#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bundlecalc/mspace.hpp"
#include "bundlecalc/norms.hpp"

namespace bundlecalc {

/// Measurable Banach bundle over a finite atomic space: a fiber dimension
/// and a fiber norm per atom. The piece E_n is {atoms with dims = n}. On
/// positive-weight atoms the fiber norm must be a genuine norm; null atoms
/// are exempt.
struct Bundle {
  MeasureSpace space;
  std::vector<int> dims;
  std::vector<NormSpec> norms;

  int atom_count() const { return space.atom_count(); }
  BorelSet piece(int n) const; // E_n
  std::vector<int> distinct_dims() const; // sorted ascending
};

struct Section {
  std::vector<Eigen::VectorXd> vectors;
};

struct BundleValidation {
  bool valid = true;
  std::vector<int> bad_atoms;
  std::vector<std::string> issues;
};

BundleValidation validate_bundle(const Bundle& b);

Section zero_section(const Bundle& b);
ScalarField section_norm(const Bundle& b, const Section& s);

/// Value v on the atoms of E_n, the zero vector elsewhere.
Section constant_section(const Bundle& b, int n, const Eigen::VectorXd& v);

Section add(const Bundle& b, const Section& s, const Section& t);
Section scale_by_field(const Bundle& b, const ScalarField& f, const Section& s);

/// d_Gamma(s,t) = sum_i m'(i) min(|s-t|(x_i), 1); always <= 1.
double gamma_distance(const Bundle& b, const Section& s, const Section& t);

/// Combines disjoint pieces into one section, zero off their union.
Section glue(const Bundle& b,
             const std::vector<std::pair<BorelSet, Section>>& pieces);

/// Pre-morphism of bundles over the same space: a 1-Lipschitz linear map
/// per atom, with a per-atom certificate.
struct BundleMorphism {
  Bundle source;
  Bundle target;
  std::vector<Eigen::MatrixXd> mats;
  std::vector<LipschitzCertificate> certificates;
};

/// Builds a morphism, certifying 1-Lipschitzness per atom; throws if the
/// verdict fails on a positive-weight atom.
BundleMorphism make_morphism(Bundle source, Bundle target,
                             std::vector<Eigen::MatrixXd> mats,
                             std::uint64_t seed = 0);

Section apply_morphism(const BundleMorphism& phi, const Section& s);
BundleMorphism compose(const BundleMorphism& phi, const BundleMorphism& psi,
                       std::uint64_t seed = 0);
bool morphisms_ae_equal(const BundleMorphism& phi, const BundleMorphism& psi,
                        double tol = 1e-12);

/// Rounds a section to per-layer dyadic grids fine enough that
/// gamma_distance(s, result) <= eps. The grid spacing on an atom of
/// dimension n with layer index k = ceil(euclid_upper(norm)) is the
/// largest power of two <= eps / (k * 2^{n+k} * sqrt(n)).
Section quantize(const Bundle& b, const Section& s, double eps);

} // namespace bundlecalc
