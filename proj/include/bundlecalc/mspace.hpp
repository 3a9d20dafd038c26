#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bundlecalc/common.hpp"

namespace bundlecalc {

/// Finite atomic measure space: atoms 0..n-1 with nonnegative weights.
/// Null sets are exactly the sets of zero-weight atoms; "a.e." statements
/// quantify over positive-weight atoms. Labels are documentation only.
struct MeasureSpace {
  Eigen::VectorXd weights;
  std::vector<std::string> labels;

  int atom_count() const { return static_cast<int>(weights.size()); }
  bool null_atom(int i) const { return weights(i) <= 0.0; }
  void validate() const;
};

/// Borel set = sorted set of distinct atom indices.
struct BorelSet {
  std::vector<int> members;

  static BorelSet of(std::vector<int> idx, int atom_count);
  static BorelSet all(int atom_count);
  bool contains(int i) const;
};

BorelSet set_union(const BorelSet& a, const BorelSet& b);
BorelSet set_intersection(const BorelSet& a, const BorelSet& b);

/// Element of L0(m): one real value per atom.
struct ScalarField {
  Eigen::VectorXd values;

  static ScalarField constant(int atom_count, double c);
  static ScalarField indicator(const BorelSet& A, int atom_count);
};

bool same_space(const MeasureSpace& a, const MeasureSpace& b);

bool ae_equal(const ScalarField& f, const ScalarField& g,
              const MeasureSpace& space, double tol = 0.0);

/// Probability measure m' with m << m' << m.
struct ReferenceMeasure {
  Eigen::VectorXd probs;
};

/// m'(i) = (w_i/(1+w_i)) / Z, bounded even for very large weights.
ReferenceMeasure reference_measure(const MeasureSpace& space);

/// d_{L0}(f,g) = inf_{delta>0} [delta + m({|f-g| > delta})], computed by
/// scanning the finitely many breakpoints delta in {|f_i - g_i|} plus the
/// delta -> 0+ limit.
double l0_distance(const ScalarField& f, const ScalarField& g,
                   const MeasureSpace& space);

/// m-essential union; on an atomic space this is the literal union.
BorelSet essential_union(const std::vector<BorelSet>& family,
                         const MeasureSpace& space);

/// chi_A . f : values kept on A, zero elsewhere.
ScalarField restrict_field(const ScalarField& f, const BorelSet& A);

} // namespace bundlecalc
