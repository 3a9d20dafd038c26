#include "bundlecalc/mspace.hpp"

#include <algorithm>
#include <cmath>

namespace bundlecalc {

void MeasureSpace::validate() const {
  if (atom_count() <= 0) throw Error("measure space: no atoms");
  bool positive = false;
  for (int i = 0; i < atom_count(); ++i) {
    const double w = weights(i);
    if (!std::isfinite(w) || w < 0.0)
      throw Error("measure space: weights must be finite and nonnegative");
    if (w > 0.0) positive = true;
  }
  if (!positive) throw Error("measure space: measure must be nonzero");
  if (!labels.empty() && static_cast<int>(labels.size()) != atom_count())
    throw Error("measure space: label count mismatch");
}

BorelSet BorelSet::of(std::vector<int> idx, int atom_count) {
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  for (int i : idx) {
    if (i < 0 || i >= atom_count) throw Error("borel set: index out of range");
  }
  return BorelSet{std::move(idx)};
}

BorelSet BorelSet::all(int atom_count) {
  std::vector<int> idx(atom_count);
  for (int i = 0; i < atom_count; ++i) idx[i] = i;
  return BorelSet{std::move(idx)};
}

bool BorelSet::contains(int i) const {
  return std::binary_search(members.begin(), members.end(), i);
}

BorelSet set_union(const BorelSet& a, const BorelSet& b) {
  std::vector<int> out;
  std::set_union(a.members.begin(), a.members.end(), b.members.begin(),
                 b.members.end(), std::back_inserter(out));
  return BorelSet{std::move(out)};
}

BorelSet set_intersection(const BorelSet& a, const BorelSet& b) {
  std::vector<int> out;
  std::set_intersection(a.members.begin(), a.members.end(), b.members.begin(),
                        b.members.end(), std::back_inserter(out));
  return BorelSet{std::move(out)};
}

ScalarField ScalarField::constant(int atom_count, double c) {
  return ScalarField{Eigen::VectorXd::Constant(atom_count, c)};
}

ScalarField ScalarField::indicator(const BorelSet& A, int atom_count) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(atom_count);
  for (int i : A.members) v(i) = 1.0;
  return ScalarField{std::move(v)};
}

bool same_space(const MeasureSpace& a, const MeasureSpace& b) {
  return a.weights.size() == b.weights.size() &&
         (a.weights - b.weights).isZero(0.0);
}

bool ae_equal(const ScalarField& f, const ScalarField& g,
              const MeasureSpace& space, double tol) {
  if (f.values.size() != g.values.size() ||
      f.values.size() != space.atom_count())
    throw Error("ae_equal: shape mismatch");
  for (int i = 0; i < space.atom_count(); ++i) {
    if (!space.null_atom(i) && std::abs(f.values(i) - g.values(i)) > tol)
      return false;
  }
  return true;
}

ReferenceMeasure reference_measure(const MeasureSpace& space) {
  space.validate();
  const int n = space.atom_count();
  Eigen::VectorXd probs(n);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    const double w = space.weights(i);
    probs(i) = w / (1.0 + w);
    z += probs(i);
  }
  probs /= z;
  return ReferenceMeasure{std::move(probs)};
}

double l0_distance(const ScalarField& f, const ScalarField& g,
                   const MeasureSpace& space) {
  const int n = space.atom_count();
  if (f.values.size() != n || g.values.size() != n)
    throw Error("l0_distance: shape mismatch");
  std::vector<double> gaps;
  for (int i = 0; i < n; ++i) {
    if (!space.null_atom(i)) gaps.push_back(std::abs(f.values(i) - g.values(i)));
  }
  auto mass_above = [&](double delta) {
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(f.values(i) - g.values(i)) > delta) m += space.weights(i);
    }
    return m;
  };
  double best = mass_above(0.0); // the delta -> 0+ limit
  for (double delta : gaps) {
    if (delta > 0.0) best = std::min(best, delta + mass_above(delta));
  }
  return best;
}

BorelSet essential_union(const std::vector<BorelSet>& family,
                         const MeasureSpace& space) {
  BorelSet out;
  for (const auto& A : family) {
    for (int i : A.members) {
      if (i < 0 || i >= space.atom_count())
        throw Error("essential_union: index out of range");
    }
    out = set_union(out, A);
  }
  return out;
}

ScalarField restrict_field(const ScalarField& f, const BorelSet& A) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(f.values.size());
  for (int i : A.members) {
    if (i >= f.values.size()) throw Error("restrict: index out of range");
    v(i) = f.values(i);
  }
  return ScalarField{std::move(v)};
}

} // namespace bundlecalc
