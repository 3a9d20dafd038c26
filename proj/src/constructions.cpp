#include "bundlecalc/constructions.hpp"

#include <cmath>

namespace bundlecalc {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

// Recovers the per-atom Gram matrices of a Hilbert bundle; throws on a
// non-Hilbert positive-weight fiber, uses the zero seminorm on null ones.
std::vector<Eigen::MatrixXd> fiber_grams(const Bundle& b, std::uint64_t seed) {
  std::vector<Eigen::MatrixXd> grams;
  grams.reserve(b.atom_count());
  for (int i = 0; i < b.atom_count(); ++i) {
    const auto res = polarization_is_hilbert(b.norms[i], 64, 1e-9,
                                             seed + static_cast<std::uint64_t>(i));
    if (res.hilbert) {
      grams.push_back(*res.gram);
    } else if (b.space.null_atom(i)) {
      grams.push_back(Eigen::MatrixXd::Zero(b.dims[i], b.dims[i]));
    } else {
      throw Error("tensor_bundle: non-Hilbert fiber on positive-weight atom " +
                  std::to_string(i));
    }
  }
  return grams;
}

Eigen::MatrixXd kronecker(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd K(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

} // namespace

void AtomMap::validate() const {
  source.validate();
  target.validate();
  require(static_cast<int>(image.size()) == source.atom_count(),
          "atom map: one image per source atom required");
  for (int y : image)
    require(y >= 0 && y < target.atom_count(), "atom map: image out of range");
}

Eigen::VectorXd AtomMap::pushforward() const {
  Eigen::VectorXd fw = Eigen::VectorXd::Zero(target.atom_count());
  for (int x = 0; x < source.atom_count(); ++x)
    fw(image[x]) += source.weights(x);
  return fw;
}

bool is_hilbert_bundle(const Bundle& b, std::uint64_t seed, double tol,
                       int trials) {
  for (int i = 0; i < b.atom_count(); ++i) {
    if (b.space.null_atom(i)) continue;
    if (!polarization_is_hilbert(b.norms[i], trials, tol,
                                 seed + static_cast<std::uint64_t>(i))
             .hilbert)
      return false;
  }
  return true;
}

Bundle dual_bundle(const Bundle& b) {
  Bundle d;
  d.space = b.space;
  d.dims = b.dims;
  d.norms.reserve(b.atom_count());
  for (int i = 0; i < b.atom_count(); ++i) {
    if (b.dims[i] == 0) {
      d.norms.push_back(NormSpec::zero_seminorm(0));
    } else if (is_norm(b.norms[i])) {
      d.norms.push_back(dual(b.norms[i]));
    } else {
      // only reachable on null atoms; mirrors the zero branch of the
      // fiberwise dual norm
      d.norms.push_back(NormSpec::zero_seminorm(b.dims[i]));
    }
  }
  return d;
}

ScalarField dual_pairing(const Bundle& b, const Section& s_star,
                         const Section& s) {
  require(s_star.vectors.size() == s.vectors.size() &&
              static_cast<int>(s.vectors.size()) == b.atom_count(),
          "dual_pairing: shape mismatch");
  Eigen::VectorXd out(b.atom_count());
  for (int i = 0; i < b.atom_count(); ++i) {
    require(s_star.vectors[i].size() == s.vectors[i].size() &&
                static_cast<int>(s.vectors[i].size()) == b.dims[i],
            "dual_pairing: fiber mismatch");
    out(i) = s_star.vectors[i].dot(s.vectors[i]);
  }
  return ScalarField{std::move(out)};
}

Section functional_from_basis_images(
    const Bundle& b, const std::map<int, std::vector<ScalarField>>& images) {
  for (int n : b.distinct_dims()) {
    if (n == 0) continue;
    const auto it = images.find(n);
    require(it != images.end() && static_cast<int>(it->second.size()) == n,
            "functional_from_basis_images: need one field per basis vector "
            "of dimension " + std::to_string(n));
    for (const auto& field : it->second)
      require(field.values.size() == b.atom_count(),
              "functional_from_basis_images: field length mismatch");
  }
  Section s_star = zero_section(b);
  for (int i = 0; i < b.atom_count(); ++i) {
    const int n = b.dims[i];
    if (n == 0) continue;
    const auto& fields = images.at(n);
    for (int c = 0; c < n; ++c) s_star.vectors[i](c) = fields[c].values(i);
  }
  return s_star;
}

Bundle tensor_bundle(const Bundle& b1, const Bundle& b2, std::uint64_t seed) {
  require(same_space(b1.space, b2.space),
          "tensor_bundle: same underlying space required");
  const auto g1 = fiber_grams(b1, seed);
  const auto g2 = fiber_grams(b2, seed + 0x9e3779b97f4a7c15ULL);
  Bundle t;
  t.space = b1.space;
  t.dims.reserve(b1.atom_count());
  t.norms.reserve(b1.atom_count());
  for (int i = 0; i < b1.atom_count(); ++i) {
    t.dims.push_back(b1.dims[i] * b2.dims[i]);
    t.norms.push_back(NormSpec::quadratic(kronecker(g1[i], g2[i])));
  }
  return t;
}

Section tensor_elementary(const Bundle& b1, const Bundle& b2,
                          const Section& s1, const Section& s2,
                          std::uint64_t seed) {
  const Bundle t = tensor_bundle(b1, b2, seed);
  Section out = zero_section(t);
  for (int i = 0; i < t.atom_count(); ++i) {
    const int m = b2.dims[i];
    // c_k = v_{ceil(k/m)} w_{k - m ceil(k/m) + m}, zero based: row-major
    for (int k = 0; k < t.dims[i]; ++k)
      out.vectors[i](k) = s1.vectors[i](k / m) * s2.vectors[i](k % m);
  }
  return out;
}

std::optional<double> compression_constant(const AtomMap& f) {
  f.validate();
  const Eigen::VectorXd fw = f.pushforward();
  double c = 0.0;
  for (int y = 0; y < f.target.atom_count(); ++y) {
    if (f.target.weights(y) > 0.0) {
      c = std::max(c, fw(y) / f.target.weights(y));
    } else if (fw(y) > 0.0) {
      return std::nullopt; // mass pushed onto a null atom: unbounded
    }
  }
  return c;
}

Bundle pullback_bundle(const AtomMap& f, const Bundle& target_bundle,
                       PullbackMode mode) {
  f.validate();
  require(same_space(f.target, target_bundle.space),
          "pullback_bundle: bundle must live over the map target");
  const Eigen::VectorXd fw = f.pushforward();
  for (int y = 0; y < f.target.atom_count(); ++y) {
    require(!(f.target.weights(y) == 0.0 && fw(y) > 0.0),
            "pullback: pushforward not absolutely continuous w.r.t. target");
  }
  if (mode == PullbackMode::Strict) {
    require(compression_constant(f).has_value(),
            "pullback: map is not of bounded compression");
  } else {
    // Re-weight an internal copy of the target per m'_Y; the resulting
    // bundle data is unaffected, only the compression check moves.
    MeasureSpace reweighted = f.target;
    for (int y = 0; y < f.target.atom_count(); ++y)
      reweighted.weights(y) = fw(y) > 0.0 ? fw(y) : f.target.weights(y);
    AtomMap g{f.source, reweighted, f.image};
    require(compression_constant(g).has_value() && *compression_constant(g) <= 1.0 + 1e-12,
            "pullback: re-weighting failed to bound the compression");
  }
  Bundle pulled;
  pulled.space = f.source;
  pulled.dims.reserve(f.source.atom_count());
  pulled.norms.reserve(f.source.atom_count());
  for (int x = 0; x < f.source.atom_count(); ++x) {
    pulled.dims.push_back(target_bundle.dims[f.image[x]]);
    pulled.norms.push_back(target_bundle.norms[f.image[x]]);
  }
  return pulled;
}

Section pullback_section(const AtomMap& f, const Bundle& target_bundle,
                         const Section& s, PullbackMode mode) {
  const Bundle pulled = pullback_bundle(f, target_bundle, mode);
  require(static_cast<int>(s.vectors.size()) == f.target.atom_count(),
          "pullback_section: section shape mismatch");
  Section out;
  out.vectors.reserve(f.source.atom_count());
  for (int x = 0; x < f.source.atom_count(); ++x)
    out.vectors.push_back(s.vectors[f.image[x]]);
  return out;
}

} // namespace bundlecalc
