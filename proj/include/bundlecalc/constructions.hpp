#pragma once

#include <cstdint>
#include <map>

#include "bundlecalc/bundle.hpp"

namespace bundlecalc {

/// Measurable map between finite atomic spaces, given per source atom.
struct AtomMap {
  MeasureSpace source;
  MeasureSpace target;
  std::vector<int> image;

  void validate() const;
  /// Pushforward weight f_* m_X per target atom.
  Eigen::VectorXd pushforward() const;
};

/// True iff every positive-weight fiber norm comes from a scalar product.
bool is_hilbert_bundle(const Bundle& b, std::uint64_t seed = 0,
                       double tol = 1e-9, int trials = 64);

/// Fiberwise dual norms; a degenerate fiber (possible only on a null atom)
/// is sent to the zero seminorm.
Bundle dual_bundle(const Bundle& b);

/// Per-atom pairing <s*(x), s(x)>, satisfying |pairing| <= |s*|_* |s|.
ScalarField dual_pairing(const Bundle& b, const Section& s_star,
                         const Section& s);

/// Rebuilds the dual section from its pairings with the constant basis
/// sections: images[n][i] is the field x -> <s*, e^n_i>(x). Realizes the
/// surjectivity of the canonical map onto the dual module.
Section functional_from_basis_images(
    const Bundle& b, const std::map<int, std::vector<ScalarField>>& images);

/// Tensor product of two Hilbert bundles over the same space: fiber
/// dimension n*m and Gram matrix G1 (x) G2 under the row-major index
/// k = (j-1)m + l. Throws if a positive-weight fiber is not Hilbert.
Bundle tensor_bundle(const Bundle& b1, const Bundle& b2,
                     std::uint64_t seed = 0);

/// Elementary tensor: c_k = v_{ceil(k/m)} w_{k - m ceil(k/m) + m}.
Section tensor_elementary(const Bundle& b1, const Bundle& b2,
                          const Section& s1, const Section& s2,
                          std::uint64_t seed = 0);

/// Least C with f_* m_X <= C m_Y; nullopt when no such C exists
/// (preimage mass sitting on a null target atom).
std::optional<double> compression_constant(const AtomMap& f);

enum class PullbackMode { Strict, AbsolutelyContinuous };

/// Pullback bundle with d'(x) = d(f(x)) and n'(x,.) = n(f(x),.). Strict
/// mode demands bounded compression; ac mode only f_* m_X << m_Y and
/// re-weights an internal copy of the target before proceeding.
Bundle pullback_bundle(const AtomMap& f, const Bundle& target_bundle,
                       PullbackMode mode = PullbackMode::Strict);

/// (f^* s)(x) = s(f(x)); the pointwise norm composes exactly.
Section pullback_section(const AtomMap& f, const Bundle& target_bundle,
                         const Section& s,
                         PullbackMode mode = PullbackMode::Strict);

} // namespace bundlecalc
