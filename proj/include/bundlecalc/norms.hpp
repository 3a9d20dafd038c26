#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bundlecalc/common.hpp"

namespace bundlecalc {

enum class NormKind { Quadratic, WeightedLp, PolyMax, PolyGauge };

/// Closed-form norm/seminorm on R^n, one of four families:
///   Quadratic   sqrt(v' G v) with G symmetric PSD
///   WeightedLp  (sum_i w_i |v_i|^p)^{1/p}; p = inf means max_i w_i |v_i|
///               over the coordinates with w_i > 0
///   PolyMax     max_i |<a_i, v>| over the rows of A
///   PolyGauge   Minkowski gauge of conv(+-V), V spanning (always a norm)
/// Quadratic, WeightedLp and PolyMax may be degenerate (seminorms).
struct NormSpec {
  NormKind kind = NormKind::Quadratic;
  Eigen::MatrixXd gram;       // Quadratic: n x n
  double p = 2.0;             // WeightedLp exponent, may be +inf
  Eigen::VectorXd weights;    // WeightedLp: n nonnegative entries
  Eigen::MatrixXd functionals; // PolyMax: m x n, rows are functionals
  Eigen::MatrixXd generators;  // PolyGauge: n x m, columns are generators

  int dim() const;

  static NormSpec quadratic(Eigen::MatrixXd G);
  static NormSpec weighted_lp(double p, Eigen::VectorXd w);
  static NormSpec poly_max(Eigen::MatrixXd A);
  static NormSpec poly_gauge(Eigen::MatrixXd V); // columns are generators
  static NormSpec euclidean(int n);
  static NormSpec zero_seminorm(int n); // Quadratic with G = 0
};

double eval(const NormSpec& spec, const Eigen::VectorXd& v);

/// Orthonormal basis of the seminorm kernel {v : eval(v) = 0}.
std::vector<Eigen::VectorXd> kernel_basis(const NormSpec& spec);

/// Kernel-defining matrix M with ker(M) = kernel of the seminorm
/// (G for Quadratic, stacked rows for PolyMax, diag(w_i^{1/p or 1}) rows
/// for WeightedLp). Defined for the exact-kernel families only.
Eigen::MatrixXd kernel_matrix(const NormSpec& spec);

bool is_norm(const NormSpec& spec);

/// Dual norm within the same four families. Rejects seminorms.
NormSpec dual(const NormSpec& spec);

/// K with eval(v) <= K |v|_2 for all v. Exact except PolyGauge, where a
/// valid pseudo-inverse upper bound is returned.
double euclid_upper(const NormSpec& spec);

/// c with c |v|_2 <= eval(v) for all v; 0 for degenerate specs.
double euclid_lower(const NormSpec& spec);

struct PolarizationResult {
  bool hilbert = false;
  std::optional<Eigen::MatrixXd> gram;
};

/// Recovers a candidate scalar product by polarization on basis pairs and
/// declares the norm Hilbert iff it reproduces eval on basis pairs and
/// `trials` seeded random vectors within tol.
PolarizationResult polarization_is_hilbert(const NormSpec& spec, int trials,
                                           double tol, std::uint64_t seed = 0);

struct LipschitzCertificate {
  bool verdict = false;
  std::string method; // "exact" or "sampled"
  double max_excess = 0.0; // worst observed eval(dst,Mv) - eval(src,v)
};

/// Certifies eval(dst, M v) <= eval(src, v) for all v. Exact when the src
/// unit ball has a finite generator description (PolyGauge, WeightedLp
/// p=1, WeightedLp p=inf in dim <= 8) or for Quadratic -> Quadratic;
/// otherwise falls back to seeded sampling and says so.
LipschitzCertificate lipschitz_le_one(const Eigen::MatrixXd& M,
                                      const NormSpec& src, const NormSpec& dst,
                                      std::uint64_t seed = 0);

} // namespace bundlecalc
