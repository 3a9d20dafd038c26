#include "bundlecalc/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "bundlecalc/linprog.hpp"

namespace bundlecalc {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

} // namespace

int NormSpec::dim() const {
  switch (kind) {
    case NormKind::Quadratic: return static_cast<int>(gram.rows());
    case NormKind::WeightedLp: return static_cast<int>(weights.size());
    case NormKind::PolyMax: return static_cast<int>(functionals.cols());
    case NormKind::PolyGauge: return static_cast<int>(generators.rows());
  }
  return 0;
}

NormSpec NormSpec::quadratic(Eigen::MatrixXd G) {
  require(G.rows() == G.cols(), "quadratic: G must be square");
  require(G.isApprox(G.transpose(), 1e-12), "quadratic: G must be symmetric");
  if (G.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const double top = G.size() ? es.eigenvalues().cwiseAbs().maxCoeff() : 0.0;
    require(es.eigenvalues().minCoeff() >= -kRankTol * std::max(1.0, top),
            "quadratic: G must be positive semidefinite");
  }
  NormSpec s;
  s.kind = NormKind::Quadratic;
  s.gram = std::move(G);
  return s;
}

NormSpec NormSpec::weighted_lp(double p, Eigen::VectorXd w) {
  require(p >= 1.0, "weighted_lp: p must be in [1, inf]");
  require(w.size() == 0 || w.minCoeff() >= 0.0,
          "weighted_lp: weights must be nonnegative");
  NormSpec s;
  s.kind = NormKind::WeightedLp;
  s.p = p;
  s.weights = std::move(w);
  return s;
}

NormSpec NormSpec::poly_max(Eigen::MatrixXd A) {
  NormSpec s;
  s.kind = NormKind::PolyMax;
  s.functionals = std::move(A);
  return s;
}

NormSpec NormSpec::poly_gauge(Eigen::MatrixXd V) {
  const int n = static_cast<int>(V.rows());
  if (n > 0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V);
    require(V.cols() >= n && svd.rank() == n,
            "poly_gauge: generators must span the space");
  }
  NormSpec s;
  s.kind = NormKind::PolyGauge;
  s.generators = std::move(V);
  return s;
}

NormSpec NormSpec::euclidean(int n) {
  return quadratic(Eigen::MatrixXd::Identity(n, n));
}

NormSpec NormSpec::zero_seminorm(int n) {
  return quadratic(Eigen::MatrixXd::Zero(n, n));
}

double eval(const NormSpec& spec, const Eigen::VectorXd& v) {
  require(v.size() == spec.dim(), "eval: dimension mismatch");
  switch (spec.kind) {
    case NormKind::Quadratic: {
      const double q = v.dot(spec.gram * v);
      return std::sqrt(std::max(0.0, q));
    }
    case NormKind::WeightedLp: {
      if (spec.p == kInf) {
        double m = 0.0;
        for (int i = 0; i < v.size(); ++i)
          if (spec.weights(i) > 0.0)
            m = std::max(m, spec.weights(i) * std::abs(v(i)));
        return m;
      }
      double s = 0.0;
      for (int i = 0; i < v.size(); ++i)
        s += spec.weights(i) * std::pow(std::abs(v(i)), spec.p);
      return std::pow(s, 1.0 / spec.p);
    }
    case NormKind::PolyMax:
      if (spec.functionals.rows() == 0) return 0.0;
      return (spec.functionals * v).cwiseAbs().maxCoeff();
    case NormKind::PolyGauge: {
      if (v.size() == 0 || v.isZero(0.0)) return 0.0;
      // Canonicalize the sign so eval(v) and eval(-v) are bitwise equal.
      Eigen::VectorXd u = v;
      for (int i = 0; i < u.size(); ++i) {
        if (u(i) == 0.0) continue;
        if (u(i) < 0.0) u = -u;
        break;
      }
      const int m = static_cast<int>(spec.generators.cols());
      // min sum(l+ + l-)  s.t.  V(l+ - l-) = u,  l+- >= 0
      Eigen::MatrixXd A(u.size(), 2 * m);
      A << spec.generators, -spec.generators;
      const LpSolution sol =
          solve_equality_lp(A, u, Eigen::VectorXd::Ones(2 * m));
      require(sol.status == LpSolution::Status::Optimal,
              "poly_gauge eval: vector not representable");
      return sol.value;
    }
  }
  return 0.0;
}

Eigen::MatrixXd kernel_matrix(const NormSpec& spec) {
  switch (spec.kind) {
    case NormKind::Quadratic: {
      // The PSD square root, not G itself: same kernel and same column
      // matroid, but |G^{1/2} v|_2 equals the seminorm, so linear-solve
      // residuals translate into seminorm defects without the square-root
      // amplification that G would introduce.
      if (spec.gram.size() == 0) return spec.gram;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.gram);
      const Eigen::VectorXd& ev = es.eigenvalues();
      const double top = ev.size() ? std::max(0.0, ev(ev.size() - 1)) : 0.0;
      Eigen::VectorXd root = Eigen::VectorXd::Zero(ev.size());
      for (int i = 0; i < ev.size(); ++i)
        if (ev(i) > 1e-12 * std::max(top, 1.0)) root(i) = std::sqrt(ev(i));
      return es.eigenvectors() * root.asDiagonal() *
             es.eigenvectors().transpose();
    }
    case NormKind::PolyMax:
      return spec.functionals.rows() == 0
                 ? Eigen::MatrixXd::Zero(1, spec.dim())
                 : spec.functionals;
    case NormKind::WeightedLp: {
      const int n = spec.dim();
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i)
        if (spec.weights(i) > 0.0) M(i, i) = 1.0;
      return M;
    }
    case NormKind::PolyGauge:
      return Eigen::MatrixXd::Identity(spec.dim(), spec.dim());
  }
  return {};
}

std::vector<Eigen::VectorXd> kernel_basis(const NormSpec& spec) {
  if (spec.kind == NormKind::PolyGauge) return {}; // always a genuine norm
  if (spec.kind == NormKind::WeightedLp) {
    std::vector<Eigen::VectorXd> basis;
    for (int i = 0; i < spec.dim(); ++i) {
      if (spec.weights(i) == 0.0)
        basis.push_back(Eigen::VectorXd::Unit(spec.dim(), i));
    }
    return basis;
  }
  const Eigen::MatrixXd M = kernel_matrix(spec);
  if (M.size() == 0) return {};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  std::vector<Eigen::VectorXd> basis;
  for (int j = 0; j < spec.dim(); ++j) {
    const double s = j < sv.size() ? sv(j) : 0.0;
    if (s <= kRankTol * std::max(top, 1e-300)) {
      basis.push_back(svd.matrixV().col(j));
    }
  }
  if (top == 0.0) { // zero matrix: the whole space
    basis.clear();
    for (int j = 0; j < spec.dim(); ++j)
      basis.push_back(Eigen::VectorXd::Unit(spec.dim(), j));
  }
  return basis;
}

bool is_norm(const NormSpec& spec) { return kernel_basis(spec).empty(); }

NormSpec dual(const NormSpec& spec) {
  require(is_norm(spec), "dual: spec is a seminorm, dual undefined here");
  switch (spec.kind) {
    case NormKind::Quadratic: {
      if (spec.gram.size() == 0) return spec;
      const Eigen::MatrixXd inv = spec.gram.inverse();
      return NormSpec::quadratic(0.5 * (inv + inv.transpose()));
    }
    case NormKind::WeightedLp: {
      Eigen::VectorXd w = spec.weights;
      if (spec.p == 1.0)
        return NormSpec::weighted_lp(kInf, w.cwiseInverse());
      if (spec.p == kInf)
        return NormSpec::weighted_lp(1.0, w.cwiseInverse());
      const double q = spec.p / (spec.p - 1.0);
      Eigen::VectorXd wd(w.size());
      for (int i = 0; i < w.size(); ++i) wd(i) = std::pow(w(i), -q / spec.p);
      return NormSpec::weighted_lp(q, wd);
    }
    case NormKind::PolyMax:
      return NormSpec::poly_gauge(spec.functionals.transpose());
    case NormKind::PolyGauge:
      return NormSpec::poly_max(spec.generators.transpose());
  }
  return spec;
}

double euclid_upper(const NormSpec& spec) {
  const int n = spec.dim();
  if (n == 0) return 0.0;
  switch (spec.kind) {
    case NormKind::Quadratic: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.gram);
      return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    }
    case NormKind::PolyMax: {
      double m = 0.0;
      for (int i = 0; i < spec.functionals.rows(); ++i)
        m = std::max(m, spec.functionals.row(i).norm());
      return m;
    }
    case NormKind::WeightedLp: {
      if (spec.p == kInf) return spec.weights.maxCoeff();
      if (spec.p >= 2.0)
        return std::pow(spec.weights.maxCoeff(), 1.0 / spec.p);
      // Exact operator norm of diag(w^{1/p}) from l2 to lp for p < 2.
      const double r = 2.0 / (2.0 - spec.p);
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += std::pow(spec.weights(i), r);
      return std::pow(s, (2.0 - spec.p) / (2.0 * spec.p));
    }
    case NormKind::PolyGauge: {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(spec.generators);
      const double smin = svd.singularValues()(n - 1);
      return std::sqrt(static_cast<double>(spec.generators.cols())) / smin;
    }
  }
  return 0.0;
}

double euclid_lower(const NormSpec& spec) {
  const int n = spec.dim();
  if (n == 0) return 0.0;
  if (!is_norm(spec)) return 0.0;
  switch (spec.kind) {
    case NormKind::Quadratic: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.gram);
      return std::sqrt(std::max(0.0, es.eigenvalues().minCoeff()));
    }
    case NormKind::PolyMax: {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(spec.functionals);
      const double smin = svd.singularValues()(n - 1);
      return smin / std::sqrt(static_cast<double>(spec.functionals.rows()));
    }
    case NormKind::WeightedLp: {
      const double wmin = spec.weights.minCoeff();
      if (spec.p == kInf) return wmin / std::sqrt(static_cast<double>(n));
      if (spec.p <= 2.0) return std::pow(wmin, 1.0 / spec.p);
      return std::pow(wmin, 1.0 / spec.p) *
             std::pow(static_cast<double>(n), 1.0 / spec.p - 0.5);
    }
    case NormKind::PolyGauge: {
      double m = 0.0;
      for (int j = 0; j < spec.generators.cols(); ++j)
        m = std::max(m, spec.generators.col(j).norm());
      return m > 0.0 ? 1.0 / m : 0.0;
    }
  }
  return 0.0;
}

PolarizationResult polarization_is_hilbert(const NormSpec& spec, int trials,
                                           double tol, std::uint64_t seed) {
  require(tol > 0.0, "polarization_is_hilbert: tol must be positive");
  const int n = spec.dim();
  if (n == 0) return {true, Eigen::MatrixXd(0, 0)};
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const Eigen::VectorXd ei = Eigen::VectorXd::Unit(n, i);
      const Eigen::VectorXd ej = Eigen::VectorXd::Unit(n, j);
      const double sij = eval(spec, ei + ej);
      const double si = eval(spec, ei);
      const double sj = eval(spec, ej);
      G(i, j) = G(j, i) = 0.5 * (sij * sij - si * si - sj * sj);
    }
  }
  auto matches = [&](const Eigen::VectorXd& v) {
    const double e = eval(spec, v);
    return std::abs(e * e - v.dot(G * v)) <= tol;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!matches(Eigen::VectorXd::Unit(n, i) - Eigen::VectorXd::Unit(n, j)))
        return {false, std::nullopt};
    }
  }
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    if (!matches(random_vector(rng, n))) return {false, std::nullopt};
  }
  return {true, G};
}

namespace {

LipschitzCertificate check_points(const Eigen::MatrixXd& M, const NormSpec& dst,
                                  const std::vector<Eigen::VectorXd>& pts,
                                  const std::vector<Eigen::VectorXd>& kernel,
                                  double tol) {
  LipschitzCertificate cert;
  cert.method = "exact";
  cert.verdict = true;
  for (const auto& k : kernel) {
    const double e = eval(dst, M * k);
    cert.max_excess = std::max(cert.max_excess, e);
    if (e > tol) cert.verdict = false;
  }
  for (const auto& v : pts) {
    const double e = eval(dst, M * v) - 1.0;
    cert.max_excess = std::max(cert.max_excess, e);
    if (e > tol) cert.verdict = false;
  }
  return cert;
}

} // namespace

LipschitzCertificate lipschitz_le_one(const Eigen::MatrixXd& M,
                                      const NormSpec& src, const NormSpec& dst,
                                      std::uint64_t seed) {
  require(M.cols() == src.dim() && M.rows() == dst.dim(),
          "lipschitz_le_one: dimension mismatch");
  const double tol = 1e-9;
  const int n = src.dim();
  if (n == 0) return {true, "exact", 0.0};

  if (src.kind == NormKind::PolyGauge) {
    std::vector<Eigen::VectorXd> pts;
    for (int j = 0; j < src.generators.cols(); ++j)
      pts.push_back(src.generators.col(j));
    return check_points(M, dst, pts, {}, tol);
  }
  if (src.kind == NormKind::WeightedLp && src.p == 1.0) {
    std::vector<Eigen::VectorXd> pts;
    std::vector<Eigen::VectorXd> kernel;
    for (int i = 0; i < n; ++i) {
      if (src.weights(i) > 0.0)
        pts.push_back(Eigen::VectorXd::Unit(n, i) / src.weights(i));
      else
        kernel.push_back(Eigen::VectorXd::Unit(n, i));
    }
    return check_points(M, dst, pts, kernel, tol);
  }
  if (src.kind == NormKind::WeightedLp &&
      src.p == std::numeric_limits<double>::infinity() && n <= 8) {
    std::vector<int> positive;
    std::vector<Eigen::VectorXd> kernel;
    for (int i = 0; i < n; ++i) {
      if (src.weights(i) > 0.0)
        positive.push_back(i);
      else
        kernel.push_back(Eigen::VectorXd::Unit(n, i));
    }
    std::vector<Eigen::VectorXd> pts;
    const int np = static_cast<int>(positive.size());
    for (int mask = 0; mask < (1 << np); ++mask) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      for (int t = 0; t < np; ++t) {
        const int i = positive[t];
        v(i) = ((mask >> t) & 1 ? 1.0 : -1.0) / src.weights(i);
      }
      pts.push_back(v);
    }
    return check_points(M, dst, pts, kernel, tol);
  }
  if (src.kind == NormKind::Quadratic && dst.kind == NormKind::Quadratic) {
    const Eigen::MatrixXd D = src.gram - M.transpose() * dst.gram * M;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
    const double scale = std::max(1.0, src.gram.cwiseAbs().maxCoeff());
    LipschitzCertificate cert;
    cert.method = "exact";
    cert.max_excess = -es.eigenvalues().minCoeff();
    cert.verdict = cert.max_excess <= tol * scale;
    return cert;
  }

  // Fallback: seeded sampling on random directions and basis combinations.
  LipschitzCertificate cert;
  cert.method = "sampled";
  cert.verdict = true;
  std::mt19937_64 rng(seed);
  auto probe = [&](const Eigen::VectorXd& v) {
    const double e = eval(dst, M * v) - eval(src, v);
    cert.max_excess = std::max(cert.max_excess, e);
    if (e > tol) cert.verdict = false;
  };
  for (int i = 0; i < n; ++i) {
    probe(Eigen::VectorXd::Unit(n, i));
    probe(-Eigen::VectorXd::Unit(n, i));
  }
  for (int t = 0; t < 2000; ++t) probe(random_vector(rng, n));
  return cert;
}

} // namespace bundlecalc
