#include "bundlecalc/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bundlecalc::checks {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double urand(std::mt19937_64& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

int irand(std::mt19937_64& rng, int a, int b) {
  return std::uniform_int_distribution<int>(a, b)(rng);
}

Eigen::VectorXd uvec(std::mt19937_64& rng, int n, double a, double b) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = urand(rng, a, b);
  return v;
}

Eigen::MatrixXd umat(std::mt19937_64& rng, int r, int c, double a, double b) {
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = urand(rng, a, b);
  return m;
}

// Matrix of exactly the requested rank with singular values in [0.5, 2],
// so numeric rank decisions are unambiguous.
Eigen::MatrixXd well_conditioned(std::mt19937_64& rng, int rows, int cols,
                                 int rank) {
  if (rank == 0 || rows == 0 || cols == 0)
    return Eigen::MatrixXd::Zero(rows, cols);
  Eigen::MatrixXd M = umat(rng, rows, cols, -1.0, 1.0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
  for (int i = 0; i < rank; ++i) {
    out += urand(rng, 0.5, 2.0) * svd.matrixU().col(i) *
           svd.matrixV().col(i).transpose();
  }
  return out;
}

struct Accumulator {
  bool pass = true;
  double max_error = 0.0;

  void bound(double err, double tol) {
    max_error = std::max(max_error, err);
    if (!(err <= tol)) pass = false;
  }
  void expect(bool ok) {
    if (!ok) pass = false;
  }
  CheckResult result(const std::string& name, std::uint64_t seed,
                     const std::string& method = "sampled") const {
    return {name, pass, max_error, method, seed};
  }
};

} // namespace

MeasureSpace random_space(std::mt19937_64& rng, int min_atoms, int max_atoms,
                          bool allow_null_atoms) {
  const int n = irand(rng, min_atoms, max_atoms);
  MeasureSpace s;
  s.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const bool null = allow_null_atoms && urand(rng, 0.0, 1.0) < 0.2;
    s.weights(i) = null ? 0.0 : urand(rng, 0.1, 4.0);
  }
  if (s.weights.maxCoeff() == 0.0) s.weights(irand(rng, 0, n - 1)) = 1.0;
  return s;
}

NormSpec random_presentable_seminorm(std::mt19937_64& rng, int dim, int rank) {
  if (irand(rng, 0, 1) == 0) {
    const Eigen::MatrixXd B = well_conditioned(rng, rank, dim, rank);
    Eigen::MatrixXd G = B.transpose() * B;
    return NormSpec::quadratic(0.5 * (G + G.transpose()));
  }
  Eigen::MatrixXd base = well_conditioned(rng, rank, dim, rank);
  const int extra = irand(rng, 0, 2);
  Eigen::MatrixXd A(rank + extra, dim);
  A.topRows(rank) = base;
  for (int e = 0; e < extra; ++e)
    A.row(rank + e) = uvec(rng, rank, -1.0, 1.0).transpose() * base;
  return NormSpec::poly_max(std::move(A));
}

NormSpec random_norm(std::mt19937_64& rng, int dim, bool all_families) {
  if (dim == 0) return NormSpec::zero_seminorm(0);
  const int family = irand(rng, 0, all_families ? 3 : 1);
  switch (family) {
    case 0: {
      const Eigen::MatrixXd L = well_conditioned(rng, dim, dim, dim);
      Eigen::MatrixXd G = L.transpose() * L;
      return NormSpec::quadratic(0.5 * (G + G.transpose()));
    }
    case 1: {
      const int extra = irand(rng, 0, 2);
      Eigen::MatrixXd A(dim + extra, dim);
      A.topRows(dim) =
          urand(rng, 0.3, 1.5) * Eigen::MatrixXd::Identity(dim, dim);
      for (int e = 0; e < extra; ++e)
        A.row(dim + e) = uvec(rng, dim, -1.0, 1.0).transpose();
      return NormSpec::poly_max(std::move(A));
    }
    case 2: {
      const double choices[] = {1.0, 1.5, 2.0, 3.0, kInf};
      return NormSpec::weighted_lp(choices[irand(rng, 0, 4)],
                                   uvec(rng, dim, 0.2, 3.0));
    }
    default: {
      const int extra = irand(rng, 0, 2);
      Eigen::MatrixXd V(dim, dim + extra);
      V.leftCols(dim) = Eigen::MatrixXd::Zero(dim, dim);
      for (int i = 0; i < dim; ++i)
        V(i, i) = urand(rng, 0.3, 2.0) * (irand(rng, 0, 1) ? 1.0 : -1.0);
      for (int e = 0; e < extra; ++e) V.col(dim + e) = uvec(rng, dim, -1.5, 1.5);
      return NormSpec::poly_gauge(std::move(V));
    }
  }
}

PresentedModule random_module(std::mt19937_64& rng, int max_generators,
                              int max_atoms) {
  PresentedModule m;
  m.space = random_space(rng, 2, max_atoms);
  m.generators = irand(rng, 1, max_generators);
  m.seminorms.reserve(m.atom_count());
  for (int i = 0; i < m.atom_count(); ++i) {
    m.seminorms.push_back(random_presentable_seminorm(
        rng, m.generators, irand(rng, 0, m.generators)));
  }
  return m;
}

Bundle random_bundle(std::mt19937_64& rng, const MeasureSpace& space,
                     int max_dim, bool representable, int min_dim) {
  Bundle b;
  b.space = space;
  for (int i = 0; i < space.atom_count(); ++i) {
    const int d = irand(rng, min_dim, max_dim);
    b.dims.push_back(d);
    if (d == 0) {
      b.norms.push_back(NormSpec::zero_seminorm(0));
    } else if (!representable) {
      b.norms.push_back(random_norm(rng, d, true));
    } else {
      switch (irand(rng, 0, 3)) {
        case 0:
        case 1:
          b.norms.push_back(random_norm(rng, d, false));
          break;
        case 2:
          b.norms.push_back(NormSpec::weighted_lp(2.0, uvec(rng, d, 0.2, 3.0)));
          break;
        default:
          b.norms.push_back(NormSpec::weighted_lp(kInf, uvec(rng, d, 0.2, 3.0)));
          break;
      }
    }
  }
  return b;
}

Bundle random_hilbert_bundle(std::mt19937_64& rng, const MeasureSpace& space,
                             int max_dim) {
  Bundle b;
  b.space = space;
  for (int i = 0; i < space.atom_count(); ++i) {
    const int d = irand(rng, 0, max_dim);
    b.dims.push_back(d);
    const Eigen::MatrixXd L = well_conditioned(rng, d, d, d);
    Eigen::MatrixXd G = L.transpose() * L;
    b.norms.push_back(NormSpec::quadratic(0.5 * (G + G.transpose())));
  }
  return b;
}

Section random_section(std::mt19937_64& rng, const Bundle& b) {
  Section s;
  s.vectors.reserve(b.atom_count());
  for (int i = 0; i < b.atom_count(); ++i)
    s.vectors.push_back(uvec(rng, b.dims[i], -3.0, 3.0));
  return s;
}

Element random_element(std::mt19937_64& rng, const PresentedModule& m) {
  return Element{umat(rng, m.atom_count(), m.generators, -3.0, 3.0)};
}

BundleMorphism random_contractive_morphism(std::mt19937_64& rng,
                                           const Bundle& src,
                                           const Bundle& tgt) {
  std::vector<Eigen::MatrixXd> mats;
  mats.reserve(src.atom_count());
  for (int i = 0; i < src.atom_count(); ++i) {
    const int d1 = src.dims[i];
    const int d2 = tgt.dims[i];
    if (d1 == 0 || d2 == 0) {
      mats.push_back(Eigen::MatrixXd::Zero(d2, d1));
      continue;
    }
    Eigen::MatrixXd M0(d2, d1);
    for (int r = 0; r < d2; ++r)
      for (int c = 0; c < d1; ++c)
        M0(r, c) = urand(rng, 0.3, 1.0) * (irand(rng, 0, 1) ? 1.0 : -1.0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M0);
    const double smax = svd.singularValues()(0);
    const double lower = euclid_lower(src.norms[i]);
    const double upper = euclid_upper(tgt.norms[i]);
    const double scale = 0.9 * lower / (upper * smax);
    mats.push_back(scale * M0);
  }
  return make_morphism(src, tgt, std::move(mats), rng());
}

// ---------------------------------------------------------------------------
// acceptance criteria
// ---------------------------------------------------------------------------

namespace {

CheckResult serre_swan_round_trip(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < 200; ++trial) {
    const PresentedModule M = random_module(rng, 6, 40);
    const Reconstruction rec = reconstruct(M);
    const PresentedModule gm = gamma_module(rec.bundle);
    const Decomposition d1 = decompose(M);
    const Decomposition d2 = decompose(gm);
    acc.expect(d1.dim_per_atom == d2.dim_per_atom);
    acc.expect(d1.dim_per_atom == rec.bundle.dims);
    for (int rep = 0; rep < 3; ++rep) {
      const Section s = random_section(rng, rec.bundle);
      const ScalarField via_module = pnorm(M, iso_apply(rec.iso, s));
      const ScalarField direct = section_norm(rec.bundle, s);
      for (int i = 0; i < M.atom_count(); ++i) {
        if (M.space.null_atom(i)) continue;
        acc.bound(std::abs(via_module.values(i) - direct.values(i)), 1e-9);
      }
    }
    // The inverse direction: reducing any element modulo the kernel keeps
    // it a.e.-equal to itself. Tested in kernel coordinates |K(e - back)|,
    // which characterizes a.e.-equality exactly for these families and,
    // unlike evaluating the seminorm itself, carries no sqrt(rounding)
    // noise on kernel directions.
    const Element e = random_element(rng, M);
    const Element back = iso_apply(rec.iso, iso_invert(rec.iso, e));
    for (int i = 0; i < M.atom_count(); ++i) {
      if (M.space.null_atom(i)) continue;
      const Eigen::VectorXd d =
          (e.coeffs.row(i) - back.coeffs.row(i)).transpose();
      const double scale = 1.0 + e.coeffs.row(i).norm();
      acc.bound((kernel_matrix(M.seminorms[i]) * d).norm() / scale, 1e-9);
    }
  }
  return acc.result("serre_swan_round_trip", seed, "exact");
}

CheckResult full_faithfulness(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < 100; ++trial) {
    const MeasureSpace space = random_space(rng, 2, 12);
    const Bundle b1 = random_bundle(rng, space, 4, true, 1);
    const Bundle b2 = random_bundle(rng, space, 4, true, 1);
    const BundleMorphism phi = random_contractive_morphism(rng, b1, b2);
    const ModuleHom hom = gamma_hom(phi);
    const BundleMorphism lifted = lift_hom(hom, b1, b2, rng());
    for (int i = 0; i < space.atom_count(); ++i) {
      if (space.null_atom(i) || phi.mats[i].size() == 0) continue;
      acc.bound((phi.mats[i] - lifted.mats[i]).cwiseAbs().maxCoeff(), 1e-9);
    }
    const ModuleHom round = gamma_hom(lifted);
    for (int i = 0; i < space.atom_count(); ++i) {
      if (space.null_atom(i) || hom.mats[i].size() == 0) continue;
      acc.bound((hom.mats[i] - round.mats[i]).cwiseAbs().maxCoeff(), 1e-9);
    }

    // Distinctness: a.e.-different morphisms stay distinguishable on a
    // constant basis section after applying the section functor.
    int atom = -1;
    for (int i = 0; i < space.atom_count(); ++i) {
      if (!space.null_atom(i) && phi.mats[i].size() > 0) atom = i;
    }
    if (atom < 0) continue;
    std::vector<Eigen::MatrixXd> mats2 = phi.mats;
    mats2[atom] *= 0.5;
    const BundleMorphism phi2 = make_morphism(b1, b2, std::move(mats2), rng());
    acc.expect(!morphisms_ae_equal(phi, phi2));
    const ModuleHom hom2 = gamma_hom(phi2);
    bool distinguished = false;
    for (int jgen = 0; jgen < hom.source.generators && !distinguished; ++jgen) {
      Element gen{Eigen::MatrixXd::Zero(space.atom_count(),
                                        hom.source.generators)};
      gen.coeffs.col(jgen).setOnes();
      if (!elements_ae_equal(hom.target, apply_hom(hom, gen),
                             apply_hom(hom2, gen), 1e-12))
        distinguished = true;
    }
    acc.expect(distinguished);
  }
  return acc.result("full_faithfulness", seed, "exact");
}

CheckResult decomposition_uniqueness(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < 100; ++trial) {
    const PresentedModule M = random_module(rng, 6, 20);
    const int g = M.generators;
    const std::vector<int> base = decompose(M).dim_per_atom;

    std::vector<int> perm(g);
    for (int i = 0; i < g; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(g, g);
    for (int i = 0; i < g; ++i) P(perm[i], i) = 1.0;

    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(g, g);
    for (int i = 0; i < g; ++i) {
      U(i, i) = urand(rng, 0.5, 2.0);
      for (int j = i + 1; j < g; ++j) U(i, j) = urand(rng, -1.0, 1.0);
    }

    auto conjugated = [&](const Eigen::MatrixXd& T) {
      PresentedModule out = M;
      for (auto& s : out.seminorms) {
        if (s.kind == NormKind::Quadratic) {
          Eigen::MatrixXd G = T.transpose() * s.gram * T;
          s = NormSpec::quadratic(0.5 * (G + G.transpose()));
        } else {
          s = NormSpec::poly_max(s.functionals * T);
        }
      }
      return out;
    };
    acc.expect(decompose(conjugated(P)).dim_per_atom == base);
    acc.expect(decompose(conjugated(U)).dim_per_atom == base);
  }
  return acc.result("decomposition_uniqueness", seed, "exact");
}

CheckResult simple_section_density(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < 100; ++trial) {
    const MeasureSpace space = random_space(rng, 2, 10);
    const Bundle b = random_bundle(rng, space, 5, false);
    const Section s = random_section(rng, b);
    for (double eps : {1e-1, 1e-3}) {
      const double d = gamma_distance(b, s, quantize(b, s, eps));
      acc.bound(d / eps, 1.0);
    }
  }
  return acc.result("simple_section_density", seed, "exact");
}

CheckResult hilbert_characterization(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < 50; ++trial) {
    const MeasureSpace space = random_space(rng, 2, 10);
    const Bundle hb = random_hilbert_bundle(rng, space, 4);
    acc.expect(is_hilbert_bundle(hb, rng()));

    // Planted Gram recovery.
    for (int i = 0; i < hb.atom_count(); ++i) {
      if (hb.dims[i] == 0) continue;
      const auto res = polarization_is_hilbert(hb.norms[i], 32, 1e-9, rng());
      acc.expect(res.hilbert);
      if (res.hilbert)
        acc.bound((*res.gram - hb.norms[i].gram).cwiseAbs().maxCoeff(), 1e-9);
    }

    // A single flat fiber of dimension >= 2 on a positive atom breaks it.
    Bundle broken = hb;
    int atom = -1;
    for (int i = 0; i < broken.atom_count(); ++i)
      if (!space.null_atom(i)) atom = i;
    const int d = std::max(2, broken.dims[atom]);
    broken.dims[atom] = d;
    broken.norms[atom] = irand(rng, 0, 1)
        ? NormSpec::weighted_lp(1.0, Eigen::VectorXd::Ones(d))
        : NormSpec::weighted_lp(kInf, Eigen::VectorXd::Ones(d));
    acc.expect(!is_hilbert_bundle(broken, rng()));
  }
  return acc.result("hilbert_characterization", seed, "exact");
}

CheckResult tensor_theorem(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < 100; ++trial) {
    const MeasureSpace space = random_space(rng, 2, 10);
    const Bundle b1 = random_hilbert_bundle(rng, space, 3);
    const Bundle b2 = random_hilbert_bundle(rng, space, 3);
    const Bundle t = tensor_bundle(b1, b2, rng());
    for (int i = 0; i < space.atom_count(); ++i)
      acc.expect(t.dims[i] == b1.dims[i] * b2.dims[i]);
    const Section s1 = random_section(rng, b1);
    const Section s2 = random_section(rng, b2);
    const Section ts = tensor_elementary(b1, b2, s1, s2, rng());
    const ScalarField n1 = section_norm(b1, s1);
    const ScalarField n2 = section_norm(b2, s2);
    const ScalarField nt = section_norm(t, ts);
    for (int i = 0; i < space.atom_count(); ++i) {
      if (space.null_atom(i)) continue;
      acc.bound(std::abs(nt.values(i) - n1.values(i) * n2.values(i)), 1e-9);
    }
  }
  return acc.result("tensor_theorem", seed, "exact");
}

CheckResult duality_theorem(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  int pairing_samples = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const MeasureSpace space = random_space(rng, 2, 8);
    const Bundle b = random_bundle(rng, space, 4, false);
    const Bundle db = dual_bundle(b);

    while (pairing_samples < 1000 * (trial + 1) / 100) {
      const Section s = random_section(rng, b);
      const Section s_star = random_section(rng, db);
      const ScalarField pair = dual_pairing(b, s_star, s);
      const ScalarField ns = section_norm(b, s);
      const ScalarField nd = section_norm(db, s_star);
      for (int i = 0; i < space.atom_count(); ++i) {
        if (space.null_atom(i)) continue;
        acc.bound(std::abs(pair.values(i)) - nd.values(i) * ns.values(i), 1e-9);
      }
      ++pairing_samples;
    }

    // Surjectivity: rebuild a dual section from its basis pairings.
    const Section s_star = random_section(rng, db);
    std::map<int, std::vector<ScalarField>> images;
    for (int n : b.distinct_dims()) {
      if (n == 0) continue;
      std::vector<ScalarField> fields;
      for (int c = 0; c < n; ++c) {
        const Section en = constant_section(b, n, Eigen::VectorXd::Unit(n, c));
        fields.push_back(dual_pairing(b, s_star, en));
      }
      images[n] = std::move(fields);
    }
    const Section rebuilt = functional_from_basis_images(b, images);
    for (int i = 0; i < space.atom_count(); ++i) {
      if (space.null_atom(i) || b.dims[i] == 0) continue;
      acc.bound((rebuilt.vectors[i] - s_star.vectors[i]).cwiseAbs().maxCoeff(),
                0.0);
    }

    // Reflexivity on every positive-weight fiber.
    for (int i = 0; i < space.atom_count(); ++i) {
      if (space.null_atom(i) || b.dims[i] == 0) continue;
      const NormSpec dd = dual(dual(b.norms[i]));
      for (int rep = 0; rep < 5; ++rep) {
        const Eigen::VectorXd v = uvec(rng, b.dims[i], -2.0, 2.0);
        acc.bound(std::abs(eval(dd, v) - eval(b.norms[i], v)), 1e-9);
      }
    }
  }
  return acc.result("duality_theorem", seed, "exact");
}

CheckResult pullback_theorem(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < 100; ++trial) {
    const bool ac_mode = trial % 2 == 1;
    const MeasureSpace src = random_space(rng, 2, 12);
    MeasureSpace tgt = random_space(rng, 2, 8, false);
    AtomMap f{src, tgt, {}};
    for (int x = 0; x < src.atom_count(); ++x)
      f.image.push_back(irand(rng, 0, tgt.atom_count() - 1)); // non-injective

    const auto c = compression_constant(f);
    acc.expect(c.has_value());
    // Independent accumulation oracle.
    double oracle = 0.0;
    for (int y = 0; y < tgt.atom_count(); ++y) {
      double mass = 0.0;
      for (int x = 0; x < src.atom_count(); ++x)
        if (f.image[x] == y) mass += src.weights(x);
      if (tgt.weights(y) > 0.0) oracle = std::max(oracle, mass / tgt.weights(y));
    }
    if (c) acc.bound(std::abs(*c - oracle), 1e-12 * std::max(1.0, oracle));

    const Bundle bY = random_bundle(rng, tgt, 4, false);
    const auto mode =
        ac_mode ? PullbackMode::AbsolutelyContinuous : PullbackMode::Strict;
    const Bundle pulled = pullback_bundle(f, bY, mode);
    const Section s = random_section(rng, bY);
    const Section ps = pullback_section(f, bY, s, mode);
    const ScalarField n_pulled = section_norm(pulled, ps);
    const ScalarField n_orig = section_norm(bY, s);
    for (int x = 0; x < src.atom_count(); ++x)
      acc.bound(std::abs(n_pulled.values(x) - n_orig.values(f.image[x])), 0.0);

    // Mass pushed onto a null target atom has no compression constant.
    MeasureSpace tgt2 = tgt;
    tgt2.weights(0) = 0.0;
    if (tgt2.weights.maxCoeff() > 0.0) {
      AtomMap g{src, tgt2, std::vector<int>(src.atom_count(), 0)};
      acc.expect(!compression_constant(g).has_value());
    }
  }
  return acc.result("pullback_theorem", seed, "exact");
}

CheckResult projective_lifting(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < 100; ++trial) {
    const MeasureSpace space = random_space(rng, 2, 10);
    const int gp = irand(rng, 1, 3);
    const int gn = gp + irand(rng, 0, 2);
    const int gm = irand(rng, 1, 4);

    auto definite_module = [&](int g) {
      PresentedModule m;
      m.space = space;
      m.generators = g;
      for (int i = 0; i < space.atom_count(); ++i)
        m.seminorms.push_back(random_presentable_seminorm(rng, g, g));
      return m;
    };
    PresentedModule N = definite_module(gn);
    PresentedModule Mm = definite_module(gm);
    PresentedModule P;
    P.space = space;
    P.generators = gp;
    for (int i = 0; i < space.atom_count(); ++i)
      P.seminorms.push_back(
          random_presentable_seminorm(rng, gp, irand(rng, 0, gp)));

    std::vector<Eigen::MatrixXd> fmats, gmats;
    for (int i = 0; i < space.atom_count(); ++i) {
      fmats.push_back(well_conditioned(rng, gp, gn, gp)); // onto R^{gp}
      gmats.push_back(umat(rng, gp, gm, -1.0, 1.0));
    }
    const ModuleHom f = make_hom(N, P, std::move(fmats), rng());
    const ModuleHom g = make_hom(Mm, P, std::move(gmats), rng());
    const ModuleHom h = lift_through(f, g, rng());
    const ModuleHom fh = compose_hom(f, h, rng());
    for (int jgen = 0; jgen < gm; ++jgen) {
      Element gen{Eigen::MatrixXd::Zero(space.atom_count(), gm)};
      gen.coeffs.col(jgen).setOnes();
      const ScalarField defect =
          pnorm(P, element_sub(apply_hom(fh, gen), apply_hom(g, gen)));
      for (int i = 0; i < space.atom_count(); ++i)
        if (!space.null_atom(i)) acc.bound(defect.values(i), 1e-9);
    }
  }
  return acc.result("projective_lifting", seed, "exact");
}

CheckResult metric_axioms(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < 100; ++trial) {
    const MeasureSpace space = random_space(rng, 2, 10);
    const int n = space.atom_count();

    for (int rep = 0; rep < 4; ++rep) {
      const ScalarField a{uvec(rng, n, -3.0, 3.0)};
      const ScalarField b{uvec(rng, n, -3.0, 3.0)};
      const ScalarField c{uvec(rng, n, -3.0, 3.0)};
      acc.bound(std::abs(l0_distance(a, b, space) - l0_distance(b, a, space)),
                0.0);
      acc.bound(l0_distance(a, c, space) -
                    (l0_distance(a, b, space) + l0_distance(b, c, space)),
                1e-12);
    }
    // Vanishing iff a.e.-equal.
    ScalarField a{uvec(rng, n, -3.0, 3.0)};
    ScalarField b = a;
    for (int i = 0; i < n; ++i)
      if (space.null_atom(i)) b.values(i) += 1.0;
    acc.bound(l0_distance(a, b, space), 0.0);

    const PresentedModule M = random_module(rng, 4, 10);
    for (int rep = 0; rep < 3; ++rep) {
      const Element u = random_element(rng, M);
      const Element v = random_element(rng, M);
      const Element w = random_element(rng, M);
      acc.bound(std::abs(module_distance(M, u, v) - module_distance(M, v, u)),
                0.0);
      acc.bound(module_distance(M, u, w) -
                    (module_distance(M, u, v) + module_distance(M, v, w)),
                1e-12);
      acc.bound(module_distance(M, u, u), 0.0);
    }

    const Bundle bd = random_bundle(rng, space, 3, false);
    for (int rep = 0; rep < 3; ++rep) {
      const Section s = random_section(rng, bd);
      const Section t = random_section(rng, bd);
      const Section r = random_section(rng, bd);
      acc.bound(std::abs(gamma_distance(bd, s, t) - gamma_distance(bd, t, s)),
                0.0);
      acc.bound(gamma_distance(bd, s, r) -
                    (gamma_distance(bd, s, t) + gamma_distance(bd, t, r)),
                1e-12);
      acc.bound(gamma_distance(bd, s, s), 0.0);
      acc.bound(gamma_distance(bd, s, t) - 1.0, 1e-12);
    }
  }
  return acc.result("metric_axioms", seed, "exact");
}

} // namespace

std::vector<CheckResult> acceptance_criteria(std::uint64_t seed) {
  return {
      serre_swan_round_trip(seed + 1),
      full_faithfulness(seed + 2),
      decomposition_uniqueness(seed + 3),
      simple_section_density(seed + 4),
      hilbert_characterization(seed + 5),
      tensor_theorem(seed + 6),
      duality_theorem(seed + 7),
      pullback_theorem(seed + 8),
      projective_lifting(seed + 9),
      metric_axioms(seed + 10),
  };
}

// ---------------------------------------------------------------------------
// per-module invariant suites
// ---------------------------------------------------------------------------

namespace {

CheckResult norm_axioms(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < trials / 5 + 5; ++trial) {
    const int dim = irand(rng, 1, 4);
    const NormSpec s = irand(rng, 0, 1) ? random_norm(rng, dim)
                                        : random_presentable_seminorm(
                                              rng, dim, irand(rng, 0, dim));
    const int samples = s.kind == NormKind::PolyGauge ? 20 : 200;
    for (int rep = 0; rep < samples; ++rep) {
      const Eigen::VectorXd u = uvec(rng, dim, -2.0, 2.0);
      const Eigen::VectorXd v = uvec(rng, dim, -2.0, 2.0);
      const double lambda = urand(rng, -3.0, 3.0);
      acc.bound(std::abs(eval(s, lambda * u) - std::abs(lambda) * eval(s, u)),
                1e-12);
      acc.bound(eval(s, u + v) - (eval(s, u) + eval(s, v)), 1e-12);
      acc.expect(eval(s, u) >= 0.0);
    }
    // sqrt(v'Gv) on a kernel vector reads sqrt of the Gram's rounding
    // noise, so quadratic kernels only vanish to ~1e-8.
    for (const auto& k : kernel_basis(s)) acc.bound(eval(s, k), 1e-7);
    if (is_norm(s)) {
      const Eigen::VectorXd u = uvec(rng, dim, -2.0, 2.0);
      const Eigen::VectorXd v = uvec(rng, dim, -2.0, 2.0);
      const NormSpec d = dual(s);
      acc.bound(std::abs(u.dot(v)) - eval(d, u) * eval(s, v), 1e-9);
      if (!v.isZero(0.0)) acc.expect(eval(s, v) > 0.0);
    }
  }
  return acc.result("norm_axioms", seed);
}

CheckResult norm_euclid_bounds(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < trials / 5 + 5; ++trial) {
    const int dim = irand(rng, 1, 4);
    const NormSpec s = random_norm(rng, dim);
    const double K = euclid_upper(s);
    const double c = euclid_lower(s);
    const int samples = s.kind == NormKind::PolyGauge ? 30 : 1000;
    double sup = 0.0;
    auto probe = [&](const Eigen::VectorXd& v) {
      const double nv = v.norm();
      if (nv == 0.0) return;
      const double e = eval(s, v);
      acc.bound(e - K * nv, 1e-12);
      acc.bound(c * nv - e, 1e-12);
      sup = std::max(sup, e / nv);
    };
    for (int rep = 0; rep < samples; ++rep) probe(uvec(rng, dim, -1.0, 1.0));
    // Include the analytic maximizer direction among the samples.
    if (s.kind == NormKind::Quadratic) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.gram);
      probe(es.eigenvectors().col(dim - 1));
      acc.bound(0.99 * K - sup, 0.0);
    } else if (s.kind == NormKind::PolyMax) {
      for (int r = 0; r < s.functionals.rows(); ++r)
        probe(s.functionals.row(r).transpose());
      acc.bound(0.99 * K - sup, 0.0);
    }
  }
  return acc.result("norm_euclid_bounds", seed);
}

CheckResult norm_dual_involution(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < trials / 10 + 4; ++trial) {
    const int dim = irand(rng, 1, 3);
    const NormSpec s = random_norm(rng, dim);
    const NormSpec dd = dual(dual(s));
    for (int rep = 0; rep < 20; ++rep) {
      const Eigen::VectorXd v = uvec(rng, dim, -2.0, 2.0);
      acc.bound(std::abs(eval(dd, v) - eval(s, v)), 1e-9);
    }
  }
  return acc.result("norm_dual_involution", seed);
}

CheckResult mspace_suite(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < trials; ++trial) {
    const MeasureSpace space = random_space(rng, 1, 12);
    const ReferenceMeasure mp = reference_measure(space);
    acc.bound(std::abs(mp.probs.sum() - 1.0), 1e-12);
    for (int i = 0; i < space.atom_count(); ++i)
      acc.expect((mp.probs(i) > 0.0) == (space.weights(i) > 0.0));

    const int n = space.atom_count();
    const ScalarField f{uvec(rng, n, -3.0, 3.0)};
    std::vector<int> ia, ib;
    for (int i = 0; i < n; ++i) {
      if (irand(rng, 0, 1)) ia.push_back(i);
      if (irand(rng, 0, 1)) ib.push_back(i);
    }
    const BorelSet A = BorelSet::of(ia, n);
    const BorelSet B = BorelSet::of(ib, n);
    const ScalarField lhs = restrict_field(restrict_field(f, A), B);
    const ScalarField rhs = restrict_field(f, set_intersection(A, B));
    acc.bound((lhs.values - rhs.values).cwiseAbs().maxCoeff(), 0.0);

    const BorelSet u1 = essential_union({A, B}, space);
    const BorelSet u2 = essential_union({A, B, A}, space);
    acc.expect(u1.members == u2.members);
    acc.expect(essential_union({A}, space).members == A.members);
    for (int i : A.members) acc.expect(u1.contains(i));
  }
  return acc.result("mspace_suite", seed, "exact");
}

CheckResult bundle_suite(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < trials / 2 + 5; ++trial) {
    const MeasureSpace space = random_space(rng, 2, 10);
    const Bundle b = random_bundle(rng, space, 4, false);
    const int n = space.atom_count();
    const Section s = random_section(rng, b);
    const Section t = random_section(rng, b);
    const ScalarField f{uvec(rng, n, -2.0, 2.0)};

    const ScalarField ns = section_norm(b, s);
    const ScalarField nfs = section_norm(b, scale_by_field(b, f, s));
    const ScalarField nst = section_norm(b, add(b, s, t));
    for (int i = 0; i < n; ++i) {
      acc.bound(std::abs(nfs.values(i) - std::abs(f.values(i)) * ns.values(i)),
                1e-12);
      acc.bound(nst.values(i) -
                    (ns.values(i) + section_norm(b, t).values(i)),
                1e-12);
    }

    // Locality: vanishing on each piece of a cover forces vanishing on
    // the union.
    std::vector<int> cover_a, cover_b;
    for (int i = 0; i < n; ++i) (irand(rng, 0, 1) ? cover_a : cover_b).push_back(i);
    const BorelSet A = BorelSet::of(cover_a, n);
    const BorelSet B = BorelSet::of(cover_b, n);
    Section z = s;
    for (int i = 0; i < n; ++i) z.vectors[i].setZero();
    const ScalarField chiA = ScalarField::indicator(A, n);
    const ScalarField chiB = ScalarField::indicator(B, n);
    const Section za = scale_by_field(b, chiA, z);
    const Section zb = scale_by_field(b, chiB, z);
    bool all_zero = true;
    for (int i = 0; i < n; ++i)
      all_zero = all_zero && za.vectors[i].isZero(0.0) && zb.vectors[i].isZero(0.0);
    acc.expect(all_zero);

    // Glueing round-trip.
    const Section glued = glue(b, {{A, s}, {B, t}});
    for (int i : A.members)
      acc.expect((glued.vectors[i] - s.vectors[i]).isZero(0.0));
    for (int i : B.members)
      acc.expect((glued.vectors[i] - t.vectors[i]).isZero(0.0));

    // Functoriality of composition.
    const Bundle b2 = random_bundle(rng, space, 3, false);
    const Bundle b3 = random_bundle(rng, space, 3, false);
    const BundleMorphism psi = random_contractive_morphism(rng, b, b2);
    const BundleMorphism phi = random_contractive_morphism(rng, b2, b3);
    const Section lhs = apply_morphism(compose(phi, psi, rng()), s);
    const Section rhs = apply_morphism(phi, apply_morphism(psi, s));
    for (int i = 0; i < n; ++i) {
      if (lhs.vectors[i].size() == 0) continue;
      acc.bound((lhs.vectors[i] - rhs.vectors[i]).cwiseAbs().maxCoeff(), 1e-12);
      const ScalarField np = section_norm(b3, lhs);
      if (!space.null_atom(i))
        acc.bound(np.values(i) - section_norm(b, s).values(i), 1e-9);
    }
  }
  return acc.result("bundle_suite", seed);
}

CheckResult nmodule_suite(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < trials / 2 + 5; ++trial) {
    const PresentedModule M = random_module(rng, 5, 12);
    const int n = M.atom_count();
    const Element e = random_element(rng, M);
    const ScalarField f{uvec(rng, n, -2.0, 2.0)};

    // |f.e| = |f||e| atom by atom.
    Element fe = e;
    for (int i = 0; i < n; ++i) fe.coeffs.row(i) *= f.values(i);
    const ScalarField ne = pnorm(M, e);
    const ScalarField nfe = pnorm(M, fe);
    for (int i = 0; i < n; ++i)
      acc.bound(std::abs(nfe.values(i) - std::abs(f.values(i)) * ne.values(i)),
                1e-12);

    // Element locality/glueing on a two-set cover.
    std::vector<int> ia;
    for (int i = 0; i < n; ++i)
      if (irand(rng, 0, 1)) ia.push_back(i);
    const BorelSet A = BorelSet::of(ia, n);
    Element glued{Eigen::MatrixXd::Zero(n, M.generators)};
    for (int i : A.members) glued.coeffs.row(i) = e.coeffs.row(i);
    for (int i : A.members)
      acc.bound((glued.coeffs.row(i) - e.coeffs.row(i)).cwiseAbs().maxCoeff(),
                0.0);

    // Separability surrogate: dyadic pivot-chart elements are eps-dense.
    const Reconstruction rec = reconstruct(M);
    for (double eps : {1e-1, 1e-2}) {
      const Section s = iso_invert(rec.iso, e);
      const Section q = quantize(rec.bundle, s, eps);
      const Element approx = iso_apply(rec.iso, q);
      acc.bound(module_distance(M, e, approx) / eps, 1.0);
    }

    // Lp bridge: finite at desk scale, and L1 <= total_mass * Linf.
    acc.expect(gamma_p_membership(rec.bundle, iso_invert(rec.iso, e), 2.0));
    const double l1 = lp_norm(M, e, 1.0);
    const double linf = lp_norm(M, e, kInf);
    acc.expect(std::isfinite(l1) && std::isfinite(linf));
    acc.bound(l1 - M.space.weights.sum() * linf, 1e-9);
  }
  return acc.result("nmodule_suite", seed);
}

CheckResult io_suite(std::uint64_t seed, int trials) {
  std::mt19937_64 rng(seed);
  Accumulator acc;
  for (int trial = 0; trial < std::max(3, trials / 10); ++trial) {
    InstanceFile f;
    f.spaces["X"] = random_space(rng, 2, 8);
    f.bundles["T"] = random_bundle(rng, f.spaces["X"], 3, false);
    f.modules["M"] = [&] {
      PresentedModule m = random_module(rng, 4, 8);
      m.space = f.spaces["X"];
      m.seminorms.clear();
      for (int i = 0; i < m.atom_count(); ++i)
        m.seminorms.push_back(random_presentable_seminorm(
            rng, m.generators, irand(rng, 0, m.generators)));
      return m;
    }();
    f.sections["s"] = {"T", random_section(rng, f.bundles["T"])};
    f.elements["e"] = {"M", random_element(rng, f.modules["M"])};
    f.atom_maps["f"] = AtomMap{f.spaces["X"], f.spaces["X"],
                               std::vector<int>(f.spaces["X"].atom_count(), 0)};

    const json j1 = to_json(f);
    const LoadResult back = parse_instances(j1);
    acc.expect(back.ok);
    if (back.ok) {
      const json j2 = to_json(back.file);
      acc.expect(j1 == j2);
    }

    // Report determinism for fixed inputs.
    std::vector<CheckResult> checks = {
        {"probe", true, urand(rng, 0.0, 1e-7), "exact", 7}};
    acc.expect(report_json("check", checks, 7).dump() ==
               report_json("check", checks, 7).dump());
  }
  return acc.result("io_suite", seed, "exact");
}

} // namespace

std::vector<CheckResult> invariant_suite(std::uint64_t seed, int trials) {
  return {
      norm_axioms(seed + 101, trials),
      norm_euclid_bounds(seed + 102, trials),
      norm_dual_involution(seed + 103, trials),
      mspace_suite(seed + 104, trials),
      bundle_suite(seed + 105, trials),
      nmodule_suite(seed + 106, trials),
      io_suite(seed + 107, trials),
  };
}

std::vector<CheckResult> run_all(std::uint64_t seed, int trials) {
  std::vector<CheckResult> out = acceptance_criteria(seed);
  for (auto& c : invariant_suite(seed, trials)) out.push_back(std::move(c));
  return out;
}

} // namespace bundlecalc::checks
