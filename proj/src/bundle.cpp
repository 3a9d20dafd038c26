#include "bundlecalc/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace bundlecalc {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

void check_section(const Bundle& b, const Section& s, const char* where) {
  require(static_cast<int>(s.vectors.size()) == b.atom_count(),
          std::string(where) + ": section atom count mismatch");
  for (int i = 0; i < b.atom_count(); ++i) {
    require(static_cast<int>(s.vectors[i].size()) == b.dims[i],
            std::string(where) + ": fiber dimension mismatch");
  }
}

} // namespace

BorelSet Bundle::piece(int n) const {
  std::vector<int> idx;
  for (int i = 0; i < atom_count(); ++i) {
    if (dims[i] == n) idx.push_back(i);
  }
  return BorelSet{std::move(idx)};
}

std::vector<int> Bundle::distinct_dims() const {
  std::set<int> d(dims.begin(), dims.end());
  return std::vector<int>(d.begin(), d.end());
}

BundleValidation validate_bundle(const Bundle& b) {
  BundleValidation rep;
  auto flag = [&](int atom, const std::string& msg) {
    rep.valid = false;
    rep.bad_atoms.push_back(atom);
    rep.issues.push_back("atom " + std::to_string(atom) + ": " + msg);
  };
  try {
    b.space.validate();
  } catch (const Error& e) {
    rep.valid = false;
    rep.issues.emplace_back(e.what());
    return rep;
  }
  const int n = b.atom_count();
  if (static_cast<int>(b.dims.size()) != n ||
      static_cast<int>(b.norms.size()) != n) {
    rep.valid = false;
    rep.issues.emplace_back("dims/norms length must equal atom count");
    return rep;
  }
  for (int i = 0; i < n; ++i) {
    if (b.dims[i] < 0) flag(i, "negative fiber dimension");
    if (b.norms[i].dim() != b.dims[i]) flag(i, "norm dimension mismatch");
    // Def. of the bundle asks for a genuine norm m-a.e. only.
    if (!b.space.null_atom(i) && b.norms[i].dim() == b.dims[i] &&
        b.dims[i] > 0 && !is_norm(b.norms[i]))
      flag(i, "degenerate fiber norm on a positive-weight atom");
  }
  return rep;
}

Section zero_section(const Bundle& b) {
  Section s;
  s.vectors.reserve(b.atom_count());
  for (int i = 0; i < b.atom_count(); ++i)
    s.vectors.push_back(Eigen::VectorXd::Zero(b.dims[i]));
  return s;
}

ScalarField section_norm(const Bundle& b, const Section& s) {
  check_section(b, s, "section_norm");
  Eigen::VectorXd out(b.atom_count());
  for (int i = 0; i < b.atom_count(); ++i)
    out(i) = eval(b.norms[i], s.vectors[i]);
  return ScalarField{std::move(out)};
}

Section constant_section(const Bundle& b, int n, const Eigen::VectorXd& v) {
  require(static_cast<int>(v.size()) == n,
          "constant_section: value length must equal the piece dimension");
  Section s = zero_section(b);
  for (int i = 0; i < b.atom_count(); ++i) {
    if (b.dims[i] == n) s.vectors[i] = v;
  }
  return s;
}

Section add(const Bundle& b, const Section& s, const Section& t) {
  check_section(b, s, "add");
  check_section(b, t, "add");
  Section out = s;
  for (int i = 0; i < b.atom_count(); ++i) out.vectors[i] += t.vectors[i];
  return out;
}

Section scale_by_field(const Bundle& b, const ScalarField& f,
                       const Section& s) {
  check_section(b, s, "scale_by_field");
  require(f.values.size() == b.atom_count(), "scale_by_field: field mismatch");
  Section out = s;
  for (int i = 0; i < b.atom_count(); ++i) out.vectors[i] *= f.values(i);
  return out;
}

double gamma_distance(const Bundle& b, const Section& s, const Section& t) {
  const ReferenceMeasure mp = reference_measure(b.space);
  const ScalarField ds = section_norm(b, add(b, s, scale_by_field(b,
      ScalarField::constant(b.atom_count(), -1.0), t)));
  double d = 0.0;
  for (int i = 0; i < b.atom_count(); ++i)
    d += mp.probs(i) * std::min(ds.values(i), 1.0);
  return d;
}

Section glue(const Bundle& b,
             const std::vector<std::pair<BorelSet, Section>>& pieces) {
  std::set<int> seen;
  Section out = zero_section(b);
  for (const auto& [set, sec] : pieces) {
    check_section(b, sec, "glue");
    for (int i : set.members) {
      require(i >= 0 && i < b.atom_count(), "glue: index out of range");
      require(seen.insert(i).second, "glue: sets must be pairwise disjoint");
      out.vectors[i] = sec.vectors[i];
    }
  }
  return out;
}

BundleMorphism make_morphism(Bundle source, Bundle target,
                             std::vector<Eigen::MatrixXd> mats,
                             std::uint64_t seed) {
  require(same_space(source.space, target.space),
          "make_morphism: bundles must live over the same space");
  require(static_cast<int>(mats.size()) == source.atom_count(),
          "make_morphism: one matrix per atom required");
  BundleMorphism phi;
  phi.certificates.reserve(mats.size());
  for (int i = 0; i < source.atom_count(); ++i) {
    require(mats[i].rows() == target.dims[i] && mats[i].cols() == source.dims[i],
            "make_morphism: matrix shape mismatch at atom " + std::to_string(i));
    auto cert = lipschitz_le_one(mats[i], source.norms[i], target.norms[i],
                                 seed + static_cast<std::uint64_t>(i));
    if (!cert.verdict && !source.space.null_atom(i))
      throw Error("make_morphism: map is not 1-Lipschitz on atom " +
                  std::to_string(i));
    phi.certificates.push_back(std::move(cert));
  }
  phi.source = std::move(source);
  phi.target = std::move(target);
  phi.mats = std::move(mats);
  return phi;
}

Section apply_morphism(const BundleMorphism& phi, const Section& s) {
  check_section(phi.source, s, "apply_morphism");
  Section out;
  out.vectors.reserve(s.vectors.size());
  for (size_t i = 0; i < s.vectors.size(); ++i)
    out.vectors.push_back(phi.mats[i] * s.vectors[i]);
  return out;
}

BundleMorphism compose(const BundleMorphism& phi, const BundleMorphism& psi,
                       std::uint64_t seed) {
  require(same_space(phi.source.space, psi.target.space),
          "compose: same underlying space required");
  std::vector<Eigen::MatrixXd> mats;
  mats.reserve(phi.mats.size());
  for (size_t i = 0; i < phi.mats.size(); ++i)
    mats.push_back(phi.mats[i] * psi.mats[i]);
  return make_morphism(psi.source, phi.target, std::move(mats), seed);
}

bool morphisms_ae_equal(const BundleMorphism& phi, const BundleMorphism& psi,
                        double tol) {
  require(phi.mats.size() == psi.mats.size(),
          "morphisms_ae_equal: atom count mismatch");
  for (size_t i = 0; i < phi.mats.size(); ++i) {
    if (phi.source.space.null_atom(static_cast<int>(i))) continue;
    if (phi.mats[i].rows() != psi.mats[i].rows() ||
        phi.mats[i].cols() != psi.mats[i].cols())
      return false;
    if (phi.mats[i].size() > 0 &&
        (phi.mats[i] - psi.mats[i]).cwiseAbs().maxCoeff() > tol)
      return false;
  }
  return true;
}

Section quantize(const Bundle& b, const Section& s, double eps) {
  require(eps > 0.0, "quantize: eps must be positive");
  check_section(b, s, "quantize");
  Section out = s;
  for (int i = 0; i < b.atom_count(); ++i) {
    const int n = b.dims[i];
    if (n == 0) continue;
    const int k = std::max(1, static_cast<int>(std::ceil(euclid_upper(b.norms[i]))));
    const double bound =
        eps * std::ldexp(1.0, -(n + k)) / (k * std::sqrt(static_cast<double>(n)));
    const double h = std::exp2(std::floor(std::log2(bound)));
    for (int c = 0; c < n; ++c)
      out.vectors[i](c) = std::round(s.vectors[i](c) / h) * h;
  }
  return out;
}

} // namespace bundlecalc
