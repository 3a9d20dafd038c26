#include "bundlecalc/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <limits>

namespace bundlecalc {

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    a.push_back(std::move(row));
  }
  return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw Error("expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j[i].get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, int forced_cols = -1) {
  if (!j.is_array()) throw Error("expected an array of rows");
  const int rows = static_cast<int>(j.size());
  int cols = forced_cols;
  if (cols < 0) cols = rows == 0 ? 0 : static_cast<int>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols)
      throw Error("ragged matrix rows");
    for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

} // namespace

json to_json(const MeasureSpace& s) {
  json j;
  j["atoms"] = s.atom_count();
  j["weights"] = vector_to_json(s.weights);
  if (!s.labels.empty()) j["labels"] = s.labels;
  return j;
}

MeasureSpace space_from_json(const json& j) {
  MeasureSpace s;
  s.weights = vector_from_json(j.at("weights"));
  if (j.contains("atoms") &&
      j.at("atoms").get<int>() != static_cast<int>(s.weights.size()))
    throw Error("space: atoms field disagrees with weights length");
  if (j.contains("labels"))
    s.labels = j.at("labels").get<std::vector<std::string>>();
  s.validate();
  return s;
}

json to_json(const NormSpec& s) {
  json j;
  switch (s.kind) {
    case NormKind::Quadratic:
      j["kind"] = "quadratic";
      j["G"] = matrix_to_json(s.gram);
      break;
    case NormKind::WeightedLp:
      j["kind"] = "wlp";
      if (s.p == std::numeric_limits<double>::infinity())
        j["p"] = "inf";
      else
        j["p"] = s.p;
      j["w"] = vector_to_json(s.weights);
      break;
    case NormKind::PolyMax:
      j["kind"] = "polymax";
      j["n"] = s.dim(); // A may have zero rows, which would lose the dim
      j["A"] = matrix_to_json(s.functionals);
      break;
    case NormKind::PolyGauge:
      j["kind"] = "polygauge";
      j["V"] = matrix_to_json(s.generators.transpose()); // rows are points
      break;
  }
  return j;
}

NormSpec norm_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "quadratic") return NormSpec::quadratic(matrix_from_json(j.at("G")));
  if (kind == "wlp") {
    double p;
    if (j.at("p").is_string()) {
      if (j.at("p").get<std::string>() != "inf")
        throw Error("wlp: p must be a number or \"inf\"");
      p = std::numeric_limits<double>::infinity();
    } else {
      p = j.at("p").get<double>();
    }
    return NormSpec::weighted_lp(p, vector_from_json(j.at("w")));
  }
  if (kind == "polymax") {
    const int n = j.contains("n") ? j.at("n").get<int>() : -1;
    return NormSpec::poly_max(matrix_from_json(j.at("A"), n));
  }
  if (kind == "polygauge")
    return NormSpec::poly_gauge(matrix_from_json(j.at("V")).transpose());
  throw Error("unknown norm kind: " + kind);
}

json to_json(const Bundle& b) {
  json j;
  j["space"] = to_json(b.space);
  j["dims"] = b.dims;
  json norms = json::array();
  for (const auto& n : b.norms) norms.push_back(to_json(n));
  j["norms"] = std::move(norms);
  return j;
}

json to_json(const Section& s) {
  json j;
  json vecs = json::array();
  for (const auto& v : s.vectors) vecs.push_back(vector_to_json(v));
  j["vectors"] = std::move(vecs);
  return j;
}

Section section_from_json(const json& j) {
  Section s;
  for (const auto& row : j.at("vectors")) s.vectors.push_back(vector_from_json(row));
  return s;
}

json to_json(const PresentedModule& m) {
  json j;
  j["space"] = to_json(m.space);
  j["g"] = m.generators;
  json sn = json::array();
  for (const auto& s : m.seminorms) sn.push_back(to_json(s));
  j["seminorms"] = std::move(sn);
  return j;
}

json to_json(const Element& e) {
  json j;
  j["coeffs"] = matrix_to_json(e.coeffs);
  return j;
}

Element element_from_json(const json& j) {
  return Element{matrix_from_json(j.at("coeffs"))};
}

json to_json(const Decomposition& d) {
  json j;
  j["dims"] = d.dim_per_atom;
  json pieces;
  for (const auto& [n, set] : d.pieces)
    pieces["E" + std::to_string(n)] = set.members;
  j["pieces"] = std::move(pieces);
  return j;
}

namespace {

// Resolves a space reference that may be a name or an inline object.
std::optional<MeasureSpace> resolve_space(const json& ref,
                                          const InstanceFile& file,
                                          std::vector<std::string>& errors,
                                          const std::string& where) {
  if (ref.is_string()) {
    const auto it = file.spaces.find(ref.get<std::string>());
    if (it == file.spaces.end()) {
      errors.push_back(where + ": unknown space \"" + ref.get<std::string>() + "\"");
      return std::nullopt;
    }
    return it->second;
  }
  try {
    return space_from_json(ref);
  } catch (const Error& e) {
    errors.push_back(where + ": " + e.what());
    return std::nullopt;
  }
}

} // namespace

LoadResult parse_instances(const json& j) {
  LoadResult res;
  auto& errors = res.errors;
  if (j.contains("version")) res.file.version = j.at("version").get<std::string>();

  if (j.contains("spaces")) {
    for (const auto& [name, sj] : j.at("spaces").items()) {
      try {
        res.file.spaces[name] = space_from_json(sj);
      } catch (const std::exception& e) {
        errors.push_back("/spaces/" + name + ": " + e.what());
      }
    }
  }
  if (j.contains("bundles")) {
    for (const auto& [name, bj] : j.at("bundles").items()) {
      const std::string where = "/bundles/" + name;
      try {
        const auto sp = resolve_space(bj.at("space"), res.file, errors, where);
        if (!sp) continue;
        Bundle b;
        b.space = *sp;
        b.dims = bj.at("dims").get<std::vector<int>>();
        for (const auto& nj : bj.at("norms")) b.norms.push_back(norm_from_json(nj));
        const BundleValidation v = validate_bundle(b);
        if (!v.valid) {
          for (const auto& issue : v.issues) errors.push_back(where + ": " + issue);
          continue;
        }
        res.file.bundles[name] = std::move(b);
      } catch (const std::exception& e) {
        errors.push_back(where + ": " + e.what());
      }
    }
  }
  if (j.contains("modules")) {
    for (const auto& [name, mj] : j.at("modules").items()) {
      const std::string where = "/modules/" + name;
      try {
        const auto sp = resolve_space(mj.at("space"), res.file, errors, where);
        if (!sp) continue;
        PresentedModule m;
        m.space = *sp;
        m.generators = mj.at("g").get<int>();
        for (const auto& nj : mj.at("seminorms"))
          m.seminorms.push_back(norm_from_json(nj));
        m.validate();
        res.file.modules[name] = std::move(m);
      } catch (const std::exception& e) {
        errors.push_back(where + ": " + e.what());
      }
    }
  }
  if (j.contains("sections")) {
    for (const auto& [name, sj] : j.at("sections").items()) {
      const std::string where = "/sections/" + name;
      try {
        const std::string bname = sj.at("bundle").get<std::string>();
        const auto it = res.file.bundles.find(bname);
        if (it == res.file.bundles.end()) {
          errors.push_back(where + ": unknown bundle \"" + bname + "\"");
          continue;
        }
        Section s = section_from_json(sj);
        section_norm(it->second, s); // shape validation
        res.file.sections[name] = {bname, std::move(s)};
      } catch (const std::exception& e) {
        errors.push_back(where + ": " + e.what());
      }
    }
  }
  if (j.contains("elements")) {
    for (const auto& [name, ej] : j.at("elements").items()) {
      const std::string where = "/elements/" + name;
      try {
        const std::string mname = ej.at("module").get<std::string>();
        const auto it = res.file.modules.find(mname);
        if (it == res.file.modules.end()) {
          errors.push_back(where + ": unknown module \"" + mname + "\"");
          continue;
        }
        Element e = element_from_json(ej);
        pnorm(it->second, e); // shape validation
        res.file.elements[name] = {mname, std::move(e)};
      } catch (const std::exception& e) {
        errors.push_back(where + ": " + e.what());
      }
    }
  }
  if (j.contains("atom_maps")) {
    for (const auto& [name, fj] : j.at("atom_maps").items()) {
      const std::string where = "/atom_maps/" + name;
      try {
        const auto src = resolve_space(fj.at("source"), res.file, errors, where);
        const auto tgt = resolve_space(fj.at("target"), res.file, errors, where);
        if (!src || !tgt) continue;
        AtomMap f{*src, *tgt, fj.at("image").get<std::vector<int>>()};
        f.validate();
        res.file.atom_maps[name] = std::move(f);
      } catch (const std::exception& e) {
        errors.push_back(where + ": " + e.what());
      }
    }
  }
  res.ok = errors.empty();
  return res;
}

LoadResult load_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    LoadResult res;
    res.errors.push_back("cannot open " + path);
    return res;
  }
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    LoadResult res;
    res.errors.push_back(std::string("parse error: ") + e.what());
    return res;
  }
  return parse_instances(j);
}

json to_json(const InstanceFile& f) {
  json j;
  j["version"] = f.version;
  for (const auto& [name, s] : f.spaces) j["spaces"][name] = to_json(s);
  for (const auto& [name, b] : f.bundles) j["bundles"][name] = to_json(b);
  for (const auto& [name, m] : f.modules) j["modules"][name] = to_json(m);
  for (const auto& [name, se] : f.sections) {
    json sj = to_json(se.second);
    sj["bundle"] = se.first;
    j["sections"][name] = std::move(sj);
  }
  for (const auto& [name, el] : f.elements) {
    json ej = to_json(el.second);
    ej["module"] = el.first;
    j["elements"][name] = std::move(ej);
  }
  for (const auto& [name, f2] : f.atom_maps) {
    json fj;
    fj["source"] = to_json(f2.source);
    fj["target"] = to_json(f2.target);
    fj["image"] = f2.image;
    j["atom_maps"][name] = std::move(fj);
  }
  return j;
}

double canonical_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::strtod(buf, nullptr);
}

json report_json(const std::string& command,
                 const std::vector<CheckResult>& checks, std::uint64_t seed) {
  json j;
  j["command"] = command;
  j["seed"] = seed;
  j["version"] = "1";
  json arr = json::array();
  bool all = true;
  for (const auto& c : checks) {
    json cj;
    cj["name"] = c.name;
    cj["verdict"] = c.pass ? "pass" : "fail";
    cj["max_error"] = canonical_double(c.max_error);
    cj["method"] = c.method;
    cj["seed"] = c.seed;
    arr.push_back(std::move(cj));
    all = all && c.pass;
  }
  j["checks"] = std::move(arr);
  j["all_pass"] = all;
  return j;
}

} // namespace bundlecalc
