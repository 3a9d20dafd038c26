// bundlecalc: command-line front end.
//
// stdout carries exactly one JSON report per invocation; everything meant
// for humans goes to stderr. Exit codes: 0 all checks pass, 1 input/usage
// error, 2 at least one numeric check failed.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bundlecalc/checks.hpp"

using namespace bundlecalc;

namespace {

struct Loaded {
  InstanceFile file;
  std::vector<std::string> errors;
};

Loaded load_all(const std::vector<std::string>& paths) {
  Loaded out;
  for (const auto& path : paths) {
    LoadResult res = load_instances(path);
    for (const auto& e : res.errors) out.errors.push_back(path + e);
    if (!res.ok) continue;
    for (auto& [k, v] : res.file.spaces) out.file.spaces[k] = std::move(v);
    for (auto& [k, v] : res.file.bundles) out.file.bundles[k] = std::move(v);
    for (auto& [k, v] : res.file.modules) out.file.modules[k] = std::move(v);
    for (auto& [k, v] : res.file.sections) out.file.sections[k] = std::move(v);
    for (auto& [k, v] : res.file.elements) out.file.elements[k] = std::move(v);
    for (auto& [k, v] : res.file.atom_maps) out.file.atom_maps[k] = std::move(v);
  }
  return out;
}

int emit(const std::string& command, const std::vector<CheckResult>& checks,
         std::uint64_t seed, const json& results,
         std::chrono::steady_clock::time_point t0) {
  json report = report_json(command, checks, seed);
  if (!results.is_null()) report["results"] = results;
  std::cout << report.dump(2) << "\n";
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  std::cerr << command << ": " << checks.size() << " check(s), "
            << (all ? "all pass" : "FAILURES") << ", " << ms << " ms\n";
  return all ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale calculator for normed modules over finite atomic "
               "measure spaces"};
  app.require_subcommand(1);

  std::uint64_t seed = 42;
  if (const char* env = std::getenv("BUNDLECALC_SEED")) {
    try {
      seed = std::stoull(env);
    } catch (...) {
      std::cerr << "ignoring non-numeric BUNDLECALC_SEED\n";
    }
  }

  std::vector<std::string> files;
  double eps = 1e-3;
  double p = 2.0;
  int trials = 100;
  bool ac = false;
  std::string dist_kind;

  auto add_files = [&](CLI::App* sub, bool required = true) {
    auto* opt = sub->add_option("files", files, "instance JSON file(s)");
    if (required) opt->required();
  };

  auto* cmd_decompose = app.add_subcommand("decompose", "dimensional decomposition of every module");
  add_files(cmd_decompose);
  auto* cmd_reconstruct = app.add_subcommand("reconstruct", "bundle + pivot chart of every module");
  add_files(cmd_reconstruct);
  auto* cmd_roundtrip = app.add_subcommand("roundtrip", "module -> bundle -> module equivalence check");
  add_files(cmd_roundtrip);
  cmd_roundtrip->add_option("--seed", seed, "rng seed");
  auto* cmd_gamma = app.add_subcommand("gamma", "section module of every bundle");
  add_files(cmd_gamma);
  auto* cmd_dual = app.add_subcommand("dual", "fiberwise dual of every bundle");
  add_files(cmd_dual);
  auto* cmd_tensor = app.add_subcommand("tensor", "tensor product of Hilbert-bundle pairs over a common space");
  add_files(cmd_tensor);
  auto* cmd_pullback = app.add_subcommand("pullback", "pull every bundle back along every compatible atom map");
  add_files(cmd_pullback);
  cmd_pullback->add_flag("--ac", ac, "absolute-continuity mode (no bounded-compression requirement)");
  auto* cmd_quantize = app.add_subcommand("quantize", "dyadic simple-section approximation of every section");
  add_files(cmd_quantize);
  cmd_quantize->add_option("--eps", eps, "target gamma-distance")->check(CLI::PositiveNumber);
  auto* cmd_dist = app.add_subcommand("dist", "pairwise distances: l0 | module | gamma");
  cmd_dist->add_option("kind", dist_kind, "l0, module or gamma")
      ->required()
      ->check(CLI::IsMember({"l0", "module", "gamma"}));
  add_files(cmd_dist);
  auto* cmd_lp = app.add_subcommand("lp", "Lp norms of elements and sections");
  add_files(cmd_lp);
  cmd_lp->add_option("--p", p, "exponent in [1, inf)")->check(CLI::Range(1.0, 1e18));
  auto* cmd_check = app.add_subcommand("check", "run the full acceptance + invariant suites");
  add_files(cmd_check, /*required=*/false);
  cmd_check->add_option("--seed", seed, "rng seed");
  cmd_check->add_option("--trials", trials, "sample-count scale")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  const auto t0 = std::chrono::steady_clock::now();

  const Loaded loaded = load_all(files);
  if (!loaded.errors.empty()) {
    for (const auto& e : loaded.errors) std::cerr << "error: " << e << "\n";
    return 1;
  }
  const InstanceFile& in = loaded.file;
  std::vector<CheckResult> checks;
  json results;

  try {
    if (cmd_decompose->parsed()) {
      for (const auto& [name, m] : in.modules) {
        results[name] = to_json(decompose(m));
        checks.push_back({"decompose:" + name, true, 0.0, "exact", seed});
      }
      return emit("decompose", checks, seed, results, t0);
    }

    if (cmd_reconstruct->parsed()) {
      for (const auto& [name, m] : in.modules) {
        const Reconstruction rec = reconstruct(m);
        json r;
        r["bundle"] = to_json(rec.bundle);
        r["pivots"] = rec.iso.chart.pivots;
        results[name] = std::move(r);
        checks.push_back({"reconstruct:" + name, true, 0.0, "exact", seed});
      }
      return emit("reconstruct", checks, seed, results, t0);
    }

    if (cmd_roundtrip->parsed()) {
      std::mt19937_64 rng(seed);
      for (const auto& [name, m] : in.modules) {
        const Reconstruction rec = reconstruct(m);
        const PresentedModule gm = gamma_module(rec.bundle);
        bool pass = decompose(m).dim_per_atom == decompose(gm).dim_per_atom;
        double max_error = 0.0;
        for (int rep = 0; rep < 8; ++rep) {
          const Section s = checks::random_section(rng, rec.bundle);
          const ScalarField lhs = pnorm(m, iso_apply(rec.iso, s));
          const ScalarField rhs = section_norm(rec.bundle, s);
          for (int i = 0; i < m.atom_count(); ++i)
            if (!m.space.null_atom(i))
              max_error = std::max(
                  max_error, std::abs(lhs.values(i) - rhs.values(i)));
        }
        pass = pass && max_error <= 1e-9;
        checks.push_back({"roundtrip:" + name, pass, max_error, "sampled", seed});
      }
      return emit("roundtrip", checks, seed, results, t0);
    }

    if (cmd_gamma->parsed()) {
      for (const auto& [name, b] : in.bundles) {
        results[name] = to_json(gamma_module(b));
        checks.push_back({"gamma:" + name, true, 0.0, "exact", seed});
      }
      return emit("gamma", checks, seed, results, t0);
    }

    if (cmd_dual->parsed()) {
      for (const auto& [name, b] : in.bundles) {
        results[name] = to_json(dual_bundle(b));
        checks.push_back({"dual:" + name, true, 0.0, "exact", seed});
      }
      return emit("dual", checks, seed, results, t0);
    }

    if (cmd_tensor->parsed()) {
      for (auto it1 = in.bundles.begin(); it1 != in.bundles.end(); ++it1) {
        for (auto it2 = it1; it2 != in.bundles.end(); ++it2) {
          if (!same_space(it1->second.space, it2->second.space)) continue;
          if (!is_hilbert_bundle(it1->second, seed) ||
              !is_hilbert_bundle(it2->second, seed))
            continue;
          const std::string key = it1->first + "*" + it2->first;
          results[key] = to_json(tensor_bundle(it1->second, it2->second, seed));
          checks.push_back({"tensor:" + key, true, 0.0, "exact", seed});
        }
      }
      return emit("tensor", checks, seed, results, t0);
    }

    if (cmd_pullback->parsed()) {
      const auto mode = ac ? PullbackMode::AbsolutelyContinuous
                           : PullbackMode::Strict;
      for (const auto& [fname, f] : in.atom_maps) {
        for (const auto& [bname, b] : in.bundles) {
          if (!same_space(b.space, f.target)) continue;
          const std::string key = fname + "^*" + bname;
          results[key] = to_json(pullback_bundle(f, b, mode));
          checks.push_back({"pullback:" + key, true, 0.0, "exact", seed});
        }
      }
      return emit("pullback", checks, seed, results, t0);
    }

    if (cmd_quantize->parsed()) {
      for (const auto& [name, sec] : in.sections) {
        const Bundle& b = in.bundles.at(sec.first);
        const Section q = quantize(b, sec.second, eps);
        const double d = gamma_distance(b, sec.second, q);
        results[name] = to_json(q);
        checks.push_back({"quantize:" + name, d <= eps, d, "exact", seed});
      }
      return emit("quantize", checks, seed, results, t0);
    }

    if (cmd_dist->parsed()) {
      if (dist_kind == "module") {
        for (auto a = in.elements.begin(); a != in.elements.end(); ++a)
          for (auto b = std::next(a); b != in.elements.end(); ++b) {
            if (a->second.first != b->second.first) continue;
            const PresentedModule& m = in.modules.at(a->second.first);
            results[a->first + "|" + b->first] = canonical_double(
                module_distance(m, a->second.second, b->second.second));
          }
      } else {
        for (auto a = in.sections.begin(); a != in.sections.end(); ++a)
          for (auto b = std::next(a); b != in.sections.end(); ++b) {
            if (a->second.first != b->second.first) continue;
            const Bundle& bd = in.bundles.at(a->second.first);
            const std::string key = a->first + "|" + b->first;
            if (dist_kind == "gamma") {
              results[key] = canonical_double(
                  gamma_distance(bd, a->second.second, b->second.second));
            } else { // l0 between the pointwise-norm fields
              results[key] = canonical_double(
                  l0_distance(section_norm(bd, a->second.second),
                              section_norm(bd, b->second.second), bd.space));
            }
          }
      }
      checks.push_back({"dist:" + dist_kind, true, 0.0, "exact", seed});
      return emit("dist", checks, seed, results, t0);
    }

    if (cmd_lp->parsed()) {
      for (const auto& [name, el] : in.elements)
        results[name] = canonical_double(
            lp_norm(in.modules.at(el.first), el.second, p));
      for (const auto& [name, sec] : in.sections)
        results[name] = canonical_double(
            lp_section_norm(in.bundles.at(sec.first), sec.second, p));
      checks.push_back({"lp", true, 0.0, "exact", seed});
      return emit("lp", checks, seed, results, t0);
    }

    if (cmd_check->parsed()) {
      checks = checks::run_all(seed, trials);
      return emit("check", checks, seed, results, t0);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
