#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bundlecalc/io.hpp"

namespace bundlecalc::checks {

// ---- seeded instance generators (shared by the check runner and tests) ----

MeasureSpace random_space(std::mt19937_64& rng, int min_atoms, int max_atoms,
                          bool allow_null_atoms = true);

/// Families usable as presented-module seminorms (exact kernels).
NormSpec random_presentable_seminorm(std::mt19937_64& rng, int dim, int rank);

/// A genuine norm from any of the four families.
NormSpec random_norm(std::mt19937_64& rng, int dim, bool all_families = true);

PresentedModule random_module(std::mt19937_64& rng, int max_generators,
                              int max_atoms);

/// Bundle with definite fibers on every atom. When `representable` is set,
/// fibers stay within the families gamma_module can present.
Bundle random_bundle(std::mt19937_64& rng, const MeasureSpace& space,
                     int max_dim, bool representable, int min_dim = 0);

Bundle random_hilbert_bundle(std::mt19937_64& rng, const MeasureSpace& space,
                             int max_dim);

Section random_section(std::mt19937_64& rng, const Bundle& b);
Element random_element(std::mt19937_64& rng, const PresentedModule& m);

/// Contractive-by-construction morphism with nonzero blocks.
BundleMorphism random_contractive_morphism(std::mt19937_64& rng,
                                           const Bundle& src,
                                           const Bundle& tgt);

// ---- check suites ----

/// The ten headline properties, one result each.
std::vector<CheckResult> acceptance_criteria(std::uint64_t seed);

/// Remaining per-module invariant suites. `trials` scales sample counts.
std::vector<CheckResult> invariant_suite(std::uint64_t seed, int trials = 100);

/// acceptance_criteria + invariant_suite.
std::vector<CheckResult> run_all(std::uint64_t seed, int trials = 100);

} // namespace bundlecalc::checks
