#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bundlecalc/constructions.hpp"
#include "bundlecalc/nmodule.hpp"

namespace bundlecalc {

using json = nlohmann::json;

// ---- per-type serialization ----
json to_json(const MeasureSpace& s);
json to_json(const NormSpec& s);
json to_json(const Bundle& b);        // space emitted inline
json to_json(const Section& s);
json to_json(const PresentedModule& m);
json to_json(const Element& e);
json to_json(const Decomposition& d);

MeasureSpace space_from_json(const json& j);
NormSpec norm_from_json(const json& j);
Section section_from_json(const json& j);
Element element_from_json(const json& j);

/// Named collection of instances, the on-disk exchange format. Sections
/// and elements reference bundles/modules by name; bundles, modules and
/// atom maps reference spaces by name.
struct InstanceFile {
  std::string version = "1";
  std::map<std::string, MeasureSpace> spaces;
  std::map<std::string, Bundle> bundles;
  std::map<std::string, PresentedModule> modules;
  std::map<std::string, std::pair<std::string, Section>> sections; // bundle name
  std::map<std::string, std::pair<std::string, Element>> elements; // module name
  std::map<std::string, AtomMap> atom_maps;
};

struct LoadResult {
  bool ok = false;
  InstanceFile file;
  std::vector<std::string> errors; // JSON-pointer-prefixed messages
};

LoadResult load_instances(const std::string& path);
LoadResult parse_instances(const json& j);
json to_json(const InstanceFile& f);

/// One line of a Report.
struct CheckResult {
  std::string name;
  bool pass = true;
  double max_error = 0.0;
  std::string method = "exact"; // "exact" or "sampled"
  std::uint64_t seed = 0;
};

/// Deterministic report: keys sorted, doubles round-tripped through a
/// 17-significant-digit decimal form.
json report_json(const std::string& command,
                 const std::vector<CheckResult>& checks, std::uint64_t seed);

/// Round-trips a double through 17 significant decimal digits.
double canonical_double(double v);

} // namespace bundlecalc
