// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rzero/density.hpp"
#include "rzero/errors.hpp"
#include "rzero/expectation.hpp"
#include "rzero/family.hpp"
#include "rzero/mc_oracle.hpp"

namespace rzero {

using json = nlohmann::json;

inline BasisFamily family_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw SchemaError("family spec needs a string 'kind'");
  const std::string kind = j["kind"];
  try {
    if (kind == "trig") {
      if (!j.contains("n")) throw SchemaError("trig family needs 'n'");
      return BasisFamily::trig(j["n"].get<int>(), j.value("d", 0.0));
    }
    if (kind == "kac") {
      if (!j.contains("n")) throw SchemaError("kac family needs 'n'");
      return BasisFamily::kac(j["n"].get<int>(), j.value("d", 0.0));
    }
    if (kind == "custom") {
      if (!j.contains("table") || !j["table"].is_array())
        throw SchemaError("custom family needs a 'table' of coefficient rows");
      return BasisFamily::custom_poly(
          j["table"].get<std::vector<std::vector<double>>>());
    }
  } catch (const InvalidInput& e) {
    throw SchemaError(std::string("invalid family parameters: ") + e.what());
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed family spec: ") + e.what());
  }
  throw SchemaError("unknown family kind '" + kind + "'");
}

inline json family_to_json(const BasisFamily& family) {
  switch (family.kind()) {
    case FamilyKind::Trig:
      return {{"kind", "trig"}, {"n", family.harmonics()}, {"d", family.trig_offset()}};
    case FamilyKind::Kac:
      return {{"kind", "kac"}, {"n", family.dim()}, {"d", family.trig_offset()}};
    case FamilyKind::Custom: {
      const auto* table = family.poly_table();
      if (!table)
        throw InvalidInput("callable custom families are not serializable");
      return {{"kind", "custom"}, {"table", *table}};
    }
  }
  throw InvalidInput("unreachable family kind");
}

inline DensityModel density_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw SchemaError("density spec needs a string 'kind'");
  const std::string kind = j["kind"];
  try {
    if (kind == "uniform-ball") {
      if (!j.contains("r")) throw SchemaError("uniform-ball density needs 'r'");
      return DensityModel::uniform_ball(j["r"].get<double>());
    }
    if (kind == "gaussian") {
      if (!j.contains("sigma")) throw SchemaError("gaussian density needs 'sigma'");
      return DensityModel::gaussian(j["sigma"].get<double>());
    }
  } catch (const InvalidInput& e) {
    throw SchemaError(std::string("invalid density parameters: ") + e.what());
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed density spec: ") + e.what());
  }
  throw SchemaError("unknown density kind '" + kind + "'");
}

inline json density_to_json(const DensityModel& model) {
  switch (model.kind()) {
    case DensityKind::UniformBall:
      return {{"kind", "uniform-ball"}, {"r", model.radius()}};
    case DensityKind::IsotropicGaussian:
      return {{"kind", "gaussian"}, {"sigma", model.sigma()}};
    case DensityKind::RadialGeneral:
      throw InvalidInput("radial-general densities are not serializable");
  }
  throw InvalidInput("unreachable density kind");
}

inline Interval interval_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw SchemaError("interval must be [lo, hi]");
  try {
    return Interval(j[0].get<double>(), j[1].get<double>());
  } catch (const InvalidInput& e) {
    throw SchemaError(std::string("invalid interval: ") + e.what());
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed interval: ") + e.what());
  }
}

/// FNV-1a 64 over the canonical (alphabetically keyed, shortest round-trip
/// numbers) serialization of the family/density/interval triple. Embedded in
/// every result so `compute` and `verify` outputs can be matched.
inline std::string spec_hash(const json& family, const json& density,
                             const Interval& iv) {
  const json canon = {
      {"density", density}, {"family", family}, {"interval", {iv.lo, iv.hi}}};
  const std::string dump = canon.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

inline json result_to_json(const ExpectationResult& r,
                           const std::string& hash) {
  json bad = json::array();
  for (const auto& b : r.bad_points)
    bad.push_back({{"t", b.t}, {"reason", to_string(b.reason)}});
  return {{"value", r.value},
          {"abs_error_estimate", r.abs_error_estimate},
          {"xi_count", r.xi_count},
          {"bad_points", bad},
          {"subintervals", r.subintervals},
          {"spec_hash", hash}};
}

inline json estimate_to_json(const MCEstimate& e, double analytic,
                             RootMethod method, const std::string& hash) {
  json hist = json::object();
  for (const auto& [count, freq] : e.histogram)
    hist[std::to_string(count)] = freq;
  const double z =
      e.std_error > 0.0 ? (e.mean - analytic) / e.std_error : 0.0;
  return {{"mc_mean", e.mean},
          {"mc_se", e.std_error},
          {"samples", e.samples},
          {"seed", e.seed},
          {"method", to_string(method)},
          {"histogram", hist},
          {"analytic", analytic},
          {"z_score", z},
          {"spec_hash", hash}};
}

inline RootMethod method_from_string(const std::string& s) {
  if (s == "sturm") return RootMethod::Sturm;
  if (s == "companion") return RootMethod::Companion;
  if (s == "grid-bisect") return RootMethod::GridBisect;
  throw SchemaError("unknown root-count method '" + s + "'");
}

}  // namespace rzero
