#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rmhd/recovery.hpp"
#include "rmhd/state.hpp"

// JSON state records: {"rho": r, "v": [..], "B": [..], "p": p} for primitive
// input, {"D": d, "m": [..], "B": [..], "E": e} for conserved input.

namespace rmhd::io {

using nlohmann::json;

inline Vec3 vec3_from_json(const json& j, const char* key) {
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3)
    throw std::invalid_argument(std::string("state json: '") + key +
                                "' must be a 3-array");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

inline json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

struct StateInput {
  std::optional<Primitive> primitive;
  std::optional<Conserved> conserved;
};

inline StateInput parse_state(const json& j) {
  StateInput st;
  if (j.contains("rho")) {
    Primitive q;
    q.rho = j.at("rho").get<double>();
    q.v = vec3_from_json(j, "v");
    q.B = vec3_from_json(j, "B");
    q.p = j.at("p").get<double>();
    st.primitive = q;
  } else if (j.contains("D")) {
    Conserved u;
    u.D = j.at("D").get<double>();
    u.m = vec3_from_json(j, "m");
    u.B = vec3_from_json(j, "B");
    u.E = j.at("E").get<double>();
    st.conserved = u;
  } else {
    throw std::invalid_argument(
        "state json: expected keys rho/v/B/p (primitive) or D/m/B/E (conserved)");
  }
  return st;
}

inline json to_json(const Primitive& q) {
  return {{"rho", q.rho}, {"v", to_json(q.v)}, {"B", to_json(q.B)}, {"p", q.p}};
}

inline json to_json(const Conserved& u) {
  return {{"D", u.D}, {"m", to_json(u.m)}, {"B", to_json(u.B)}, {"E", u.E}};
}

inline json report_to_json(const RecoveryReport& rep, bool include_trace) {
  json j{{"status", to_string(rep.status)},
         {"xi", rep.xi},
         {"iterations", rep.iterations},
         {"osc_count", rep.osc_count},
         {"pcp_violated", rep.pcp_violated},
         {"initial_kind", to_string(rep.initial_kind)}};
  if (include_trace) {
    json tr = json::array();
    for (const auto& [xi, f] : rep.trace) tr.push_back(json::array({xi, f}));
    j["trace"] = tr;
  }
  return j;
}

}  // namespace rmhd::io
