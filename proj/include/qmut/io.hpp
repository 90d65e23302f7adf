#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dynamics.hpp"
#include "error.hpp"
#include "explorer.hpp"
#include "gadgets.hpp"
#include "quiver.hpp"

namespace qmut {

using Json = nlohmann::ordered_json;

// ===========================================================================
// Quiver documents
// ===========================================================================
//
//   {
//     "vertices": [ {"id": "A", "frozen": true}, ... ],
//     "arrows":   [ {"from": "A", "to": "B", "weight": "2"}, ... ]
//   }
//
// Weights are decimal strings. Arrow records follow vertex order of the
// unordered pair, one record per adjacent pair.

inline Json quiver_to_json(const Quiver& q) {
  Json doc;
  doc["vertices"] = Json::array();
  for (const auto& v : q.vertices()) doc["vertices"].push_back(Json{{"id", v.id}, {"frozen", v.frozen}});
  doc["arrows"] = Json::array();
  for (const auto& a : arrows_of(q))
    doc["arrows"].push_back(Json{{"from", a.from}, {"to", a.to}, {"weight", to_decimal(a.weight)}});
  return doc;
}

/// Two-space indented document with a trailing newline.
inline std::string serialize_quiver(const Quiver& q) { return quiver_to_json(q).dump(2) + "\n"; }

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ParseError, where + ": " + what);
}

inline const Json& require_field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) parse_fail(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) parse_fail(where, std::string("missing field '") + key + "'");
  return *it;
}

inline std::string require_string(const Json& v, const std::string& where) {
  if (!v.is_string()) parse_fail(where, "expected a string");
  return v.get<std::string>();
}

/// Accepts a decimal string or a JSON integer.
inline Multiplicity require_integer(const Json& v, const std::string& where) {
  Multiplicity out;
  if (v.is_string()) {
    if (!parse_decimal(v.get<std::string>(), out)) parse_fail(where, "not a decimal integer");
    return out;
  }
  if (v.is_number_unsigned()) return Multiplicity(v.get<std::uint64_t>());
  if (v.is_number_integer()) return Multiplicity(v.get<std::int64_t>());
  parse_fail(where, "expected a decimal integer string");
}

inline std::string location_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace detail

inline Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, detail::location_of(text, e.byte > 0 ? e.byte - 1 : 0) + ": malformed JSON");
  }
}

/// Builds a quiver from a parsed document. Validation errors keep their
/// domain code and name the offending field.
inline Quiver quiver_from_json(const Json& doc, const std::string& where = "quiver") {
  const Json& vs = detail::require_field(doc, "vertices", where);
  const Json& as = detail::require_field(doc, "arrows", where);
  if (!vs.is_array()) detail::parse_fail(where + ".vertices", "expected an array");
  if (!as.is_array()) detail::parse_fail(where + ".arrows", "expected an array");

  std::vector<Vertex> vertices;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string at = where + ".vertices[" + std::to_string(i) + "]";
    Vertex v;
    v.id = detail::require_string(detail::require_field(vs[i], "id", at), at + ".id");
    const Json& frozen = detail::require_field(vs[i], "frozen", at);
    if (!frozen.is_boolean()) detail::parse_fail(at + ".frozen", "expected true or false");
    v.frozen = frozen.get<bool>();
    if (!is_valid_vertex_id(v.id)) throw Error(ErrorCode::InvalidVertexId, at + ".id: invalid id '" + v.id + "'");
    if (!ids.insert(v.id).second) throw Error(ErrorCode::DuplicateVertex, at + ".id: '" + v.id + "' listed twice");
    vertices.push_back(std::move(v));
  }

  std::vector<Arrow> arrows;
  std::set<std::pair<std::string, std::string>> pairs;
  for (std::size_t k = 0; k < as.size(); ++k) {
    const std::string at = where + ".arrows[" + std::to_string(k) + "]";
    Arrow a;
    a.from = detail::require_string(detail::require_field(as[k], "from", at), at + ".from");
    a.to = detail::require_string(detail::require_field(as[k], "to", at), at + ".to");
    a.weight = detail::require_integer(detail::require_field(as[k], "weight", at), at + ".weight");
    if (!ids.contains(a.from)) throw Error(ErrorCode::UnknownVertex, at + ".from: unknown vertex '" + a.from + "'");
    if (!ids.contains(a.to)) throw Error(ErrorCode::UnknownVertex, at + ".to: unknown vertex '" + a.to + "'");
    if (a.from == a.to) throw Error(ErrorCode::SelfLoop, at + ": loop at '" + a.from + "'");
    if (a.weight <= 0) throw Error(ErrorCode::NonpositiveWeight, at + ".weight: must be at least 1");
    if (!pairs.insert(std::minmax(a.from, a.to)).second)
      throw Error(ErrorCode::TwoCycleInInput, at + ": pair {" + a.from + "," + a.to + "} already has an arrow record");
    arrows.push_back(std::move(a));
  }
  if (vertices.empty()) throw Error(ErrorCode::EmptyQuiver, where + ".vertices: a quiver needs at least one vertex");
  return new_quiver(std::move(vertices), arrows);
}

inline Quiver parse_quiver(std::string_view text) { return quiver_from_json(parse_json(text)); }

// ===========================================================================
// Instance text formats
// ===========================================================================

struct SubsetSumText {
  std::vector<std::uint64_t> values;
  std::optional<std::uint64_t> target;
};

namespace detail {

inline std::vector<std::string> content_lines(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

inline std::uint64_t parse_u64(std::string_view token, const std::string& where) {
  const auto first = token.find_first_not_of(" \t");
  const auto last = token.find_last_not_of(" \t");
  if (first == std::string_view::npos) parse_fail(where, "empty number");
  token = token.substr(first, last - first + 1);
  std::uint64_t v = 0;
  for (char c : token) {
    if (c < '0' || c > '9') parse_fail(where, "'" + std::string(token) + "' is not a nonnegative integer");
    if (v > (UINT64_MAX - 9) / 10) parse_fail(where, "number too large");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace detail

/// Comma-separated list of positive integers.
inline std::vector<std::uint64_t> parse_value_list(std::string_view text, const std::string& where = "values") {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    const auto token = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(detail::parse_u64(token, where + "[" + std::to_string(out.size()) + "]"));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// First line: comma-separated values. Optional second line: target k.
inline SubsetSumText parse_subset_sum_instance(std::string_view text) {
  const auto lines = detail::content_lines(text);
  if (lines.empty()) detail::parse_fail("line 1", "missing value list");
  if (lines.size() > 2) detail::parse_fail("line 3", "unexpected content after the target");
  SubsetSumText out;
  out.values = parse_value_list(lines[0], "line 1");
  if (lines.size() == 2) out.target = detail::parse_u64(lines[1], "line 2");
  return out;
}

/// First line: n. Then one triple "i j k" per line.
inline X3CInstance parse_x3c_instance(std::string_view text) {
  const auto lines = detail::content_lines(text);
  if (lines.empty()) detail::parse_fail("line 1", "missing n");
  X3CInstance inst;
  inst.n = detail::parse_u64(lines[0], "line 1");
  for (std::size_t l = 1; l < lines.size(); ++l) {
    std::istringstream in(lines[l]);
    std::vector<std::string> tokens;
    for (std::string t; in >> t;) tokens.push_back(t);
    const std::string where = "triple " + std::to_string(l);
    if (tokens.size() != 3) detail::parse_fail(where, "expected three elements");
    Triple t{};
    for (std::size_t i = 0; i < 3; ++i) t[i] = detail::parse_u64(tokens[i], where);
    inst.triples.push_back(t);
  }
  return inst;
}

// ===========================================================================
// Search wire encoding
// ===========================================================================

/// {"kind":"pair-exactly","k":"8"} | {"kind":"no-icebound"} |
/// {"kind":"collect","u":"A","v":"B"} (u, v optional: all pairs)
inline Predicate predicate_from_json(const Json& j) {
  const std::string kind = detail::require_string(detail::require_field(j, "kind", "predicate"), "predicate.kind");
  if (kind == "pair-exactly") {
    const Multiplicity k = detail::require_integer(detail::require_field(j, "k", "predicate"), "predicate.k");
    if (k < 0) detail::parse_fail("predicate.k", "must be nonnegative");
    return Predicate::pair_exactly(k);
  }
  if (kind == "no-icebound") return Predicate::no_icebound();
  if (kind == "collect") {
    const bool has_u = j.contains("u"), has_v = j.contains("v");
    if (has_u != has_v) detail::parse_fail("predicate", "collect needs both u and v, or neither");
    if (!has_u) return Predicate::collect_all();
    return Predicate::collect(detail::require_string(j["u"], "predicate.u"), detail::require_string(j["v"], "predicate.v"));
  }
  detail::parse_fail("predicate.kind", "unknown kind '" + kind + "'");
}

inline Json predicate_to_json(const Predicate& p) {
  switch (p.kind) {
    case Predicate::Kind::PairExactlyK: return Json{{"kind", "pair-exactly"}, {"k", to_decimal(p.k)}};
    case Predicate::Kind::NoIcebound: return Json{{"kind", "no-icebound"}};
    case Predicate::Kind::CollectPairMultiplicities:
      if (p.pair) return Json{{"kind", "collect"}, {"u", p.pair->first}, {"v", p.pair->second}};
      return Json{{"kind", "collect"}};
  }
  return Json{};
}

/// Missing fields keep their defaults; "unlimited" (or null) clears an
/// optional limit.
inline SearchLimits limits_from_json(const Json& j, SearchLimits limits = {}) {
  if (j.is_null()) return limits;
  if (!j.is_object()) detail::parse_fail("limits", "expected an object");
  auto unlimited = [](const Json& v) { return v.is_null() || (v.is_string() && v.get<std::string>() == "unlimited"); };
  auto as_u64 = [](const Json& v, const std::string& where) -> std::uint64_t {
    const Multiplicity m = detail::require_integer(v, where);
    if (m < 0 || m > Multiplicity(UINT64_MAX)) detail::parse_fail(where, "out of range");
    return m.convert_to<std::uint64_t>();
  };
  if (j.contains("max_states")) limits.max_states = as_u64(j["max_states"], "limits.max_states");
  if (j.contains("max_depth")) {
    if (unlimited(j["max_depth"])) limits.max_depth.reset();
    else limits.max_depth = as_u64(j["max_depth"], "limits.max_depth");
  }
  if (j.contains("max_multiplicity")) {
    if (unlimited(j["max_multiplicity"])) limits.max_multiplicity.reset();
    else limits.max_multiplicity = detail::require_integer(j["max_multiplicity"], "limits.max_multiplicity");
  }
  if (j.contains("time_budget_ms")) {
    if (unlimited(j["time_budget_ms"])) limits.time_budget_ms.reset();
    else limits.time_budget_ms = as_u64(j["time_budget_ms"], "limits.time_budget_ms");
  }
  limits.validate();
  return limits;
}

inline Dedup dedup_from_string(std::string_view s) {
  if (s == "labeled") return Dedup::Labeled;
  if (s == "isomorphism" || s == "iso") return Dedup::Isomorphism;
  throw Error(ErrorCode::ParseError, "dedup: expected 'labeled' or 'isomorphism', got '" + std::string(s) + "'");
}

inline Json report_to_json(const ExplorationReport& r) {
  Json j;
  j["visited"] = r.visited;
  j["dedup"] = dedup_name(r.dedup);
  j["exhausted"] = r.exhausted;
  j["witness"] = r.witness ? Json(*r.witness) : Json(nullptr);
  j["truncated_by"] = Json::array();
  for (const auto& t : r.truncated_by) j["truncated_by"].push_back(t);
  if (r.collected) {
    j["collected"] = Json::array();
    for (const auto& m : *r.collected) j["collected"].push_back(to_decimal(m));
  } else {
    j["collected"] = nullptr;
  }
  j["depth_reached"] = r.depth_reached;
  return j;
}

// ===========================================================================
// Trace export
// ===========================================================================

/// Tab-separated table: header "step", one "u:v" column per vertex pair,
/// "total"; then one row per step with decimal multiplicities.
inline void write_trace_table(std::ostream& out, const DynamicsTrace& trace) {
  out << "step";
  for (const auto& [u, v] : trace.pairs) out << '\t' << u << ':' << v;
  out << "\ttotal\n";
  for (std::size_t n = 0; n < trace.states.size(); ++n) {
    out << n;
    for (const auto& m : trace.delta[n]) out << '\t' << m;
    out << '\t' << trace.total_arrows[n] << '\n';
  }
}

}  // namespace qmut
