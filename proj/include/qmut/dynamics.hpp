#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bigint.hpp"
#include "error.hpp"
#include "explorer.hpp"
#include "quiver.hpp"

namespace qmut {

// ===========================================================================
// Alternating dynamics on quivers with exactly two mutable vertices
// ===========================================================================

struct DynamicsTrace {
  VertexId c;
  VertexId d;
  /// |b(C, D)| of the initial quiver.
  Multiplicity alpha;
  /// states[n] = (mu_D mu_C)^n (Q), n = 0..steps.
  std::vector<Quiver> states;
  /// half_states[n] = mu_C (states[n]), n = 0..steps-1.
  std::vector<Quiver> half_states;
  /// Unordered vertex pairs in vertex order; delta[n][p] is the multiplicity
  /// of pairs[p] in states[n].
  std::vector<std::pair<VertexId, VertexId>> pairs;
  std::vector<std::vector<Multiplicity>> delta;
  std::vector<Multiplicity> total_arrows;
  /// Number of half-steps the closed-form driver handed to the mutation
  /// engine because the recurrence's validity window did not hold.
  std::size_t engine_fallbacks = 0;

  std::size_t steps() const { return states.empty() ? 0 : states.size() - 1; }

  const Multiplicity& delta_at(std::string_view u, std::string_view v, std::size_t step) const {
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      if ((pairs[p].first == u && pairs[p].second == v) || (pairs[p].first == v && pairs[p].second == u))
        return delta.at(step)[p];
    }
    throw Error(ErrorCode::UnknownVertex, "no pair {" + std::string(u) + "," + std::string(v) + "}");
  }
};

namespace detail {

inline void require_two_mutable(const Quiver& q, std::size_t c, std::size_t d) {
  if (q.is_frozen(c)) throw Error(ErrorCode::FrozenVertexMutation, "'" + q.id(c) + "' is frozen");
  if (q.is_frozen(d)) throw Error(ErrorCode::FrozenVertexMutation, "'" + q.id(d) + "' is frozen");
  if (c == d) throw Error(ErrorCode::SameVertex, "C and D must differ");
  const auto m = q.mutable_indices().size();
  if (m != 2)
    throw Error(ErrorCode::WrongMutableCount, "expected exactly two mutable vertices, found " + std::to_string(m));
}

inline void record_state(DynamicsTrace& trace, Quiver q) {
  std::vector<Multiplicity> row;
  Multiplicity total = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      row.push_back(abs(q.b(i, j)));
      total += row.back();
    }
  }
  trace.delta.push_back(std::move(row));
  trace.total_arrows.push_back(std::move(total));
  trace.states.push_back(std::move(q));
}

inline DynamicsTrace empty_trace(const Quiver& q, std::size_t c, std::size_t d) {
  DynamicsTrace trace;
  trace.c = q.id(c);
  trace.d = q.id(d);
  trace.alpha = abs(q.b(c, d));
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j) trace.pairs.emplace_back(q.id(i), q.id(j));
  return trace;
}

}  // namespace detail

/// Iterates mu_C then mu_D, `n_steps` times, recording every state.
inline DynamicsTrace alt_orbit(const Quiver& q, std::string_view c_id, std::string_view d_id, std::size_t n_steps) {
  const std::size_t c = q.index_of(c_id);
  const std::size_t d = q.index_of(d_id);
  detail::require_two_mutable(q, c, d);
  if (n_steps < 1) throw Error(ErrorCode::InsufficientSteps, "n_steps must be positive");
  DynamicsTrace trace = detail::empty_trace(q, c, d);
  Quiver current = q;
  detail::record_state(trace, current);
  for (std::size_t n = 0; n < n_steps; ++n) {
    current.mutate_in_place(c);
    trace.half_states.push_back(current);
    current.mutate_in_place(d);
    detail::record_state(trace, current);
  }
  return trace;
}

struct OrbitCounts {
  std::size_t labeled = 0;
  std::size_t iso = 0;
};

/// Size of the mutation class, counted as labeled quivers and as
/// isomorphism classes. Throws Truncated if either search hits a limit.
inline OrbitCounts orbit_size(const Quiver& q, const SearchLimits& limits = {}) {
  const auto m = q.mutable_indices().size();
  if (m != 2)
    throw Error(ErrorCode::WrongMutableCount, "expected exactly two mutable vertices, found " + std::to_string(m));
  const auto labeled = explore(q, Predicate::collect_all(), limits, Dedup::Labeled);
  if (!labeled.exhausted) throw Error(ErrorCode::Truncated, "labeled class not exhausted within limits");
  const auto iso = explore(q, Predicate::collect_all(), limits, Dedup::Isomorphism);
  if (!iso.exhausted) throw Error(ErrorCode::Truncated, "isomorphism classes not exhausted within limits");
  return {labeled.visited, iso.visited};
}

// ---------------------------------------------------------------------------
// Closed-form recurrence on four vertices A, B (frozen) and C, D (mutable)
// ---------------------------------------------------------------------------

/// Exchange data of a four-vertex quiver with A -- B constant.
///
/// Form1 (C -> D with weight alpha):  u1 = b(A,C), u2 = b(D,A), v1 = b(B,C), v2 = b(D,B)
///                                    (x, y, z, w)
/// Form2 (D -> C with weight alpha):  u1 = b(C,A), u2 = b(A,D), v1 = b(C,B), v2 = b(B,D)
///                                    (p, q, r, s)
///
/// Entries are signed; the B side typically starts with v2 < 0.
struct AltState {
  enum class Form { One, Two };

  Form form = Form::One;
  Multiplicity u1, u2, v1, v2;
  Multiplicity alpha;
  Multiplicity top;  ///< b(A, B)

  friend bool operator==(const AltState&, const AltState&) = default;
};

struct AltNames {
  VertexId a = "A";
  VertexId b = "B";
  VertexId c = "C";
  VertexId d = "D";
};

/// True iff the next closed-form step applies: Form1 needs x, z >= 0 and
/// alpha x > y, alpha z > w; Form2 needs q, s >= 0 and alpha q > p, alpha s > r.
inline bool in_validity_window(const AltState& s) {
  if (s.form == AltState::Form::One)
    return s.u1 >= 0 && s.v1 >= 0 && s.alpha * s.u1 > s.u2 && s.alpha * s.v1 > s.v2;
  return s.u2 >= 0 && s.v2 >= 0 && s.alpha * s.u2 > s.u1 && s.alpha * s.v2 > s.v1;
}

/// One mutation by the recurrence:
///   mu_C Q1(x, y, z, w) = Q2(x, ax - y, z, az - w)
///   mu_D Q2(p, q, r, s) = Q1(aq - p, q, as - r, s)
inline AltState closed_form_step(const AltState& s) {
  if (!in_validity_window(s))
    throw Error(ErrorCode::ValidityWindowViolated, "state outside the recurrence's validity window");
  AltState out = s;
  if (s.form == AltState::Form::One) {
    out.form = AltState::Form::Two;
    out.u1 = s.u1;
    out.u2 = s.alpha * s.u1 - s.u2;
    out.v1 = s.v1;
    out.v2 = s.alpha * s.v1 - s.v2;
  } else {
    out.form = AltState::Form::One;
    out.u1 = s.alpha * s.u2 - s.u1;
    out.u2 = s.u2;
    out.v1 = s.alpha * s.v2 - s.v1;
    out.v2 = s.v2;
  }
  return out;
}

/// Reads the AltState of a quiver on exactly the four named vertices.
inline AltState alt_state_of(const Quiver& q, const AltNames& names = {}) {
  if (q.size() != 4) throw Error(ErrorCode::ValidityWindowViolated, "closed form needs exactly four vertices");
  const std::size_t a = q.index_of(names.a), b = q.index_of(names.b);
  const std::size_t c = q.index_of(names.c), d = q.index_of(names.d);
  AltState s;
  s.top = q.b(a, b);
  if (q.b(c, d) > 0) {
    s.form = AltState::Form::One;
    s.alpha = q.b(c, d);
    s.u1 = q.b(a, c);
    s.u2 = q.b(d, a);
    s.v1 = q.b(b, c);
    s.v2 = q.b(d, b);
  } else if (q.b(d, c) > 0) {
    s.form = AltState::Form::Two;
    s.alpha = q.b(d, c);
    s.u1 = q.b(c, a);
    s.u2 = q.b(a, d);
    s.v1 = q.b(c, b);
    s.v2 = q.b(b, d);
  } else {
    throw Error(ErrorCode::ValidityWindowViolated, "C and D are not adjacent");
  }
  return s;
}

/// Rebuilds the quiver of an AltState, with A, B frozen and C, D mutable, in
/// the vertex order of `like`.
inline Quiver quiver_of(const AltState& s, const Quiver& like, const AltNames& names = {}) {
  std::vector<Arrow> arrows;
  auto add = [&](const VertexId& from, const VertexId& to, const Multiplicity& v) {
    if (v > 0) arrows.push_back({from, to, v});
    if (v < 0) arrows.push_back({to, from, -v});
  };
  add(names.a, names.b, s.top);
  if (s.form == AltState::Form::One) {
    add(names.c, names.d, s.alpha);
    add(names.a, names.c, s.u1);
    add(names.d, names.a, s.u2);
    add(names.b, names.c, s.v1);
    add(names.d, names.b, s.v2);
  } else {
    add(names.d, names.c, s.alpha);
    add(names.c, names.a, s.u1);
    add(names.a, names.d, s.u2);
    add(names.c, names.b, s.v1);
    add(names.b, names.d, s.v2);
  }
  return new_quiver(like.vertices(), arrows);
}

/// Same trajectory as `alt_orbit`, driven by `closed_form_step`. Half-steps
/// outside the validity window go through the mutation engine instead and are
/// counted in `engine_fallbacks`.
inline DynamicsTrace closed_form_orbit(const Quiver& q, std::size_t n_steps, const AltNames& names = {}) {
  const std::size_t c = q.index_of(names.c);
  const std::size_t d = q.index_of(names.d);
  detail::require_two_mutable(q, c, d);
  if (!q.is_frozen(q.index_of(names.a)) || !q.is_frozen(q.index_of(names.b)))
    throw Error(ErrorCode::WrongMutableCount, "A and B must be frozen");
  if (n_steps < 1) throw Error(ErrorCode::InsufficientSteps, "n_steps must be positive");
  DynamicsTrace trace = detail::empty_trace(q, c, d);
  detail::record_state(trace, q);
  AltState state = alt_state_of(q, names);

  auto half_step = [&](std::size_t vertex) {
    if (in_validity_window(state)) {
      state = closed_form_step(state);
    } else {
      ++trace.engine_fallbacks;
      state = alt_state_of(quiver_of(state, q, names).mutated(vertex), names);
    }
  };
  for (std::size_t n = 0; n < n_steps; ++n) {
    half_step(c);
    trace.half_states.push_back(quiver_of(state, q, names));
    half_step(d);
    detail::record_state(trace, quiver_of(state, q, names));
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Growth classification
// ---------------------------------------------------------------------------

struct GrowthClass {
  enum class Kind { Trivial, Periodic, Linear, Exponential };
  Kind kind = Kind::Trivial;
  std::size_t period = 0;  ///< set for Periodic
  std::size_t first_repeat = 0;

  friend bool operator==(const GrowthClass&, const GrowthClass&) = default;
};

inline std::string_view growth_name(GrowthClass::Kind k) {
  switch (k) {
    case GrowthClass::Kind::Trivial: return "trivial";
    case GrowthClass::Kind::Periodic: return "periodic";
    case GrowthClass::Kind::Linear: return "linear";
    case GrowthClass::Kind::Exponential: return "exponential";
  }
  return "unknown";
}

/// Some vertex other than C and D is adjacent to C or D.
inline bool is_nontrivial(const Quiver& q, std::string_view c_id, std::string_view d_id) {
  const std::size_t c = q.index_of(c_id), d = q.index_of(d_id);
  for (std::size_t v = 0; v < q.size(); ++v)
    if (v != c && v != d && (q.b(v, c) != 0 || q.b(v, d) != 0)) return true;
  return false;
}

/// Trivial when nothing outside {C, D} touches C or D; Periodic when a state
/// repeats; Linear when the last ceil(n/2) second differences of the total
/// arrow count vanish; Exponential when over that window every ratio
/// total(k+1)/total(k) is at least 1 + 1/(2 alpha). Needs n >= 12 steps.
inline GrowthClass classify_growth(const DynamicsTrace& trace) {
  using Kind = GrowthClass::Kind;
  const std::size_t n = trace.steps();
  if (n < 12) throw Error(ErrorCode::Inconclusive, "classification needs at least 12 steps, got " + std::to_string(n));
  if (!is_nontrivial(trace.states.front(), trace.c, trace.d)) return {Kind::Trivial, 0, 0};
  for (std::size_t j = 1; j <= n; ++j)
    for (std::size_t i = 0; i < j; ++i)
      if (trace.states[i] == trace.states[j]) return {Kind::Periodic, j - i, i};

  const auto& t = trace.total_arrows;
  const std::size_t window = (n + 1) / 2;
  bool linear = true;
  for (std::size_t k = n - window + 1; k <= n && linear; ++k) {
    // second difference t[k] - 2 t[k-1] + t[k-2]
    if (t[k] - 2 * t[k - 1] + t[k - 2] != 0) linear = false;
  }
  if (linear && t[n] > t[n - window]) return {Kind::Linear, 0, 0};

  if (trace.alpha > 0) {
    bool exponential = true;
    const Multiplicity two_alpha = 2 * trace.alpha;
    for (std::size_t k = n - window; k < n && exponential; ++k)
      if (two_alpha * t[k + 1] < (two_alpha + 1) * t[k]) exponential = false;
    if (exponential) return {Kind::Exponential, 0, 0};
  }
  throw Error(ErrorCode::Inconclusive, "total arrow counts are neither periodic, linear nor exponential");
}

// ---------------------------------------------------------------------------
// Ratio limit
// ---------------------------------------------------------------------------

/// (alpha + sqrt(alpha^2 - 4)) / 2, the attracting fixed point of
/// t -> alpha - t / (alpha t - 1).
inline double ratio_target(const Multiplicity& alpha) {
  const long double a = alpha.convert_to<long double>();
  return static_cast<double>((a + std::sqrt(a * a - 4.0L)) / 2.0L);
}

struct RatioCheck {
  Rational exact;
  double estimate = 0.0;
  double target = 0.0;
  bool converged = false;
};

/// delta(A, C) / delta(A, D) at the last step of the trace, evaluated as an
/// exact rational and compared with the limit at tolerance `tol`.
inline RatioCheck ratio_limit_check(const DynamicsTrace& trace, std::string_view a_id, double tol) {
  if (trace.alpha < 2) throw Error(ErrorCode::InvalidWeights, "ratio limit needs alpha >= 2");
  if (trace.steps() < 1) throw Error(ErrorCode::InsufficientSteps, "trace has no steps");
  const Quiver& first = trace.states.front();
  const std::size_t a = first.index_of(a_id);
  if (!first.is_frozen(a)) throw Error(ErrorCode::DegenerateVertex, "'" + std::string(a_id) + "' is not frozen");
  const std::size_t c = first.index_of(trace.c), d = first.index_of(trace.d);
  bool touched = false;
  for (const auto& s : trace.states) touched = touched || s.b(a, c) != 0 || s.b(a, d) != 0;
  if (!touched) throw Error(ErrorCode::DegenerateVertex, "'" + std::string(a_id) + "' never meets C or D");
  const auto& last = trace.states.back();
  const Multiplicity num = abs(last.b(a, c));
  const Multiplicity den = abs(last.b(a, d));
  if (den == 0) throw Error(ErrorCode::InsufficientSteps, "delta(A, D) vanishes at the last step");
  RatioCheck out;
  out.exact = Rational(num, den);
  out.estimate = to_double(out.exact);
  out.target = ratio_target(trace.alpha);
  out.converged = std::fabs(out.estimate - out.target) < tol;
  return out;
}

/// f(t) = alpha - t / (alpha t - 1) in exact arithmetic.
inline Rational ratio_map(const Multiplicity& alpha, const Rational& t) {
  return Rational(alpha) - t / (Rational(alpha) * t - 1);
}

inline Rational iterate_ratio_map(const Multiplicity& alpha, Rational t, std::size_t iterations) {
  for (std::size_t i = 0; i < iterations; ++i) t = ratio_map(alpha, t);
  return t;
}

// ---------------------------------------------------------------------------
// Path quivers  A -x0-> C1 -x1-> ... -> Ck -xk-> B
// ---------------------------------------------------------------------------

inline Quiver build_path_quiver(const std::vector<Multiplicity>& weights) {
  if (weights.empty()) throw Error(ErrorCode::InvalidWeights, "path needs at least one weight");
  for (const auto& w : weights)
    if (w < 1) throw Error(ErrorCode::InvalidWeights, "path weights must be positive");
  const std::size_t k = weights.size() - 1;
  std::vector<Vertex> vs{{"A", true}};
  for (std::size_t i = 1; i <= k; ++i) vs.push_back({"C" + std::to_string(i), false});
  vs.push_back({"B", true});
  std::vector<Arrow> arrows;
  for (std::size_t i = 0; i <= k; ++i) arrows.push_back({vs[i].id, vs[i + 1].id, weights[i]});
  return new_quiver(std::move(vs), arrows);
}

struct ConjectureReport {
  std::set<Multiplicity> observed;
  Multiplicity product;
  bool consistent = false;
  bool exhausted = false;
  std::size_t visited = 0;
  std::set<std::string> truncated_by;
};

/// Collects every A -- B multiplicity seen in the (bounded) mutation class of
/// the path quiver and checks it against {0, x0 x1 ... xk}.
inline ConjectureReport conjecture_scan(const std::vector<Multiplicity>& weights, const SearchLimits& limits) {
  const Quiver q = build_path_quiver(weights);
  const auto report = explore(q, Predicate::collect("A", "B"), limits, Dedup::Labeled);
  ConjectureReport out;
  out.product = 1;
  for (const auto& w : weights) out.product *= w;
  out.observed = *report.collected;
  out.consistent = std::all_of(out.observed.begin(), out.observed.end(),
                               [&](const Multiplicity& m) { return m == 0 || m == out.product; });
  out.exhausted = report.exhausted;
  out.visited = report.visited;
  out.truncated_by = report.truncated_by;
  return out;
}

}  // namespace qmut
