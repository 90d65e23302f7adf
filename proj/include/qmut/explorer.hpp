#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bigint.hpp"
#include "canonical.hpp"
#include "error.hpp"
#include "quiver.hpp"

namespace qmut {

enum class Dedup { Labeled, Isomorphism };

inline std::string_view dedup_name(Dedup d) { return d == Dedup::Labeled ? "labeled" : "isomorphism"; }

/// Bounds for `explore`. Unset optionals mean "unlimited".
struct SearchLimits {
  std::size_t max_states = 1'000'000;
  std::optional<std::size_t> max_depth;
  std::optional<Multiplicity> max_multiplicity = two_pow_64();
  std::optional<std::uint64_t> time_budget_ms;

  static SearchLimits unlimited() {
    SearchLimits l;
    l.max_states = static_cast<std::size_t>(-1);
    l.max_multiplicity.reset();
    return l;
  }

  void validate() const {
    if (max_states < 1) throw Error(ErrorCode::InvalidLimits, "max_states must be at least 1");
    if (max_depth && *max_depth < 1) throw Error(ErrorCode::InvalidLimits, "max_depth must be at least 1");
    if (max_multiplicity && *max_multiplicity < 1)
      throw Error(ErrorCode::InvalidLimits, "max_multiplicity must be at least 1");
    if (time_budget_ms && *time_budget_ms < 1)
      throw Error(ErrorCode::InvalidLimits, "time_budget_ms must be at least 1");
  }
};

namespace limit_name {
inline constexpr const char* kMaxStates = "max_states";
inline constexpr const char* kMaxDepth = "max_depth";
inline constexpr const char* kMaxMultiplicity = "max_multiplicity";
inline constexpr const char* kTimeBudget = "time_budget_ms";
}  // namespace limit_name

struct Predicate {
  enum class Kind { PairExactlyK, NoIcebound, CollectPairMultiplicities };

  Kind kind = Kind::NoIcebound;
  Multiplicity k = 0;
  /// For CollectPairMultiplicities: the pair to record. Unset collects every
  /// pair's multiplicity.
  std::optional<std::pair<VertexId, VertexId>> pair;

  static Predicate pair_exactly(Multiplicity k) {
    if (k < 0) throw Error(ErrorCode::InvalidLimits, "PairExactlyK needs k >= 0");
    return {Kind::PairExactlyK, std::move(k), std::nullopt};
  }
  static Predicate no_icebound() { return {Kind::NoIcebound, 0, std::nullopt}; }
  static Predicate collect(VertexId u, VertexId v) {
    return {Kind::CollectPairMultiplicities, 0, std::make_pair(std::move(u), std::move(v))};
  }
  static Predicate collect_all() { return {Kind::CollectPairMultiplicities, 0, std::nullopt}; }

  bool stops_on_witness() const { return kind != Kind::CollectPairMultiplicities; }

  bool holds(const Quiver& q) const {
    switch (kind) {
      case Kind::PairExactlyK: return has_pair_with_exactly_k(q, k);
      case Kind::NoIcebound: return !has_icebound_arrow(q);
      case Kind::CollectPairMultiplicities: return false;
    }
    return false;
  }
};

struct ExplorationReport {
  std::size_t visited = 0;
  Dedup dedup = Dedup::Labeled;
  bool exhausted = false;
  std::optional<MutationSequence> witness;
  std::set<std::string> truncated_by;
  std::optional<std::set<Multiplicity>> collected;
  std::size_t depth_reached = 0;

  friend bool operator==(const ExplorationReport&, const ExplorationReport&) = default;
};

/// Bounded breadth-first search of the mutation class of `root`.
///
/// Children are generated in vertex insertion order and the frontier is
/// processed in generation order, so the first witness found is the
/// lexicographically least among the shortest ones. The search stops at the
/// end of the expansion in which the first witness was found; the root is
/// always expanded. States above `max_multiplicity` count as visited but are
/// not expanded.
inline ExplorationReport explore(const Quiver& root, const Predicate& predicate,
                                 const SearchLimits& limits = {}, Dedup dedup = Dedup::Labeled) {
  limits.validate();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  struct Node {
    std::size_t parent;
    std::size_t vertex;
    std::size_t depth;
  };
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  ExplorationReport report;
  report.dedup = dedup;
  std::optional<std::pair<std::size_t, std::size_t>> collect_pair;
  if (predicate.kind == Predicate::Kind::CollectPairMultiplicities) {
    report.collected.emplace();
    if (predicate.pair) {
      collect_pair.emplace(root.index_of(predicate.pair->first), root.index_of(predicate.pair->second));
      if (collect_pair->first == collect_pair->second)
        throw Error(ErrorCode::SameVertex, "collect pair must name two vertices");
    }
  }

  auto key_of = [&](const Quiver& q) {
    return dedup == Dedup::Labeled ? q.matrix_bytes() : canonical_key(q).bytes;
  };

  std::vector<Node> nodes;
  std::unordered_set<std::string> seen;
  std::deque<std::pair<std::size_t, Quiver>> frontier;
  std::optional<std::size_t> witness_node;

  auto discover = [&](Quiver q, std::size_t parent, std::size_t vertex, std::size_t depth) {
    const std::size_t id = nodes.size();
    nodes.push_back({parent, vertex, depth});
    report.visited = nodes.size();
    if (depth > report.depth_reached) report.depth_reached = depth;
    if (report.collected) {
      if (collect_pair) {
        report.collected->insert(abs(q.b(collect_pair->first, collect_pair->second)));
      } else {
        for (std::size_t i = 0; i < q.size(); ++i)
          for (std::size_t j = i + 1; j < q.size(); ++j) report.collected->insert(abs(q.b(i, j)));
      }
    }
    if (!witness_node && predicate.holds(q)) witness_node = id;
    frontier.emplace_back(id, std::move(q));
  };

  const auto mutables = root.mutable_indices();
  seen.insert(key_of(root));
  discover(root, kNone, kNone, 0);

  bool stopped = false;
  while (!frontier.empty()) {
    if (limits.time_budget_ms) {
      const auto elapsed =
          std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
      if (static_cast<std::uint64_t>(elapsed) >= *limits.time_budget_ms) {
        report.truncated_by.insert(limit_name::kTimeBudget);
        stopped = true;
        break;
      }
    }
    auto [id, q] = std::move(frontier.front());
    frontier.pop_front();
    const Node node = nodes[id];

    if (limits.max_multiplicity && max_multiplicity(q) > *limits.max_multiplicity) {
      report.truncated_by.insert(limit_name::kMaxMultiplicity);
      continue;
    }
    if (limits.max_depth && node.depth >= *limits.max_depth) {
      if (!mutables.empty()) report.truncated_by.insert(limit_name::kMaxDepth);
      continue;
    }
    for (std::size_t v : mutables) {
      if (v == node.vertex) continue;  // undoing the last mutation
      Quiver child = q.mutated(v);
      std::string key = key_of(child);
      if (seen.contains(key)) continue;
      if (nodes.size() >= limits.max_states) {
        report.truncated_by.insert(limit_name::kMaxStates);
        stopped = true;
        break;
      }
      seen.insert(std::move(key));
      discover(std::move(child), id, v, node.depth + 1);
    }
    if (stopped) break;
    if (witness_node && predicate.stops_on_witness()) break;
  }

  report.exhausted = frontier.empty() && !stopped && report.truncated_by.empty();
  if (witness_node) {
    MutationSequence seq;
    for (std::size_t n = *witness_node; nodes[n].parent != kNone; n = nodes[n].parent)
      seq.push_back(root.id(nodes[n].vertex));
    std::reverse(seq.begin(), seq.end());
    report.witness = std::move(seq);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Commuting orbits
// ---------------------------------------------------------------------------

struct OrbitMember {
  std::vector<VertexId> subset;
  Quiver quiver;
};

inline bool mutables_pairwise_nonadjacent(const Quiver& q, const std::vector<std::size_t>& mutables) {
  for (std::size_t a = 0; a < mutables.size(); ++a)
    for (std::size_t b = a + 1; b < mutables.size(); ++b)
      if (q.b(mutables[a], mutables[b]) != 0) return false;
  return true;
}

/// Visits every subset of the mutable vertices (binary counting order, bit i
/// is the i-th mutable vertex in insertion order) together with the quiver
/// obtained by mutating once at each member. `visit(mask, quiver)` returns
/// false to stop early.
///
/// Requires the mutable vertices to be pairwise nonadjacent (MutableAdjacency)
/// and checks that they stay so in every produced quiver, plus order
/// independence on a sample of subsets (NonCommutingFamily).
template <class Visitor>
void for_each_commuting_orbit_member(const Quiver& root, Visitor&& visit) {
  const auto mutables = root.mutable_indices();
  const std::size_t m = mutables.size();
  if (!mutables_pairwise_nonadjacent(root, mutables))
    throw Error(ErrorCode::MutableAdjacency, "mutable vertices are not pairwise nonadjacent");
  if (m > 40) throw Error(ErrorCode::LimitExceeded, "commuting orbit of 2^" + std::to_string(m) + " members");

  const std::uint64_t count = std::uint64_t{1} << m;
  const std::uint64_t sample_stride = std::max<std::uint64_t>(1, count / 8);
  Quiver current = root;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    if (mask > 0) {
      const std::uint64_t flipped = mask ^ (mask - 1);
      for (std::size_t bit = 0; bit < m; ++bit)
        if (flipped >> bit & 1U) current.mutate_in_place(mutables[bit]);
      if (!mutables_pairwise_nonadjacent(current, mutables))
        throw Error(ErrorCode::NonCommutingFamily, "mutable vertices became adjacent");
    }
    if (mask % sample_stride == 0 || mask == count - 1) {
      Quiver reversed = root;
      for (std::size_t bit = m; bit-- > 0;)
        if (mask >> bit & 1U) reversed.mutate_in_place(mutables[bit]);
      if (!(reversed == current))
        throw Error(ErrorCode::NonCommutingFamily, "subset result depends on mutation order");
    }
    if (!visit(mask, static_cast<const Quiver&>(current))) return;
  }
}

inline std::vector<VertexId> subset_from_mask(const Quiver& q, std::uint64_t mask) {
  std::vector<VertexId> out;
  const auto mutables = q.mutable_indices();
  for (std::size_t bit = 0; bit < mutables.size(); ++bit)
    if (mask >> bit & 1U) out.push_back(q.id(mutables[bit]));
  return out;
}

/// Every subset of the mutable vertices with its mutated quiver, in binary
/// counting order. Materialises 2^m quivers.
inline std::vector<OrbitMember> commuting_orbit(const Quiver& q) {
  std::vector<OrbitMember> out;
  for_each_commuting_orbit_member(q, [&](std::uint64_t mask, const Quiver& member) {
    out.push_back({subset_from_mask(q, mask), member});
    return true;
  });
  return out;
}

}  // namespace qmut
