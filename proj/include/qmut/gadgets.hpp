#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "error.hpp"
#include "explorer.hpp"
#include "quiver.hpp"

namespace qmut {

// ===========================================================================
// Subset-Sum gadget
// ===========================================================================
//
// Frozen A and B, one mutable C_i per value x_i, arrows C_i -> A (weight x_i)
// and B -> C_i (weight 1). Mutating a set Y of the C_i an odd number of times
// flips the arrows at those C_i and leaves B -> A with weight sum_{j in Y} x_j,
// so a multiplicity k outside {0, 1} and the values shows up somewhere in the
// mutation class iff k is a subset sum.

inline std::string subset_sum_vertex(std::size_t i) { return "C" + std::to_string(i); }

inline void validate_subset_sum_values(const std::vector<std::uint64_t>& values) {
  if (values.empty()) throw Error(ErrorCode::InvalidInstance, "Subset-Sum instance needs at least one value");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == 0)
      throw Error(ErrorCode::InvalidInstance, "value " + std::to_string(i + 1) + " is not positive");
}

namespace detail {

inline std::vector<Vertex> subset_sum_vertices(std::size_t n) {
  std::vector<Vertex> vs{{"A", true}, {"B", true}};
  for (std::size_t i = 1; i <= n; ++i) vs.push_back({subset_sum_vertex(i), false});
  return vs;
}

}  // namespace detail

inline Quiver build_subset_sum_gadget(const std::vector<std::uint64_t>& values) {
  validate_subset_sum_values(values);
  std::vector<Arrow> arrows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    arrows.push_back({subset_sum_vertex(i + 1), "A", values[i]});
    arrows.push_back({"B", subset_sum_vertex(i + 1), 1});
  }
  return new_quiver(detail::subset_sum_vertices(values.size()), arrows);
}

/// Closed form of the gadget after mutating each C_j (j in `odd`, 1-based) an
/// odd number of times and every other C_i an even number of times.
inline Quiver gadget_form(const std::vector<std::uint64_t>& values, const std::vector<std::size_t>& odd) {
  validate_subset_sum_values(values);
  const std::size_t n = values.size();
  std::vector<bool> flipped(n, false);
  for (std::size_t j : odd) {
    if (j < 1 || j > n) throw Error(ErrorCode::InvalidSubset, "index " + std::to_string(j) + " outside [1, n]");
    if (flipped[j - 1]) throw Error(ErrorCode::InvalidSubset, "index " + std::to_string(j) + " repeated");
    flipped[j - 1] = true;
  }
  Multiplicity y = 0;
  std::vector<Arrow> arrows;
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = subset_sum_vertex(i + 1);
    if (flipped[i]) {
      arrows.push_back({"A", c, values[i]});
      arrows.push_back({c, "B", 1});
      y += values[i];
    } else {
      arrows.push_back({c, "A", values[i]});
      arrows.push_back({"B", c, 1});
    }
  }
  if (y > 0) arrows.push_back({"B", "A", y});
  return new_quiver(detail::subset_sum_vertices(n), arrows);
}

/// Pseudo-polynomial dynamic program over reachable sums. Values may repeat.
inline bool subset_sum_oracle(const std::vector<std::uint64_t>& values, std::uint64_t k) {
  validate_subset_sum_values(values);
  std::uint64_t total = 0;
  for (auto x : values) total += x;
  if (k > total) return false;
  if (total > 100'000'000) throw Error(ErrorCode::LimitExceeded, "sum of values too large for the table");
  std::vector<char> reachable(k + 1, 0);
  reachable[0] = 1;
  for (auto x : values) {
    if (x > k) continue;
    for (std::uint64_t s = k; s >= x; --s) {
      if (reachable[s - x]) reachable[s] = 1;
      if (s == x) break;
    }
  }
  return reachable[k] != 0;
}

/// Builds the gadget once and records, for every multiplicity that appears
/// anywhere in its mutation class, the first subset of C's producing it.
class SubsetSumReduction {
 public:
  explicit SubsetSumReduction(std::vector<std::uint64_t> values)
      : values_(std::move(values)), gadget_(build_subset_sum_gadget(values_)) {
    try {
      for_each_commuting_orbit_member(gadget_, [&](std::uint64_t mask, const Quiver& member) {
        ++orbit_size_;
        for (std::size_t i = 0; i < member.size(); ++i)
          for (std::size_t j = i + 1; j < member.size(); ++j) first_mask_.try_emplace(abs(member.b(i, j)), mask);
        return true;
      });
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonCommutingFamily) throw;
      // Not reachable for well-formed gadgets; keep the generic search path.
      first_mask_.clear();
      used_fallback_ = true;
      const auto report = explore(gadget_, Predicate::collect_all(), SearchLimits{}, Dedup::Labeled);
      if (!report.exhausted) throw Error(ErrorCode::Truncated, "gadget mutation class was not exhausted");
      orbit_size_ = report.visited;
      for (const auto& m : *report.collected) first_mask_.emplace(m, 0);
    }
  }

  const Quiver& gadget() const noexcept { return gadget_; }
  const std::vector<std::uint64_t>& values() const noexcept { return values_; }
  std::size_t orbit_size() const noexcept { return orbit_size_; }
  bool used_fallback() const noexcept { return used_fallback_; }

  bool in_validity_window(std::uint64_t k) const {
    return k > 1 && std::find(values_.begin(), values_.end(), k) == values_.end();
  }

  /// Whether some quiver in the class has a pair with exactly k arrows.
  /// Throws OutOfValidityWindow for k <= 1 or k among the values.
  bool decide(std::uint64_t k) const {
    require_window(k);
    return first_mask_.contains(Multiplicity(k));
  }

  /// Mutable vertices whose single mutations produce a k-arrow pair.
  std::optional<std::vector<VertexId>> witness(std::uint64_t k) const {
    require_window(k);
    const auto it = first_mask_.find(Multiplicity(k));
    if (it == first_mask_.end() || used_fallback_) return std::nullopt;
    return subset_from_mask(gadget_, it->second);
  }

 private:
  void require_window(std::uint64_t k) const {
    if (!in_validity_window(k))
      throw Error(ErrorCode::OutOfValidityWindow,
                  "k = " + std::to_string(k) + " must exceed 1 and differ from every value");
  }

  std::vector<std::uint64_t> values_;
  Quiver gadget_;
  std::map<Multiplicity, std::uint64_t> first_mask_;
  std::size_t orbit_size_ = 0;
  bool used_fallback_ = false;
};

inline bool decide_k_via_gadget(const std::vector<std::uint64_t>& values, std::uint64_t k) {
  return SubsetSumReduction(values).decide(k);
}

// ===========================================================================
// Exact cover by 3-sets (X3C) gadget
// ===========================================================================

using Triple = std::array<std::size_t, 3>;

struct X3CInstance {
  std::size_t n = 0;
  std::vector<Triple> triples;

  /// Throws InvalidInstance for malformed or repeated triples and for
  /// elements of [n] that no triple covers.
  void validate() const {
    if (n < 1) throw Error(ErrorCode::InvalidInstance, "n must be positive");
    std::set<Triple> distinct;
    std::vector<bool> covered(n + 1, false);
    for (const auto& t : triples) {
      Triple sorted = t;
      std::sort(sorted.begin(), sorted.end());
      if (sorted[0] < 1 || sorted[2] > n)
        throw Error(ErrorCode::InvalidInstance, "triple element outside [1, " + std::to_string(n) + "]");
      if (sorted[0] == sorted[1] || sorted[1] == sorted[2])
        throw Error(ErrorCode::InvalidInstance, "triple with repeated element");
      if (!distinct.insert(sorted).second) throw Error(ErrorCode::InvalidInstance, "repeated triple");
      for (auto e : sorted) covered[e] = true;
    }
    for (std::size_t i = 1; i <= n; ++i)
      if (!covered[i]) throw Error(ErrorCode::InvalidInstance, "element " + std::to_string(i) + " is uncovered");
  }
};

inline std::string x3c_element_vertex(std::size_t i) { return "A" + std::to_string(i); }

inline std::string x3c_triple_vertex(const Triple& t) {
  Triple s = t;
  std::sort(s.begin(), s.end());
  return "B_" + std::to_string(s[0]) + "_" + std::to_string(s[1]) + "_" + std::to_string(s[2]);
}

/// Frozen A_1..A_n, mutable B_X per triple, frozen C; arrows A_i -> B_X for
/// i in X, B_X -> C, and C -> A_i, all of weight 1.
inline Quiver build_x3c_gadget(const X3CInstance& inst) {
  inst.validate();
  std::vector<Vertex> vs;
  for (std::size_t i = 1; i <= inst.n; ++i) vs.push_back({x3c_element_vertex(i), true});
  for (const auto& t : inst.triples) vs.push_back({x3c_triple_vertex(t), false});
  vs.push_back({"C", true});
  std::vector<Arrow> arrows;
  for (const auto& t : inst.triples) {
    const auto b = x3c_triple_vertex(t);
    for (auto e : t) arrows.push_back({x3c_element_vertex(e), b, 1});
    arrows.push_back({b, "C", 1});
  }
  for (std::size_t i = 1; i <= inst.n; ++i) arrows.push_back({"C", x3c_element_vertex(i), 1});
  return new_quiver(std::move(vs), arrows);
}

/// Exact-cover search: branch on the uncovered element with the fewest usable
/// triples. Returns indices into `inst.triples`.
inline std::optional<std::vector<std::size_t>> x3c_solve(const X3CInstance& inst) {
  inst.validate();
  std::vector<std::vector<std::size_t>> containing(inst.n + 1);
  for (std::size_t t = 0; t < inst.triples.size(); ++t)
    for (auto e : inst.triples[t]) containing[e].push_back(t);
  std::vector<bool> covered(inst.n + 1, false);
  std::vector<std::size_t> chosen;

  auto usable = [&](std::size_t t) {
    const auto& tr = inst.triples[t];
    return !covered[tr[0]] && !covered[tr[1]] && !covered[tr[2]];
  };
  auto set_cover = [&](std::size_t t, bool value) {
    for (auto e : inst.triples[t]) covered[e] = value;
  };

  auto solve = [&](auto&& self) -> bool {
    std::size_t best = 0;
    std::size_t best_count = static_cast<std::size_t>(-1);
    for (std::size_t e = 1; e <= inst.n; ++e) {
      if (covered[e]) continue;
      std::size_t count = 0;
      for (auto t : containing[e]) count += usable(t) ? 1 : 0;
      if (count < best_count) {
        best = e;
        best_count = count;
      }
    }
    if (best == 0) return true;
    if (best_count == 0) return false;
    for (auto t : containing[best]) {
      if (!usable(t)) continue;
      set_cover(t, true);
      chosen.push_back(t);
      if (self(self)) return true;
      chosen.pop_back();
      set_cover(t, false);
    }
    return false;
  };

  if (inst.n % 3 != 0) return std::nullopt;
  if (!solve(solve)) return std::nullopt;
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

inline bool x3c_oracle(const X3CInstance& inst) { return x3c_solve(inst).has_value(); }

struct X3CDecision {
  bool icebound_free = false;
  /// Triple vertices to mutate once each; present iff `icebound_free`.
  std::optional<std::vector<VertexId>> witness;
  std::uint64_t members_checked = 0;
};

/// Enumerates the commuting orbit of the gadget and reports the first member
/// without icebound arrows.
inline X3CDecision decide_icebound_free_via_gadget(const X3CInstance& inst) {
  const Quiver gadget = build_x3c_gadget(inst);
  X3CDecision out;
  for_each_commuting_orbit_member(gadget, [&](std::uint64_t mask, const Quiver& member) {
    ++out.members_checked;
    if (has_icebound_arrow(member)) return true;
    out.icebound_free = true;
    out.witness = subset_from_mask(gadget, mask);
    return false;
  });
  return out;
}

}  // namespace qmut
