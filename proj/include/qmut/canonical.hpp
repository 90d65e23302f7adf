#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bigint.hpp"
#include "quiver.hpp"

namespace qmut {

/// Isomorphism-invariant byte key of a quiver. Two quivers have equal keys
/// iff some bijection maps mutable to mutable, frozen to frozen and preserves
/// every exchange value.
struct CanonicalKey {
  std::string bytes;

  std::string hex() const { return to_hex(bytes); }
  friend bool operator==(const CanonicalKey&, const CanonicalKey&) = default;
  friend auto operator<=>(const CanonicalKey&, const CanonicalKey&) = default;
};

struct CanonicalKeyHash {
  std::size_t operator()(const CanonicalKey& k) const noexcept {
    return std::hash<std::string>{}(k.bytes);
  }
};

struct CanonicalForm {
  CanonicalKey key;
  /// position[i] is the canonical position of vertex i.
  std::vector<std::size_t> position;
  /// Strict lower triangle of the canonical matrix, row-major:
  /// (1,0), (2,0), (2,1), (3,0), ...
  std::vector<Multiplicity> lower;

  std::size_t position_of(const Quiver& q, std::string_view id) const { return position[q.index_of(id)]; }
};

namespace detail {

using Cells = std::vector<std::vector<std::size_t>>;

/// Equitable refinement of an ordered partition. Every pass colours vertices by
/// their current cell, then splits each cell by the sorted multiset of
/// (neighbour colour, exchange value). Sub-cells are ordered by that
/// signature, so the result depends only on the isomorphism type.
inline void refine(const Quiver& q, Cells& cells) {
  const std::size_t n = q.size();
  std::vector<std::size_t> colour(n);
  using Signature = std::vector<std::pair<std::size_t, Multiplicity>>;
  for (;;) {
    for (std::size_t c = 0; c < cells.size(); ++c)
      for (std::size_t v : cells[c]) colour[v] = c;
    Cells next;
    next.reserve(cells.size());
    bool split = false;
    for (const auto& cell : cells) {
      if (cell.size() == 1) {
        next.push_back(cell);
        continue;
      }
      std::vector<std::pair<Signature, std::size_t>> sigs;
      sigs.reserve(cell.size());
      for (std::size_t v : cell) {
        Signature s;
        for (std::size_t u = 0; u < n; ++u)
          if (u != v && q.b(v, u) != 0) s.emplace_back(colour[u], q.b(v, u));
        std::sort(s.begin(), s.end());
        sigs.emplace_back(std::move(s), v);
      }
      std::stable_sort(sigs.begin(), sigs.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<std::size_t> current{sigs[0].second};
      for (std::size_t k = 1; k < sigs.size(); ++k) {
        if (sigs[k].first != sigs[k - 1].first) {
          next.push_back(std::move(current));
          current.clear();
          split = true;
        }
        current.push_back(sigs[k].second);
      }
      next.push_back(std::move(current));
    }
    cells = std::move(next);
    if (!split) return;
  }
}

/// True when exchanging u and w is an automorphism of q.
inline bool is_twin(const Quiver& q, std::size_t u, std::size_t w) {
  if (q.is_frozen(u) != q.is_frozen(w) || q.b(u, w) != 0) return false;
  for (std::size_t x = 0; x < q.size(); ++x)
    if (x != u && x != w && q.b(u, x) != q.b(w, x)) return false;
  return true;
}

class Canonicalizer {
 public:
  explicit Canonicalizer(const Quiver& q) : q_(q) {}

  CanonicalForm run() {
    const std::size_t n = q_.size();
    Cells cells;
    std::vector<std::size_t> mut, frz;
    for (std::size_t i = 0; i < n; ++i) (q_.is_frozen(i) ? frz : mut).push_back(i);
    if (!mut.empty()) cells.push_back(mut);
    if (!frz.empty()) cells.push_back(frz);
    search(std::move(cells));

    CanonicalForm out;
    out.position.assign(n, 0);
    for (std::size_t p = 0; p < n; ++p) out.position[best_order_[p]] = p;
    out.lower = std::move(best_);
    auto put32 = [&](std::uint32_t v) {
      for (int s = 24; s >= 0; s -= 8) out.key.bytes.push_back(static_cast<char>((v >> s) & 0xFF));
    };
    put32(static_cast<std::uint32_t>(n));
    put32(static_cast<std::uint32_t>(frz.size()));
    for (const auto& v : out.lower) append_encoded(out.key.bytes, v);
    return out;
  }

 private:
  // Compares the rows [1, rows) of the lower triangle induced by `order`
  // against the incumbent. Returns <0, 0, >0.
  int compare_prefix(const std::vector<std::size_t>& order, std::size_t rows) const {
    std::size_t k = 0;
    for (std::size_t p = 1; p < rows; ++p) {
      for (std::size_t c = 0; c < p; ++c, ++k) {
        const auto& v = q_.b(order[p], order[c]);
        if (v < best_[k]) return -1;
        if (best_[k] < v) return 1;
      }
    }
    return 0;
  }

  void leaf(const std::vector<std::size_t>& order) {
    const std::size_t n = order.size();
    if (!have_best_) {
      take(order);
      return;
    }
    const int cmp = compare_prefix(order, n);
    if (cmp < 0) {
      take(order);
    } else if (cmp == 0) {
      // Equal matrices: prefer the lexicographically smaller position vector.
      std::vector<std::size_t> pos(n), best_pos(n);
      for (std::size_t p = 0; p < n; ++p) {
        pos[order[p]] = p;
        best_pos[best_order_[p]] = p;
      }
      if (pos < best_pos) best_order_ = order;
    }
  }

  void take(const std::vector<std::size_t>& order) {
    best_.clear();
    for (std::size_t p = 1; p < order.size(); ++p)
      for (std::size_t c = 0; c < p; ++c) best_.push_back(q_.b(order[p], order[c]));
    best_order_ = order;
    have_best_ = true;
  }

  void search(Cells cells) {
    refine(q_, cells);
    std::size_t fixed = 0;
    while (fixed < cells.size() && cells[fixed].size() == 1) ++fixed;
    if (fixed == cells.size()) {
      std::vector<std::size_t> order;
      for (const auto& c : cells) order.push_back(c[0]);
      leaf(order);
      return;
    }
    if (have_best_ && fixed > 1) {
      std::vector<std::size_t> prefix;
      for (std::size_t p = 0; p < fixed; ++p) prefix.push_back(cells[p][0]);
      if (compare_prefix(prefix, fixed) > 0) return;
    }
    std::size_t target = fixed;
    for (std::size_t c = fixed; c < cells.size(); ++c)
      if (cells[c].size() > 1 && cells[c].size() < cells[target].size()) target = c;

    std::vector<std::size_t> candidates = cells[target];
    std::sort(candidates.begin(), candidates.end());
    std::vector<std::size_t> explored;
    for (std::size_t w : candidates) {
      const bool redundant = std::any_of(explored.begin(), explored.end(),
                                         [&](std::size_t u) { return is_twin(q_, u, w); });
      if (redundant) continue;
      explored.push_back(w);
      Cells child;
      child.reserve(cells.size() + 1);
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c != target) {
          child.push_back(cells[c]);
          continue;
        }
        child.push_back({w});
        std::vector<std::size_t> rest;
        for (std::size_t v : cells[c])
          if (v != w) rest.push_back(v);
        child.push_back(std::move(rest));
      }
      search(std::move(child));
    }
  }

  const Quiver& q_;
  bool have_best_ = false;
  std::vector<Multiplicity> best_;
  std::vector<std::size_t> best_order_;
};

}  // namespace detail

/// Canonical form by individualisation-refinement with branch-and-bound on
/// the row-major lower triangle. Mutable vertices always take positions
/// [0, m) and frozen ones [m, n).
inline CanonicalForm canonical_form(const Quiver& q) { return detail::Canonicalizer(q).run(); }

inline CanonicalKey canonical_key(const Quiver& q) { return canonical_form(q).key; }

inline bool is_isomorphic(const Quiver& a, const Quiver& b) {
  if (a.size() != b.size() || a.frozen_count() != b.frozen_count()) return false;
  return canonical_key(a) == canonical_key(b);
}

}  // namespace qmut
