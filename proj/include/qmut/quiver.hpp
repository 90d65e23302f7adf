#pragma once

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bigint.hpp"
#include "error.hpp"

namespace qmut {

using VertexId = std::string;

struct Vertex {
  VertexId id;
  bool frozen = false;

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// One arrow record: `weight` parallel arrows from `from` to `to`.
struct Arrow {
  VertexId from;
  VertexId to;
  Multiplicity weight;

  friend bool operator==(const Arrow&, const Arrow&) = default;
};

/// Ordered list of vertices to mutate at, applied left to right.
using MutationSequence = std::vector<VertexId>;

inline bool is_valid_vertex_id(std::string_view id) {
  if (id.empty()) return false;
  return std::none_of(id.begin(), id.end(), [](char c) {
    return c == ',' || std::isspace(static_cast<unsigned char>(c));
  });
}

namespace detail {

struct VertexTable {
  std::vector<Vertex> vertices;
  std::unordered_map<std::string, std::size_t> index;
};

}  // namespace detail

/// A quiver with frozen vertices, stored as its skew-symmetric exchange
/// matrix: b(i, j) is the number of arrows i -> j minus the number j -> i.
/// Arrows between two frozen vertices (icebound arrows) are kept and take part
/// in mutation like any other entry.
///
/// The vertex table is immutable and shared between a quiver and everything
/// mutated from it; only the matrix is copied.
class Quiver {
 public:
  /// Validating constructor. Throws `Error` with DuplicateVertex,
  /// InvalidVertexId, UnknownVertex, SelfLoop, TwoCycleInInput,
  /// NonpositiveWeight or EmptyQuiver.
  static Quiver build(std::vector<Vertex> vertices, std::span<const Arrow> arrows) {
    if (vertices.empty()) throw Error(ErrorCode::EmptyQuiver, "a quiver needs at least one vertex");
    auto table = std::make_shared<detail::VertexTable>();
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      const auto& id = vertices[i].id;
      if (!is_valid_vertex_id(id)) {
        throw Error(ErrorCode::InvalidVertexId, "invalid vertex id '" + id + "'");
      }
      if (!table->index.emplace(id, i).second) {
        throw Error(ErrorCode::DuplicateVertex, "vertex '" + id + "' listed twice");
      }
    }
    table->vertices = std::move(vertices);
    Quiver q(std::move(table));
    const std::size_t n = q.size();
    std::vector<bool> seen(n * n, false);
    for (const auto& a : arrows) {
      const auto from = q.find(a.from);
      const auto to = q.find(a.to);
      if (!from) throw Error(ErrorCode::UnknownVertex, "arrow source '" + a.from + "' is not a vertex");
      if (!to) throw Error(ErrorCode::UnknownVertex, "arrow target '" + a.to + "' is not a vertex");
      if (*from == *to) throw Error(ErrorCode::SelfLoop, "loop at '" + a.from + "'");
      if (a.weight <= 0) {
        throw Error(ErrorCode::NonpositiveWeight,
                    "arrow " + a.from + "->" + a.to + " has weight " + to_decimal(a.weight));
      }
      const std::size_t lo = std::min(*from, *to);
      const std::size_t hi = std::max(*from, *to);
      if (seen[lo * n + hi]) {
        throw Error(ErrorCode::TwoCycleInInput,
                    "pair {" + a.from + "," + a.to + "} appears in more than one arrow record");
      }
      seen[lo * n + hi] = true;
      q.at(*from, *to) = a.weight;
      q.at(*to, *from) = -a.weight;
    }
    return q;
  }

  std::size_t size() const noexcept { return table_->vertices.size(); }
  const std::vector<Vertex>& vertices() const noexcept { return table_->vertices; }
  const Vertex& vertex(std::size_t i) const { return table_->vertices[i]; }
  const VertexId& id(std::size_t i) const { return table_->vertices[i].id; }
  bool is_frozen(std::size_t i) const { return table_->vertices[i].frozen; }

  std::optional<std::size_t> find(std::string_view id) const {
    const auto it = table_->index.find(std::string(id));
    if (it == table_->index.end()) return std::nullopt;
    return it->second;
  }

  /// Index of `id`; throws UnknownVertex.
  std::size_t index_of(std::string_view id) const {
    if (auto i = find(id)) return *i;
    throw Error(ErrorCode::UnknownVertex, "no vertex named '" + std::string(id) + "'");
  }

  const Multiplicity& b(std::size_t i, std::size_t j) const { return b_[i * size() + j]; }

  std::vector<std::size_t> mutable_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < size(); ++i)
      if (!is_frozen(i)) out.push_back(i);
    return out;
  }

  std::size_t frozen_count() const {
    return static_cast<std::size_t>(std::count_if(
        vertices().begin(), vertices().end(), [](const Vertex& v) { return v.frozen; }));
  }

  /// Mutation at vertex index `v`, in place:
  ///   b'(i,j) = -b(i,j)                                   if v in {i,j}
  ///   b'(i,j) = b(i,j) + sgn(b(i,v)) * max(b(i,v) b(v,j), 0)  otherwise.
  void mutate_in_place(std::size_t v) {
    if (v >= size()) throw Error(ErrorCode::UnknownVertex, "vertex index out of range");
    if (is_frozen(v)) throw Error(ErrorCode::FrozenVertexMutation, "'" + id(v) + "' is frozen");
    const std::size_t n = size();
    std::vector<std::size_t> sources;
    std::vector<std::size_t> targets;
    for (std::size_t k = 0; k < n; ++k) {
      const int s = b(k, v).sign();
      if (s > 0) sources.push_back(k);
      if (s < 0) targets.push_back(k);
    }
    Multiplicity path;
    for (std::size_t i : sources) {
      for (std::size_t j : targets) {
        path = b(i, v) * b(v, j);
        at(i, j) += path;
        at(j, i) -= path;
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      at(k, v) = -b(k, v);
      at(v, k) = -b(v, k);
    }
    assert(is_skew_symmetric());
  }

  /// Returns the mutation at `v`; `*this` is unchanged.
  Quiver mutated(std::size_t v) const {
    Quiver out = *this;
    out.mutate_in_place(v);
    return out;
  }

  bool is_skew_symmetric() const {
    for (std::size_t i = 0; i < size(); ++i) {
      if (b(i, i) != 0) return false;
      for (std::size_t j = i + 1; j < size(); ++j)
        if (b(i, j) != -b(j, i)) return false;
    }
    return true;
  }

  /// Same vertex table instance (hence same vertex order).
  bool shares_vertices_with(const Quiver& other) const noexcept { return table_ == other.table_; }

  /// Strict upper triangle in row-major order.
  std::string matrix_bytes() const {
    std::string out;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j) append_encoded(out, b(i, j));
    return out;
  }

  /// Labeled equality: same vertex ids with the same frozen flags and the same
  /// exchange value for every pair of ids. Listing order is irrelevant.
  friend bool operator==(const Quiver& lhs, const Quiver& rhs) {
    if (lhs.table_ == rhs.table_ || lhs.vertices() == rhs.vertices()) return lhs.b_ == rhs.b_;
    if (lhs.size() != rhs.size()) return false;
    std::vector<std::size_t> map(lhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const auto j = rhs.find(lhs.id(i));
      if (!j || rhs.is_frozen(*j) != lhs.is_frozen(i)) return false;
      map[i] = *j;
    }
    for (std::size_t i = 0; i < lhs.size(); ++i)
      for (std::size_t j = i + 1; j < lhs.size(); ++j)
        if (lhs.b(i, j) != rhs.b(map[i], map[j])) return false;
    return true;
  }

  /// Copy with vertices reordered: new position p holds old vertex order[p].
  Quiver reordered(std::span<const std::size_t> order) const {
    std::vector<Vertex> vs;
    vs.reserve(order.size());
    for (std::size_t old : order) vs.push_back(vertex(old));
    Quiver out = Quiver::with_vertices(std::move(vs));
    const std::size_t n = out.size();
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) out.at(p, q) = b(order[p], order[q]);
    return out;
  }

  /// Copy with vertex ids renamed (frozen flags and matrix untouched).
  Quiver renamed(std::span<const VertexId> ids) const {
    if (ids.size() != size()) throw Error(ErrorCode::InvalidSubset, "rename needs one id per vertex");
    std::vector<Vertex> vs = vertices();
    for (std::size_t i = 0; i < vs.size(); ++i) vs[i].id = ids[i];
    Quiver out = Quiver::with_vertices(std::move(vs));
    out.b_ = b_;
    return out;
  }

  /// Induced sub-quiver on the given vertex indices, in the given order.
  Quiver induced(std::span<const std::size_t> keep) const { return reordered(keep); }

 private:
  explicit Quiver(std::shared_ptr<const detail::VertexTable> table)
      : table_(std::move(table)), b_(table_->vertices.size() * table_->vertices.size()) {}

  static Quiver with_vertices(std::vector<Vertex> vs) {
    auto table = std::make_shared<detail::VertexTable>();
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (!table->index.emplace(vs[i].id, i).second) {
        throw Error(ErrorCode::DuplicateVertex, "vertex '" + vs[i].id + "' listed twice");
      }
    }
    table->vertices = std::move(vs);
    return Quiver(std::move(table));
  }

  Multiplicity& at(std::size_t i, std::size_t j) { return b_[i * size() + j]; }

  std::shared_ptr<const detail::VertexTable> table_;
  std::vector<Multiplicity> b_;
};

// ---------------------------------------------------------------------------
// Free-function surface
// ---------------------------------------------------------------------------

inline Quiver new_quiver(std::vector<Vertex> vertices, std::span<const Arrow> arrows) {
  return Quiver::build(std::move(vertices), arrows);
}

inline Quiver new_quiver(std::vector<Vertex> vertices, std::initializer_list<Arrow> arrows) {
  return Quiver::build(std::move(vertices), std::span<const Arrow>(arrows.begin(), arrows.size()));
}

inline Quiver mutate(const Quiver& q, std::string_view v) { return q.mutated(q.index_of(v)); }

/// Left-to-right composition of `mutate`. Errors carry the failing step index.
inline Quiver mutate_seq(const Quiver& q, std::span<const VertexId> steps) {
  Quiver out = q;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    try {
      out.mutate_in_place(out.index_of(steps[s]));
    } catch (const Error& e) {
      throw Error(e.code(), "step " + std::to_string(s) + ": " + e.detail(), s);
    }
  }
  return out;
}

/// Induced sub-quiver on `keep`, listed in the quiver's own vertex order.
inline Quiver restrict_to(const Quiver& q, std::span<const VertexId> keep) {
  if (keep.empty()) throw Error(ErrorCode::EmptySubset, "restriction to the empty set");
  std::vector<bool> chosen(q.size(), false);
  for (const auto& id : keep) chosen[q.index_of(id)] = true;
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (chosen[i]) order.push_back(i);
  return q.induced(order);
}

/// |b(u, v)|: number of arrows between u and v in either direction.
inline Multiplicity multiplicity(const Quiver& q, std::string_view u, std::string_view v) {
  const std::size_t i = q.index_of(u);
  const std::size_t j = q.index_of(v);
  if (i == j) throw Error(ErrorCode::SameVertex, "multiplicity of '" + std::string(u) + "' with itself");
  return abs(q.b(i, j));
}

/// Arrow records with positive weight, one per adjacent pair, in vertex order.
inline std::vector<Arrow> arrows_of(const Quiver& q) {
  std::vector<Arrow> out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      const auto& v = q.b(i, j);
      if (v > 0) out.push_back({q.id(i), q.id(j), v});
      if (v < 0) out.push_back({q.id(j), q.id(i), -v});
    }
  }
  return out;
}

struct PairMultiplicity {
  VertexId u;
  VertexId v;
  Multiplicity count;

  friend bool operator==(const PairMultiplicity&, const PairMultiplicity&) = default;
};

/// Frozen-frozen pairs joined by at least one arrow, in vertex order.
inline std::vector<PairMultiplicity> icebound_pairs(const Quiver& q) {
  std::vector<PairMultiplicity> out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!q.is_frozen(i)) continue;
    for (std::size_t j = i + 1; j < q.size(); ++j)
      if (q.is_frozen(j) && q.b(i, j) != 0) out.push_back({q.id(i), q.id(j), abs(q.b(i, j))});
  }
  return out;
}

inline bool has_icebound_arrow(const Quiver& q) {
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (!q.is_frozen(i)) continue;
    for (std::size_t j = i + 1; j < q.size(); ++j)
      if (q.is_frozen(j) && q.b(i, j) != 0) return true;
  }
  return false;
}

inline bool has_pair_with_exactly_k(const Quiver& q, const Multiplicity& k) {
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j)
      if (abs(q.b(i, j)) == k) return true;
  return false;
}

inline Multiplicity total_arrows(const Quiver& q) {
  Multiplicity total = 0;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j) total += abs(q.b(i, j));
  return total;
}

inline Multiplicity max_multiplicity(const Quiver& q) {
  Multiplicity best = 0;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j)
      if (abs(q.b(i, j)) > best) best = abs(q.b(i, j));
  return best;
}

/// Exchanges the ids of vertices `a` and `b`, keeping everything else.
inline Quiver swap_labels(const Quiver& q, std::string_view a, std::string_view b) {
  const std::size_t i = q.index_of(a);
  const std::size_t j = q.index_of(b);
  std::vector<VertexId> ids;
  for (const auto& v : q.vertices()) ids.push_back(v.id);
  std::swap(ids[i], ids[j]);
  return q.renamed(ids);
}

}  // namespace qmut
