#pragma once

#include "qmut/quiver.hpp"

namespace qmut::fixtures {

/// Five vertices, eight arrows: A->B:2, B->E:3, C->B:1, E->A:1, E->D:1.
inline Quiver five_vertex() {
  return new_quiver({{"A", false}, {"B", false}, {"C", false}, {"D", false}, {"E", false}},
                    {{"A", "B", 2}, {"B", "E", 3}, {"C", "B", 1}, {"E", "A", 1}, {"E", "D", 1}});
}

/// The five-vertex quiver after mutating at B.
inline Quiver five_vertex_after_b() {
  return new_quiver({{"A", false}, {"B", false}, {"C", false}, {"D", false}, {"E", false}},
                    {{"A", "E", 5}, {"B", "A", 2}, {"B", "C", 1}, {"C", "E", 3}, {"E", "B", 3}, {"E", "D", 1}});
}

/// Frozen A, B; mutable C, D; A->C:beta, C->D:alpha, D->B:gamma.
inline Quiver two_mutable(int beta, int alpha, int gamma) {
  std::vector<Arrow> arrows{{"A", "C", beta}, {"D", "B", gamma}};
  if (alpha > 0) arrows.push_back({"C", "D", alpha});
  return new_quiver({{"A", true}, {"B", true}, {"C", false}, {"D", false}}, arrows);
}

/// Oriented 3-cycle with weight 2 on every arrow, all vertices mutable.
inline Quiver markov() {
  return new_quiver({{"X", false}, {"Y", false}, {"Z", false}}, {{"X", "Y", 2}, {"Y", "Z", 2}, {"Z", "X", 2}});
}

/// Mutable A3 path X -> Y -> Z.
inline Quiver a3_path() {
  return new_quiver({{"X", false}, {"Y", false}, {"Z", false}}, {{"X", "Y", 1}, {"Y", "Z", 1}});
}

}  // namespace qmut::fixtures
