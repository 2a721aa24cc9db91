#pragma once

#include <Eigen/Dense>
#include <array>
#include <utility>
#include <vector>

#include "causnet/errors.hpp"

namespace causnet {

// Output of the triangulated-maximally-filtered-graph construction: a planar
// chordal graph assembled from one seed 4-clique plus one vertex-into-face
// insertion per remaining vertex. Cliques are recorded in construction order
// (seed first); separators are the faces consumed by insertions.
struct ChordalGraph {
  int n_vertices = 0;
  std::vector<std::pair<int, int>> edges;        // normalized (i < j), sorted
  std::vector<std::array<int, 4>> cliques;       // sorted vertex quadruples
  std::vector<std::array<int, 3>> separators;    // sorted vertex triples

  bool has_edge(int a, int b) const;
};

// Greedy TMFG on a symmetric similarity matrix. Gains are sums of SQUARED
// similarity entries (so a correlation matrix can be passed directly) and the
// diagonal is ignored. Ties are broken toward the lowest vertex index, then
// the lexicographically smallest triangle, so the result is deterministic.
ChordalGraph tmfg(const Eigen::MatrixXd& similarity);

// True iff the edge set admits a perfect elimination ordering
// (maximum-cardinality-search test). Only n_vertices and edges are used.
bool check_chordal(const ChordalGraph& graph);

}  // namespace causnet
