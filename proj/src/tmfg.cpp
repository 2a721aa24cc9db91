#include "causnet/tmfg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace causnet {

bool ChordalGraph::has_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(a, b));
}

namespace {

using Quad = std::array<int, 4>;
using Tri = std::array<int, 3>;

// Exhaustive search for the 4-clique maximizing the sum of its six pairwise
// squared similarities. Enumerates each quadruple once, with the outer pair
// (a, b) fixed to the two smallest indices; bound-based pruning plus a strong
// initial incumbent keeps the inner pair loop from being quartic in practice.
Quad best_seed(const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  double best_gain = -1.0;
  Quad best{0, 1, 2, 3};

  auto consider = [&](int a, int b, int c, int d, double gain) {
    Quad quad{a, b, c, d};
    std::sort(quad.begin(), quad.end());
    if (gain > best_gain || (gain == best_gain && quad < best)) {
      best_gain = gain;
      best = quad;
    }
  };
  auto gain_of = [&](int a, int b, int c, int d) {
    return w(a, b) + w(a, c) + w(a, d) + w(b, c) + w(b, d) + w(c, d);
  };

  // Incumbent: exhaustive over the vertices with the largest similarity mass.
  {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    int k = std::min(n, 14);
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](int x, int y) {
      double sx = w.row(x).sum(), sy = w.row(y).sum();
      return sx > sy || (sx == sy && x < y);
    });
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b)
        for (int c = b + 1; c < k; ++c)
          for (int d = c + 1; d < k; ++d)
            consider(idx[a], idx[b], idx[c], idx[d],
                     gain_of(idx[a], idx[b], idx[c], idx[d]));
  }

  Eigen::VectorXd row_max = w.rowwise().maxCoeff();
  const double global_max = row_max.maxCoeff();

  std::vector<double> f(n);
  std::vector<int> order(n);
  for (int a = 0; a < n - 3; ++a) {
    for (int b = a + 1; b < n - 2; ++b) {
      const double wab = w(a, b);
      // Upper bound on any quadruple led by (a,b): prune whole pair.
      if (wab + 2.0 * row_max(a) + 2.0 * row_max(b) + global_max < best_gain)
        continue;
      // Remaining two vertices exceed b; f(v) collects both cross terms.
      int m = 0;
      double t1 = -1.0, t2 = -1.0;
      for (int v = b + 1; v < n; ++v) {
        double fv = w(a, v) + w(b, v);
        f[m] = fv;
        order[m] = v;
        ++m;
        if (fv > t1) {
          t2 = t1;
          t1 = fv;
        } else if (fv > t2) {
          t2 = fv;
        }
      }
      if (m < 2) continue;
      if (wab + t1 + t2 + global_max < best_gain) continue;

      // Iterate candidate pairs in descending f order with early breaks.
      std::vector<int> pos(m);
      std::iota(pos.begin(), pos.end(), 0);
      std::sort(pos.begin(), pos.end(), [&](int x, int y) {
        return f[x] > f[y] || (f[x] == f[y] && order[x] < order[y]);
      });
      for (int ci = 0; ci < m - 1; ++ci) {
        const int c = order[pos[ci]];
        const double fc = f[pos[ci]];
        if (wab + fc + f[pos[ci + 1]] + global_max < best_gain) break;
        for (int di = ci + 1; di < m; ++di) {
          const int d = order[pos[di]];
          const double fd = f[pos[di]];
          if (wab + fc + fd + global_max < best_gain) break;
          consider(a, b, c, d, wab + fc + fd + w(c, d));
        }
      }
    }
  }
  return best;
}

}  // namespace

ChordalGraph tmfg(const Eigen::MatrixXd& similarity) {
  const int n = static_cast<int>(similarity.rows());
  if (similarity.cols() != n)
    throw invalid_argument_error("tmfg: similarity matrix must be square");
  if (n < 4) throw invalid_argument_error("tmfg: need at least 4 vertices");
  if (!similarity.allFinite())
    throw invalid_argument_error("tmfg: similarity matrix has non-finite entries");
  const double scale = similarity.cwiseAbs().maxCoeff();
  if ((similarity - similarity.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, scale))
    throw invalid_argument_error("tmfg: similarity matrix must be symmetric");

  // Squared similarities drive every gain; diagonal ignored.
  Eigen::MatrixXd w = similarity.array().square().matrix();
  w.diagonal().setZero();

  ChordalGraph g;
  g.n_vertices = n;

  const Quad seed = best_seed(w);
  g.cliques.push_back(seed);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) g.edges.emplace_back(seed[i], seed[j]);

  if (n == 4) {
    std::sort(g.edges.begin(), g.edges.end());
    return g;
  }

  std::vector<char> inserted(n, 0);
  for (int v : seed) inserted[v] = 1;

  struct Face {
    Tri tri;
    bool alive;
  };
  std::vector<Face> faces;
  faces.reserve(2 * n);
  auto add_face = [&](int x, int y, int z) {
    Tri t{x, y, z};
    std::sort(t.begin(), t.end());
    faces.push_back({t, true});
  };
  add_face(seed[0], seed[1], seed[2]);
  add_face(seed[0], seed[1], seed[3]);
  add_face(seed[0], seed[2], seed[3]);
  add_face(seed[1], seed[2], seed[3]);

  auto gain = [&](int v, const Tri& t) {
    return w(v, t[0]) + w(v, t[1]) + w(v, t[2]);
  };

  // Per-vertex cache of the best face, refreshed lazily.
  std::vector<double> best_gain(n, -1.0);
  std::vector<int> best_face(n, -1);
  auto recompute = [&](int v) {
    best_gain[v] = -1.0;
    best_face[v] = -1;
    for (int fi = 0; fi < static_cast<int>(faces.size()); ++fi) {
      if (!faces[fi].alive) continue;
      double gv = gain(v, faces[fi].tri);
      if (gv > best_gain[v] ||
          (gv == best_gain[v] && faces[fi].tri < faces[best_face[v]].tri)) {
        best_gain[v] = gv;
        best_face[v] = fi;
      }
    }
  };
  for (int v = 0; v < n; ++v)
    if (!inserted[v]) recompute(v);

  for (int step = 0; step < n - 4; ++step) {
    int vstar = -1;
    for (int v = 0; v < n; ++v) {
      if (inserted[v]) continue;
      if (vstar == -1 || best_gain[v] > best_gain[vstar]) vstar = v;
    }
    const int fstar = best_face[vstar];
    const Tri t = faces[fstar].tri;

    Quad clique{vstar, t[0], t[1], t[2]};
    std::sort(clique.begin(), clique.end());
    g.cliques.push_back(clique);
    g.separators.push_back(t);
    for (int k = 0; k < 3; ++k) g.edges.emplace_back(vstar, t[k]);

    inserted[vstar] = 1;
    faces[fstar].alive = false;
    const int first_new = static_cast<int>(faces.size());
    add_face(vstar, t[0], t[1]);
    add_face(vstar, t[0], t[2]);
    add_face(vstar, t[1], t[2]);

    for (int v = 0; v < n; ++v) {
      if (inserted[v]) continue;
      if (best_face[v] == fstar) {
        recompute(v);
        continue;
      }
      for (int fi = first_new; fi < static_cast<int>(faces.size()); ++fi) {
        double gv = gain(v, faces[fi].tri);
        if (gv > best_gain[v] ||
            (gv == best_gain[v] && faces[fi].tri < faces[best_face[v]].tri)) {
          best_gain[v] = gv;
          best_face[v] = fi;
        }
      }
    }
  }

  for (auto& e : g.edges)
    if (e.first > e.second) std::swap(e.first, e.second);
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

bool check_chordal(const ChordalGraph& graph) {
  const int n = graph.n_vertices;
  if (n <= 3) return true;
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (const auto& [a, b] : graph.edges) {
    adj[a][b] = 1;
    adj[b][a] = 1;
  }

  // Maximum cardinality search: visit order maximizing visited-neighbor count.
  std::vector<int> weight(n, 0), pos(n, -1), visit_order(n, -1);
  std::vector<char> visited(n, 0);
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    for (int v = 0; v < n; ++v)
      if (!visited[v] && (pick == -1 || weight[v] > weight[pick])) pick = v;
    visited[pick] = 1;
    pos[pick] = step;
    visit_order[step] = pick;
    for (int u = 0; u < n; ++u)
      if (!visited[u] && adj[pick][u]) ++weight[u];
  }

  // Reverse visit order is a perfect elimination ordering iff chordal: each
  // vertex's earlier-visited neighbors minus the latest of them must all be
  // adjacent to that latest one.
  for (int v = 0; v < n; ++v) {
    int latest = -1;
    for (int u = 0; u < n; ++u)
      if (adj[v][u] && pos[u] < pos[v] && (latest == -1 || pos[u] > pos[latest]))
        latest = u;
    if (latest == -1) continue;
    for (int u = 0; u < n; ++u) {
      if (u == latest || !adj[v][u] || pos[u] >= pos[v]) continue;
      if (!adj[latest][u]) return false;
    }
  }
  return true;
}

}  // namespace causnet
