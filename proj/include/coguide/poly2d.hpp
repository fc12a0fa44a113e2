// 2D computational-geometry kernel: non-convex polygons with holes,
// multi-polygon boolean set operations, polyline buffering, pole of
// inaccessibility, and point/polygon distance queries.
//
// Robustness scheme: coordinates are snapped to a 1e-7 m grid and all
// segment subdivision runs on 64-bit integers with 128-bit predicates.
// Each subdivided edge is classified by testing the result membership just
// left and just right of its midpoint (winding number, nonzero rule), which
// uniformly handles shared and collinear edges; surviving edges are linked
// into rings with interior on the left via a sharpest-left-turn walk.
// Coordinates must stay within +-10 km for the integer predicates to hold.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <queue>
#include <vector>

#include "coguide/core.hpp"

namespace coguide {

using Ring = std::vector<Vec2>;  // open ring: last vertex implicitly joins the first

struct Polygon {
  Ring outer;                 // counterclockwise
  std::vector<Ring> holes;    // clockwise, strictly inside outer
};

struct MultiPolygon {
  std::vector<Polygon> parts;  // pairwise interior-disjoint; may be empty

  bool empty() const { return parts.empty(); }
};

enum class BoolOp { Union, Intersection, Difference };

inline double signed_area(const Ring& r) {
  double a = 0.0;
  for (std::size_t i = 0, n = r.size(); i < n; ++i) {
    const Vec2& p = r[i];
    const Vec2& q = r[(i + 1) % n];
    a += p.cross(q);
  }
  return 0.5 * a;
}

/// Area of a polygon set; holes are CW so plain signed summation works.
inline double area(const Polygon& p) {
  double a = signed_area(p.outer);
  for (const Ring& h : p.holes) a += signed_area(h);
  return a;
}

inline double area(const MultiPolygon& m) {
  double a = 0.0;
  for (const Polygon& p : m.parts) a += area(p);
  return a;
}

inline int winding_number(const Vec2& pt, const Ring& r) {
  int w = 0;
  for (std::size_t i = 0, n = r.size(); i < n; ++i) {
    const Vec2& a = r[i];
    const Vec2& b = r[(i + 1) % n];
    if (a.y <= pt.y) {
      if (b.y > pt.y && (b - a).cross(pt - a) > 0.0) ++w;
    } else {
      if (b.y <= pt.y && (b - a).cross(pt - a) < 0.0) --w;
    }
  }
  return w;
}

inline bool point_in_polygon(const Vec2& pt, const Polygon& p) {
  if (winding_number(pt, p.outer) == 0) return false;
  for (const Ring& h : p.holes)
    if (winding_number(pt, h) != 0) return false;
  return true;
}

inline bool point_in_multipolygon(const Vec2& pt, const MultiPolygon& m) {
  for (const Polygon& p : m.parts)
    if (point_in_polygon(pt, p)) return true;
  return false;
}

inline double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squared_norm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return (p - (a + d * t)).norm();
}

inline double ring_distance(const Vec2& p, const Ring& r) {
  double best = kInfinity;
  for (std::size_t i = 0, n = r.size(); i < n; ++i)
    best = std::min(best, segment_distance(p, r[i], r[(i + 1) % n]));
  return best;
}

/// Distance from a point to a polygon's boundary (all rings), unsigned.
inline double boundary_distance(const Vec2& p, const Polygon& poly) {
  double best = ring_distance(p, poly.outer);
  for (const Ring& h : poly.holes) best = std::min(best, ring_distance(p, h));
  return best;
}

/// 0 if the point lies inside any part, else distance to the nearest
/// boundary segment. Empty input is a contract violation.
inline double distance_to(const Vec2& pt, const MultiPolygon& m) {
  detail::require(!m.empty(), "distance_to: empty MultiPolygon");
  if (point_in_multipolygon(pt, m)) return 0.0;
  double best = kInfinity;
  for (const Polygon& p : m.parts) best = std::min(best, boundary_distance(pt, p));
  return best;
}

struct Box2 {
  Vec2 lo{kInfinity, kInfinity};
  Vec2 hi{-kInfinity, -kInfinity};
  void expand(const Vec2& p) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  bool valid() const { return lo.x <= hi.x; }
};

inline Box2 bounding_box(const MultiPolygon& m) {
  Box2 b;
  for (const Polygon& p : m.parts) {
    for (const Vec2& v : p.outer) b.expand(v);
    for (const Ring& h : p.holes)
      for (const Vec2& v : h) b.expand(v);
  }
  return b;
}

// ---------------------------------------------------------------------------
// Boolean operations
// ---------------------------------------------------------------------------

namespace poly_detail {

constexpr double kSnapScale = 1e7;  // 1e-7 m grid
using I64 = std::int64_t;
using I128 = __int128;

struct IPt {
  I64 x = 0, y = 0;
  bool operator==(const IPt& o) const { return x == o.x && y == o.y; }
  bool operator!=(const IPt& o) const { return !(*this == o); }
  bool operator<(const IPt& o) const { return x != o.x ? x < o.x : y < o.y; }
};

inline IPt snap(const Vec2& v) {
  return {static_cast<I64>(std::llround(v.x * kSnapScale)),
          static_cast<I64>(std::llround(v.y * kSnapScale))};
}

inline Vec2 unsnap(const IPt& p) {
  return {static_cast<double>(p.x) / kSnapScale, static_cast<double>(p.y) / kSnapScale};
}

inline int sign(I128 v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

inline I128 cross3(const IPt& o, const IPt& a, const IPt& b) {
  return static_cast<I128>(a.x - o.x) * (b.y - o.y) -
         static_cast<I128>(a.y - o.y) * (b.x - o.x);
}

inline bool bbox_overlap(const IPt& a, const IPt& b, const IPt& c, const IPt& d) {
  return std::min(a.x, b.x) <= std::max(c.x, d.x) && std::min(c.x, d.x) <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= std::max(c.y, d.y) && std::min(c.y, d.y) <= std::max(a.y, b.y);
}

/// p collinear with [a,b]: does it lie within the segment's bbox?
inline bool within_box(const IPt& p, const IPt& a, const IPt& b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

inline I64 div_round(I128 n, I128 d) {
  if (d < 0) {
    n = -n;
    d = -d;
  }
  const I128 q = n >= 0 ? (2 * n + d) / (2 * d) : -((-2 * n + d) / (2 * d));
  return static_cast<I64>(q);
}

struct IEdge {
  IPt a, b;
  int src = 0;  // 0 = operand A, 1 = operand B
  std::vector<IPt> splits;
};

/// Intersect e1 and e2, appending split points to both (proper crossings,
/// endpoint touches, and collinear overlaps).
inline void split_pair(IEdge& e1, IEdge& e2) {
  if (!bbox_overlap(e1.a, e1.b, e2.a, e2.b)) return;
  const int d1 = sign(cross3(e1.a, e1.b, e2.a));
  const int d2 = sign(cross3(e1.a, e1.b, e2.b));
  const int d3 = sign(cross3(e2.a, e2.b, e1.a));
  const int d4 = sign(cross3(e2.a, e2.b, e1.b));

  if (d1 == 0 && d2 == 0) {  // collinear: split each at the other's endpoints
    if (within_box(e2.a, e1.a, e1.b) && e2.a != e1.a && e2.a != e1.b) e1.splits.push_back(e2.a);
    if (within_box(e2.b, e1.a, e1.b) && e2.b != e1.a && e2.b != e1.b) e1.splits.push_back(e2.b);
    if (within_box(e1.a, e2.a, e2.b) && e1.a != e2.a && e1.a != e2.b) e2.splits.push_back(e1.a);
    if (within_box(e1.b, e2.a, e2.b) && e1.b != e2.a && e1.b != e2.b) e2.splits.push_back(e1.b);
    return;
  }
  if (d1 * d2 < 0 && d3 * d4 < 0) {
    // proper crossing: p = e1.a + t * (e1.b - e1.a), t = tn / td
    const I128 tn = cross3(e2.a, e2.b, e1.a);
    const I128 td = tn - cross3(e2.a, e2.b, e1.b);
    const IPt p{e1.a.x + div_round(tn * (e1.b.x - e1.a.x), td),
                e1.a.y + div_round(tn * (e1.b.y - e1.a.y), td)};
    if (p != e1.a && p != e1.b) e1.splits.push_back(p);
    if (p != e2.a && p != e2.b) e2.splits.push_back(p);
    return;
  }
  // endpoint-on-interior touches
  if (d1 == 0 && within_box(e2.a, e1.a, e1.b) && e2.a != e1.a && e2.a != e1.b)
    e1.splits.push_back(e2.a);
  if (d2 == 0 && within_box(e2.b, e1.a, e1.b) && e2.b != e1.a && e2.b != e1.b)
    e1.splits.push_back(e2.b);
  if (d3 == 0 && within_box(e1.a, e2.a, e2.b) && e1.a != e2.a && e1.a != e2.b)
    e2.splits.push_back(e1.a);
  if (d4 == 0 && within_box(e1.b, e2.a, e2.b) && e1.b != e2.a && e1.b != e2.b)
    e2.splits.push_back(e1.b);
}

struct SnappedInput {
  std::vector<Ring> rings;  // double coords on the snap grid, orientation normalized
};

/// Snap and normalize one multipolygon: outer rings CCW, holes CW, duplicate
/// consecutive vertices removed, degenerate rings dropped.
inline SnappedInput normalize_input(const MultiPolygon& m) {
  SnappedInput out;
  auto add_ring = [&](const Ring& r, bool want_ccw) {
    std::vector<IPt> pts;
    pts.reserve(r.size());
    for (const Vec2& v : r) {
      const IPt p = snap(v);
      if (pts.empty() || !(pts.back() == p)) pts.push_back(p);
    }
    while (pts.size() > 1 && pts.front() == pts.back()) pts.pop_back();
    if (pts.size() < 3) return;
    Ring ring;
    ring.reserve(pts.size());
    for (const IPt& p : pts) ring.push_back(unsnap(p));
    const double a = signed_area(ring);
    if (std::abs(a) < 1e-12) return;
    if ((a > 0.0) != want_ccw) std::reverse(ring.begin(), ring.end());
    out.rings.push_back(std::move(ring));
  };
  for (const Polygon& p : m.parts) {
    add_ring(p.outer, true);
    for (const Ring& h : p.holes) add_ring(h, false);
  }
  return out;
}

struct DirEdge {
  IPt a, b;
};

/// Group result rings into polygons: positive rings are outers, each negative
/// ring attaches to the smallest-area outer containing it.
inline MultiPolygon assemble_parts(std::vector<Ring>&& rings) {
  struct Outer {
    Ring ring;
    double area;
    std::vector<Ring> holes;
    Vec2 min_vertex;
  };
  std::vector<Outer> outers;
  std::vector<Ring> holes;
  for (Ring& r : rings) {
    const double a = signed_area(r);
    if (a > 0.0) {
      Vec2 mv = r[0];
      for (const Vec2& v : r)
        if (v.x < mv.x || (v.x == mv.x && v.y < mv.y)) mv = v;
      outers.push_back({std::move(r), a, {}, mv});
    } else {
      holes.push_back(std::move(r));
    }
  }
  for (Ring& h : holes) {
    // interior of the owning part lies left of the CW hole boundary
    const Vec2 m = (h[0] + h[1]) * 0.5;
    const Vec2 d = h[1] - h[0];
    const double len = d.norm();
    if (len == 0.0) continue;
    const Vec2 probe = m + Vec2{-d.y / len, d.x / len} * 1e-9;
    int best = -1;
    for (std::size_t i = 0; i < outers.size(); ++i) {
      if (winding_number(probe, outers[i].ring) != 0) {
        if (best < 0 || outers[i].area < outers[best].area) best = static_cast<int>(i);
      }
    }
    if (best >= 0) outers[best].holes.push_back(std::move(h));
  }
  std::sort(outers.begin(), outers.end(), [](const Outer& a, const Outer& b) {
    if (a.min_vertex.x != b.min_vertex.x) return a.min_vertex.x < b.min_vertex.x;
    if (a.min_vertex.y != b.min_vertex.y) return a.min_vertex.y < b.min_vertex.y;
    return a.area < b.area;
  });
  MultiPolygon out;
  out.parts.reserve(outers.size());
  for (Outer& o : outers) out.parts.push_back(Polygon{std::move(o.ring), std::move(o.holes)});
  return out;
}

/// Rotate an open ring so it starts at its lexicographically smallest vertex.
inline void canonicalize_ring(Ring& r) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.size(); ++i)
    if (r[i].x < r[best].x || (r[i].x == r[best].x && r[i].y < r[best].y)) best = i;
  std::rotate(r.begin(), r.begin() + best, r.end());
}

}  // namespace poly_detail

/// Boolean set operation with exact point-membership semantics up to the
/// 1e-7 m snapping grid. Degenerate (zero-area) pieces are dropped.
inline MultiPolygon boolean_op(BoolOp kind, const MultiPolygon& a, const MultiPolygon& b) {
  using namespace poly_detail;
  const SnappedInput in_a = normalize_input(a);
  const SnappedInput in_b = normalize_input(b);
  if (in_a.rings.empty() && in_b.rings.empty()) return {};

  // 1. gather integer edges from both sources (an empty operand simply
  //    contributes no edges and a constant-false membership)
  std::vector<IEdge> edges;
  auto add_edges = [&](const SnappedInput& in, int src) {
    for (const Ring& r : in.rings)
      for (std::size_t i = 0, n = r.size(); i < n; ++i) {
        const IPt p = snap(r[i]);
        const IPt q = snap(r[(i + 1) % n]);
        if (p != q) edges.push_back({p, q, src, {}});
      }
  };
  add_edges(in_a, 0);
  add_edges(in_b, 1);

  // 2. mutual subdivision, iterated to a fixed point: rounding a split
  //    point to the snap grid can create fresh crossings near the rounded
  //    vertex, so re-check until no edge pair intersects away from shared
  //    endpoints (uniform-grid binning keeps the pair tests local)
  for (int round = 0; round < 16; ++round) {
    Box2 bb;
    for (const IEdge& e : edges) {
      bb.expand(unsnap(e.a));
      bb.expand(unsnap(e.b));
    }
    const double span = std::max(bb.hi.x - bb.lo.x, bb.hi.y - bb.lo.y);
    const int grid_n = std::clamp(static_cast<int>(std::sqrt(edges.size())) + 1, 1, 256);
    const double cell = std::max(span / grid_n, 1e-6);
    std::vector<std::vector<int>> bins(static_cast<std::size_t>(grid_n) * grid_n);
    auto cell_range = [&](const IEdge& e, int& cx0, int& cx1, int& cy0, int& cy1) {
      const Vec2 pa = unsnap(e.a), pb = unsnap(e.b);
      cx0 = std::clamp(static_cast<int>((std::min(pa.x, pb.x) - bb.lo.x) / cell), 0, grid_n - 1);
      cx1 = std::clamp(static_cast<int>((std::max(pa.x, pb.x) - bb.lo.x) / cell), 0, grid_n - 1);
      cy0 = std::clamp(static_cast<int>((std::min(pa.y, pb.y) - bb.lo.y) / cell), 0, grid_n - 1);
      cy1 = std::clamp(static_cast<int>((std::max(pa.y, pb.y) - bb.lo.y) / cell), 0, grid_n - 1);
    };
    for (std::size_t i = 0; i < edges.size(); ++i) {
      int cx0, cx1, cy0, cy1;
      cell_range(edges[i], cx0, cx1, cy0, cy1);
      for (int cy = cy0; cy <= cy1; ++cy)
        for (int cx = cx0; cx <= cx1; ++cx)
          bins[static_cast<std::size_t>(cy) * grid_n + cx].push_back(static_cast<int>(i));
    }
    std::vector<int> stamp(edges.size(), -1);
    bool any_split = false;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      int cx0, cx1, cy0, cy1;
      cell_range(edges[i], cx0, cx1, cy0, cy1);
      for (int cy = cy0; cy <= cy1; ++cy)
        for (int cx = cx0; cx <= cx1; ++cx)
          for (int j : bins[static_cast<std::size_t>(cy) * grid_n + cx]) {
            if (j <= static_cast<int>(i) || stamp[j] == static_cast<int>(i)) continue;
            stamp[j] = static_cast<int>(i);
            split_pair(edges[i], edges[j]);
          }
      any_split = any_split || !edges[i].splits.empty();
    }
    if (!any_split) break;

    // apply splits, keeping per-copy source and direction
    std::vector<IEdge> next;
    next.reserve(edges.size() * 2);
    for (IEdge& e : edges) {
      std::vector<IPt>& s = e.splits;
      s.push_back(e.a);
      s.push_back(e.b);
      const IPt d{e.b.x - e.a.x, e.b.y - e.a.y};
      std::sort(s.begin(), s.end(), [&](const IPt& p, const IPt& q) {
        const I128 tp =
            static_cast<I128>(p.x - e.a.x) * d.x + static_cast<I128>(p.y - e.a.y) * d.y;
        const I128 tq =
            static_cast<I128>(q.x - e.a.x) * d.x + static_cast<I128>(q.y - e.a.y) * d.y;
        return tp < tq;
      });
      s.erase(std::unique(s.begin(), s.end()), s.end());
      for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i] != s[i + 1]) next.push_back({s[i], s[i + 1], e.src, {}});
    }
    edges = std::move(next);
  }

  // 3. canonical subedges with net signed multiplicity per source
  struct Canon {
    IPt p, q;  // p < q lexicographically
    int dir_a = 0, dir_b = 0;
  };
  std::vector<Canon> canon;
  {
    std::map<std::pair<IPt, IPt>, std::pair<int, int>> acc;
    for (const IEdge& e : edges) {
      if (e.a == e.b) continue;
      const bool fwd = e.a < e.b;
      auto& slot = acc[{std::min(e.a, e.b), std::max(e.a, e.b)}];
      const int sign = fwd ? 1 : -1;
      (e.src == 0 ? slot.first : slot.second) += sign;
    }
    canon.reserve(acc.size());
    for (const auto& [key, dirs] : acc)
      canon.push_back({key.first, key.second, dirs.first, dirs.second});
  }
  if (canon.empty()) return {};

  // 4. half-edge arrangement: he 2k = p->q, 2k+1 = q->p. The face successor
  //    of h is the clockwise predecessor (in CCW angular order) of twin(h)
  //    around h's head vertex; faces lie to the left of their half-edges.
  std::map<IPt, int> vid;
  auto vertex_of = [&](const IPt& p) {
    return vid.emplace(p, static_cast<int>(vid.size())).first->second;
  };
  const int ne = static_cast<int>(canon.size());
  std::vector<int> he_from(2 * ne), he_to(2 * ne);
  for (int k = 0; k < ne; ++k) {
    he_from[2 * k] = vertex_of(canon[k].p);
    he_to[2 * k] = vertex_of(canon[k].q);
    he_from[2 * k + 1] = he_to[2 * k];
    he_to[2 * k + 1] = he_from[2 * k];
  }
  const int nv = static_cast<int>(vid.size());
  std::vector<IPt> vpt(nv);
  for (const auto& [p, id] : vid) vpt[id] = p;

  std::vector<std::vector<int>> out_he(nv);
  for (int h = 0; h < 2 * ne; ++h) out_he[he_from[h]].push_back(h);
  auto he_dir = [&](int h) {
    const IPt a = vpt[he_from[h]], b = vpt[he_to[h]];
    return IPt{b.x - a.x, b.y - a.y};
  };
  // exact CCW angular order: upper half-plane (including +x axis) first
  auto angle_less = [&](int h1, int h2) {
    const IPt u = he_dir(h1), v = he_dir(h2);
    const int hu = (u.y > 0 || (u.y == 0 && u.x > 0)) ? 0 : 1;
    const int hv = (v.y > 0 || (v.y == 0 && v.x > 0)) ? 0 : 1;
    if (hu != hv) return hu < hv;
    const I128 cr = static_cast<I128>(u.x) * v.y - static_cast<I128>(u.y) * v.x;
    if (cr != 0) return cr > 0;
    return h1 < h2;  // parallel duplicates cannot occur post-dedup
  };
  std::vector<int> pos_in_list(2 * ne);
  for (int v = 0; v < nv; ++v) {
    std::sort(out_he[v].begin(), out_he[v].end(), angle_less);
    for (std::size_t i = 0; i < out_he[v].size(); ++i) pos_in_list[out_he[v][i]] = i;
  }
  auto next_he = [&](int h) {
    const int twin = h ^ 1;
    const auto& list = out_he[he_from[twin]];
    const int pos = pos_in_list[twin];
    return list[(pos + list.size() - 1) % list.size()];
  };

  // face extraction
  std::vector<int> face_of(2 * ne, -1);
  std::vector<double> face_area;
  int n_faces = 0;
  for (int h0 = 0; h0 < 2 * ne; ++h0) {
    if (face_of[h0] >= 0) continue;
    double area2 = 0.0;
    int h = h0;
    do {
      face_of[h] = n_faces;
      const Vec2 a = unsnap(vpt[he_from[h]]), b = unsnap(vpt[he_to[h]]);
      area2 += a.cross(b);
      h = next_he(h);
    } while (h != h0);
    face_area.push_back(area2 / 2.0);
    ++n_faces;
  }

  // connected components over vertices
  std::vector<int> comp(nv, -1);
  int n_comp = 0;
  {
    std::vector<std::vector<int>> adj(nv);
    for (int k = 0; k < ne; ++k) {
      adj[he_from[2 * k]].push_back(he_to[2 * k]);
      adj[he_to[2 * k]].push_back(he_from[2 * k]);
    }
    std::vector<int> stack;
    for (int v = 0; v < nv; ++v) {
      if (comp[v] >= 0) continue;
      stack.push_back(v);
      comp[v] = n_comp;
      while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int w : adj[u])
          if (comp[w] < 0) {
            comp[w] = n_comp;
            stack.push_back(w);
          }
      }
      ++n_comp;
    }
  }
  std::vector<int> comp_of_face(n_faces, -1);
  for (int h = 0; h < 2 * ne; ++h) comp_of_face[face_of[h]] = comp[he_from[h]];

  // winding labels per face via BFS from each component's unbounded face
  // (the unique face with negative cycle area within the component)
  std::vector<int> wa(n_faces, 0), wb(n_faces, 0);
  std::vector<char> labeled(n_faces, 0);
  {
    std::vector<int> outer_face(n_comp, -1);
    for (int f = 0; f < n_faces; ++f) {
      const int c = comp_of_face[f];
      if (outer_face[c] < 0 || face_area[f] < face_area[outer_face[c]]) outer_face[c] = f;
    }
    std::vector<int> queue;
    for (int c = 0; c < n_comp; ++c) {
      if (outer_face[c] < 0) continue;
      labeled[outer_face[c]] = 1;
      queue.push_back(outer_face[c]);
    }
    // face adjacency: crossing canonical edge k from right face to left face
    // adds (dir_a, dir_b)
    std::vector<std::vector<int>> faces_he(n_faces);
    for (int h = 0; h < 2 * ne; ++h) faces_he[face_of[h]].push_back(h);
    while (!queue.empty()) {
      const int f = queue.back();
      queue.pop_back();
      for (int h : faces_he[f]) {
        const int g = face_of[h ^ 1];
        if (labeled[g]) continue;
        const int k = h / 2;
        const int da = canon[k].dir_a, db = canon[k].dir_b;
        if ((h & 1) == 0) {
          // f is left of the canonical direction, g is right
          wa[g] = wa[f] - da;
          wb[g] = wb[f] - db;
        } else {
          wa[g] = wa[f] + da;
          wb[g] = wb[f] + db;
        }
        labeled[g] = 1;
        queue.push_back(g);
      }
    }
  }

  // nesting: a component's outer face inherits the winding of the point it
  // sits in w.r.t. all other components (exact integer crossing counts)
  std::vector<int> off_a(n_comp, 0), off_b(n_comp, 0);
  if (n_comp > 1) {
    std::vector<IPt> rep(n_comp, IPt{0, 0});
    std::vector<char> has_rep(n_comp, 0);
    for (int v = 0; v < nv; ++v) {
      const int c = comp[v];
      if (!has_rep[c] || vpt[v] < rep[c]) {
        rep[c] = vpt[v];
        has_rep[c] = 1;
      }
    }
    for (int c = 0; c < n_comp; ++c) {
      int acc_a = 0, acc_b = 0;
      for (int k = 0; k < ne; ++k) {
        if (comp[he_from[2 * k]] == c) continue;
        const IPt p = canon[k].p, q = canon[k].q;
        const IPt r = rep[c];
        // upward crossing with the +x ray from r (half-open in y)
        int crossing = 0;
        if (p.y <= r.y && q.y > r.y && sign(cross3(p, q, r)) > 0) crossing = 1;
        if (q.y <= r.y && p.y > r.y && sign(cross3(q, p, r)) > 0) crossing = -1;
        if (crossing != 0) {
          acc_a += crossing * canon[k].dir_a;
          acc_b += crossing * canon[k].dir_b;
        }
      }
      off_a[c] = acc_a;
      off_b[c] = acc_b;
    }
  }

  // 5. keep boundary edges of the result region, interior on the left
  auto combine = [kind](bool ia, bool ib) {
    switch (kind) {
      case BoolOp::Union:
        return ia || ib;
      case BoolOp::Intersection:
        return ia && ib;
      case BoolOp::Difference:
        return ia && !ib;
    }
    return false;
  };
  std::vector<DirEdge> kept;
  kept.reserve(canon.size());
  for (int k = 0; k < ne; ++k) {
    const int fl = face_of[2 * k], fr = face_of[2 * k + 1];
    const int c = comp_of_face[fl];
    const bool in_l = combine(wa[fl] + off_a[c] != 0, wb[fl] + off_b[c] != 0);
    const bool in_r = combine(wa[fr] + off_a[c] != 0, wb[fr] + off_b[c] != 0);
    if (in_l == in_r) continue;
    kept.push_back(in_l ? DirEdge{canon[k].p, canon[k].q} : DirEdge{canon[k].q, canon[k].p});
  }

  // 6. link result rings: successor = sharpest-left continuation (clockwise
  //    sweep from the reversed incoming direction)
  std::map<IPt, std::vector<int>> outgoing;
  for (std::size_t i = 0; i < kept.size(); ++i) outgoing[kept[i].a].push_back(static_cast<int>(i));

  // order: left turns (sharpest first), straight, right turns, exact back
  auto turn_less = [&](const IPt& din, const IPt& u, const IPt& v) {
    auto cls = [&](const IPt& w) {
      const I128 s = static_cast<I128>(din.x) * w.y - static_cast<I128>(din.y) * w.x;
      const I128 c = static_cast<I128>(din.x) * w.x + static_cast<I128>(din.y) * w.y;
      if (s == 0) return c > 0 ? 1 : 3;
      return s > 0 ? 0 : 2;
    };
    const int cu = cls(u), cv = cls(v);
    if (cu != cv) return cu < cv;
    const I128 x = static_cast<I128>(u.x) * v.y - static_cast<I128>(u.y) * v.x;
    return x < 0;  // within a half-plane: sharper turn first
  };

  std::vector<char> used(kept.size(), 0);
  std::vector<Ring> rings;
  for (std::size_t start = 0; start < kept.size(); ++start) {
    if (used[start]) continue;
    std::vector<int> chain;
    int cur = static_cast<int>(start);
    bool ok = true;
    for (std::size_t guard = 0; guard <= kept.size(); ++guard) {
      chain.push_back(cur);
      used[cur] = 1;
      const IPt at = kept[cur].b;
      const IPt din{kept[cur].b.x - kept[cur].a.x, kept[cur].b.y - kept[cur].a.y};
      auto it = outgoing.find(at);
      if (it == outgoing.end()) {
        ok = false;
        break;
      }
      int next = -1;
      for (int cand : it->second) {
        if (used[cand] && cand != static_cast<int>(start)) continue;
        const IPt dout{kept[cand].b.x - kept[cand].a.x, kept[cand].b.y - kept[cand].a.y};
        if (next < 0) {
          next = cand;
          continue;
        }
        const IPt dn{kept[next].b.x - kept[next].a.x, kept[next].b.y - kept[next].a.y};
        if (turn_less(din, dout, dn)) next = cand;
      }
      if (next < 0) {
        ok = false;
        break;
      }
      if (next == static_cast<int>(start)) break;  // ring closed
      cur = next;
    }
    if (!ok || chain.size() < 3) continue;
    Ring r;
    r.reserve(chain.size());
    for (int id : chain) r.push_back(unsnap(kept[id].a));
    if (std::abs(signed_area(r)) < 1e-12) continue;
    poly_detail::canonicalize_ring(r);
    rings.push_back(std::move(r));
  }

  return poly_detail::assemble_parts(std::move(rings));
}

// ---------------------------------------------------------------------------
// Buffering
// ---------------------------------------------------------------------------

namespace poly_detail {

inline Ring disc_ring(const Vec2& c, double r, int segments = 32) {
  Ring out;
  out.reserve(segments);
  for (int k = 0; k < segments; ++k) {
    const double a = 2.0 * M_PI * k / segments;
    out.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  return out;
}

inline Ring convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<Vec2> h(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && (h[k - 1] - h[k - 2]).cross(pts[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && (h[k - 1] - h[k - 2]).cross(pts[i] - h[k - 2]) <= 0.0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace poly_detail

/// Minkowski sum of a polyline with a disc of radius d; the disc is a regular
/// 32-gon, so caps and joins are rounded to within 0.5% of d. A single point
/// buffers to the 32-gon itself.
inline MultiPolygon buffer_polyline(const std::vector<Vec2>& points, double d) {
  detail::require(d > 0.0, "buffer_polyline: d must be > 0");
  detail::require(!points.empty(), "buffer_polyline: need at least one point");

  std::vector<Vec2> pts;
  for (const Vec2& p : points)
    if (pts.empty() || (p - pts.back()).norm() > 0.0) pts.push_back(p);

  std::vector<Ring> discs;
  discs.reserve(pts.size());
  for (const Vec2& p : pts) discs.push_back(poly_detail::disc_ring(p, d));

  if (pts.size() == 1) return MultiPolygon{{Polygon{discs[0], {}}}};

  MultiPolygon acc;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    std::vector<Vec2> cloud = discs[i];
    cloud.insert(cloud.end(), discs[i + 1].begin(), discs[i + 1].end());
    const Ring capsule = poly_detail::convex_hull(std::move(cloud));
    const MultiPolygon piece{{Polygon{capsule, {}}}};
    acc = acc.empty() ? piece : boolean_op(BoolOp::Union, acc, piece);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Pole of inaccessibility
// ---------------------------------------------------------------------------

namespace poly_detail {

/// Signed distance to the polygon boundary: positive inside, negative outside.
inline double polygon_signed_distance(const Vec2& p, const Polygon& poly) {
  const double d = boundary_distance(p, poly);
  return point_in_polygon(p, poly) ? d : -d;
}

struct PoiCell {
  Vec2 c;
  double half;
  double d;
  double max;
  PoiCell(const Vec2& c_, double half_, const Polygon& poly)
      : c(c_), half(half_), d(polygon_signed_distance(c_, poly)),
        max(d + half_ * std::numbers::sqrt2) {}
};

}  // namespace poly_detail

/// Interior point approximately maximizing distance to the boundary, found by
/// quadtree cell subdivision with upper-bound pruning (polylabel scheme).
/// The returned clearance is within `precision` of the true maximum.
inline std::pair<Vec2, double> pole_of_inaccessibility(const Polygon& poly, double precision) {
  using poly_detail::PoiCell;
  detail::require(precision > 0.0, "pole_of_inaccessibility: precision must be > 0");
  detail::require(!poly.outer.empty(), "pole_of_inaccessibility: empty polygon");

  Box2 bb;
  for (const Vec2& v : poly.outer) bb.expand(v);
  const double w = bb.hi.x - bb.lo.x, h = bb.hi.y - bb.lo.y;
  const double cell = std::min(w, h);
  if (cell == 0.0) return {bb.lo, 0.0};

  auto worse = [](const PoiCell& a, const PoiCell& b) {
    if (a.max != b.max) return a.max < b.max;
    if (a.c.x != b.c.x) return a.c.x > b.c.x;  // deterministic tie-break
    return a.c.y > b.c.y;
  };
  std::priority_queue<PoiCell, std::vector<PoiCell>, decltype(worse)> queue(worse);

  for (double x = bb.lo.x; x < bb.hi.x; x += cell)
    for (double y = bb.lo.y; y < bb.hi.y; y += cell)
      queue.emplace(Vec2{x + cell / 2.0, y + cell / 2.0}, cell / 2.0, poly);

  // centroid seed
  PoiCell best{[&] {
                 double a_sum = 0.0;
                 Vec2 c{0.0, 0.0};
                 const Ring& r = poly.outer;
                 for (std::size_t i = 0, n = r.size(); i < n; ++i) {
                   const Vec2& p = r[i];
                   const Vec2& q = r[(i + 1) % n];
                   const double f = p.cross(q);
                   c = c + (p + q) * f;
                   a_sum += 3.0 * f;
                 }
                 return a_sum == 0.0 ? r[0] : c / a_sum;
               }(),
               0.0, poly};
  const PoiCell box_center{Vec2{(bb.lo.x + bb.hi.x) / 2.0, (bb.lo.y + bb.hi.y) / 2.0}, 0.0, poly};
  if (box_center.d > best.d) best = box_center;

  while (!queue.empty()) {
    const PoiCell cur = queue.top();
    queue.pop();
    if (cur.d > best.d) best = cur;
    if (cur.max - best.d <= precision) continue;
    const double hh = cur.half / 2.0;
    queue.emplace(Vec2{cur.c.x - hh, cur.c.y - hh}, hh, poly);
    queue.emplace(Vec2{cur.c.x + hh, cur.c.y - hh}, hh, poly);
    queue.emplace(Vec2{cur.c.x - hh, cur.c.y + hh}, hh, poly);
    queue.emplace(Vec2{cur.c.x + hh, cur.c.y + hh}, hh, poly);
  }
  return {best.c, best.d};
}

}  // namespace coguide
