// Bounded ternary occupancy grid: scan integration with free-space carving,
// exact integer-walk raycasting, obstacle-distance queries backed by a lazily
// rebuilt exact Euclidean distance transform, and temporary obstacle boxes.
//
// Conventions:
//  - voxel i spans [origin + i*res, origin + (i+1)*res) per axis; a point on a
//    voxel face belongs to the voxel with the larger index (half-open cells).
//  - voxel center of index i is origin + (i + 0.5) * res.
//  - the region rolls: integrate_scan recenters the grid on the sensor origin
//    once it drifts past half of the region half-extent; cells that leave the
//    region are discarded, newly exposed cells are Unknown.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "coguide/core.hpp"

namespace coguide {

enum class CellState : std::uint8_t { Free = 0, Occupied = 1, Unknown = 2 };

struct VoxelIndex {
  int x = 0, y = 0, z = 0;
  bool operator==(const VoxelIndex& o) const { return x == o.x && y == o.y && z == o.z; }
};

class OccupancyMap {
 public:
  /// Region of size_m meters per axis centered at `center`; all cells Unknown.
  OccupancyMap(double resolution, const Vec3& center, const Vec3& size_m)
      : res_(resolution) {
    detail::require(resolution > 0.0, "map resolution must be > 0");
    nx_ = std::max(1, static_cast<int>(std::llround(size_m.x / resolution)));
    ny_ = std::max(1, static_cast<int>(std::llround(size_m.y / resolution)));
    nz_ = std::max(1, static_cast<int>(std::llround(size_m.z / resolution)));
    center_ = center;
    origin_ = center - Vec3(nx_, ny_, nz_) * (0.5 * resolution);
    cells_.assign(static_cast<std::size_t>(nx_) * ny_ * nz_,
                  static_cast<std::uint8_t>(CellState::Unknown));
  }

  /// Default rolling region: 40 m x 40 m x 20 m around the anchor.
  explicit OccupancyMap(double resolution, const Vec3& center = Vec3{})
      : OccupancyMap(resolution, center, Vec3{40.0, 40.0, 20.0}) {}

  double resolution() const { return res_; }
  Vec3 origin() const { return origin_; }
  Vec3 center() const { return center_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::size_t cell_count() const { return cells_.size(); }

  bool in_bounds(const VoxelIndex& v) const {
    return v.x >= 0 && v.x < nx_ && v.y >= 0 && v.y < ny_ && v.z >= 0 && v.z < nz_;
  }

  bool contains(const Vec3& p) const { return in_bounds(index_of(p)); }

  /// Point -> voxel index (may be out of bounds). Face ties go to the larger
  /// index because cells are half-open.
  VoxelIndex index_of(const Vec3& p) const {
    return {axis_index(p.x, origin_.x), axis_index(p.y, origin_.y), axis_index(p.z, origin_.z)};
  }

  Vec3 center_of(const VoxelIndex& v) const {
    return origin_ + Vec3(v.x + 0.5, v.y + 0.5, v.z + 0.5) * res_;
  }

  CellState state_at(const VoxelIndex& v) const {
    if (!in_bounds(v)) return CellState::Unknown;
    return static_cast<CellState>(cells_[flat(v)]);
  }

  /// State of the voxel containing `point`; Unknown outside the region.
  CellState state(const Vec3& point) const { return state_at(index_of(point)); }

  void set_state(const VoxelIndex& v, CellState s) {
    detail::require(in_bounds(v), "set_state out of bounds");
    cells_[flat(v)] = static_cast<std::uint8_t>(s);
    dist_dirty_ = true;
  }

  /// Integrate one range scan taken at `origin`. Hit voxels become Occupied;
  /// voxels traversed on the way become Free unless already Occupied
  /// (Occupied absorbs within a call: carve first, then mark hits).
  /// `misses` are full-length ray endpoints (no return within max_range);
  /// their traversed voxels are carved Free without marking an endpoint.
  void integrate_scan(const Vec3& origin, const std::vector<Vec3>& hits, double max_range,
                      const std::vector<Vec3>& misses = {}) {
    detail::require(contains(origin), "integrate_scan: origin outside map region");
    maybe_recenter(origin);

    const VoxelIndex ov = index_of(origin);
    auto carve_segment = [&](const Vec3& to, bool exclude_endpoint) {
      walk_segment(origin, to, [&](const VoxelIndex& v, bool is_endpoint) {
        if (is_endpoint && exclude_endpoint) return true;
        if (v == ov) return true;
        if (in_bounds(v) && cells_[flat(v)] != static_cast<std::uint8_t>(CellState::Occupied))
          cells_[flat(v)] = static_cast<std::uint8_t>(CellState::Free);
        return true;
      });
    };

    for (const Vec3& h : hits) carve_segment(h, true);
    for (const Vec3& m : misses) {
      Vec3 dir = m - origin;
      const double len = dir.norm();
      Vec3 end = len > max_range && len > 0.0 ? origin + dir * (max_range / len) : m;
      carve_segment(end, true);
    }
    for (const Vec3& h : hits) {
      const VoxelIndex v = index_of(h);
      if (in_bounds(v)) cells_[flat(v)] = static_cast<std::uint8_t>(CellState::Occupied);
    }
    dist_dirty_ = true;
  }

  /// Independent copy with an axis-aligned box (footprint width x width,
  /// vertical extent height, centered at `center`) marked Occupied.
  /// Never flips Occupied cells back to Free.
  OccupancyMap add_obstacle_box(const Vec3& center, double width, double height) const {
    detail::require(width > 0.0 && height > 0.0, "obstacle box dimensions must be > 0");
    OccupancyMap out(*this);
    const int x0 = axis_index(center.x - width / 2.0, origin_.x);
    const int x1 = axis_index(center.x + width / 2.0, origin_.x);
    const int y0 = axis_index(center.y - width / 2.0, origin_.y);
    const int y1 = axis_index(center.y + width / 2.0, origin_.y);
    const int z0 = axis_index(center.z - height / 2.0, origin_.z);
    const int z1 = axis_index(center.z + height / 2.0, origin_.z);
    for (int z = std::max(0, z0); z < std::min(nz_, z1); ++z)
      for (int y = std::max(0, y0); y < std::min(ny_, y1); ++y)
        for (int x = std::max(0, x0); x < std::min(nx_, x1); ++x)
          out.cells_[out.flat({x, y, z})] = static_cast<std::uint8_t>(CellState::Occupied);
    out.dist_dirty_ = true;
    return out;
  }

  /// First Occupied voxel center along the segment, else the endpoint `to`.
  /// A ray starting inside an Occupied voxel is blocked at its origin.
  Vec3 raycast(const Vec3& from, const Vec3& to) const {
    detail::require(contains(from), "raycast: from outside map region");
    Vec3 result = to;
    walk_segment(from, to, [&](const VoxelIndex& v, bool) {
      if (state_at(v) == CellState::Occupied) {
        result = center_of(v);
        return false;
      }
      return true;
    });
    return result;
  }

  /// Like raycast but reports the entry point of the blocking voxel on the
  /// ray itself (exact obstacle intersection up to voxel quantization).
  /// Returns `to` when the segment is unobstructed.
  Vec3 raycast_surface(const Vec3& from, const Vec3& to) const {
    detail::require(contains(from), "raycast: from outside map region");
    Vec3 result = to;
    const Vec3 d = to - from;
    walk_segment_t(from, to, [&](const VoxelIndex& v, double t_entry) {
      if (state_at(v) == CellState::Occupied) {
        result = from + d * t_entry;
        return false;
      }
      return true;
    });
    return result;
  }

  /// Euclidean distance from the containing voxel's center to the nearest
  /// Occupied voxel center; +infinity when the map holds no Occupied voxel.
  double obs_dist(const Vec3& point) const {
    const VoxelIndex v = index_of(point);
    if (!in_bounds(v)) return kInfinity;
    return obs_dist_at(v);
  }

  double obs_dist_at(const VoxelIndex& v) const {
    ensure_distance();
    const std::int32_t sq = (*dist_sq_)[flat(v)];
    if (sq >= kNoObstacle) return kInfinity;
    return res_ * std::sqrt(static_cast<double>(sq));
  }

  /// Squared distance in voxel units (internal units of the distance
  /// transform); kNoObstacle when the map holds no Occupied voxel.
  std::int32_t obs_dist_sq_cells(const VoxelIndex& v) const {
    ensure_distance();
    return (*dist_sq_)[flat(v)];
  }

  static constexpr std::int32_t kNoObstacle = std::numeric_limits<std::int32_t>::max() / 4;

  /// Walk the voxels traversed by segment [from, to] in order, starting at
  /// from's voxel. visit(voxel, is_endpoint) returns false to stop early.
  template <typename Visit>
  void walk_segment(const Vec3& from, const Vec3& to, Visit&& visit) const {
    walk_segment_t(from, to,
                   [&](const VoxelIndex& v, double) { return visit(v, index_of(to) == v); });
  }

  // Amanatides-Woo traversal with the entry parameter t of each voxel.
  template <typename Visit>
  void walk_segment_t(const Vec3& from, const Vec3& to, Visit&& visit) const {
    VoxelIndex cur = index_of(from);
    const VoxelIndex end = index_of(to);
    const Vec3 d = to - from;

    double t_entry = 0.0;
    if (!visit(cur, t_entry)) return;
    if (cur == end) return;

    const std::array<double, 3> dir = {d.x, d.y, d.z};
    std::array<int, 3> idx = {cur.x, cur.y, cur.z};
    const std::array<int, 3> idx_end = {end.x, end.y, end.z};
    std::array<int, 3> step{};
    std::array<double, 3> t_max{}, t_delta{};
    const std::array<double, 3> o = {from.x - origin_.x, from.y - origin_.y, from.z - origin_.z};

    for (int a = 0; a < 3; ++a) {
      if (dir[a] > 0.0) {
        step[a] = 1;
        t_max[a] = ((idx[a] + 1) * res_ - o[a]) / dir[a];
        t_delta[a] = res_ / dir[a];
      } else if (dir[a] < 0.0) {
        step[a] = -1;
        t_max[a] = (idx[a] * res_ - o[a]) / dir[a];
        t_delta[a] = -res_ / dir[a];
      } else {
        step[a] = 0;
        t_max[a] = kInfinity;
        t_delta[a] = kInfinity;
      }
    }

    // Bounded by the voxel count between the endpoints; guards float drift.
    const int max_steps = std::abs(end.x - cur.x) + std::abs(end.y - cur.y) +
                          std::abs(end.z - cur.z) + 3;
    for (int n = 0; n < max_steps; ++n) {
      int a = 0;
      if (t_max[1] < t_max[a]) a = 1;
      if (t_max[2] < t_max[a]) a = 2;
      if (t_max[a] > 1.0) return;  // segment ends inside current voxel
      t_entry = t_max[a];
      idx[a] += step[a];
      t_max[a] += t_delta[a];
      if (!visit({idx[0], idx[1], idx[2]}, t_entry)) return;
      if (idx == idx_end) return;
    }
  }

  /// Text dump: header `voxmap v1 <res> <ox> <oy> <oz> <nx> <ny> <nz>`,
  /// then one `x y z state` line per non-Unknown voxel (0 Free, 1 Occupied).
  void save(std::ostream& os) const {
    os << "voxmap v1 " << res_ << ' ' << origin_.x << ' ' << origin_.y << ' ' << origin_.z << ' '
       << nx_ << ' ' << ny_ << ' ' << nz_ << '\n';
    for (int z = 0; z < nz_; ++z)
      for (int y = 0; y < ny_; ++y)
        for (int x = 0; x < nx_; ++x) {
          const CellState s = static_cast<CellState>(cells_[flat({x, y, z})]);
          if (s == CellState::Unknown) continue;
          os << x << ' ' << y << ' ' << z << ' ' << (s == CellState::Occupied ? 1 : 0) << '\n';
        }
  }

  static OccupancyMap load(std::istream& is) {
    std::string tag, version;
    double res = 0.0;
    Vec3 origin;
    int nx = 0, ny = 0, nz = 0;
    is >> tag >> version >> res >> origin.x >> origin.y >> origin.z >> nx >> ny >> nz;
    if (!is || tag != "voxmap" || version != "v1" || res <= 0.0 || nx <= 0 || ny <= 0 || nz <= 0)
      throw std::runtime_error("voxmap: bad header");
    const Vec3 size(nx * res, ny * res, nz * res);
    OccupancyMap m(res, origin + size * 0.5, size);
    m.origin_ = origin;  // exact origin, not re-derived from the center
    int x, y, z, s;
    while (is >> x >> y >> z >> s) {
      if (x < 0 || x >= nx || y < 0 || y >= ny || z < 0 || z >= nz)
        throw std::runtime_error("voxmap: voxel out of bounds");
      m.cells_[m.flat({x, y, z})] =
          static_cast<std::uint8_t>(s ? CellState::Occupied : CellState::Free);
    }
    return m;
  }

 private:
  int axis_index(double v, double o) const {
    return static_cast<int>(std::floor((v - o) / res_));
  }

  std::size_t flat(const VoxelIndex& v) const {
    return (static_cast<std::size_t>(v.z) * ny_ + v.y) * nx_ + v.x;
  }

  void maybe_recenter(const Vec3& origin) {
    const Vec3 half(nx_ * res_ / 2.0, ny_ * res_ / 2.0, nz_ * res_ / 2.0);
    const Vec3 off = origin - center_;
    if (std::abs(off.x) <= half.x / 2.0 && std::abs(off.y) <= half.y / 2.0 &&
        std::abs(off.z) <= half.z / 2.0)
      return;
    // Shift by whole voxels so cell centers stay on the same lattice.
    const int sx = static_cast<int>(std::llround(off.x / res_));
    const int sy = static_cast<int>(std::llround(off.y / res_));
    const int sz = static_cast<int>(std::llround(off.z / res_));
    std::vector<std::uint8_t> fresh(cells_.size(), static_cast<std::uint8_t>(CellState::Unknown));
    for (int z = 0; z < nz_; ++z)
      for (int y = 0; y < ny_; ++y)
        for (int x = 0; x < nx_; ++x) {
          const VoxelIndex src{x + sx, y + sy, z + sz};
          if (in_bounds(src)) fresh[flat({x, y, z})] = cells_[flat(src)];
        }
    cells_ = std::move(fresh);
    origin_ = origin_ + Vec3(sx, sy, sz) * res_;
    center_ = center_ + Vec3(sx, sy, sz) * res_;
    dist_dirty_ = true;
  }

  // Exact squared Euclidean distance transform (Felzenszwalb-Huttenlocher),
  // one lower-envelope pass per axis. Units: voxel cells squared.
  void ensure_distance() const {
    if (!dist_dirty_ && dist_sq_) return;
    const std::size_t n = cells_.size();
    if (!dist_sq_) dist_sq_ = std::make_unique<std::vector<std::int32_t>>();
    dist_sq_->assign(n, kNoObstacle);
    auto& d = *dist_sq_;
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
      if (cells_[i] == static_cast<std::uint8_t>(CellState::Occupied)) {
        d[i] = 0;
        any = true;
      }
    if (any) {
      edt_pass(d, nx_, ny_ * nz_, 1, static_cast<std::size_t>(nx_));           // x rows
      edt_pass(d, ny_, nx_ * nz_, nx_, 1, nx_, ny_);                           // y columns
      edt_pass(d, nz_, nx_ * ny_, static_cast<std::size_t>(nx_) * ny_, 1,
               static_cast<std::size_t>(nx_) * ny_, nz_);                      // z columns
    }
    dist_dirty_ = false;
  }

  // 1D squared-distance lower envelope over `rows` parallel lines of length
  // `len` with element stride `stride`. Row r starts at r*row_stride when
  // simple, else rows are enumerated over the two remaining axes.
  static void edt_pass(std::vector<std::int32_t>& d, int len, int rows, std::size_t stride,
                       std::size_t row_stride, int wrap = 0, int wrap_len = 0) {
    std::vector<std::int32_t> f(len);
    std::vector<std::int32_t> out(len);
    std::vector<int> v(len);
    std::vector<double> z(len + 1);
    for (int r = 0; r < rows; ++r) {
      std::size_t base;
      if (wrap == 0) {
        base = static_cast<std::size_t>(r) * row_stride;
      } else {
        // rows indexed over (a, b) with the scanned axis in between
        const int a = r % wrap;             // fast axis index
        const int b = r / wrap;             // slow axis index
        base = static_cast<std::size_t>(a) + static_cast<std::size_t>(b) *
               static_cast<std::size_t>(wrap) * static_cast<std::size_t>(wrap_len);
      }
      for (int i = 0; i < len; ++i) f[i] = d[base + stride * i];
      int k = 0;
      v[0] = 0;
      z[0] = -kInfinity;
      z[1] = kInfinity;
      for (int q = 1; q < len; ++q) {
        if (f[q] >= kNoObstacle && f[v[k]] >= kNoObstacle) {
          // both empty: parabola identical, skip
          continue;
        }
        double s = intersect(f, q, v[k]);
        while (s <= z[k]) {
          --k;
          s = intersect(f, q, v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInfinity;
      }
      int kk = 0;
      for (int q = 0; q < len; ++q) {
        while (z[kk + 1] < q) ++kk;
        const std::int64_t dq = q - v[kk];
        const std::int64_t val = f[v[kk]] >= kNoObstacle
                                     ? kNoObstacle
                                     : std::min<std::int64_t>(kNoObstacle, dq * dq + f[v[kk]]);
        out[q] = static_cast<std::int32_t>(val);
      }
      for (int i = 0; i < len; ++i) d[base + stride * i] = out[i];
    }
  }

  static double intersect(const std::vector<std::int32_t>& f, int q, int p) {
    const double fq = f[q] >= kNoObstacle ? 1e18 : f[q];
    const double fp = f[p] >= kNoObstacle ? 1e18 : f[p];
    return ((fq + static_cast<double>(q) * q) - (fp + static_cast<double>(p) * p)) /
           (2.0 * (q - p));
  }

  double res_;
  Vec3 origin_;
  Vec3 center_;
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<std::uint8_t> cells_;

  mutable std::unique_ptr<std::vector<std::int32_t>> dist_sq_;
  mutable bool dist_dirty_ = true;

 public:
  OccupancyMap(const OccupancyMap& o)
      : res_(o.res_), origin_(o.origin_), center_(o.center_), nx_(o.nx_), ny_(o.ny_),
        nz_(o.nz_), cells_(o.cells_), dist_dirty_(true) {}
  OccupancyMap& operator=(const OccupancyMap& o) {
    res_ = o.res_;
    origin_ = o.origin_;
    center_ = o.center_;
    nx_ = o.nx_;
    ny_ = o.ny_;
    nz_ = o.nz_;
    cells_ = o.cells_;
    dist_sq_.reset();
    dist_dirty_ = true;
    return *this;
  }
  OccupancyMap(OccupancyMap&&) = default;
  OccupancyMap& operator=(OccupancyMap&&) = default;
};

}  // namespace coguide
