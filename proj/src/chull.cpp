#include "polyfeas/chull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace polyfeas {

namespace {

std::uint64_t edge_key(std::size_t a, std::size_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

Eigen::Vector3d as3(const Vector& v) { return Eigen::Vector3d(v(0), v(1), v(2)); }

struct SimplexPick {
  int dim = 0;
  std::array<std::size_t, 4> idx{};
};

double distance_to_line(const Vector& p, const Vector& origin, const Vector& unit_dir) {
  const Vector rel = p - origin;
  return (rel - rel.dot(unit_dir) * unit_dir).norm();
}

// Greedy simplex: farthest axis-extreme pair, then farthest from the line,
// then farthest from the plane.
SimplexPick pick_simplex(const std::vector<Vector>& points, double tol) {
  SimplexPick pick;
  if (points.empty()) {
    pick.dim = -1;
    return pick;
  }
  const Eigen::Index m = points.front().size();

  std::size_t best_a = 0, best_b = 0;
  double best_dist = -1.0;
  for (Eigen::Index axis = 0; axis < m; ++axis) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (points[i](axis) < points[lo](axis)) lo = i;
      if (points[i](axis) > points[hi](axis)) hi = i;
    }
    const double dist = (points[hi] - points[lo]).norm();
    if (dist > best_dist) {
      best_dist = dist;
      best_a = lo;
      best_b = hi;
    }
  }
  pick.idx[0] = best_a;
  if (best_dist <= tol) return pick;
  pick.idx[1] = best_b;
  pick.dim = 1;
  if (m == 1) return pick;

  const Vector origin = points[best_a];
  const Vector dir = (points[best_b] - origin).normalized();
  double far = -1.0;
  std::size_t third = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double dist = distance_to_line(points[i], origin, dir);
    if (dist > far) {
      far = dist;
      third = i;
    }
  }
  if (far <= tol) return pick;
  pick.idx[2] = third;
  pick.dim = 2;
  if (m == 2) return pick;

  const Eigen::Vector3d n =
      (as3(points[best_b]) - as3(origin)).cross(as3(points[third]) - as3(origin)).normalized();
  far = -1.0;
  std::size_t fourth = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double dist = std::abs(n.dot(as3(points[i]) - as3(origin)));
    if (dist > far) {
      far = dist;
      fourth = i;
    }
  }
  if (far <= tol) return pick;
  pick.idx[3] = fourth;
  pick.dim = 3;
  return pick;
}

}  // namespace

int affine_dimension(const std::vector<Vector>& points, double tol) {
  return std::max(0, pick_simplex(points, tol).dim);
}

double bbox_diagonal(const std::vector<Vector>& points) {
  if (points.empty()) return 0.0;
  Vector lo = points.front();
  Vector hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

HullState HullState::build(const std::vector<Vector>& points, double coplanar_tol) {
  if (points.empty()) throw DegenerateInputError(-1, "convex hull of an empty point set");
  const Eigen::Index m = points.front().size();
  if (m < 1 || m > 3) {
    throw Error(ErrorKind::InvalidArgument,
                "convex hull supports dimensions 1..3, got " + std::to_string(m));
  }
  for (const auto& p : points) {
    if (p.size() != m) throw Error(ErrorKind::DimensionMismatch, "hull points differ in size");
    if (!p.allFinite()) throw Error(ErrorKind::NonFinite, "hull point has NaN/Inf");
  }

  HullState state;
  state.dim_ = static_cast<int>(m);
  const double diag = bbox_diagonal(points);
  state.tol_ = coplanar_tol > 0.0 ? coplanar_tol : kCoplanarTolFactor * diag;
  state.merge_tol_ = std::max(kMergeTolFactor * diag, state.tol_);
  state.points_ = points;

  const SimplexPick pick = pick_simplex(points, state.tol_);
  if (pick.dim < m) {
    throw DegenerateInputError(pick.dim, "points span affine dimension " +
                                             std::to_string(pick.dim) + " < " +
                                             std::to_string(m));
  }

  switch (m) {
    case 1: {
      std::vector<std::size_t> order(points.size());
      std::iota(order.begin(), order.end(), 0);
      state.build_1d(std::move(order));
      break;
    }
    case 2: state.build_2d(); break;
    default: state.build_3d(pick.idx); break;
  }
  state.update_centroid();
  return state;
}

HullState::Facet HullState::make_edge(std::size_t a, std::size_t b, long generation) const {
  Facet f;
  f.v = {a, b, 0};
  const Vector d = points_[b] - points_[a];
  f.normal = Vector(2);
  f.normal << d(1), -d(0);
  f.normal.normalize();
  f.offset = f.normal.dot(points_[a]);
  f.generation = generation;
  return f;
}

void HullState::build_1d(std::vector<std::size_t> order) {
  auto [lo, hi] = std::minmax_element(order.begin(), order.end(), [&](auto a, auto b) {
    return points_[a](0) < points_[b](0);
  });
  Facet upper;
  upper.v = {*hi, 0, 0};
  upper.normal = Vector::Ones(1);
  upper.offset = points_[*hi](0);
  Facet lower;
  lower.v = {*lo, 0, 0};
  lower.normal = -Vector::Ones(1);
  lower.offset = -points_[*lo](0);
  facets_ = {upper, lower};
  interior_ = 0.5 * (points_[*hi] + points_[*lo]);
}

void HullState::build_2d() {
  std::vector<std::size_t> order(points_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) {
    const Vector& p = points_[a];
    const Vector& q = points_[b];
    return p(0) < q(0) || (p(0) == q(0) && (p(1) < q(1) || (p(1) == q(1) && a < b)));
  });

  // Pops the middle point when it lies within tol of the chord or turns clockwise.
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    const Vector u = points_[a] - points_[o];
    const Vector w = points_[b] - points_[o];
    return u(0) * w(1) - u(1) * w(0);
  };
  auto turns_left = [&](std::size_t o, std::size_t a, std::size_t b) {
    const double chord = (points_[b] - points_[o]).norm();
    return cross(o, a, b) > tol_ * std::max(chord, 1e-300);
  };

  std::vector<std::size_t> hull;
  for (std::size_t pass = 0; pass < 2; ++pass) {
    const std::size_t base = hull.size();
    for (std::size_t t = 0; t < order.size(); ++t) {
      const std::size_t i = pass == 0 ? order[t] : order[order.size() - 1 - t];
      while (hull.size() >= base + 2 && !turns_left(hull[hull.size() - 2], hull.back(), i)) {
        hull.pop_back();
      }
      hull.push_back(i);
    }
    hull.pop_back();
  }

  // Collapse neighbours closer than the merge tolerance.
  std::vector<std::size_t> merged;
  for (std::size_t i : hull) {
    if (!merged.empty() && (points_[i] - points_[merged.back()]).norm() <= merge_tol_) continue;
    merged.push_back(i);
  }
  while (merged.size() > 1 &&
         (points_[merged.front()] - points_[merged.back()]).norm() <= merge_tol_) {
    merged.pop_back();
  }
  cycle_ = std::move(merged);

  facets_.clear();
  for (std::size_t i = 0; i < cycle_.size(); ++i) {
    facets_.push_back(make_edge(cycle_[i], cycle_[(i + 1) % cycle_.size()], 0));
  }
  interior_ = Vector::Zero(2);
  for (std::size_t i : cycle_) interior_ += points_[i];
  interior_ /= static_cast<double>(cycle_.size());
}

std::size_t HullState::add_triangle(std::size_t a, std::size_t b, std::size_t c,
                                    long generation) {
  Facet f;
  f.v = {a, b, c};
  const Eigen::Vector3d pa = as3(points_[a]);
  const Eigen::Vector3d n = (as3(points_[b]) - pa).cross(as3(points_[c]) - pa);
  const double len = n.norm();
  f.normal = Vector(3);
  if (len > 0.0) {
    f.normal << n(0) / len, n(1) / len, n(2) / len;
  } else {
    // Zero-area triangle: fall back to the direction away from the interior.
    const Eigen::Vector3d out = (pa - as3(interior_)).normalized();
    f.normal << out(0), out(1), out(2);
  }
  f.offset = f.normal.dot(points_[a]);
  f.generation = generation;
  const std::size_t id = facets_.size();
  facets_.push_back(std::move(f));
  touch(a, 1);
  touch(b, 1);
  touch(c, 1);
  edges_[edge_key(a, b)] = id;
  edges_[edge_key(b, c)] = id;
  edges_[edge_key(c, a)] = id;
  return id;
}

void HullState::retire_triangle(std::size_t id) {
  Facet& f = facets_[id];
  f.alive = false;
  for (std::size_t v : f.v) touch(v, -1);
  for (int e = 0; e < 3; ++e) {
    auto it = edges_.find(edge_key(f.v[e], f.v[(e + 1) % 3]));
    if (it != edges_.end() && it->second == id) edges_.erase(it);
  }
}

void HullState::build_3d(const std::array<std::size_t, 4>& simplex) {
  interior_ = Vector::Zero(3);
  for (std::size_t i : simplex) interior_ += points_[i];
  interior_ /= 4.0;

  const std::array<std::array<int, 3>, 4> tris = {{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};
  for (const auto& t : tris) {
    std::size_t a = simplex[t[0]], b = simplex[t[1]], c = simplex[t[2]];
    const Eigen::Vector3d pa = as3(points_[a]);
    const Eigen::Vector3d n = (as3(points_[b]) - pa).cross(as3(points_[c]) - pa);
    if (n.dot(as3(interior_) - pa) > 0.0) std::swap(b, c);
    add_triangle(a, b, c, 0);
  }

  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (std::find(simplex.begin(), simplex.end(), i) != simplex.end()) continue;
    for (auto& f : facets_) {
      if (distance(f, points_[i]) > tol_) {
        f.outside.push_back(i);
        break;
      }
    }
  }

  for (std::size_t fi = 0; fi < facets_.size(); ++fi) {
    while (facets_[fi].alive && !facets_[fi].outside.empty()) {
      auto& outside = facets_[fi].outside;
      std::size_t best = 0;
      double best_dist = -1.0;
      for (std::size_t t = 0; t < outside.size(); ++t) {
        const double dist = distance(facets_[fi], points_[outside[t]]);
        if (dist > best_dist) {
          best_dist = dist;
          best = t;
        }
      }
      const std::size_t apex = outside[best];
      outside.erase(outside.begin() + static_cast<std::ptrdiff_t>(best));
      insert_3d(apex, fi, true);
    }
  }
  compact();
}

void HullState::touch(std::size_t point, int delta) {
  if (incidence_.size() <= point) incidence_.resize(points_.size(), 0);
  if (vertex_sum_.size() != dim_) vertex_sum_ = Vector::Zero(dim_);
  const int before = incidence_[point];
  incidence_[point] += delta;
  if (before == 0 && incidence_[point] > 0) {
    vertex_sum_ += points_[point];
    ++vertex_count_;
  } else if (before > 0 && incidence_[point] == 0) {
    vertex_sum_ -= points_[point];
    --vertex_count_;
  }
}

bool HullState::insert_3d(std::size_t index, std::size_t seed, bool collect) {
  const Vector& p = points_[index];
  std::vector<std::size_t> visible{seed};
  std::unordered_map<std::size_t, bool> seen{{seed, true}};
  for (std::size_t q = 0; q < visible.size(); ++q) {
    const Facet& f = facets_[visible[q]];
    for (int e = 0; e < 3; ++e) {
      auto it = edges_.find(edge_key(f.v[(e + 1) % 3], f.v[e]));
      if (it == edges_.end()) continue;
      const std::size_t g = it->second;
      if (seen.count(g)) continue;
      const bool vis = distance(facets_[g], p) > tol_;
      seen[g] = vis;
      if (vis) visible.push_back(g);
    }
  }

  // A near-duplicate of an existing vertex is dropped instead of creating slivers.
  for (std::size_t f : visible) {
    for (std::size_t v : facets_[f].v) {
      if ((points_[v] - p).norm() <= merge_tol_) return false;
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> horizon;
  for (std::size_t fid : visible) {
    const Facet& f = facets_[fid];
    for (int e = 0; e < 3; ++e) {
      const std::size_t a = f.v[e], b = f.v[(e + 1) % 3];
      auto it = edges_.find(edge_key(b, a));
      if (it == edges_.end() || !seen.at(it->second)) horizon.emplace_back(a, b);
    }
  }

  std::vector<std::size_t> orphans;
  for (std::size_t fid : visible) {
    if (collect) {
      auto& out = facets_[fid].outside;
      orphans.insert(orphans.end(), out.begin(), out.end());
      out.clear();
      out.shrink_to_fit();
    }
    retire_triangle(fid);
  }

  const long stamp = collect ? 0 : generation_;
  std::vector<std::size_t> created;
  created.reserve(horizon.size());
  for (const auto& [a, b] : horizon) created.push_back(add_triangle(a, b, index, stamp));

  for (std::size_t q : orphans) {
    for (std::size_t fid : created) {
      if (distance(facets_[fid], points_[q]) > tol_) {
        facets_[fid].outside.push_back(q);
        break;
      }
    }
  }
  return true;
}

void HullState::compact() {
  if (dim_ != 3) return;
  std::vector<Facet> alive;
  alive.reserve(facets_.size());
  for (auto& f : facets_) {
    if (f.alive) alive.push_back(std::move(f));
  }
  facets_ = std::move(alive);
  // Rebuilding the running sum also clears its rounding drift.
  incidence_.assign(points_.size(), 0);
  vertex_sum_ = Vector::Zero(dim_);
  vertex_count_ = 0;
  for (const auto& f : facets_) {
    for (std::size_t v : f.v) touch(v, 1);
  }
  edges_.clear();
  for (std::size_t id = 0; id < facets_.size(); ++id) {
    const auto& v = facets_[id].v;
    edges_[edge_key(v[0], v[1])] = id;
    edges_[edge_key(v[1], v[2])] = id;
    edges_[edge_key(v[2], v[0])] = id;
  }
}

bool HullState::insert_1d(std::size_t index) {
  const double x = points_[index](0);
  bool changed = false;
  if (x - facets_[0].offset > tol_) {
    facets_[0].v[0] = index;
    facets_[0].offset = x;
    facets_[0].generation = generation_;
    changed = true;
  }
  if (-x - facets_[1].offset > tol_) {
    facets_[1].v[0] = index;
    facets_[1].offset = -x;
    facets_[1].generation = generation_;
    changed = true;
  }
  return changed;
}

bool HullState::insert_2d(std::size_t index) {
  const std::size_t k = cycle_.size();
  const Vector& p = points_[index];
  std::vector<bool> vis(k);
  std::size_t top = 0;
  double top_dist = -1.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dist = distance(facets_[i], p);
    vis[i] = dist > tol_;
    if (dist > top_dist) {
      top_dist = dist;
      top = i;
    }
  }
  if (top_dist <= tol_) return false;

  std::size_t start = top, run = 1;
  while (run < k && vis[(start + k - 1) % k]) {
    start = (start + k - 1) % k;
    ++run;
  }
  std::size_t end = top;
  while (run < k && vis[(end + 1) % k]) {
    end = (end + 1) % k;
    ++run;
  }

  // Keep vertices cycle[end+1] .. cycle[start] and close with the new point.
  std::vector<std::size_t> cycle;
  std::vector<Facet> facets;
  const std::size_t keep = k - run + 1;
  for (std::size_t t = 0; t < keep; ++t) {
    const std::size_t i = (end + 1 + t) % k;
    cycle.push_back(cycle_[i]);
    if (t + 1 < keep) facets.push_back(facets_[i]);
  }
  facets.push_back(make_edge(cycle_[start], index, generation_));
  cycle.push_back(index);
  facets.push_back(make_edge(index, cycle_[(end + 1) % k], generation_));
  cycle_ = std::move(cycle);
  facets_ = std::move(facets);
  return true;
}

bool HullState::insert(const Vector& point) {
  if (point.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "insert: wrong point size");
  if (!point.allFinite()) throw Error(ErrorKind::NonFinite, "insert: point has NaN/Inf");

  if (dim_ < 3) {
    for (std::size_t v : vertex_indices()) {
      if ((points_[v] - point).norm() <= merge_tol_) return false;
    }
  }

  std::size_t seed = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < facets_.size(); ++i) {
    if (!facets_[i].alive) continue;
    const double dist = distance(facets_[i], point);
    if (dist > best) {
      best = dist;
      seed = i;
    }
  }
  if (best <= tol_) return false;

  points_.push_back(point);
  const std::size_t index = points_.size() - 1;
  ++generation_;
  bool changed = true;
  switch (dim_) {
    case 1: changed = insert_1d(index); break;
    case 2: changed = insert_2d(index); break;
    default: {
      changed = insert_3d(index, seed, false);
      std::size_t dead = 0;
      for (const auto& f : facets_) dead += f.alive ? 0 : 1;
      if (dead > facets_.size() / 2) compact();
      break;
    }
  }
  if (!changed) {
    points_.pop_back();
    --generation_;
    return false;
  }
  update_centroid();
  return true;
}

HullFace HullState::to_face(const Facet& f) const {
  HullFace face;
  face.normal = f.normal;
  face.offset = f.offset;
  face.witness_vertex = f.v[0];
  face.vertex_indices.assign(f.v.begin(), f.v.begin() + dim_);
  std::sort(face.vertex_indices.begin(), face.vertex_indices.end());
  face.created_generation = f.generation;
  return face;
}

std::vector<HullFace> HullState::new_faces(long since_generation) const {
  std::vector<HullFace> out;
  for (const auto& f : facets_) {
    if (f.alive && f.generation > since_generation) out.push_back(to_face(f));
  }
  return out;
}

std::vector<HullFace> HullState::faces() const {
  return new_faces(std::numeric_limits<long>::min());
}

std::size_t HullState::face_count() const {
  return static_cast<std::size_t>(
      std::count_if(facets_.begin(), facets_.end(), [](const Facet& f) { return f.alive; }));
}

std::vector<std::size_t> HullState::vertex_indices() const {
  std::vector<std::size_t> idx;
  if (dim_ == 3) {
    for (std::size_t i = 0; i < incidence_.size(); ++i) {
      if (incidence_[i] > 0) idx.push_back(i);
    }
    return idx;
  }
  for (const auto& f : facets_) {
    if (!f.alive) continue;
    idx.insert(idx.end(), f.v.begin(), f.v.begin() + dim_);
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

std::vector<Vector> HullState::vertices() const {
  std::vector<Vector> out;
  for (std::size_t i : vertex_indices()) out.push_back(points_[i]);
  return out;
}

void HullState::update_centroid() {
  if (dim_ == 3) {
    centroid_ = vertex_sum_ / static_cast<double>(std::max<std::size_t>(vertex_count_, 1));
    return;
  }
  centroid_ = Vector::Zero(dim_);
  const auto idx = vertex_indices();
  for (std::size_t i : idx) centroid_ += points_[i];
  if (!idx.empty()) centroid_ /= static_cast<double>(idx.size());
}

double HullState::measure() const {
  switch (dim_) {
    case 1: return facets_[0].offset + facets_[1].offset;
    case 2: {
      double area = 0.0;
      for (std::size_t i = 0; i < cycle_.size(); ++i) {
        const Vector& a = points_[cycle_[i]];
        const Vector& b = points_[cycle_[(i + 1) % cycle_.size()]];
        area += a(0) * b(1) - a(1) * b(0);
      }
      return 0.5 * area;
    }
    default: {
      double volume = 0.0;
      const Eigen::Vector3d o = as3(interior_);
      for (const auto& f : facets_) {
        if (!f.alive) continue;
        const Eigen::Vector3d a = as3(points_[f.v[0]]) - o;
        const Eigen::Vector3d b = as3(points_[f.v[1]]) - o;
        const Eigen::Vector3d c = as3(points_[f.v[2]]) - o;
        volume += a.dot(b.cross(c));
      }
      return volume / 6.0;
    }
  }
}

std::vector<std::array<std::size_t, 3>> HullState::triangles() const {
  std::vector<std::array<std::size_t, 3>> out;
  if (dim_ != 3) return out;
  for (const auto& f : facets_) {
    if (f.alive) out.push_back(f.v);
  }
  return out;
}

}  // namespace polyfeas
