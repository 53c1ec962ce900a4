#include "varflow/remesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace varflow {
namespace {

using EdgeKey = std::uint64_t;

EdgeKey edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

std::uint64_t face_key(const std::array<int, 3>& v) {
  std::array<int, 3> s = v;
  std::sort(s.begin(), s.end());
  return (static_cast<std::uint64_t>(s[0]) << 42) | (static_cast<std::uint64_t>(s[1]) << 21) |
         static_cast<std::uint64_t>(s[2]);
}

Eigen::Vector3d normal_of(const Vec& a, const Vec& b, const Vec& c) {
  const Eigen::Vector3d e1 = b - a, e2 = c - a;
  return e1.cross(e2);
}

double quality(const Vec& a, const Vec& b, const Vec& c) {
  const double area = 0.5 * normal_of(a, b, c).norm();
  const double s = (b - a).squaredNorm() + (c - b).squaredNorm() + (a - c).squaredNorm();
  return s > 0 ? 4.0 * std::sqrt(3.0) * area / s : 0.0;
}

struct Work {
  std::vector<Vec> pts;
  std::vector<std::uint8_t> bd;
  std::vector<Face> faces;
  std::vector<std::uint8_t> alive;
  std::vector<std::vector<int>> vf;
  std::unordered_set<std::uint64_t> keys;

  explicit Work(const DiscreteVarifold& v)
      : pts(v.vertices()), bd(v.boundary()), faces(v.faces()), alive(v.num_faces(), 1), vf(v.num_vertices()) {
    for (std::size_t f = 0; f < faces.size(); ++f) {
      for (int k = 0; k < 3; ++k) vf[faces[f].v[k]].push_back(static_cast<int>(f));
      keys.insert(face_key(faces[f].v));
    }
  }

  std::vector<int> faces_of(int a) const {
    std::vector<int> out;
    for (int f : vf[a]) {
      if (alive[f] && std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    }
    return out;
  }

  static bool has(const Face& f, int a) { return f.v[0] == a || f.v[1] == a || f.v[2] == a; }

  std::vector<int> edge_faces(int a, int b) const {
    std::vector<int> out;
    for (int f : faces_of(a)) {
      if (has(faces[f], b)) out.push_back(f);
    }
    return out;
  }

  std::vector<int> neighbors(int a) const {
    std::vector<int> out;
    for (int f : faces_of(a)) {
      for (int k = 0; k < 3; ++k) {
        const int w = faces[f].v[k];
        if (w != a) out.push_back(w);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void kill(int f) {
    alive[f] = 0;
    keys.erase(face_key(faces[f].v));
  }

  int add_face(const Face& f) {
    faces.push_back(f);
    alive.push_back(1);
    const int id = static_cast<int>(faces.size()) - 1;
    for (int k = 0; k < 3; ++k) vf[f.v[k]].push_back(id);
    keys.insert(face_key(f.v));
    return id;
  }
};

struct Edge {
  int a, b;
  double len;
};

std::vector<Edge> collect_edges(const Work& w) {
  std::unordered_set<EdgeKey> seen;
  std::vector<Edge> out;
  for (std::size_t f = 0; f < w.faces.size(); ++f) {
    if (!w.alive[f]) continue;
    for (int k = 0; k < 3; ++k) {
      const int a = w.faces[f].v[k], b = w.faces[f].v[(k + 1) % 3];
      if (seen.insert(edge_key(a, b)).second) {
        out.push_back({std::min(a, b), std::max(a, b), (w.pts[a] - w.pts[b]).norm()});
      }
    }
  }
  return out;
}

std::vector<std::uint8_t> feature_vertices(const Work& w) {
  std::unordered_map<EdgeKey, int> count;
  for (std::size_t f = 0; f < w.faces.size(); ++f) {
    if (!w.alive[f]) continue;
    for (int k = 0; k < 3; ++k) ++count[edge_key(w.faces[f].v[k], w.faces[f].v[(k + 1) % 3])];
  }
  std::vector<std::uint8_t> feat(w.pts.size(), 0);
  for (const auto& [key, c] : count) {
    if (c == 2) continue;
    feat[static_cast<int>(key >> 32)] = 1;
    feat[static_cast<int>(key & 0xffffffffu)] = 1;
  }
  for (std::size_t i = 0; i < w.pts.size(); ++i) feat[i] = feat[i] || w.bd[i];
  return feat;
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  const auto mid = xs.begin() + static_cast<std::ptrdiff_t>(xs.size() / 2);
  std::nth_element(xs.begin(), mid, xs.end());
  return *mid;
}

bool try_collapse(Work& w, int keep, int drop, const Vec& p, const std::vector<std::uint8_t>& feature,
                  const RemeshOptions& opt) {
  (void)feature;
  const auto shared = w.edge_faces(keep, drop);
  // Link condition: common neighbours are exactly the apexes of the shared faces.
  std::vector<int> apex;
  for (int f : shared) {
    for (int k = 0; k < 3; ++k) {
      const int x = w.faces[f].v[k];
      if (x != keep && x != drop) apex.push_back(x);
    }
  }
  std::sort(apex.begin(), apex.end());
  apex.erase(std::unique(apex.begin(), apex.end()), apex.end());
  const auto na = w.neighbors(keep);
  const auto nb = w.neighbors(drop);
  std::vector<int> common;
  std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(common));
  if (common != apex) return false;

  std::vector<int> changed;
  for (int f : w.faces_of(keep)) {
    if (!Work::has(w.faces[f], drop)) changed.push_back(f);
  }
  for (int f : w.faces_of(drop)) {
    if (!Work::has(w.faces[f], keep)) changed.push_back(f);
  }

  std::unordered_set<std::uint64_t> new_keys;
  for (int f : changed) {
    const Face& old = w.faces[f];
    std::array<Vec, 3> before, after;
    std::array<int, 3> idx = old.v;
    for (int k = 0; k < 3; ++k) {
      before[k] = w.pts[old.v[k]];
      if (idx[k] == drop) idx[k] = keep;
      after[k] = idx[k] == keep ? p : w.pts[idx[k]];
    }
    const Eigen::Vector3d n0 = normal_of(before[0], before[1], before[2]);
    const Eigen::Vector3d n1 = normal_of(after[0], after[1], after[2]);
    if (!(n1.norm() > 0.0) || n0.dot(n1) <= 0.0) return false;
    const double q1 = quality(after[0], after[1], after[2]);
    if (q1 < opt.min_quality && q1 < quality(before[0], before[1], before[2])) return false;
    if (Work::has(old, drop)) {
      const auto key = face_key(idx);
      if (w.keys.count(key) || !new_keys.insert(key).second) return false;
    }
  }

  for (int f : shared) w.kill(f);
  for (int f : changed) {
    if (!Work::has(w.faces[f], drop)) continue;
    w.keys.erase(face_key(w.faces[f].v));
    for (int k = 0; k < 3; ++k) {
      if (w.faces[f].v[k] == drop) w.faces[f].v[k] = keep;
    }
    w.keys.insert(face_key(w.faces[f].v));
    w.vf[keep].push_back(f);
  }
  w.vf[drop].clear();
  w.pts[keep] = p;
  w.bd[keep] = w.bd[keep] || w.bd[drop];
  return true;
}

// One Jacobi pass of tangential smoothing. Regular vertices move toward the
// neighbour centroid inside their tangent plane, vertices on a junction
// curve move along the curve. Moves that flip or spoil a face are dropped.
int relax_tangential(Work& w, double weight, double min_quality) {
  std::unordered_map<EdgeKey, int> count;
  for (std::size_t f = 0; f < w.faces.size(); ++f) {
    if (!w.alive[f]) continue;
    for (int k = 0; k < 3; ++k) ++count[edge_key(w.faces[f].v[k], w.faces[f].v[(k + 1) % 3])];
  }
  std::vector<std::vector<int>> seam(w.pts.size());
  for (const auto& [key, c] : count) {
    if (c == 2) continue;
    const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffu);
    seam[a].push_back(b);
    seam[b].push_back(a);
  }
  std::vector<Vec> target = w.pts;
  for (std::size_t i = 0; i < w.pts.size(); ++i) {
    if (w.bd[i] || w.vf[i].empty()) continue;
    const int a = static_cast<int>(i);
    Vec d;
    if (seam[i].empty()) {
      const auto nb = w.neighbors(a);
      if (nb.empty()) continue;
      Vec c = Vec::Zero(3);
      for (int x : nb) c += w.pts[x];
      d = c / static_cast<double>(nb.size()) - w.pts[i];
      Eigen::Vector3d n = Eigen::Vector3d::Zero();
      for (int f : w.faces_of(a)) n += normal_of(w.pts[w.faces[f].v[0]], w.pts[w.faces[f].v[1]], w.pts[w.faces[f].v[2]]);
      if (!(n.norm() > 0.0)) continue;
      n.normalize();
      d -= d.dot(n) * n;
    } else if (seam[i].size() == 2) {
      const Vec& p = w.pts[seam[i][0]];
      const Vec& q = w.pts[seam[i][1]];
      Vec tan = q - p;
      if (!(tan.norm() > 0.0)) continue;
      tan.normalize();
      d = (0.5 * (p + q) - w.pts[i]).dot(tan) * tan;
    } else {
      continue;
    }
    target[i] = w.pts[i] + weight * d;
  }
  int moved = 0;
  for (std::size_t i = 0; i < w.pts.size(); ++i) {
    if (target[i] == w.pts[i]) continue;
    bool ok = true;
    for (int f : w.faces_of(static_cast<int>(i))) {
      std::array<Vec, 3> before, after;
      for (int k = 0; k < 3; ++k) {
        const int x = w.faces[f].v[k];
        before[k] = w.pts[x];
        after[k] = x == static_cast<int>(i) ? target[i] : w.pts[x];
      }
      const Eigen::Vector3d n0 = normal_of(before[0], before[1], before[2]);
      const Eigen::Vector3d n1 = normal_of(after[0], after[1], after[2]);
      const double q1 = quality(after[0], after[1], after[2]);
      if (n0.dot(n1) <= 0.0 || (q1 < min_quality && q1 < quality(before[0], before[1], before[2]))) {
        ok = false;
        break;
      }
    }
    if (ok) {
      w.pts[i] = target[i];
      ++moved;
    }
  }
  return moved;
}

}  // namespace

std::vector<double> edge_lengths(const DiscreteVarifold& v) {
  std::unordered_set<EdgeKey> seen;
  std::vector<double> out;
  const int fs = v.face_size();
  for (const auto& f : v.faces()) {
    for (int k = 0; k < fs; ++k) {
      const int a = f.v[k], b = f.v[(k + 1) % fs];
      if (fs == 2 && k == 1) break;
      if (seen.insert(edge_key(a, b)).second) out.push_back((v.vertex(a) - v.vertex(b)).norm());
    }
  }
  return out;
}

double min_edge_length(const DiscreteVarifold& v) {
  const auto e = edge_lengths(v);
  return e.empty() ? 0.0 : *std::min_element(e.begin(), e.end());
}

double median_edge_length(const DiscreteVarifold& v) { return median_of(edge_lengths(v)); }

DiscreteVarifold remesh(const DiscreteVarifold& v, const RemeshOptions& opt, RemeshStats* stats) {
  RemeshStats st;
  if (v.face_size() != 3 || v.empty()) {
    if (stats) *stats = st;
    return v;
  }
  if (v.num_vertices() >= (1u << 20)) throw InvalidArgument("remesh: mesh too large");
  const double mass0 = v.mass();
  Work w(v);
  auto feature = feature_vertices(w);
  std::vector<double> lens;
  for (const auto& e : collect_edges(w)) lens.push_back(e.len);
  const double median = median_of(lens);

  // Splits, longest first.
  std::vector<std::uint8_t> touched(w.pts.size(), 0);
  auto edges = collect_edges(w);
  std::vector<Edge> longs;
  for (const auto& e : edges) {
    if (e.len > opt.split_factor * median && !(w.bd[e.a] && w.bd[e.b])) longs.push_back(e);
  }
  std::sort(longs.begin(), longs.end(), [](const Edge& x, const Edge& y) {
    return x.len != y.len ? x.len > y.len : edge_key(x.a, x.b) < edge_key(y.a, y.b);
  });
  for (const auto& e : longs) {
    if (touched[e.a] || touched[e.b]) continue;
    const auto shared = w.edge_faces(e.a, e.b);
    if (shared.empty()) continue;
    const int m = static_cast<int>(w.pts.size());
    w.pts.push_back(0.5 * (w.pts[e.a] + w.pts[e.b]));
    w.bd.push_back(0);
    w.vf.emplace_back();
    feature.push_back(shared.size() != 2);
    touched.push_back(1);
    touched[e.a] = touched[e.b] = 1;
    for (int f : shared) {
      const Face old = w.faces[f];
      w.kill(f);
      Face f1 = old, f2 = old;
      for (int k = 0; k < 3; ++k) {
        if (old.v[k] == e.b) f1.v[k] = m;
        if (old.v[k] == e.a) f2.v[k] = m;
        if (old.v[k] != e.a && old.v[k] != e.b) touched[old.v[k]] = 1;
      }
      w.add_face(f1);
      w.add_face(f2);
    }
    ++st.splits;
  }

  // Collapses, shortest first.
  std::fill(touched.begin(), touched.end(), 0);
  std::vector<Edge> shorts;
  for (const auto& e : collect_edges(w)) {
    if (e.len < opt.collapse_factor * median) shorts.push_back(e);
  }
  std::sort(shorts.begin(), shorts.end(), [](const Edge& x, const Edge& y) {
    return x.len != y.len ? x.len < y.len : edge_key(x.a, x.b) < edge_key(y.a, y.b);
  });
  for (const auto& e : shorts) {
    if (touched[e.a] || touched[e.b]) continue;
    int keep = e.a, drop = e.b;
    Vec p;
    if (w.bd[e.a] && w.bd[e.b]) {
      ++st.rejected;
      continue;
    }
    if (w.bd[e.b] || (feature[e.b] && !feature[e.a])) std::swap(keep, drop);
    if (w.bd[keep] || (feature[keep] && !feature[drop])) {
      p = w.pts[keep];
    } else if (feature[keep] && feature[drop]) {
      if (w.edge_faces(keep, drop).size() == 2) {
        ++st.rejected;
        continue;
      }
      p = 0.5 * (w.pts[keep] + w.pts[drop]);
    } else {
      p = 0.5 * (w.pts[keep] + w.pts[drop]);
    }
    const auto nk = w.neighbors(keep);
    const auto nd = w.neighbors(drop);
    bool done = try_collapse(w, keep, drop, p, feature, opt);
    if (!done && !w.bd[keep] && feature[keep] && !feature[drop]) {
      done = try_collapse(w, keep, drop, 0.5 * (w.pts[keep] + w.pts[drop]), feature, opt) ||
             try_collapse(w, keep, drop, Vec(w.pts[drop]), feature, opt);
    }
    if (!done) {
      ++st.rejected;
      continue;
    }
    touched[keep] = touched[drop] = 1;
    for (int x : nk) touched[x] = 1;
    for (int x : nd) touched[x] = 1;
    ++st.collapses;
  }

  if (opt.relax > 0.0) st.relaxed = relax_tangential(w, opt.relax, opt.min_quality);

  // Compact.
  std::vector<int> remap(w.pts.size(), -1);
  std::vector<std::uint8_t> used(w.pts.size(), 0);
  std::vector<Face> faces;
  for (std::size_t f = 0; f < w.faces.size(); ++f) {
    if (!w.alive[f]) continue;
    faces.push_back(w.faces[f]);
    for (int k = 0; k < 3; ++k) used[w.faces[f].v[k]] = 1;
  }
  std::vector<Vec> pts;
  std::vector<std::uint8_t> bd;
  for (std::size_t i = 0; i < w.pts.size(); ++i) {
    if (!used[i]) continue;
    remap[i] = static_cast<int>(pts.size());
    pts.push_back(w.pts[i]);
    bd.push_back(w.bd[i]);
  }
  for (auto& f : faces) {
    for (int k = 0; k < 3; ++k) f.v[k] = remap[f.v[k]];
  }
  DiscreteVarifold out(v.ambient(), std::move(pts), std::move(faces), std::move(bd));
  st.mass_delta = out.mass() - mass0;
  if (stats) *stats = st;
  return out;
}

}  // namespace varflow
