#include "varflow/mesh_gen.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace varflow {

DiscreteVarifold hex_disk(int level, double radius) {
  if (level < 0 || level > 9) throw InvalidArgument("hex_disk: level must be in [0, 9]");
  if (!(radius > 0)) throw InvalidArgument("hex_disk: radius must be positive");
  const int rings = 1 << level;
  std::vector<Vec> pts;
  std::vector<std::uint8_t> boundary;
  std::vector<int> ring_start(rings + 1);

  pts.push_back(make_vec({0.0, 0.0, 0.0}));
  boundary.push_back(rings == 0);
  ring_start[0] = 0;
  for (int i = 1; i <= rings; ++i) {
    ring_start[i] = static_cast<int>(pts.size());
    const double r = radius * i / rings;
    for (int j = 0; j < 6 * i; ++j) {
      const double th = 2.0 * std::numbers::pi * j / (6.0 * i);
      pts.push_back(make_vec({r * std::cos(th), r * std::sin(th), 0.0}));
      boundary.push_back(i == rings);
    }
  }

  auto outer = [&](int i, int j) { return ring_start[i] + (j % (6 * i)); };
  auto inner = [&](int i, int j) { return i == 1 ? 0 : ring_start[i - 1] + (j % (6 * (i - 1))); };

  std::vector<Face> faces;
  for (int i = 1; i <= rings; ++i) {
    for (int s = 0; s < 6; ++s) {
      for (int m = 0; m < i; ++m) {
        faces.push_back({{outer(i, s * i + m), outer(i, s * i + m + 1), inner(i, s * (i - 1) + m)}, 1});
        if (m + 1 < i) {
          faces.push_back({{inner(i, s * (i - 1) + m), outer(i, s * i + m + 1), inner(i, s * (i - 1) + m + 1)}, 1});
        }
      }
    }
  }
  return DiscreteVarifold(3, std::move(pts), std::move(faces), std::move(boundary));
}

DiscreteVarifold square_grid(int n) {
  if (n < 1) throw InvalidArgument("square_grid: n must be positive");
  std::vector<Vec> pts;
  std::vector<std::uint8_t> boundary;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      pts.push_back(make_vec({static_cast<double>(i) / n, static_cast<double>(j) / n, 0.0}));
      boundary.push_back(i == 0 || j == 0 || i == n || j == n);
    }
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<Face> faces;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      faces.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1)}, 1});
      faces.push_back({{id(i, j), id(i + 1, j + 1), id(i, j + 1)}, 1});
    }
  }
  return DiscreteVarifold(3, std::move(pts), std::move(faces), std::move(boundary));
}

DiscreteVarifold icosphere(int level, double radius, const Vec& center) {
  if (level < 0 || level > 8) throw InvalidArgument("icosphere: level must be in [0, 8]");
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v = {
      {-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
      {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1},
  };
  for (auto& x : v) x.normalize();
  std::vector<std::array<int, 3>> f = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
      {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
      {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
  };
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(f.size() * 4);
    for (const auto& t : f) {
      const int a = midpoint(t[0], t[1]);
      const int b = midpoint(t[1], t[2]);
      const int c = midpoint(t[2], t[0]);
      next.push_back({t[0], a, c});
      next.push_back({t[1], b, a});
      next.push_back({t[2], c, b});
      next.push_back({a, b, c});
    }
    f = std::move(next);
  }
  std::vector<Vec> pts;
  pts.reserve(v.size());
  for (const auto& x : v) pts.push_back(Vec(center + radius * Vec(x)));
  std::vector<Face> faces;
  faces.reserve(f.size());
  for (const auto& t : f) faces.push_back({t, 1});
  return DiscreteVarifold(3, std::move(pts), std::move(faces), {});
}

DiscreteVarifold circle_polygon(int segments, double radius) {
  if (segments < 3) throw InvalidArgument("circle_polygon: need at least 3 segments");
  std::vector<Vec> pts;
  std::vector<Face> faces;
  for (int j = 0; j < segments; ++j) {
    const double th = 2.0 * std::numbers::pi * j / segments;
    pts.push_back(make_vec({radius * std::cos(th), radius * std::sin(th)}));
    faces.push_back({{j, (j + 1) % segments, -1}, 1});
  }
  return DiscreteVarifold(2, std::move(pts), std::move(faces), {});
}

DiscreteVarifold cylinder_tube(double radius, double length, int n_theta, int n_z) {
  if (n_theta < 3 || n_z < 1) throw InvalidArgument("cylinder_tube: resolution too small");
  std::vector<Vec> pts;
  std::vector<std::uint8_t> boundary;
  for (int k = 0; k <= n_z; ++k) {
    const double z = -0.5 * length + length * k / n_z;
    // staggered rings give near-equilateral triangles
    const double shift = (k % 2) * 0.5;
    for (int j = 0; j < n_theta; ++j) {
      const double th = 2.0 * std::numbers::pi * (j + shift) / n_theta;
      pts.push_back(make_vec({radius * std::cos(th), radius * std::sin(th), z}));
      boundary.push_back(k == 0 || k == n_z);
    }
  }
  auto id = [n_theta](int k, int j) { return k * n_theta + ((j % n_theta) + n_theta) % n_theta; };
  std::vector<Face> faces;
  for (int k = 0; k < n_z; ++k) {
    for (int j = 0; j < n_theta; ++j) {
      if (k % 2 == 0) {
        faces.push_back({{id(k, j), id(k, j + 1), id(k + 1, j)}, 1});
        faces.push_back({{id(k, j + 1), id(k + 1, j + 1), id(k + 1, j)}, 1});
      } else {
        faces.push_back({{id(k, j), id(k + 1, j + 1), id(k + 1, j)}, 1});
        faces.push_back({{id(k, j), id(k, j + 1), id(k + 1, j + 1)}, 1});
      }
    }
  }
  return DiscreteVarifold(3, std::move(pts), std::move(faces), std::move(boundary));
}

DiscreteVarifold disjoint_union(const DiscreteVarifold& a, const DiscreteVarifold& b) {
  if (a.ambient() != b.ambient()) throw InvalidArgument("disjoint_union: ambient dimensions differ");
  std::vector<Vec> pts = a.vertices();
  pts.insert(pts.end(), b.vertices().begin(), b.vertices().end());
  std::vector<std::uint8_t> bd = a.boundary();
  bd.insert(bd.end(), b.boundary().begin(), b.boundary().end());
  std::vector<Face> faces = a.faces();
  const int shift = static_cast<int>(a.num_vertices());
  for (auto f : b.faces()) {
    for (int k = 0; k < a.face_size(); ++k) f.v[k] += shift;
    faces.push_back(f);
  }
  return DiscreteVarifold(a.ambient(), std::move(pts), std::move(faces), std::move(bd));
}

}  // namespace varflow
