#include "varflow/varifold.hpp"

#include "varflow/geom.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace varflow {

double simplex_volume(std::span<const Vec> pts) {
  if (pts.size() == 2) return (pts[1] - pts[0]).norm();
  if (pts.size() != 3) throw InvalidArgument("simplex must have 2 or 3 vertices");
  const Vec e1 = pts[1] - pts[0];
  const Vec e2 = pts[2] - pts[0];
  if (e1.size() == 3) {
    const Eigen::Vector3d a = e1, b = e2;
    return 0.5 * a.cross(b).norm();
  }
  const double g = e1.squaredNorm() * e2.squaredNorm() - std::pow(e1.dot(e2), 2);
  return 0.5 * std::sqrt(std::max(0.0, g));
}

Vec simplex_volume_gradient(std::span<const Vec> pts, int i) {
  if (pts.size() == 2) {
    const Vec d = pts[i] - pts[1 - i];
    return d / d.norm();
  }
  const Vec& a = pts[i];
  const Vec& b = pts[(i + 1) % 3];
  const Vec& c = pts[(i + 2) % 3];
  const Vec e = c - b;
  const Vec u = a - b;
  const Vec w = u - (u.dot(e) / e.squaredNorm()) * e;
  const double wn = w.norm();
  if (wn == 0.0) return Vec::Zero(a.size());
  return (0.5 * e.norm() / wn) * w;
}

DiscreteVarifold::DiscreteVarifold(int ambient, std::vector<Vec> vertices, std::vector<Face> faces,
                                   std::vector<std::uint8_t> boundary)
    : ambient_(ambient), vertices_(std::move(vertices)), faces_(std::move(faces)), boundary_(std::move(boundary)) {
  if (ambient_ != 2 && ambient_ != 3) throw InvalidArgument("ambient dimension must be 2 or 3");
  if (boundary_.empty()) boundary_.assign(vertices_.size(), 0);
  if (boundary_.size() != vertices_.size()) throw InvalidArgument("boundary flags do not match vertices");
  for (const auto& p : vertices_) {
    if (p.size() != ambient_) throw InvalidArgument("vertex has wrong dimension");
  }
  const int nv = static_cast<int>(vertices_.size());
  areas_.reserve(faces_.size());
  std::array<Vec, 3> pts;
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    auto& face = faces_[f];
    if (face.multiplicity < 1) throw InvalidArgument("face " + std::to_string(f) + ": multiplicity < 1");
    for (int k = 0; k < 3; ++k) {
      if (k < face_size()) {
        if (face.v[k] < 0 || face.v[k] >= nv) {
          throw InvalidArgument("face " + std::to_string(f) + ": vertex index out of range");
        }
        pts[k] = vertices_[face.v[k]];
      } else {
        face.v[k] = -1;
      }
    }
    const double a = simplex_volume(std::span<const Vec>(pts.data(), face_size()));
    if (!(a > 0.0)) throw InvalidArgument("degenerate face " + std::to_string(f));
    areas_.push_back(a);
  }
}

Mat DiscreteVarifold::face_tangent(std::size_t f) const {
  const auto& v = faces_[f].v;
  const Vec e1 = (vertices_[v[1]] - vertices_[v[0]]).normalized();
  Mat p = e1 * e1.transpose();
  if (face_size() == 3) {
    Vec e2 = vertices_[v[2]] - vertices_[v[0]];
    e2 -= e2.dot(e1) * e1;
    e2.normalize();
    p += e2 * e2.transpose();
  }
  return p;
}

Vec DiscreteVarifold::face_point(std::size_t f, const std::array<double, 3>& bary) const {
  const auto& v = faces_[f].v;
  Vec x = bary[0] * vertices_[v[0]] + bary[1] * vertices_[v[1]];
  if (face_size() == 3) x += bary[2] * vertices_[v[2]];
  return x;
}

Vec DiscreteVarifold::face_centroid(std::size_t f) const {
  const double w = 1.0 / face_size();
  return face_point(f, {w, w, face_size() == 3 ? w : 0.0});
}

double DiscreteVarifold::mass() const {
  Summer s;
  for (std::size_t f = 0; f < faces_.size(); ++f) s.add(faces_[f].multiplicity * areas_[f]);
  return s.value();
}

TestField bump_field(const Vec& center, double radius, const Vec& amplitude) {
  TestField g;
  g.support_radius = radius;
  g.value = [=](const Vec& x) -> Vec {
    const double s2 = (x - center).squaredNorm() / (radius * radius);
    if (s2 >= 1.0) return Vec::Zero(x.size());
    return std::pow(1.0 - s2, 3) * amplitude;
  };
  g.jacobian = [=](const Vec& x) -> Mat {
    const double s2 = (x - center).squaredNorm() / (radius * radius);
    if (s2 >= 1.0) return Mat::Zero(x.size(), x.size());
    const Vec grad = (-6.0 * std::pow(1.0 - s2, 2) / (radius * radius)) * (x - center);
    return amplitude * grad.transpose();
  };
  return g;
}

ScalarTest bump_scalar(const Vec& center, double radius, double height) {
  ScalarTest phi;
  phi.value = [=](const Vec& x, double) {
    const double s2 = (x - center).squaredNorm() / (radius * radius);
    return s2 >= 1.0 ? 0.0 : height * std::pow(1.0 - s2, 3);
  };
  phi.gradient = [=](const Vec& x, double) -> Vec {
    const double s2 = (x - center).squaredNorm() / (radius * radius);
    if (s2 >= 1.0) return Vec::Zero(x.size());
    return (-6.0 * height * std::pow(1.0 - s2, 2) / (radius * radius)) * (x - center);
  };
  phi.time_derivative = [](const Vec&, double) { return 0.0; };
  return phi;
}

ScalarTest squared(const ScalarTest& phi) {
  ScalarTest sq;
  sq.value = [phi](const Vec& x, double t) {
    const double p = phi.value(x, t);
    return p * p;
  };
  sq.gradient = [phi](const Vec& x, double t) -> Vec { return 2.0 * phi.value(x, t) * phi.gradient(x, t); };
  sq.time_derivative = [phi](const Vec& x, double t) {
    return 2.0 * phi.value(x, t) * phi.time_derivative(x, t);
  };
  return sq;
}

double weight_measure(const DiscreteVarifold& v, const std::function<double(const Vec&)>& phi, int quad_order) {
  return integrate(v, quad_order, [&](const Vec& x, std::size_t, const auto&) { return phi(x); });
}

int refinement_depth(const DiscreteVarifold& v, double feature, int max_depth) {
  if (v.empty() || !(feature > 0)) return 0;
  std::vector<double> diam;
  diam.reserve(v.num_faces());
  const int fs = v.face_size();
  for (const auto& f : v.faces()) {
    double d = 0.0;
    for (int a = 0; a < fs; ++a) {
      for (int b = a + 1; b < fs; ++b) d = std::max(d, (v.vertex(f.v[a]) - v.vertex(f.v[b])).norm());
    }
    diam.push_back(d);
  }
  const auto mid = diam.begin() + static_cast<std::ptrdiff_t>(diam.size() / 2);
  std::nth_element(diam.begin(), mid, diam.end());
  int depth = 0;
  for (double h = *mid; h > feature && depth < max_depth; h /= 2) ++depth;
  return depth;
}

double density_ratio(const DiscreteVarifold& v, const Vec& center, double r, int quad_order) {
  if (!(r > 0)) throw InvalidArgument("density_ratio: r must be positive");
  if (v.empty()) return 0.0;
  const double r2 = r * r;
  const int fs = v.face_size();
  std::vector<std::vector<QuadPoint>> rules(7);
  Summer m;
  for (std::size_t f = 0; f < v.num_faces(); ++f) {
    const auto& face = v.faces()[f];
    double near = std::numeric_limits<double>::infinity(), far = 0.0, diam = 0.0;
    for (int a = 0; a < fs; ++a) {
      const double d = (v.vertex(face.v[a]) - center).norm();
      near = std::min(near, d);
      far = std::max(far, d);
      for (int b = a + 1; b < fs; ++b) diam = std::max(diam, (v.vertex(face.v[a]) - v.vertex(face.v[b])).norm());
    }
    const double w = face.multiplicity * v.face_area(f);
    // The ball is convex, so a face with all vertices inside lies inside.
    if (far < r) {
      m.add(w);
      continue;
    }
    if (near - diam >= r) continue;
    int depth = 0;
    for (double h = diam; h > r / 64 && depth < 6; h /= 2) ++depth;
    if (rules[depth].empty()) rules[depth] = composite_rule(v.dim(), quad_order, depth);
    double inner = 0.0;
    for (const auto& q : rules[depth]) inner += (v.face_point(f, q.bary) - center).squaredNorm() < r2 ? q.w : 0.0;
    m.add(w * inner);
  }
  return m.value() / (unit_ball_volume(v.dim()) * std::pow(r, v.dim()));
}

double first_variation(const DiscreteVarifold& v, const TestField& g, int quad_order) {
  if (v.empty()) return 0.0;
  std::vector<Mat> tangents(v.num_faces());
  for (std::size_t f = 0; f < v.num_faces(); ++f) tangents[f] = v.face_tangent(f);
  return integrate(v, quad_order, [&](const Vec& x, std::size_t f, const auto&) {
    return tangential_divergence(g.jacobian(x), tangents[f]);
  });
}

MeanCurvature mean_curvature(const DiscreteVarifold& v) {
  const std::size_t nv = v.num_vertices();
  const int fs = v.face_size();
  MeanCurvature out;
  std::vector<Vec> grad(nv, Vec::Zero(v.ambient()));
  out.mass.assign(nv, 0.0);
  std::array<Vec, 3> pts;
  for (std::size_t f = 0; f < v.num_faces(); ++f) {
    const auto& face = v.faces()[f];
    for (int k = 0; k < fs; ++k) pts[k] = v.vertex(face.v[k]);
    const std::span<const Vec> simplex(pts.data(), fs);
    const double m = face.multiplicity;
    for (int k = 0; k < fs; ++k) {
      grad[face.v[k]] += m * simplex_volume_gradient(simplex, k);
      out.mass[face.v[k]] += m * v.face_area(f) / fs;
    }
  }
  out.h.resize(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    if (out.mass[i] == 0.0) throw InvalidArgument("isolated vertex " + std::to_string(i));
    out.h[i] = v.is_boundary(i) ? Vec::Zero(v.ambient()) : Vec(-grad[i] / out.mass[i]);
  }
  return out;
}

Vec interpolate(const DiscreteVarifold& v, const std::vector<Vec>& field, std::size_t f,
                const std::array<double, 3>& bary) {
  const auto& idx = v.faces()[f].v;
  Vec x = bary[0] * field[idx[0]] + bary[1] * field[idx[1]];
  if (v.face_size() == 3) x += bary[2] * field[idx[2]];
  return x;
}

std::vector<Mat> vertex_tangents(const DiscreteVarifold& v) {
  const int d = v.ambient();
  std::vector<Mat> acc(v.num_vertices(), Mat::Zero(d, d));
  for (std::size_t f = 0; f < v.num_faces(); ++f) {
    const Mat p = v.face_tangent(f) * (v.faces()[f].multiplicity * v.face_area(f));
    for (int k = 0; k < v.face_size(); ++k) acc[v.faces()[f].v[k]] += p;
  }
  for (auto& m : acc) m = nearest_projection(m, v.dim());
  return acc;
}

double perpendicularity_defect(const DiscreteVarifold& v, const MeanCurvature& hf) {
  const auto tangents = vertex_tangents(v);
  double worst = 0.0;
  for (std::size_t i = 0; i < v.num_vertices(); ++i) {
    if (v.is_boundary(i)) continue;
    const double hn = hf.h[i].norm();
    worst = std::max(worst, (tangents[i] * hf.h[i]).norm() / (hn + 1e-8));
  }
  return worst;
}

double weighted_first_variation(const DiscreteVarifold& v, const ScalarTest& phi, double t,
                                const MeanCurvature& hf, int quad_order) {
  return integrate(v, quad_order, [&](const Vec& x, std::size_t f, const auto& bary) {
    const Vec h = interpolate(v, hf.h, f, bary);
    return -phi.value(x, t) * h.squaredNorm() + h.dot(phi.gradient(x, t));
  });
}

DiscreteVarifold with_vertices(const DiscreteVarifold& v, std::vector<Vec> vertices) {
  return DiscreteVarifold(v.ambient(), std::move(vertices), v.faces(), v.boundary());
}

DiscreteVarifold parabolic_rescale(const DiscreteVarifold& v, double lambda) {
  if (!(lambda > 0)) throw InvalidArgument("parabolic_rescale: lambda must be positive");
  std::vector<Vec> pts = v.vertices();
  if (lambda != 1.0) {
    for (auto& p : pts) p /= lambda;
  }
  return with_vertices(v, std::move(pts));
}

void write_dvar(std::ostream& os, const DiscreteVarifold& v) {
  const auto old_prec = os.precision(17);
  os << "DVAR 1 " << v.ambient() << '\n';
  for (const auto& p : v.vertices()) {
    os << 'v';
    for (int k = 0; k < p.size(); ++k) os << ' ' << p[k];
    os << '\n';
  }
  for (const auto& f : v.faces()) {
    os << 'f';
    for (int k = 0; k < v.face_size(); ++k) os << ' ' << f.v[k];
    os << ' ' << f.multiplicity << '\n';
  }
  for (std::size_t i = 0; i < v.num_vertices(); ++i) {
    if (v.is_boundary(i)) os << "b " << i << '\n';
  }
  os.precision(old_prec);
}

DiscreteVarifold read_dvar(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  int ambient = 0;
  std::vector<Vec> verts;
  std::vector<Face> faces;
  std::vector<std::size_t> bidx;
  std::vector<std::size_t> face_lines;
  std::vector<std::size_t> bound_lines;

  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line.substr(first));
    std::string tag;
    ss >> tag;
    if (ambient == 0) {
      int version = 0;
      if (tag != "DVAR" || !(ss >> version >> ambient) || version != 1) {
        throw ParseError("expected header 'DVAR 1 <ambient>'", lineno);
      }
      if (ambient != 2 && ambient != 3) throw ParseError("ambient dimension must be 2 or 3", lineno);
      continue;
    }
    std::string extra;
    if (tag == "v") {
      Vec p(ambient);
      for (int k = 0; k < ambient; ++k) {
        if (!(ss >> p[k])) throw ParseError("vertex needs " + std::to_string(ambient) + " coordinates", lineno);
      }
      if (ss >> extra) throw ParseError("trailing data on vertex line", lineno);
      verts.push_back(p);
    } else if (tag == "f") {
      Face f;
      for (int k = 0; k < ambient; ++k) {
        if (!(ss >> f.v[k])) throw ParseError("face needs " + std::to_string(ambient) + " indices", lineno);
      }
      if (!(ss >> f.multiplicity)) throw ParseError("face is missing its multiplicity", lineno);
      if (ss >> extra) throw ParseError("trailing data on face line", lineno);
      if (f.multiplicity < 1) throw ParseError("multiplicity must be >= 1", lineno);
      faces.push_back(f);
      face_lines.push_back(lineno);
    } else if (tag == "b") {
      long long i = -1;
      if (!(ss >> i) || i < 0) throw ParseError("bad boundary index", lineno);
      if (ss >> extra) throw ParseError("trailing data on boundary line", lineno);
      bidx.push_back(static_cast<std::size_t>(i));
      bound_lines.push_back(lineno);
    } else {
      throw ParseError("unknown record '" + tag + "'", lineno);
    }
  }
  if (ambient == 0) throw ParseError("missing DVAR header", lineno == 0 ? 1 : lineno);

  for (std::size_t k = 0; k < faces.size(); ++k) {
    for (int j = 0; j < ambient; ++j) {
      if (faces[k].v[j] < 0 || faces[k].v[j] >= static_cast<int>(verts.size())) {
        throw ParseError("face index out of range", face_lines[k]);
      }
    }
    std::array<Vec, 3> pts;
    for (int j = 0; j < ambient; ++j) pts[j] = verts[faces[k].v[j]];
    if (!(simplex_volume(std::span<const Vec>(pts.data(), ambient)) > 0.0)) {
      throw ParseError("degenerate face", face_lines[k]);
    }
  }
  std::vector<std::uint8_t> boundary(verts.size(), 0);
  for (std::size_t k = 0; k < bidx.size(); ++k) {
    if (bidx[k] >= verts.size()) throw ParseError("boundary index out of range", bound_lines[k]);
    boundary[bidx[k]] = 1;
  }
  try {
    return DiscreteVarifold(ambient, std::move(verts), std::move(faces), std::move(boundary));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), lineno);
  }
}

void save_dvar(const std::string& path, const DiscreteVarifold& v, const std::string& header) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  if (!header.empty()) os << header;
  write_dvar(os, v);
}

DiscreteVarifold load_dvar(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return read_dvar(is);
}

}  // namespace varflow
