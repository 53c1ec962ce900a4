#include "varflow/nucleation.hpp"

#include "varflow/mesh_gen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

namespace varflow {

GrowthEnvelope::GrowthEnvelope(double alpha_, double r0_, bool allow_critical_)
    : alpha(alpha_), r0(r0_), allow_critical(allow_critical_) {
  if (allow_critical ? !(alpha > 0.0) : !(alpha > 0.5)) throw InvalidArgument("alpha must exceed 1/2");
  if (!(r0 > 0.0 && r0 < 1.0)) throw InvalidArgument("r0 must lie in (0, 1)");
}

double envelope_value(const GrowthEnvelope& e, double s) {
  if (!(s < 1.0)) throw InvalidArgument("envelope_value: s must be < 1");
  if (s <= 0.0) return 0.0;
  return s * std::pow(std::log(1.0 / s), -e.alpha);
}

namespace {

struct Split {
  double rho;  // |x'|
  double z;    // x_{n+1}
};

Split split(const Vec& x, const Vec& normal) {
  const double z = x.dot(normal);
  return {(x - z * normal).norm(), z};
}

}  // namespace

EnvelopeCheck envelope_check(const DiscreteVarifold& v, const GrowthEnvelope& e, const Plane& t, double r0) {
  const Vec nu = t.normal();
  EnvelopeCheck out{true, 0.0, 0};
  for (const auto& x : v.vertices()) {
    const Split s = split(x, nu);
    if (!(s.rho < r0 && std::abs(s.z) < r0)) continue;
    ++out.checked;
    const double excess = std::abs(s.z) - envelope_value(e, s.rho);
    if (excess > 0.0) {
      out.pass = false;
      out.worst_excess = std::max(out.worst_excess, excess);
    }
  }
  return out;
}

std::optional<double> squash_normal(double delta, double rho, double z) {
  const double az = std::abs(z);
  if (rho > 1.0 + delta || az >= delta) return std::nullopt;
  if (rho <= 1.0) {
    if (az <= 0.5 * delta) return 0.0;
    return z > 0 ? 2.0 * z - delta : 2.0 * z + delta;
  }
  const double s = rho - 1.0;
  if (az <= s) return std::nullopt;
  if (z > 0) return z <= 0.5 * s + 0.5 * delta ? s : 2.0 * z - delta;
  return z >= -0.5 * s - 0.5 * delta ? -s : 2.0 * z + delta;
}

Vec squash_point(const SquashMap& m, const Plane& t, const Vec& x) {
  const Vec nu = t.normal();
  const double z = x.dot(nu);
  const Vec xp = x - z * nu;
  const auto nz = squash_normal(m.delta, xp.norm(), z);
  if (!nz) return x;
  return xp + *nz * nu;
}

double nucleation_height_ratio(const DiscreteVarifold& v, const Plane& t, double eps) {
  const Vec nu = t.normal();
  double worst = 0.0;
  for (const auto& x : v.vertices()) {
    if (x.norm() < 2.0 * eps) worst = std::max(worst, std::abs(x.dot(nu)) / eps);
  }
  return worst;
}

DiscreteVarifold nucleate(const DiscreteVarifold& v, const Plane& t, double eps, const SquashMap& m,
                          const NucleationOptions& opt) {
  if (!(eps > 0)) throw InvalidArgument("nucleate: eps must be positive");
  if (v.ambient() != 3 && v.ambient() != 2) throw InvalidArgument("nucleate: unsupported ambient dimension");
  if (!opt.skip_precondition) {
    const double ratio = nucleation_height_ratio(v, t, eps);
    if (ratio > 1.0 / 20.0) {
      throw PreconditionFailed("eps exceeds eps0: inside U_{2 eps} the sheets reach height " +
                               std::to_string(ratio) + " eps > eps/20 (nucleation precondition)");
    }
  }
  const Vec nu = t.normal();
  const std::size_t nv = v.num_vertices();
  std::vector<Vec> pts = v.vertices();
  std::vector<std::uint8_t> moved(nv, 0), flat(nv, 0), inside(nv, 0);
  for (std::size_t i = 0; i < nv; ++i) {
    const Vec& x = v.vertex(i);
    if (!(x.norm() < 2.0 * eps)) continue;
    inside[i] = 1;
    const double z = x.dot(nu);
    const Vec xp = x - z * nu;
    const auto nz = squash_normal(m.delta, xp.norm() / eps, z / eps);
    if (!nz) continue;
    pts[i] = xp + (eps * *nz) * nu;
    moved[i] = 1;
    flat[i] = *nz == 0.0;
  }

  // Weld coincident vertices inside the ball, lowest index wins.
  const double tol = opt.weld_tol * eps;
  std::vector<int> rep(nv);
  for (std::size_t i = 0; i < nv; ++i) rep[i] = static_cast<int>(i);
  using Cell = std::array<long long, 3>;
  std::map<Cell, std::vector<int>> grid;
  auto cell_of = [&](const Vec& p) {
    Cell c{0, 0, 0};
    for (int k = 0; k < p.size(); ++k) c[k] = static_cast<long long>(std::floor(p[k] / tol));
    return c;
  };
  for (std::size_t i = 0; i < nv; ++i) {
    if (!inside[i]) continue;
    const Cell c = cell_of(pts[i]);
    int found = -1;
    for (int dx = -1; dx <= 1 && found < 0; ++dx) {
      for (int dy = -1; dy <= 1 && found < 0; ++dy) {
        for (int dz = -1; dz <= 1 && found < 0; ++dz) {
          auto it = grid.find({c[0] + dx, c[1] + dy, c[2] + dz});
          if (it == grid.end()) continue;
          for (int j : it->second) {
            if ((pts[j] - pts[i]).norm() <= tol) {
              found = j;
              break;
            }
          }
        }
      }
    }
    if (found >= 0) {
      rep[i] = found;
    } else {
      grid[c].push_back(static_cast<int>(i));
    }
  }

  std::vector<Face> faces;
  std::map<std::array<int, 3>, std::size_t> seen;
  const int fs = v.face_size();
  std::array<Vec, 3> corner;
  for (const auto& f0 : v.faces()) {
    Face f = f0;
    bool all_flat = true;
    for (int k = 0; k < fs; ++k) {
      all_flat = all_flat && flat[f.v[k]];
      f.v[k] = rep[f.v[k]];
      corner[k] = pts[f.v[k]];
    }
    std::array<int, 3> key = f.v;
    std::sort(key.begin(), key.begin() + fs);
    if (std::adjacent_find(key.begin(), key.begin() + fs) != key.begin() + fs) continue;
    if (!(simplex_volume(std::span<const Vec>(corner.data(), fs)) > 0.0)) continue;
    auto it = seen.find(key);
    if (it != seen.end()) {
      faces[it->second].multiplicity = 1;
      continue;
    }
    if (all_flat) f.multiplicity = 1;
    seen.emplace(key, faces.size());
    faces.push_back(f);
  }

  // Compact, keeping the original vertex order.
  std::vector<int> remap(nv, -1);
  std::vector<std::uint8_t> used(nv, 0), bflag(nv, 0);
  for (const auto& f : faces) {
    for (int k = 0; k < fs; ++k) used[f.v[k]] = 1;
  }
  for (std::size_t i = 0; i < nv; ++i) {
    if (v.is_boundary(i)) bflag[rep[i]] = 1;
  }
  std::vector<Vec> out_pts;
  std::vector<std::uint8_t> out_b;
  for (std::size_t i = 0; i < nv; ++i) {
    if (!used[i]) continue;
    remap[i] = static_cast<int>(out_pts.size());
    out_pts.push_back(pts[i]);
    out_b.push_back(bflag[i]);
  }
  for (auto& f : faces) {
    for (int k = 0; k < fs; ++k) f.v[k] = remap[f.v[k]];
  }
  return DiscreteVarifold(v.ambient(), std::move(out_pts), std::move(faces), std::move(out_b));
}

namespace {

// Faces touching the complement of the open ball, keyed by the exact bit
// patterns of their sorted corner coordinates and multiplicity.
std::multiset<std::vector<std::uint64_t>> outer_faces(const DiscreteVarifold& v, double radius) {
  std::multiset<std::vector<std::uint64_t>> out;
  for (const auto& f : v.faces()) {
    bool outside = false;
    std::vector<std::vector<std::uint64_t>> corners;
    for (int k = 0; k < v.face_size(); ++k) {
      const Vec& x = v.vertex(f.v[k]);
      outside = outside || !(x.norm() < radius);
      std::vector<std::uint64_t> c;
      for (int j = 0; j < x.size(); ++j) c.push_back(std::bit_cast<std::uint64_t>(x[j]));
      corners.push_back(std::move(c));
    }
    if (!outside) continue;
    std::sort(corners.begin(), corners.end());
    std::vector<std::uint64_t> key;
    for (const auto& c : corners) key.insert(key.end(), c.begin(), c.end());
    key.push_back(static_cast<std::uint64_t>(f.multiplicity));
    out.insert(std::move(key));
  }
  return out;
}

}  // namespace

NucleationReport verify_nucleation(const DiscreteVarifold& before, const DiscreteVarifold& after, const Plane& t,
                             double eps, const GrowthEnvelope& e, int q, int quad_order) {
  NucleationReport r;
  const double r2 = 2.0 * eps;
  r.locality = outer_faces(before, r2) == outer_faces(after, r2);

  const Vec nu = t.normal();
  r.height = true;
  for (const auto& x : after.vertices()) {
    if (!(x.norm() < r2)) continue;
    const Split s = split(x, nu);
    const double excess = std::abs(s.z) - envelope_value(e, s.rho);
    if (excess > 0.0) {
      r.height = false;
      r.worst_height_excess = std::max(r.worst_height_excess, excess);
    }
  }

  const int n = after.dim();
  auto in_ball = [&](const Vec& x) { return x.norm() < r2 ? 1.0 : 0.0; };
  auto in_hole = [&](const Vec& x) { return (x.norm() < r2 && split(x, nu).rho < eps) ? 1.0 : 0.0; };
  r.mass_ball_before = weight_measure(before, in_ball, quad_order);
  r.mass_ball_after = weight_measure(after, in_ball, quad_order);
  r.mass_bound_rhs = std::pow(4.0 * eps, n) * unit_ball_volume(n) * (q + 1);
  r.mass_bound = r.mass_ball_after <= r.mass_bound_rhs;
  r.mass_hole_before = weight_measure(before, in_hole, quad_order);
  r.mass_hole_after = weight_measure(after, in_hole, quad_order);
  r.mass_hole_rhs = unit_ball_volume(n) * std::pow(eps, n);
  r.hole = r.mass_hole_after <= 1.02 * r.mass_hole_rhs;
  return r;
}

FixtureKind parse_fixture_kind(const std::string& s) {
  if (s == "flat_stack") return FixtureKind::flat_stack;
  if (s == "branched_disk") return FixtureKind::branched_disk;
  if (s == "perturbed_stack") return FixtureKind::perturbed_stack;
  throw InvalidArgument("unknown fixture kind '" + s + "'");
}

std::string to_string(FixtureKind k) {
  switch (k) {
    case FixtureKind::flat_stack: return "flat_stack";
    case FixtureKind::branched_disk: return "branched_disk";
    case FixtureKind::perturbed_stack: return "perturbed_stack";
  }
  return "?";
}

DiscreteVarifold make_fixture(FixtureKind kind, int q, int level, const FixtureParams& p) {
  if (q < 1) throw InvalidArgument("fixture needs Q >= 1");
  const DiscreteVarifold base = hex_disk(level, p.radius);
  const std::size_t nb = base.num_vertices();
  const bool share_center = kind == FixtureKind::branched_disk;

  std::vector<Vec> pts;
  std::vector<std::uint8_t> bd;
  std::vector<Face> faces;
  if (share_center) {
    pts.push_back(base.vertex(0));
    bd.push_back(base.boundary()[0]);
  }
  for (int i = 0; i < q; ++i) {
    const double offset = (i - 0.5 * (q - 1)) * p.spacing;
    const double sign = q == 1 ? 0.0 : -1.0 + 2.0 * i / (q - 1);
    std::vector<int> index(nb);
    for (std::size_t j = 0; j < nb; ++j) {
      if (share_center && j == 0) {
        index[j] = 0;
        continue;
      }
      Vec x = base.vertex(j);
      const double r = std::hypot(x[0], x[1]);
      switch (kind) {
        case FixtureKind::flat_stack: x[2] = offset; break;
        case FixtureKind::branched_disk: x[2] = sign * p.amplitude * std::pow(r, 1.0 + p.beta); break;
        case FixtureKind::perturbed_stack: {
          // harmonic cubic (monkey saddle), scaled to reach `amplitude` at the rim
          const double cubic = x[0] * x[0] * x[0] - 3.0 * x[0] * x[1] * x[1];
          x[2] = offset + p.amplitude * cubic / (p.radius * p.radius * p.radius);
          break;
        }
      }
      index[j] = static_cast<int>(pts.size());
      pts.push_back(x);
      bd.push_back(base.boundary()[j]);
    }
    for (auto f : base.faces()) {
      for (int k = 0; k < 3; ++k) f.v[k] = index[f.v[k]];
      faces.push_back(f);
    }
  }
  return DiscreteVarifold(3, std::move(pts), std::move(faces), std::move(bd));
}

}  // namespace varflow
