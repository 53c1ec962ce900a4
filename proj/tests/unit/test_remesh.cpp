#include "varflow/mesh_gen.hpp"
#include "varflow/remesh.hpp"

#include <doctest.h>

#include <cmath>

using namespace varflow;

TEST_CASE("edge statistics") {
  const DiscreteVarifold sq = square_grid(4);
  CHECK(edge_lengths(sq).size() == 56u);
  CHECK(min_edge_length(sq) == doctest::Approx(0.25));
  CHECK(median_edge_length(sq) == doctest::Approx(0.25));
}

TEST_CASE("remesh splits stretched edges and keeps the boundary") {
  DiscreteVarifold d = hex_disk(3, 1.0);
  std::vector<Vec> pts = d.vertices();
  for (auto& p : pts) {
    if (p[0] > 0) p[0] *= 4.0;
  }
  d = with_vertices(d, pts);
  RemeshStats st;
  const DiscreteVarifold r = remesh(d, RemeshOptions{}, &st);
  CHECK(st.splits > 0);
  CHECK(std::abs(st.mass_delta) < 1e-12);
  std::size_t bd_before = 0, bd_after = 0;
  for (std::size_t i = 0; i < d.num_vertices(); ++i) bd_before += d.is_boundary(i);
  for (std::size_t i = 0; i < r.num_vertices(); ++i) bd_after += r.is_boundary(i);
  CHECK(bd_after == bd_before);
}

TEST_CASE("remesh collapses short edges with a small mass change") {
  const DiscreteVarifold s = icosphere(3, 1.0);
  std::vector<Vec> pts = s.vertices();
  const auto& f0 = s.faces()[0].v;
  pts[f0[1]] = pts[f0[0]] + 0.05 * (pts[f0[1]] - pts[f0[0]]);
  const DiscreteVarifold squeezed = with_vertices(s, pts);
  RemeshStats st;
  const DiscreteVarifold r = remesh(squeezed, RemeshOptions{}, &st);
  CHECK(st.collapses >= 1);
  CHECK(min_edge_length(r) > min_edge_length(squeezed));
  CHECK(std::abs(st.mass_delta) < 0.01 * s.mass());
}

TEST_CASE("remesh leaves a uniform mesh nearly unchanged") {
  const DiscreteVarifold s = icosphere(3, 1.0);
  RemeshStats st;
  const DiscreteVarifold r = remesh(s, RemeshOptions{}, &st);
  CHECK(st.splits == 0);
  CHECK(st.collapses == 0);
  CHECK(r.num_faces() == s.num_faces());
  CHECK(std::abs(st.mass_delta) < 1e-3 * s.mass());
}

TEST_CASE("segment meshes are returned unchanged") {
  const DiscreteVarifold c = circle_polygon(32, 1.0);
  const DiscreteVarifold r = remesh(c, RemeshOptions{});
  CHECK(r.num_vertices() == c.num_vertices());
}
