#pragma once

#include "varflow/varifold.hpp"

namespace varflow {

/// Flat disk of the given radius in the x1x2-plane of R^3. 2^level
/// concentric rings, ring i carrying 6i vertices; 6*4^level faces.
/// Outer ring vertices are flagged as boundary.
DiscreteVarifold hex_disk(int level, double radius);

/// [0,1]^2 in the x1x2-plane of R^3, n x n cells split into 2 triangles each.
DiscreteVarifold square_grid(int n);

/// Loop-subdivided icosahedron projected to the sphere; 20*4^level faces.
DiscreteVarifold icosphere(int level, double radius, const Vec& center = Vec::Zero(3));

/// Regular closed polygon with `segments` edges inscribed in a circle in R^2.
DiscreteVarifold circle_polygon(int segments, double radius);

/// Open tube of given radius around the x3-axis, |x3| <= length/2.
/// End rings are boundary.
DiscreteVarifold cylinder_tube(double radius, double length, int n_theta, int n_z);

/// Disjoint union; vertex indices of `b` are shifted.
DiscreteVarifold disjoint_union(const DiscreteVarifold& a, const DiscreteVarifold& b);

}  // namespace varflow
