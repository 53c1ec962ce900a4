#pragma once

#include "varflow/varifold.hpp"

namespace varflow {

struct RemeshOptions {
  double split_factor = 2.0;     // split edges longer than this times the median
  double collapse_factor = 0.5;  // collapse edges shorter than this times the median
  double min_quality = 0.05;     // reject collapses producing worse triangles
  double relax = 0.5;            // tangential smoothing step, 0 disables
};

struct RemeshStats {
  int splits = 0;
  int collapses = 0;
  int rejected = 0;
  int relaxed = 0;
  double mass_delta = 0.0;
};

/// One pass of edge splits, edge collapses and tangential smoothing on a
/// triangle mesh.
/// Boundary vertices never move and boundary edges are never split.
/// Junction vertices (edges with a face count other than two) keep their
/// position when collapsed against a regular vertex. Segment meshes are
/// returned unchanged.
DiscreteVarifold remesh(const DiscreteVarifold& v, const RemeshOptions& opt, RemeshStats* stats = nullptr);

/// Edge lengths of all distinct edges.
std::vector<double> edge_lengths(const DiscreteVarifold& v);
double min_edge_length(const DiscreteVarifold& v);
double median_edge_length(const DiscreteVarifold& v);

}  // namespace varflow
