#include "varflow/quadrature.hpp"

#include "varflow/types.hpp"

#include <cmath>

namespace varflow {
namespace {

constexpr double kG = 0.21132486540518711775;  // (1 - 1/sqrt 3) / 2

constexpr std::array<QuadPoint, 1> kMidpoint{{{{0.5, 0.5, 0.0}, 1.0}}};
constexpr std::array<QuadPoint, 2> kGauss2{{
    {{1.0 - kG, kG, 0.0}, 0.5},
    {{kG, 1.0 - kG, 0.0}, 0.5},
}};

constexpr double kThird = 1.0 / 3.0;
constexpr std::array<QuadPoint, 1> kCentroid{{{{kThird, kThird, kThird}, 1.0}}};
constexpr std::array<QuadPoint, 3> kTri3{{
    {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0}, kThird},
    {{1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0}, kThird},
    {{1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}, kThird},
}};

constexpr double kA = 0.445948490915965;
constexpr double kWa = 0.223381589678011;
constexpr double kB = 0.091576213509771;
constexpr double kWb = 0.109951743655322;
constexpr std::array<QuadPoint, 6> kTri6{{
    {{1.0 - 2.0 * kA, kA, kA}, kWa},
    {{kA, 1.0 - 2.0 * kA, kA}, kWa},
    {{kA, kA, 1.0 - 2.0 * kA}, kWa},
    {{1.0 - 2.0 * kB, kB, kB}, kWb},
    {{kB, 1.0 - 2.0 * kB, kB}, kWb},
    {{kB, kB, 1.0 - 2.0 * kB}, kWb},
}};

}  // namespace

std::span<const QuadPoint> simplex_rule(int simplex_dim, int order) {
  if (order < 1 || order > 3) throw InvalidArgument("quad_order must be 1, 2 or 3");
  if (simplex_dim == 1) {
    if (order == 1) return kMidpoint;
    return kGauss2;
  }
  if (simplex_dim == 2) {
    if (order == 1) return kCentroid;
    if (order == 2) return kTri3;
    return kTri6;
  }
  throw InvalidArgument("simplex dimension must be 1 or 2");
}

std::vector<QuadPoint> composite_rule(int simplex_dim, int order, int depth) {
  if (depth < 0 || depth > 8) throw InvalidArgument("refinement depth must lie in 0..8");
  const auto base = simplex_rule(simplex_dim, order);
  using Bary = std::array<double, 3>;
  std::vector<std::array<Bary, 3>> pieces;
  if (simplex_dim == 1) {
    pieces.push_back({Bary{1, 0, 0}, Bary{0, 1, 0}, Bary{0, 0, 0}});
  } else {
    pieces.push_back({Bary{1, 0, 0}, Bary{0, 1, 0}, Bary{0, 0, 1}});
  }
  auto mid = [](const Bary& a, const Bary& b) { return Bary{(a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2}; };
  for (int d = 0; d < depth; ++d) {
    std::vector<std::array<Bary, 3>> next;
    for (const auto& p : pieces) {
      if (simplex_dim == 1) {
        const Bary m = mid(p[0], p[1]);
        next.push_back({p[0], m, Bary{}});
        next.push_back({m, p[1], Bary{}});
      } else {
        const Bary m01 = mid(p[0], p[1]), m12 = mid(p[1], p[2]), m20 = mid(p[2], p[0]);
        next.push_back({p[0], m01, m20});
        next.push_back({m01, p[1], m12});
        next.push_back({m20, m12, p[2]});
        next.push_back({m12, m20, m01});
      }
    }
    pieces = std::move(next);
  }
  std::vector<QuadPoint> out;
  out.reserve(pieces.size() * base.size());
  const double scale = 1.0 / static_cast<double>(pieces.size());
  for (const auto& p : pieces) {
    for (const auto& q : base) {
      Bary b{0, 0, 0};
      for (int i = 0; i <= simplex_dim; ++i) {
        for (int c = 0; c < 3; ++c) b[c] += q.bary[i] * p[i][c];
      }
      out.push_back({b, q.w * scale});
    }
  }
  return out;
}

void Summer::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

}  // namespace varflow
