// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MXFEM_QUADRATURE_HPP
#define MXFEM_QUADRATURE_HPP

#include <vector>

#include "mxfem/types.hpp"

namespace mxfem
{

// Quadrature on the reference tetrahedron {x, y, z >= 0, x + y + z <= 1}.
// Points are Cartesian. Weights are positive and sum to 1/6.
struct QuadratureRule
{
  int order = 0;
  std::vector<Vec3> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

// Rule on the reference triangle {s, t >= 0, s + t <= 1}; weights sum to 1/2.
struct TriangleRule
{
  int order = 0;
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

// Rule on [0, 1]; weights sum to 1.
struct LineRule
{
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

inline constexpr int kMaxQuadratureOrder = 40;

// Exact for polynomials of total degree <= order. Orders 1 and 2 use
// tabulated symmetric rules; higher orders use a collapsed-coordinate
// Gauss-Jacobi product rule (all weights positive).
QuadratureRule build_quadrature(int order);

TriangleRule build_triangle_quadrature(int order);

// Gauss-Jacobi rule on [0, 1] for the weight (1 - t)^alpha, n points.
LineRule gauss_jacobi(int n, int alpha);

// Gauss-Legendre rule on [0, 1] exact to degree `order`.
LineRule gauss_legendre(int order);

}  // namespace mxfem

#endif  // MXFEM_QUADRATURE_HPP
