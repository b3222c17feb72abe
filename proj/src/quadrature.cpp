// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "mxfem/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

namespace mxfem
{

namespace
{

void check_order(int order)
{
  if (order < 1)
  {
    throw ArgumentError("quadrature order must be >= 1");
  }
  if (order > kMaxQuadratureOrder)
  {
    throw CapabilityError("quadrature order " + std::to_string(order) +
                          " exceeds implemented maximum " +
                          std::to_string(kMaxQuadratureOrder));
  }
}

int points_for_order(int order)
{
  // An n-point Gauss rule integrates degree 2n - 1 exactly.
  return (order + 2) / 2;
}

}  // namespace

LineRule gauss_jacobi(int n, int alpha)
{
  if (n < 1 || alpha < 0)
  {
    throw ArgumentError("gauss_jacobi needs n >= 1 and alpha >= 0");
  }
  // Golub-Welsch on [-1, 1] for the weight (1 - u)^alpha (1 + u)^0.
  const double a = alpha, b = 0.0;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; i++)
  {
    const double s = 2.0 * i + a + b;
    J(i, i) = (i == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (i + 1 < n)
    {
      const double m = i + 1.0;
      const double t = 2.0 * m + a + b;
      const double num = 4.0 * m * (m + a) * (m + b) * (m + a + b);
      const double den = t * t * (t + 1.0) * (t - 1.0);
      J(i, i + 1) = J(i + 1, i) = std::sqrt(num / den);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  // mu0 = int_{-1}^{1} (1 - u)^a du = 2^{a + 1} / (a + 1).
  const double mu0 = std::pow(2.0, a + 1.0) / (a + 1.0);
  LineRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  const double scale = std::pow(2.0, a + 1.0);
  for (int i = 0; i < n; i++)
  {
    const double u = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    rule.points[i] = 0.5 * (1.0 + u);
    rule.weights[i] = mu0 * v0 * v0 / scale;
  }
  return rule;
}

LineRule gauss_legendre(int order)
{
  check_order(order);
  return gauss_jacobi(points_for_order(order), 0);
}

TriangleRule build_triangle_quadrature(int order)
{
  check_order(order);
  const int n = points_for_order(order);
  const LineRule ra = gauss_jacobi(n, 1);
  const LineRule rb = gauss_jacobi(n, 0);
  TriangleRule rule;
  rule.order = order;
  for (std::size_t i = 0; i < ra.size(); i++)
  {
    for (std::size_t j = 0; j < rb.size(); j++)
    {
      const double s = ra.points[i];
      const double t = (1.0 - s) * rb.points[j];
      rule.points.emplace_back(s, t);
      rule.weights.push_back(ra.weights[i] * rb.weights[j]);
    }
  }
  return rule;
}

namespace
{

QuadratureRule collapsed_rule(int order)
{
  const int n = points_for_order(order);
  const LineRule ra = gauss_jacobi(n, 2);
  const LineRule rb = gauss_jacobi(n, 1);
  const LineRule rc = gauss_jacobi(n, 0);
  QuadratureRule rule;
  rule.order = order;
  rule.points.reserve(n * n * n);
  rule.weights.reserve(n * n * n);
  for (int i = 0; i < n; i++)
  {
    for (int j = 0; j < n; j++)
    {
      for (int l = 0; l < n; l++)
      {
        const double x = ra.points[i];
        const double y = (1.0 - x) * rb.points[j];
        const double z = (1.0 - x) * (1.0 - rb.points[j]) * rc.points[l];
        rule.points.emplace_back(x, y, z);
        rule.weights.push_back(ra.weights[i] * rb.weights[j] * rc.weights[l]);
      }
    }
  }
  return rule;
}

QuadratureRule symmetric_rule(int order)
{
  QuadratureRule rule;
  rule.order = order;
  if (order == 1)
  {
    rule.points.emplace_back(0.25, 0.25, 0.25);
    rule.weights.push_back(1.0 / 6.0);
    return rule;
  }
  // Four points on the lines from the centroid to the vertices.
  const double a = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
  const double b = (5.0 - std::sqrt(5.0)) / 20.0;
  rule.points = {Vec3(b, b, b), Vec3(a, b, b), Vec3(b, a, b), Vec3(b, b, a)};
  rule.weights.assign(4, 1.0 / 24.0);
  return rule;
}

}  // namespace

QuadratureRule build_quadrature(int order)
{
  check_order(order);
  static std::mutex mtx;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it != cache.end())
  {
    return it->second;
  }
  QuadratureRule rule = (order <= 2) ? symmetric_rule(order) : collapsed_rule(order);
  cache.emplace(order, rule);
  return rule;
}

}  // namespace mxfem
