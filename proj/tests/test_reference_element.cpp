// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <doctest.h>

#include "mxfem/reference_element.hpp"

using namespace mxfem;

namespace
{

double factorial(int n)
{
  double f = 1.0;
  for (int i = 2; i <= n; i++)
  {
    f *= i;
  }
  return f;
}

// Exact integral of x^a y^b z^c over the reference tetrahedron.
double monomial_integral(int a, int b, int c)
{
  return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
}

std::vector<Vec3> random_ref_points(int n, unsigned seed)
{
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec3> pts;
  while (static_cast<int>(pts.size()) < n)
  {
    Vec3 x(u(gen), u(gen), u(gen));
    if (x.sum() <= 1.0)
    {
      pts.push_back(x);
    }
  }
  return pts;
}

// Sample matrix: rows (point, component), columns basis functions.
Eigen::MatrixXd sample_values(const ShapeBasis &b, const std::vector<Vec3> &pts)
{
  Eigen::MatrixXd S(pts.size() * b.value_size(), b.dim());
  Eigen::MatrixXd v, d;
  for (std::size_t q = 0; q < pts.size(); q++)
  {
    b.eval(pts[q], v, d);
    for (int c = 0; c < b.value_size(); c++)
    {
      S.row(q * b.value_size() + c) = v.col(c).transpose();
    }
  }
  return S;
}

double lsq_residual(const Eigen::MatrixXd &A, const Eigen::VectorXd &y)
{
  const Eigen::VectorXd x = A.colPivHouseholderQr().solve(y);
  return (A * x - y).norm() / std::max(1.0, y.norm());
}

}  // namespace

TEST_CASE("quadrature weights are positive and sum to the reference volume")
{
  for (int order = 1; order <= 12; order++)
  {
    const auto rule = build_quadrature(order);
    double sum = 0.0;
    for (double w : rule.weights)
    {
      CHECK(w > 0.0);
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  }
}

TEST_CASE("quadrature is exact up to its declared order")
{
  for (int order = 1; order <= 12; order++)
  {
    const auto rule = build_quadrature(order);
    for (int i = 0; i < poly::monomial_count(std::min(order, poly::kMaxDegree)); i++)
    {
      const auto &e = poly::exponents(i);
      double s = 0.0;
      for (std::size_t q = 0; q < rule.size(); q++)
      {
        s += rule.weights[q] * poly::eval(poly::monomial(e[0], e[1], e[2]), rule.points[q]);
      }
      CHECK(std::abs(s - monomial_integral(e[0], e[1], e[2])) < 1e-12);
    }
  }
  // Frozen values from the monomial formula.
  const auto r2 = build_quadrature(2);
  double xy = 0.0;
  for (std::size_t q = 0; q < r2.size(); q++)
  {
    xy += r2.weights[q] * r2.points[q](0) * r2.points[q](1);
  }
  CHECK(xy == doctest::Approx(1.0 / 120.0).epsilon(1e-14));
  const auto r3 = build_quadrature(3);
  double x3 = 0.0;
  for (std::size_t q = 0; q < r3.size(); q++)
  {
    x3 += r3.weights[q] * std::pow(r3.points[q](0), 3);
  }
  // 3! / 6! = 1/120
  CHECK(x3 == doctest::Approx(1.0 / 120.0).epsilon(1e-14));
}

TEST_CASE("quadrature order errors")
{
  CHECK_THROWS_AS(build_quadrature(0), ArgumentError);
  CHECK_THROWS_AS(build_quadrature(kMaxQuadratureOrder + 1), CapabilityError);
}

TEST_CASE("triangle and line rules")
{
  const auto tri = build_triangle_quadrature(6);
  double sum = 0.0, s2t = 0.0;
  for (std::size_t q = 0; q < tri.size(); q++)
  {
    sum += tri.weights[q];
    s2t += tri.weights[q] * tri.points[q](0) * tri.points[q](0) * tri.points[q](1);
  }
  CHECK(sum == doctest::Approx(0.5).epsilon(1e-14));
  // int s^2 t = 2! 1! / 5! = 1/60
  CHECK(s2t == doctest::Approx(1.0 / 60.0).epsilon(1e-13));
  const auto line = gauss_legendre(9);
  double t9 = 0.0;
  for (std::size_t q = 0; q < line.size(); q++)
  {
    t9 += line.weights[q] * std::pow(line.points[q], 9);
  }
  CHECK(t9 == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("basis dimensions match the known formulas")
{
  CHECK(build_shape_basis(Family::nedelec1, 1).dim() == 6);
  CHECK(build_shape_basis(Family::nedelec1, 2).dim() == 20);
  CHECK(build_shape_basis(Family::nedelec1, 3).dim() == 45);
  CHECK(build_shape_basis(Family::nedelec2, 1).dim() == 12);
  CHECK(build_shape_basis(Family::nedelec2, 2).dim() == 30);
  CHECK(build_shape_basis(Family::raviart_thomas, 1).dim() == 4);
  CHECK(build_shape_basis(Family::raviart_thomas, 2).dim() == 15);
  CHECK(build_shape_basis(Family::lagrange, 1).dim() == 4);
  CHECK(build_shape_basis(Family::lagrange, 3).dim() == 20);
  CHECK_THROWS_AS(build_shape_basis(Family::nedelec1, 0), CapabilityError);
  CHECK_THROWS_AS(build_shape_basis(Family::nedelec1, 9), CapabilityError);
  CHECK_THROWS_AS(family_from_string("hermite"), CapabilityError);
}

TEST_CASE("nedelec1 p=2 dimension by brute-force rank of sampled spanning set")
{
  // P_1^3 + x × (homogeneous P_1)^3, evaluated independently of the library's
  // polynomial machinery.
  std::vector<std::function<Vec3(const Vec3 &)>> span;
  for (int c = 0; c < 3; c++)
  {
    span.push_back([c](const Vec3 &) { return Vec3::Unit(c); });
    for (int d = 0; d < 3; d++)
    {
      span.push_back([c, d](const Vec3 &x) { return Vec3(Vec3::Unit(c) * x(d)); });
      span.push_back([c, d](const Vec3 &x) { return Vec3(x.cross(Vec3::Unit(c) * x(d))); });
    }
  }
  const auto pts = random_ref_points(40, 7);
  Eigen::MatrixXd S(3 * pts.size(), span.size());
  for (std::size_t q = 0; q < pts.size(); q++)
  {
    for (std::size_t j = 0; j < span.size(); j++)
    {
      S.block(3 * q, j, 3, 1) = span[j](pts[q]);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
  svd.setThreshold(1e-10);
  CHECK(svd.rank() == 20);
  CHECK(space_dimension(Family::nedelec1, 2) == 20);
}

TEST_CASE("unisolvence: DOF functionals applied to the basis give the identity")
{
  const std::vector<std::pair<Family, int>> cases = {
      {Family::nedelec1, 1}, {Family::nedelec1, 2},       {Family::nedelec1, 3},
      {Family::nedelec1, 4}, {Family::nedelec2, 1},       {Family::nedelec2, 2},
      {Family::nedelec2, 3}, {Family::raviart_thomas, 1}, {Family::raviart_thomas, 2},
      {Family::raviart_thomas, 3}, {Family::lagrange, 1}, {Family::lagrange, 2},
      {Family::lagrange, 3}, {Family::lagrange, 4},       {Family::lagrange, 5}};
  for (const auto &[fam, p] : cases)
  {
    CAPTURE(to_string(fam));
    CAPTURE(p);
    const ShapeBasis &b = shape_basis(fam, p);
    Eigen::MatrixXd D(b.dim(), b.dim());
    for (int k = 0; k < b.dim(); k++)
    {
      FieldFn f = [&b, k](const Vec3 &x) -> Vec3c
      {
        Eigen::MatrixXd v, d;
        b.eval(x, v, d);
        Vec3c out = Vec3c::Zero();
        for (int c = 0; c < b.value_size(); c++)
        {
          out(c) = v(k, c);
        }
        return out;
      };
      D.col(k) = b.apply_dofs(f, b.default_moment_order()).real();
    }
    CHECK((D - Eigen::MatrixXd::Identity(b.dim(), b.dim())).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("lowest-order Whitney functions")
{
  const ShapeBasis &b = shape_basis(Family::nedelec1, 1);
  const auto pts = random_ref_points(10, 3);
  Eigen::MatrixXd v, d0, d;
  b.eval(pts[0], v, d0);
  for (const auto &x : pts)
  {
    b.eval(x, v, d);
    CHECK((d - d0).cwiseAbs().maxCoeff() < 1e-12);
  }
  // Tangential component on its own edge midpoint is 1/|edge|.
  for (int e = 0; e < 6; e++)
  {
    const auto &ed = reference_tet::edges()[e];
    const Vec3 xa = reference_tet::vertices()[ed[0]], xb = reference_tet::vertices()[ed[1]];
    const Vec3 t = xb - xa;
    b.eval(0.5 * (xa + xb), v, d);
    const double tang = v.row(e).dot(t / t.norm());
    CHECK(tang == doctest::Approx(1.0 / t.norm()).epsilon(1e-12));
    // Whitney form lambda_a grad lambda_b - lambda_b grad lambda_a.
    const auto lam = reference_tet::barycentric(pts[1]);
    const std::array<Vec3, 4> grad = {Vec3(-1, -1, -1), Vec3(1, 0, 0), Vec3(0, 1, 0),
                                      Vec3(0, 0, 1)};
    const Vec3 w = lam[ed[0]] * grad[ed[1]] - lam[ed[1]] * grad[ed[0]];
    b.eval(pts[1], v, d);
    CHECK((v.row(e).transpose() - w).norm() < 1e-12);
  }
}

TEST_CASE("linear Lagrange: partition of unity and constant gradients")
{
  const ShapeBasis &b = shape_basis(Family::lagrange, 1);
  Eigen::MatrixXd v, g, g0;
  b.eval(Vec3(0.1, 0.2, 0.3), v, g0);
  for (const auto &x : random_ref_points(20, 11))
  {
    b.eval(x, v, g);
    CHECK(v.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK((g - g0).cwiseAbs().maxCoeff() < 1e-13);
  }
  for (int p = 2; p <= 4; p++)
  {
    const ShapeBasis &bp = shape_basis(Family::lagrange, p);
    bp.eval(Vec3(0.3, 0.1, 0.2), v, g);
    CHECK(v.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("lowest-order Raviart-Thomas has constant divergence")
{
  const ShapeBasis &b = shape_basis(Family::raviart_thomas, 1);
  CHECK(b.dim() == 4);
  Eigen::MatrixXd v, d, d0;
  b.eval(Vec3(0.25, 0.25, 0.25), v, d0);
  for (const auto &x : random_ref_points(10, 5))
  {
    b.eval(x, v, d);
    CHECK((d - d0).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("nedelec1 is contained in nedelec2 of the same degree")
{
  const auto pts = random_ref_points(60, 13);
  for (int p = 1; p <= 3; p++)
  {
    const Eigen::MatrixXd S1 = sample_values(shape_basis(Family::nedelec1, p), pts);
    const Eigen::MatrixXd S2 = sample_values(shape_basis(Family::nedelec2, p), pts);
    for (int j = 0; j < S1.cols(); j++)
    {
      CHECK(lsq_residual(S2, S1.col(j)) < 1e-10);
    }
  }
}

TEST_CASE("gradients of Lagrange functions lie in the nedelec1 span")
{
  const auto pts = random_ref_points(60, 17);
  for (int p = 1; p <= 4; p++)
  {
    const ShapeBasis &lag = shape_basis(Family::lagrange, p);
    const Eigen::MatrixXd S = sample_values(shape_basis(Family::nedelec1, p), pts);
    Eigen::MatrixXd G(3 * pts.size(), lag.dim());
    Eigen::MatrixXd v, g;
    for (std::size_t q = 0; q < pts.size(); q++)
    {
      lag.eval(pts[q], v, g);
      G.block(3 * q, 0, 3, lag.dim()) = g.transpose();
    }
    for (int j = 0; j < G.cols(); j++)
    {
      CHECK(lsq_residual(S, G.col(j)) < 1e-10);
    }
  }
}

TEST_CASE("evaluate_basis rejects points outside the reference tetrahedron")
{
  const ShapeBasis &b = shape_basis(Family::nedelec1, 1);
  CHECK_NOTHROW(evaluate_basis(b, {Vec3(0.0, 0.0, 1.0)}));
  CHECK_THROWS_AS(evaluate_basis(b, {Vec3(0.6, 0.6, 0.0)}), DomainError);
  const auto t = evaluate_basis(b, {Vec3(0.1, 0.1, 0.1), Vec3(0.2, 0.3, 0.1)});
  CHECK(t.values.size() == 2);
  CHECK(t.values[0].rows() == 6);
  CHECK(t.derivs[1].cols() == 3);
}
