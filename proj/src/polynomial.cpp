// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "mxfem/polynomial.hpp"

#include <vector>

namespace mxfem::poly
{

namespace
{

struct MonomialTable
{
  std::vector<std::array<int, 3>> exps;
  // Dense lookup [a][b][c] -> index, -1 when a+b+c > kMaxDegree.
  std::array<std::array<std::array<int, kMaxDegree + 1>, kMaxDegree + 1>, kMaxDegree + 1> lookup;

  MonomialTable()
  {
    for (auto &plane : lookup)
    {
      for (auto &row : plane)
      {
        row.fill(-1);
      }
    }
    for (int d = 0; d <= kMaxDegree; d++)
    {
      for (int a = d; a >= 0; a--)
      {
        for (int b = d - a; b >= 0; b--)
        {
          const int c = d - a - b;
          lookup[a][b][c] = static_cast<int>(exps.size());
          exps.push_back({a, b, c});
        }
      }
    }
  }
};

const MonomialTable &table()
{
  static const MonomialTable t;
  return t;
}

}  // namespace

int monomial_count(int degree)
{
  if (degree < 0)
  {
    return 0;
  }
  return (degree + 1) * (degree + 2) * (degree + 3) / 6;
}

const std::array<int, 3> &exponents(int index)
{
  return table().exps[index];
}

int index_of(int a, int b, int c)
{
  if (a < 0 || b < 0 || c < 0 || a + b + c > kMaxDegree)
  {
    throw CapabilityError("monomial degree exceeds polynomial table");
  }
  return table().lookup[a][b][c];
}

int total_degree(int index)
{
  const auto &e = exponents(index);
  return e[0] + e[1] + e[2];
}

Poly zero()
{
  return Poly::Zero(monomial_count(kMaxDegree));
}

Poly monomial(int a, int b, int c, double coeff)
{
  Poly p = zero();
  p(index_of(a, b, c)) = coeff;
  return p;
}

Eigen::VectorXd monomial_values(const Vec3 &x, int degree)
{
  const int n = monomial_count(degree);
  // Powers up to degree in each coordinate.
  std::array<std::array<double, kMaxDegree + 1>, 3> pw;
  for (int d = 0; d < 3; d++)
  {
    pw[d][0] = 1.0;
    for (int j = 1; j <= degree; j++)
    {
      pw[d][j] = pw[d][j - 1] * x(d);
    }
  }
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; i++)
  {
    const auto &e = exponents(i);
    v(i) = pw[0][e[0]] * pw[1][e[1]] * pw[2][e[2]];
  }
  return v;
}

double eval(const Poly &p, const Vec3 &x)
{
  const int deg = degree(p);
  if (deg < 0)
  {
    return 0.0;
  }
  const int n = monomial_count(deg);
  return p.head(n).dot(monomial_values(x, deg));
}

Poly derivative(const Poly &p, int dir)
{
  Poly out = zero();
  for (int i = 0; i < p.size(); i++)
  {
    if (p(i) == 0.0)
    {
      continue;
    }
    auto e = exponents(i);
    if (e[dir] == 0)
    {
      continue;
    }
    const double f = e[dir];
    e[dir] -= 1;
    out(index_of(e[0], e[1], e[2])) += f * p(i);
  }
  return out;
}

Poly times_coordinate(const Poly &p, int dir)
{
  Poly out = zero();
  for (int i = 0; i < p.size(); i++)
  {
    if (p(i) == 0.0)
    {
      continue;
    }
    auto e = exponents(i);
    e[dir] += 1;
    out(index_of(e[0], e[1], e[2])) += p(i);
  }
  return out;
}

int degree(const Poly &p, double tol)
{
  int deg = -1;
  for (int i = 0; i < p.size(); i++)
  {
    if (std::abs(p(i)) > tol)
    {
      deg = std::max(deg, total_degree(i));
    }
  }
  return deg;
}

Poly divergence(const VecPoly &v)
{
  return derivative(v[0], 0) + derivative(v[1], 1) + derivative(v[2], 2);
}

VecPoly curl(const VecPoly &v)
{
  return {derivative(v[2], 1) - derivative(v[1], 2), derivative(v[0], 2) - derivative(v[2], 0),
          derivative(v[1], 0) - derivative(v[0], 1)};
}

VecPoly gradient(const Poly &p)
{
  return {derivative(p, 0), derivative(p, 1), derivative(p, 2)};
}

VecPoly cross_x(const VecPoly &v)
{
  // (y v_z - z v_y, z v_x - x v_z, x v_y - y v_x)
  return {times_coordinate(v[2], 1) - times_coordinate(v[1], 2),
          times_coordinate(v[0], 2) - times_coordinate(v[2], 0),
          times_coordinate(v[1], 0) - times_coordinate(v[0], 1)};
}

}  // namespace mxfem::poly
