// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "mxfem/reference_element.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace mxfem
{

std::string to_string(Family f)
{
  switch (f)
  {
    case Family::nedelec1:
      return "nedelec1";
    case Family::nedelec2:
      return "nedelec2";
    case Family::raviart_thomas:
      return "raviart_thomas";
    case Family::lagrange:
      return "lagrange";
  }
  return "unknown";
}

Family family_from_string(const std::string &s)
{
  if (s == "nedelec1")
  {
    return Family::nedelec1;
  }
  if (s == "nedelec2")
  {
    return Family::nedelec2;
  }
  if (s == "raviart_thomas" || s == "rt")
  {
    return Family::raviart_thomas;
  }
  if (s == "lagrange")
  {
    return Family::lagrange;
  }
  throw CapabilityError("unsupported element family '" + s + "'");
}

MapKind map_kind(Family f)
{
  switch (f)
  {
    case Family::nedelec1:
    case Family::nedelec2:
      return MapKind::hcurl;
    case Family::raviart_thomas:
      return MapKind::hdiv;
    case Family::lagrange:
      return MapKind::h1;
  }
  return MapKind::h1;
}

namespace reference_tet
{

const std::array<Vec3, 4> &vertices()
{
  static const std::array<Vec3, 4> v = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0),
                                        Vec3(0, 0, 1)};
  return v;
}

const std::array<std::array<int, 2>, 6> &edges()
{
  static const std::array<std::array<int, 2>, 6> e = {
      {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  return e;
}

const std::array<std::array<int, 3>, 4> &faces()
{
  static const std::array<std::array<int, 3>, 4> f = {{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};
  return f;
}

std::array<double, 4> barycentric(const Vec3 &x)
{
  return {1.0 - x(0) - x(1) - x(2), x(0), x(1), x(2)};
}

bool contains(const Vec3 &x, double tol)
{
  for (double l : barycentric(x))
  {
    if (l < -tol)
    {
      return false;
    }
  }
  return true;
}

}  // namespace reference_tet

double shifted_legendre(int j, double t)
{
  const double x = 2.0 * t - 1.0;
  double p0 = 1.0, p1 = x;
  if (j == 0)
  {
    return p0;
  }
  for (int n = 1; n < j; n++)
  {
    const double p2 = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

int space_dimension(Family family, int p)
{
  switch (family)
  {
    case Family::nedelec1:
      return p * (p + 2) * (p + 3) / 2;
    case Family::nedelec2:
      return (p + 1) * (p + 2) * (p + 3) / 2;
    case Family::raviart_thomas:
      return p * (p + 1) * (p + 3) / 2;
    case Family::lagrange:
      return (p + 1) * (p + 2) * (p + 3) / 6;
  }
  return 0;
}

int max_supported_degree(Family family)
{
  switch (family)
  {
    case Family::nedelec1:
      return 5;
    case Family::nedelec2:
      return 4;
    case Family::raviart_thomas:
      return 5;
    case Family::lagrange:
      return 7;
  }
  return 0;
}

namespace
{

// Exponent pairs (a, b) of s^a t^b with a + b <= d, graded.
std::vector<std::array<int, 2>> monomials_2d(int d)
{
  std::vector<std::array<int, 2>> out;
  for (int deg = 0; deg <= d; deg++)
  {
    for (int a = deg; a >= 0; a--)
    {
      out.push_back({a, deg - a});
    }
  }
  return out;
}

std::vector<std::array<int, 2>> homogeneous_2d(int d)
{
  std::vector<std::array<int, 2>> out;
  if (d < 0)
  {
    return out;
  }
  for (int a = d; a >= 0; a--)
  {
    out.push_back({a, d - a});
  }
  return out;
}

std::vector<std::array<int, 3>> monomials_3d(int d)
{
  std::vector<std::array<int, 3>> out;
  for (int i = 0; i < poly::monomial_count(d); i++)
  {
    out.push_back(poly::exponents(i));
  }
  return out;
}

std::vector<std::array<int, 3>> homogeneous_3d(int d)
{
  std::vector<std::array<int, 3>> out;
  if (d < 0)
  {
    return out;
  }
  for (int i = poly::monomial_count(d - 1); i < poly::monomial_count(d); i++)
  {
    out.push_back(poly::exponents(i));
  }
  return out;
}

double pow_int(double x, int n)
{
  double r = 1.0;
  for (int i = 0; i < n; i++)
  {
    r *= x;
  }
  return r;
}

Complex dot(const Vec3c &v, const Vec3 &t)
{
  return v(0) * t(0) + v(1) * t(1) + v(2) * t(2);
}

// Moment test functions on faces, evaluated at (s, t). Each returns a list of
// 2-vectors (for tangential moments) or scalars in component 0.
std::vector<Eigen::Vector2d> face_tests(Family fam, int p, double s, double t)
{
  std::vector<Eigen::Vector2d> out;
  if (fam == Family::nedelec1)
  {
    for (int c = 0; c < 2; c++)
    {
      for (const auto &m : monomials_2d(p - 2))
      {
        const double q = pow_int(s, m[0]) * pow_int(t, m[1]);
        out.emplace_back(c == 0 ? q : 0.0, c == 1 ? q : 0.0);
      }
    }
  }
  else if (fam == Family::nedelec2)
  {
    // Two-dimensional Raviart-Thomas space of degree p - 1.
    for (int c = 0; c < 2; c++)
    {
      for (const auto &m : monomials_2d(p - 2))
      {
        const double q = pow_int(s, m[0]) * pow_int(t, m[1]);
        out.emplace_back(c == 0 ? q : 0.0, c == 1 ? q : 0.0);
      }
    }
    for (const auto &m : homogeneous_2d(p - 2))
    {
      const double q = pow_int(s, m[0]) * pow_int(t, m[1]);
      out.emplace_back(s * q, t * q);
    }
  }
  else if (fam == Family::raviart_thomas)
  {
    for (const auto &m : monomials_2d(p - 1))
    {
      out.emplace_back(pow_int(s, m[0]) * pow_int(t, m[1]), 0.0);
    }
  }
  return out;
}

std::vector<Vec3> cell_tests(Family fam, int p, const Vec3 &x)
{
  std::vector<Vec3> out;
  auto mono = [&](const std::array<int, 3> &e)
  { return pow_int(x(0), e[0]) * pow_int(x(1), e[1]) * pow_int(x(2), e[2]); };
  int vec_degree = -1;
  if (fam == Family::nedelec1 || fam == Family::nedelec2)
  {
    vec_degree = p - 3;
  }
  else if (fam == Family::raviart_thomas)
  {
    vec_degree = p - 2;
  }
  for (int c = 0; c < 3; c++)
  {
    for (const auto &m : monomials_3d(vec_degree))
    {
      Vec3 v = Vec3::Zero();
      v(c) = mono(m);
      out.push_back(v);
    }
  }
  if (fam == Family::nedelec2)
  {
    for (const auto &m : homogeneous_3d(p - 3))
    {
      out.push_back(x * mono(m));
    }
  }
  return out;
}

int lattice_count(EntityKind kind, int p)
{
  switch (kind)
  {
    case EntityKind::vertex:
      return 1;
    case EntityKind::edge:
      return std::max(p - 1, 0);
    case EntityKind::face:
      return std::max((p - 1) * (p - 2) / 2, 0);
    case EntityKind::cell:
      return std::max((p - 1) * (p - 2) * (p - 3) / 6, 0);
  }
  return 0;
}

std::array<int, 4> entity_counts(Family fam, int p)
{
  switch (fam)
  {
    case Family::nedelec1:
      return {0, p, p * (p - 1), p * (p - 1) * (p - 2) / 2};
    case Family::nedelec2:
      return {0, p + 1, (p - 1) * (p + 1), (p - 2) * (p - 1) * (p + 1) / 2};
    case Family::raviart_thomas:
      return {0, 0, p * (p + 1) / 2, p * (p - 1) * (p + 1) / 2};
    case Family::lagrange:
      return {1, lattice_count(EntityKind::edge, p), lattice_count(EntityKind::face, p),
              lattice_count(EntityKind::cell, p)};
  }
  return {0, 0, 0, 0};
}

}  // namespace

int ShapeBasis::first_dof(EntityKind k, int entity) const
{
  int offset = 0;
  const int counts[4] = {4, 6, 4, 1};
  for (int kk = 0; kk < static_cast<int>(k); kk++)
  {
    offset += counts[kk] * per_entity_[kk];
  }
  return offset + entity * per_entity_[static_cast<int>(k)];
}

Eigen::VectorXcd ShapeBasis::vertex_functionals(const Vec3 &xa, const FieldFn &f) const
{
  Eigen::VectorXcd out(per_entity_[0]);
  if (per_entity_[0] > 0)
  {
    out(0) = f(xa)(0);
  }
  return out;
}

Eigen::VectorXcd ShapeBasis::edge_functionals(const Vec3 &xa, const Vec3 &xb, const FieldFn &f,
                                              int quad_order) const
{
  const int n = per_entity_[1];
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  if (n == 0)
  {
    return out;
  }
  const Vec3 tau = xb - xa;
  if (family_ == Family::lagrange)
  {
    for (int j = 0; j < n; j++)
    {
      const double t = (j + 1.0) / degree_;
      out(j) = f(xa + t * tau)(0);
    }
    return out;
  }
  const LineRule rule = gauss_legendre(quad_order);
  for (std::size_t q = 0; q < rule.size(); q++)
  {
    const double t = rule.points[q];
    const Complex vt = dot(f(xa + t * tau), tau) * rule.weights[q];
    for (int j = 0; j < n; j++)
    {
      out(j) += vt * shifted_legendre(j, t);
    }
  }
  return out;
}

Eigen::VectorXcd ShapeBasis::face_functionals(const Vec3 &xa, const Vec3 &xb, const Vec3 &xc,
                                              const FieldFn &f, int quad_order) const
{
  const int n = per_entity_[2];
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  if (n == 0)
  {
    return out;
  }
  const Vec3 t1 = xb - xa, t2 = xc - xa;
  if (family_ == Family::lagrange)
  {
    int j = 0;
    for (int b = 1; b < degree_; b++)
    {
      for (int a = 1; a + b < degree_; a++)
      {
        const double s = static_cast<double>(a) / degree_, t = static_cast<double>(b) / degree_;
        out(j++) = f(xa + s * t1 + t * t2)(0);
      }
    }
    return out;
  }
  const TriangleRule rule = build_triangle_quadrature(quad_order);
  const Vec3 nu = t1.cross(t2);
  for (std::size_t q = 0; q < rule.size(); q++)
  {
    const double s = rule.points[q](0), t = rule.points[q](1);
    const Vec3c v = f(xa + s * t1 + t * t2);
    const auto tests = face_tests(family_, degree_, s, t);
    const double w = rule.weights[q];
    if (family_ == Family::raviart_thomas)
    {
      const Complex vn = dot(v, nu) * w;
      for (int j = 0; j < n; j++)
      {
        out(j) += vn * tests[j](0);
      }
    }
    else
    {
      const Complex v1 = dot(v, t1) * w, v2 = dot(v, t2) * w;
      for (int j = 0; j < n; j++)
      {
        out(j) += v1 * tests[j](0) + v2 * tests[j](1);
      }
    }
  }
  return out;
}

Eigen::VectorXcd ShapeBasis::cell_functionals(const std::array<Vec3, 4> &verts, const FieldFn &f,
                                              int quad_order) const
{
  const int n = per_entity_[3];
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  if (n == 0)
  {
    return out;
  }
  Mat3 B;
  B.col(0) = verts[1] - verts[0];
  B.col(1) = verts[2] - verts[0];
  B.col(2) = verts[3] - verts[0];
  if (family_ == Family::lagrange)
  {
    int j = 0;
    for (int c = 1; c < degree_; c++)
    {
      for (int b = 1; b + c < degree_; b++)
      {
        for (int a = 1; a + b + c < degree_; a++)
        {
          const Vec3 xh(static_cast<double>(a) / degree_, static_cast<double>(b) / degree_,
                        static_cast<double>(c) / degree_);
          out(j++) = f(verts[0] + B * xh)(0);
        }
      }
    }
    return out;
  }
  const QuadratureRule rule = build_quadrature(quad_order);
  Mat3 pull;
  if (family_ == Family::raviart_thomas)
  {
    pull = B.determinant() * B.inverse();
  }
  else
  {
    pull = B.transpose();
  }
  for (std::size_t q = 0; q < rule.size(); q++)
  {
    const Vec3 &xh = rule.points[q];
    const Vec3c vh = pull.cast<Complex>() * f(verts[0] + B * xh);
    const auto tests = cell_tests(family_, degree_, xh);
    for (int j = 0; j < n; j++)
    {
      out(j) += dot(vh, tests[j]) * rule.weights[q];
    }
  }
  return out;
}

Eigen::VectorXcd ShapeBasis::apply_dofs(const std::array<Vec3, 4> &verts, const FieldFn &f,
                                        int quad_order) const
{
  Eigen::VectorXcd out(dim());
  int k = 0;
  auto put = [&](const Eigen::VectorXcd &v)
  {
    out.segment(k, v.size()) = v;
    k += static_cast<int>(v.size());
  };
  for (int v = 0; v < 4; v++)
  {
    put(vertex_functionals(verts[v], f));
  }
  for (const auto &e : reference_tet::edges())
  {
    put(edge_functionals(verts[e[0]], verts[e[1]], f, quad_order));
  }
  for (const auto &fc : reference_tet::faces())
  {
    put(face_functionals(verts[fc[0]], verts[fc[1]], verts[fc[2]], f, quad_order));
  }
  put(cell_functionals(verts, f, quad_order));
  return out;
}

Eigen::VectorXcd ShapeBasis::apply_dofs(const FieldFn &f, int quad_order) const
{
  return apply_dofs(reference_tet::vertices(), f, quad_order);
}

void ShapeBasis::eval(const Vec3 &x, Eigen::MatrixXd &values, Eigen::MatrixXd &derivs) const
{
  const Eigen::VectorXd m = poly::monomial_values(x, poly_degree_);
  values.resize(dim(), value_size());
  derivs.resize(dim(), deriv_size());
  for (int c = 0; c < value_size(); c++)
  {
    values.col(c) = value_coeffs_[c] * m;
  }
  for (int c = 0; c < deriv_size(); c++)
  {
    derivs.col(c) = deriv_coeffs_[c] * m;
  }
}

Eigen::MatrixXd ShapeBasis::eval_partial(const Vec3 &x, const std::array<int, 3> &alpha) const
{
  Eigen::MatrixXd out(dim(), value_size());
  for (int i = 0; i < dim(); i++)
  {
    for (int c = 0; c < value_size(); c++)
    {
      poly::Poly p = polys_[i][c];
      for (int d = 0; d < 3; d++)
      {
        for (int r = 0; r < alpha[d]; r++)
        {
          p = poly::derivative(p, d);
        }
      }
      out(i, c) = poly::eval(p, x);
    }
  }
  return out;
}

namespace
{

poly::VecPoly unit_vec_poly(int c, const std::array<int, 3> &e)
{
  poly::VecPoly v = {poly::zero(), poly::zero(), poly::zero()};
  v[c] = poly::monomial(e[0], e[1], e[2]);
  return v;
}

std::vector<poly::VecPoly> spanning_set(Family fam, int p)
{
  std::vector<poly::VecPoly> span;
  switch (fam)
  {
    case Family::nedelec1:
      for (int c = 0; c < 3; c++)
      {
        for (const auto &e : monomials_3d(p - 1))
        {
          span.push_back(unit_vec_poly(c, e));
        }
      }
      for (int c = 0; c < 3; c++)
      {
        for (const auto &e : homogeneous_3d(p - 1))
        {
          span.push_back(poly::cross_x(unit_vec_poly(c, e)));
        }
      }
      break;
    case Family::nedelec2:
      for (int c = 0; c < 3; c++)
      {
        for (const auto &e : monomials_3d(p))
        {
          span.push_back(unit_vec_poly(c, e));
        }
      }
      break;
    case Family::raviart_thomas:
      for (int c = 0; c < 3; c++)
      {
        for (const auto &e : monomials_3d(p - 1))
        {
          span.push_back(unit_vec_poly(c, e));
        }
      }
      for (const auto &e : homogeneous_3d(p - 1))
      {
        const poly::Poly m = poly::monomial(e[0], e[1], e[2]);
        span.push_back({poly::times_coordinate(m, 0), poly::times_coordinate(m, 1),
                        poly::times_coordinate(m, 2)});
      }
      break;
    case Family::lagrange:
      for (const auto &e : monomials_3d(p))
      {
        span.push_back({poly::monomial(e[0], e[1], e[2]), poly::zero(), poly::zero()});
      }
      break;
  }
  return span;
}

FieldFn as_field(const poly::VecPoly &v)
{
  return [v](const Vec3 &x) -> Vec3c
  { return Vec3c(poly::eval(v[0], x), poly::eval(v[1], x), poly::eval(v[2], x)); };
}

}  // namespace

ShapeBasis build_shape_basis(Family family, int p)
{
  if (p < 1 || p > max_supported_degree(family))
  {
    throw CapabilityError("unsupported element (" + to_string(family) + ", p=" +
                          std::to_string(p) + ")");
  }
  ShapeBasis basis;
  basis.family_ = family;
  basis.degree_ = p;
  basis.poly_degree_ = p;
  basis.per_entity_ = entity_counts(family, p);
  const int entity_total[4] = {4, 6, 4, 1};
  for (int k = 0; k < 4; k++)
  {
    for (int e = 0; e < entity_total[k]; e++)
    {
      for (int j = 0; j < basis.per_entity_[k]; j++)
      {
        basis.dofs_.push_back({static_cast<EntityKind>(k), e, j});
      }
    }
  }
  const int n = basis.dim();
  if (n != space_dimension(family, p))
  {
    throw NumericError("DOF count mismatch for " + to_string(family));
  }

  // Reduce the spanning set to a basis of the polynomial space.
  const auto span = spanning_set(family, p);
  const int ncomp = basis.value_size();
  const int nmono = poly::monomial_count(basis.poly_degree_);
  Eigen::MatrixXd S(ncomp * nmono, span.size());
  for (std::size_t j = 0; j < span.size(); j++)
  {
    for (int c = 0; c < ncomp; c++)
    {
      S.block(c * nmono, j, nmono, 1) = span[j][c].head(nmono);
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(S);
  qr.setThreshold(1e-12);
  if (qr.rank() != n)
  {
    throw NumericError("spanning set rank " + std::to_string(qr.rank()) + " != dimension " +
                       std::to_string(n));
  }
  std::vector<poly::VecPoly> indep;
  for (int j = 0; j < n; j++)
  {
    indep.push_back(span[qr.colsPermutation().indices()(j)]);
  }

  // Dual basis: basis_k = sum_j C(j, k) indep_j with DOF_i(basis_k) = delta_ik.
  Eigen::MatrixXd D(n, n);
  const int order = basis.default_moment_order();
  for (int j = 0; j < n; j++)
  {
    D.col(j) = basis.apply_dofs(as_field(indep[j]), order).real();
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(D);
  if (!lu.isInvertible())
  {
    throw NumericError("DOF functionals are not unisolvent for " + to_string(family));
  }
  const Eigen::MatrixXd C = lu.inverse();

  basis.polys_.resize(n);
  for (int k = 0; k < n; k++)
  {
    basis.polys_[k] = {poly::zero(), poly::zero(), poly::zero()};
    for (int j = 0; j < n; j++)
    {
      for (int c = 0; c < 3; c++)
      {
        basis.polys_[k][c] += C(j, k) * indep[j][c];
      }
    }
  }

  basis.value_coeffs_.assign(ncomp, Eigen::MatrixXd::Zero(n, nmono));
  for (int k = 0; k < n; k++)
  {
    for (int c = 0; c < ncomp; c++)
    {
      basis.value_coeffs_[c].row(k) = basis.polys_[k][c].head(nmono).transpose();
    }
  }
  const int nderiv = basis.deriv_size();
  basis.deriv_coeffs_.assign(nderiv, Eigen::MatrixXd::Zero(n, nmono));
  for (int k = 0; k < n; k++)
  {
    const auto &v = basis.polys_[k];
    if (family == Family::raviart_thomas)
    {
      basis.deriv_coeffs_[0].row(k) = poly::divergence(v).head(nmono).transpose();
    }
    else if (family == Family::lagrange)
    {
      const auto g = poly::gradient(v[0]);
      for (int c = 0; c < 3; c++)
      {
        basis.deriv_coeffs_[c].row(k) = g[c].head(nmono).transpose();
      }
    }
    else
    {
      const auto cu = poly::curl(v);
      for (int c = 0; c < 3; c++)
      {
        basis.deriv_coeffs_[c].row(k) = cu[c].head(nmono).transpose();
      }
    }
  }
  return basis;
}

const ShapeBasis &shape_basis(Family family, int p)
{
  static std::mutex mtx;
  static std::map<std::pair<int, int>, std::unique_ptr<ShapeBasis>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(static_cast<int>(family), p);
  auto it = cache.find(key);
  if (it == cache.end())
  {
    it = cache.emplace(key, std::make_unique<ShapeBasis>(build_shape_basis(family, p))).first;
  }
  return *it->second;
}

BasisTable evaluate_basis(const ShapeBasis &basis, const std::vector<Vec3> &points)
{
  BasisTable table;
  table.values.resize(points.size());
  table.derivs.resize(points.size());
  for (std::size_t q = 0; q < points.size(); q++)
  {
    if (!reference_tet::contains(points[q]))
    {
      throw DomainError("point outside reference tetrahedron");
    }
    basis.eval(points[q], table.values[q], table.derivs[q]);
  }
  return table;
}

}  // namespace mxfem
