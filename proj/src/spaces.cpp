// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "mxfem/spaces.hpp"

#include <cmath>

namespace mxfem
{

FieldFn piola_map(const ElementMap &map, const FieldFn &field, MapKind kind,
                  PiolaDirection direction)
{
  const Mat3 B = map.B;
  const Vec3 b = map.b;
  const double det = B.determinant();
  if (det == 0.0 || !std::isfinite(det))
  {
    throw NumericError("singular element map in Piola transformation");
  }
  const Mat3 Binv = B.inverse();
  Mat3 factor;
  switch (kind)
  {
    case MapKind::hcurl:
      factor = direction == PiolaDirection::pullback ? Mat3(B.transpose())
                                                     : Mat3(Binv.transpose());
      break;
    case MapKind::hdiv:
      factor = direction == PiolaDirection::pullback ? Mat3(det * Binv) : Mat3(B / det);
      break;
    case MapKind::h1:
      factor = Mat3::Identity();
      break;
  }
  const Eigen::Matrix3cd fc = factor.cast<Complex>();
  if (direction == PiolaDirection::pullback)
  {
    return [=](const Vec3 &xh) -> Vec3c
    {
      const Vec3c v = field(B * xh + b);
      return kind == MapKind::h1 ? v : Vec3c(fc * v);
    };
  }
  return [=](const Vec3 &x) -> Vec3c
  {
    const Vec3c v = field(Binv * (x - b));
    return kind == MapKind::h1 ? v : Vec3c(fc * v);
  };
}

Eigen::VectorXcd FeSpace::restrict_to_free(const Eigen::VectorXcd &full) const
{
  Eigen::VectorXcd out(num_free());
  for (int i = 0; i < num_free(); i++)
  {
    out(i) = full(free_dofs_[i]);
  }
  return out;
}

Eigen::VectorXcd FeSpace::extend_from_free(const Eigen::VectorXcd &free) const
{
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(num_dofs());
  for (int i = 0; i < num_free(); i++)
  {
    out(free_dofs_[i]) = free(i);
  }
  return out;
}

FeSpace build_fe_space(const Mesh &mesh, Family family, int p, BoundaryCondition bc)
{
  FeSpace s;
  s.mesh_ = &mesh;
  s.family_ = family;
  s.degree_ = p;
  s.bc_ = bc;
  s.basis_ = &shape_basis(family, p);
  const ShapeBasis &basis = *s.basis_;

  const std::array<int, 4> counts = {mesh.num_vertices(), mesh.num_edges(), mesh.num_faces(),
                                     mesh.num_tets()};
  int off = 0;
  for (int k = 0; k < 4; k++)
  {
    s.offset_[k] = off;
    off += counts[k] * basis.dofs_per_entity(static_cast<EntityKind>(k));
  }
  s.n_dofs_ = off;

  const int nt = mesh.num_tets();
  const int ld = basis.dim();
  s.tet_dofs_.resize(static_cast<std::size_t>(nt) * ld);
  s.maps_.resize(nt);
  for (int t = 0; t < nt; t++)
  {
    const auto &sv = mesh.sorted_tets[t];
    s.maps_[t] = affine_map({mesh.vertices[sv[0]], mesh.vertices[sv[1]], mesh.vertices[sv[2]],
                             mesh.vertices[sv[3]]});
    for (int i = 0; i < ld; i++)
    {
      const DofInfo &d = basis.dofs()[i];
      int entity = 0;
      switch (d.kind)
      {
        case EntityKind::vertex:
          entity = sv[d.entity];
          break;
        case EntityKind::edge:
          entity = mesh.tet_edges[t][d.entity];
          break;
        case EntityKind::face:
          entity = mesh.tet_faces[t][d.entity];
          break;
        case EntityKind::cell:
          entity = t;
          break;
      }
      s.tet_dofs_[static_cast<std::size_t>(t) * ld + i] = s.entity_dof(d.kind, entity) + d.index;
    }
  }

  std::vector<char> fixed(s.n_dofs_, 0);
  if (bc == BoundaryCondition::pec)
  {
    auto mark = [&](EntityKind kind, int entity)
    {
      const int g = s.entity_dof(kind, entity);
      for (int j = 0; j < basis.dofs_per_entity(kind); j++)
      {
        fixed[g + j] = 1;
      }
    };
    const auto &ref_edges = reference_tet::edges();
    for (int f = 0; f < mesh.num_faces(); f++)
    {
      if (!mesh.is_boundary_face(f) || mesh.face_labels[f] == FaceLabel::interior)
      {
        continue;
      }
      const int t = mesh.face_tets[f][0];
      int lf = 0;
      while (mesh.tet_faces[t][lf] != f)
      {
        lf++;
      }
      const auto &fv = reference_tet::faces()[lf];
      mark(EntityKind::face, f);
      for (int e = 0; e < 6; e++)
      {
        const auto &ev = ref_edges[e];
        const bool in_face = (ev[0] == fv[0] || ev[0] == fv[1] || ev[0] == fv[2]) &&
                             (ev[1] == fv[0] || ev[1] == fv[1] || ev[1] == fv[2]);
        if (in_face)
        {
          mark(EntityKind::edge, mesh.tet_edges[t][e]);
        }
      }
      for (int a = 0; a < 3; a++)
      {
        mark(EntityKind::vertex, mesh.faces[f][a]);
      }
    }
  }
  s.free_index_.assign(s.n_dofs_, -1);
  for (int g = 0; g < s.n_dofs_; g++)
  {
    if (!fixed[g])
    {
      s.free_index_[g] = static_cast<int>(s.free_dofs_.size());
      s.free_dofs_.push_back(g);
    }
  }
  return s;
}

void push_forward(MapKind kind, const ElementMap &map, const Eigen::MatrixXd &ref_values,
                  const Eigen::MatrixXd &ref_derivs, Eigen::MatrixXd &values,
                  Eigen::MatrixXd &derivs)
{
  // Row-vector form: v^T = v̂^T A^T for v = A v̂.
  switch (kind)
  {
    case MapKind::hcurl:
      values.noalias() = ref_values * map.inv_transpose.transpose();
      derivs.noalias() = ref_derivs * (map.B.transpose() / map.det);
      break;
    case MapKind::hdiv:
      values.noalias() = ref_values * (map.B.transpose() / map.det);
      derivs = ref_derivs / map.det;
      break;
    case MapKind::h1:
      values = ref_values;
      derivs.noalias() = ref_derivs * map.inv_transpose.transpose();
      break;
  }
}

BasisTable tabulate(const FeSpace &space, int t, const std::vector<Vec3> &ref_points)
{
  BasisTable table = evaluate_basis(space.basis(), ref_points);
  const ElementMap &map = space.local_map(t);
  Eigen::MatrixXd v, d;
  for (std::size_t q = 0; q < ref_points.size(); q++)
  {
    push_forward(space.kind(), map, table.values[q], table.derivs[q], v, d);
    table.values[q] = v;
    table.derivs[q] = d;
  }
  return table;
}

PointValue evaluate(const FeSpace &space, const Eigen::VectorXcd &coeffs, int t,
                    const Vec3 &ref_point)
{
  Eigen::MatrixXd rv, rd, v, d;
  space.basis().eval(ref_point, rv, rd);
  push_forward(space.kind(), space.local_map(t), rv, rd, v, d);
  const auto dofs = space.dofs(t);
  PointValue out{Vec3c::Zero(), Vec3c::Zero()};
  for (int i = 0; i < space.local_dim(); i++)
  {
    const Complex c = coeffs(dofs[i]);
    for (int j = 0; j < v.cols(); j++)
    {
      out.value(j) += c * v(i, j);
    }
    for (int j = 0; j < d.cols(); j++)
    {
      out.deriv(j) += c * d(i, j);
    }
  }
  return out;
}

namespace
{

std::array<Vec3, 4> sorted_vertices(const Mesh &mesh, int t)
{
  const auto &sv = mesh.sorted_tets[t];
  return {mesh.vertices[sv[0]], mesh.vertices[sv[1]], mesh.vertices[sv[2]], mesh.vertices[sv[3]]};
}

}  // namespace

Eigen::VectorXcd canonical_interpolate(const FeSpace &space, const FieldFn &field, int quad_order)
{
  const Mesh &mesh = space.mesh();
  const ShapeBasis &basis = space.basis();
  const int order = quad_order > 0 ? quad_order : basis.default_moment_order();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(space.num_dofs());
  // Each entity writes its own DOF slots, so iterations are independent.
  if (basis.dofs_per_entity(EntityKind::vertex) > 0)
  {
#pragma omp parallel for schedule(static)
    for (int v = 0; v < mesh.num_vertices(); v++)
    {
      const Eigen::VectorXcd m = basis.vertex_functionals(mesh.vertices[v], field);
      out.segment(space.entity_dof(EntityKind::vertex, v), m.size()) = m;
    }
  }
  if (basis.dofs_per_entity(EntityKind::edge) > 0)
  {
#pragma omp parallel for schedule(static)
    for (int e = 0; e < mesh.num_edges(); e++)
    {
      const auto &ev = mesh.edges[e];
      const Eigen::VectorXcd m =
          basis.edge_functionals(mesh.vertices[ev[0]], mesh.vertices[ev[1]], field, order);
      out.segment(space.entity_dof(EntityKind::edge, e), m.size()) = m;
    }
  }
  if (basis.dofs_per_entity(EntityKind::face) > 0)
  {
#pragma omp parallel for schedule(static)
    for (int f = 0; f < mesh.num_faces(); f++)
    {
      const auto &fv = mesh.faces[f];
      const Eigen::VectorXcd m = basis.face_functionals(
          mesh.vertices[fv[0]], mesh.vertices[fv[1]], mesh.vertices[fv[2]], field, order);
      out.segment(space.entity_dof(EntityKind::face, f), m.size()) = m;
    }
  }
  if (basis.dofs_per_entity(EntityKind::cell) > 0)
  {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < mesh.num_tets(); t++)
    {
      const Eigen::VectorXcd m = basis.cell_functionals(sorted_vertices(mesh, t), field, order);
      out.segment(space.entity_dof(EntityKind::cell, t), m.size()) = m;
    }
  }
  return out;
}

Eigen::VectorXcd local_interpolate(const FeSpace &space, int t, const FieldFn &field,
                                   int quad_order)
{
  const int order = quad_order > 0 ? quad_order : space.basis().default_moment_order();
  return space.basis().apply_dofs(sorted_vertices(space.mesh(), t), field, order);
}

Eigen::SparseMatrix<double> build_discrete_gradient(const FeSpace &lagrange,
                                                    const FeSpace &nedelec)
{
  if (lagrange.family() != Family::lagrange)
  {
    throw ArgumentError("discrete gradient: first space must be Lagrange");
  }
  if (nedelec.kind() != MapKind::hcurl)
  {
    throw ArgumentError("discrete gradient: second space must be a Nedelec space");
  }
  if (&lagrange.mesh() != &nedelec.mesh())
  {
    throw ArgumentError("discrete gradient: spaces live on different meshes");
  }
  const int max_lag = nedelec.family() == Family::nedelec1 ? nedelec.degree()
                                                           : nedelec.degree() + 1;
  if (lagrange.degree() < 1 || lagrange.degree() > max_lag)
  {
    throw ArgumentError("discrete gradient: Lagrange degree " +
                        std::to_string(lagrange.degree()) + " incompatible with " +
                        to_string(nedelec.family()) + " degree " +
                        std::to_string(nedelec.degree()));
  }
  if (lagrange.bc() != nedelec.bc())
  {
    throw ArgumentError("discrete gradient: boundary conditions differ");
  }

  // Gradients pull back covariantly, so the local matrix is the same on every
  // tet: Nedelec functionals applied to reference Lagrange gradients.
  const ShapeBasis &lb = lagrange.basis();
  const ShapeBasis &nb = nedelec.basis();
  Eigen::MatrixXd local(nb.dim(), lb.dim());
  for (int j = 0; j < lb.dim(); j++)
  {
    const FieldFn grad = [&lb, j](const Vec3 &x) -> Vec3c
    {
      Eigen::MatrixXd v, d;
      lb.eval(x, v, d);
      return d.row(j).transpose().cast<Complex>();
    };
    local.col(j) = nb.apply_dofs(grad, nb.default_moment_order()).real();
  }
  local = local.unaryExpr([](double x) { return std::abs(x) < 1e-13 ? 0.0 : x; });

  std::vector<Eigen::Triplet<double>> trip;
  const int nt = lagrange.mesh().num_tets();
  trip.reserve(static_cast<std::size_t>(nt) * local.nonZeros());
  for (int t = 0; t < nt; t++)
  {
    const auto rd = nedelec.dofs(t);
    const auto cd = lagrange.dofs(t);
    for (int j = 0; j < local.cols(); j++)
    {
      for (int i = 0; i < local.rows(); i++)
      {
        if (local(i, j) != 0.0)
        {
          trip.emplace_back(rd[i], cd[j], local(i, j));
        }
      }
    }
  }
  Eigen::SparseMatrix<double> G(nedelec.num_dofs(), lagrange.num_dofs());
  // Shared entities see identical entries from every adjacent tet: assign.
  G.setFromTriplets(trip.begin(), trip.end(), [](double a, double) { return a; });
  return G;
}

Eigen::SparseMatrix<double> restrict_free(const Eigen::SparseMatrix<double> &A,
                                          const FeSpace &rows, const FeSpace &cols)
{
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < A.outerSize(); k++)
  {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
    {
      const int r = rows.free_index(static_cast<int>(it.row()));
      const int c = cols.free_index(static_cast<int>(it.col()));
      if (r >= 0 && c >= 0)
      {
        trip.emplace_back(r, c, it.value());
      }
    }
  }
  Eigen::SparseMatrix<double> out(rows.num_free(), cols.num_free());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace mxfem
