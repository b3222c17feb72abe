// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MXFEM_SPACES_HPP
#define MXFEM_SPACES_HPP

#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "mxfem/mesh.hpp"
#include "mxfem/reference_element.hpp"

namespace mxfem
{

enum class BoundaryCondition
{
  none,
  pec  // zero tangential trace (zero trace for Lagrange) on pec_* faces
};

enum class PiolaDirection
{
  pullback,
  pushforward
};

// Piola transformations for an affine map F(x̂) = B x̂ + b.
//   hcurl pullback:  B^T v(F x̂)
//   hdiv pullback:   det(B) B^{-1} v(F x̂)
//   h1 pullback:     v(F x̂)
// The pushforward is the exact inverse. Throws NumericError if B is singular.
FieldFn piola_map(const ElementMap &map, const FieldFn &field, MapKind kind,
                  PiolaDirection direction);

//
// Global space on a mesh. Every tet is processed in its ascending-vertex
// local order, so edge and face functionals coincide across neighbours and
// no sign or permutation corrections are needed. The corresponding element
// map (local_map) may have negative determinant; Piola maps use the signed
// determinant and integrals its absolute value.
//
// The space keeps a pointer to the mesh, which must outlive it.
//
class FeSpace
{
public:
  const Mesh &mesh() const { return *mesh_; }
  Family family() const { return family_; }
  int degree() const { return degree_; }
  MapKind kind() const { return map_kind(family_); }
  BoundaryCondition bc() const { return bc_; }
  const ShapeBasis &basis() const { return *basis_; }
  int local_dim() const { return basis_->dim(); }

  int num_dofs() const { return n_dofs_; }
  int num_free() const { return static_cast<int>(free_dofs_.size()); }

  std::span<const int> dofs(int t) const
  {
    return {tet_dofs_.data() + static_cast<std::size_t>(t) * local_dim(),
            static_cast<std::size_t>(local_dim())};
  }
  bool constrained(int g) const { return free_index_[g] < 0; }
  // -1 for constrained DOFs.
  int free_index(int g) const { return free_index_[g]; }
  const std::vector<int> &free_dofs() const { return free_dofs_; }

  // Global index of the first DOF attached to an entity.
  int entity_dof(EntityKind kind, int entity) const
  {
    const int k = static_cast<int>(kind);
    return offset_[k] + entity * basis_->dofs_per_entity(kind);
  }

  // Affine map of tet t from the reference element in ascending vertex order.
  const ElementMap &local_map(int t) const { return maps_[t]; }

  Eigen::VectorXcd restrict_to_free(const Eigen::VectorXcd &full) const;
  Eigen::VectorXcd extend_from_free(const Eigen::VectorXcd &free) const;

private:
  friend FeSpace build_fe_space(const Mesh &, Family, int, BoundaryCondition);

  const Mesh *mesh_ = nullptr;
  Family family_ = Family::nedelec1;
  int degree_ = 1;
  BoundaryCondition bc_ = BoundaryCondition::none;
  const ShapeBasis *basis_ = nullptr;
  int n_dofs_ = 0;
  std::array<int, 4> offset_{};
  std::vector<int> tet_dofs_;
  std::vector<int> free_index_;
  std::vector<int> free_dofs_;
  std::vector<ElementMap> maps_;
};

FeSpace build_fe_space(const Mesh &mesh, Family family, int p,
                       BoundaryCondition bc = BoundaryCondition::none);

// Pushes a reference tabulation forward through a local map. Values and
// derivatives are expressed in physical coordinates.
void push_forward(MapKind kind, const ElementMap &map, const Eigen::MatrixXd &ref_values,
                  const Eigen::MatrixXd &ref_derivs, Eigen::MatrixXd &values,
                  Eigen::MatrixXd &derivs);

// Physical basis values/derivatives of tet t at reference points.
BasisTable tabulate(const FeSpace &space, int t, const std::vector<Vec3> &ref_points);

// Field value and derivative (curl, divergence or gradient) of a global
// coefficient vector at a reference point of tet t.
struct PointValue
{
  Vec3c value;  // scalar in component 0 for Lagrange
  Vec3c deriv;  // scalar in component 0 for Raviart-Thomas
};
PointValue evaluate(const FeSpace &space, const Eigen::VectorXcd &coeffs, int t,
                    const Vec3 &ref_point);

// Canonical interpolant: applies the global DOF functionals to a field. Each
// entity is handled independently; quad_order <= 0 uses the basis default.
Eigen::VectorXcd canonical_interpolate(const FeSpace &space, const FieldFn &field,
                                       int quad_order = 0);

// Local interpolant on one tet (local DOF order).
Eigen::VectorXcd local_interpolate(const FeSpace &space, int t, const FieldFn &field,
                                   int quad_order = 0);

// Matrix G with (G q) = coefficients of grad(lagrange field q) in the
// Nedelec space, over all DOFs. Throws ArgumentError for incompatible spaces.
Eigen::SparseMatrix<double> build_discrete_gradient(const FeSpace &lagrange,
                                                    const FeSpace &nedelec);

// Rows/columns of a global matrix restricted to free DOFs.
Eigen::SparseMatrix<double> restrict_free(const Eigen::SparseMatrix<double> &A,
                                          const FeSpace &rows, const FeSpace &cols);

}  // namespace mxfem

#endif  // MXFEM_SPACES_HPP
