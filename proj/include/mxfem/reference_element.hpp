// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MXFEM_REFERENCE_ELEMENT_HPP
#define MXFEM_REFERENCE_ELEMENT_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "mxfem/polynomial.hpp"
#include "mxfem/quadrature.hpp"
#include "mxfem/types.hpp"

namespace mxfem
{

// Degree convention: p = 1 is the lowest order for every family (Whitney edge
// elements, lowest-order Raviart-Thomas, linear Lagrange).
enum class Family
{
  nedelec1,
  nedelec2,
  raviart_thomas,
  lagrange
};

std::string to_string(Family f);
Family family_from_string(const std::string &s);

// Covariant (H(curl)), contravariant (H(div)) or scalar (H1) mapping.
enum class MapKind
{
  hcurl,
  hdiv,
  h1
};
MapKind map_kind(Family f);

enum class EntityKind
{
  vertex = 0,
  edge = 1,
  face = 2,
  cell = 3
};

// The reference tetrahedron with vertices (0,0,0), (1,0,0), (0,1,0), (0,0,1).
// Edges and faces are listed lexicographically by local vertex index and
// oriented from lower to higher index.
namespace reference_tet
{
inline constexpr double kVolume = 1.0 / 6.0;
const std::array<Vec3, 4> &vertices();
const std::array<std::array<int, 2>, 6> &edges();
const std::array<std::array<int, 3>, 4> &faces();
std::array<double, 4> barycentric(const Vec3 &x);
bool contains(const Vec3 &x, double tol = 1e-12);
}  // namespace reference_tet

struct DofInfo
{
  EntityKind kind;
  int entity;  // local entity index
  int index;   // moment index within the entity
};

// Field evaluated by the DOF functionals. Scalar fields use component 0.
using FieldFn = std::function<Vec3c(const Vec3 &)>;

// Tabulated basis on a point set: values[q] is n_basis x value_size and
// derivs[q] is n_basis x deriv_size (curl for H(curl), divergence for H(div),
// gradient for H1).
struct BasisTable
{
  std::vector<Eigen::MatrixXd> values;
  std::vector<Eigen::MatrixXd> derivs;
};

class ShapeBasis
{
public:
  Family family() const { return family_; }
  int degree() const { return degree_; }
  int dim() const { return static_cast<int>(dofs_.size()); }
  int value_size() const { return family_ == Family::lagrange ? 1 : 3; }
  int deriv_size() const { return family_ == Family::raviart_thomas ? 1 : 3; }
  // Highest monomial degree appearing in the basis.
  int poly_degree() const { return poly_degree_; }

  const std::vector<DofInfo> &dofs() const { return dofs_; }
  int dofs_per_entity(EntityKind k) const { return per_entity_[static_cast<int>(k)]; }
  // Local index of the first DOF on the given entity.
  int first_dof(EntityKind k, int entity) const;

  // Coefficients of basis functions in the monomial basis: one
  // n_basis x monomial_count(poly_degree) matrix per component.
  const std::vector<Eigen::MatrixXd> &value_coeffs() const { return value_coeffs_; }
  const std::vector<Eigen::MatrixXd> &deriv_coeffs() const { return deriv_coeffs_; }

  // Values and derivatives at one reference point, no domain check.
  void eval(const Vec3 &x, Eigen::MatrixXd &values, Eigen::MatrixXd &derivs) const;

  // Higher partial derivatives d^alpha of each component, n_basis x value_size.
  Eigen::MatrixXd eval_partial(const Vec3 &x, const std::array<int, 3> &alpha) const;

  // Applies the DOF functionals of one entity group to a field. `verts` are the
  // four tet vertices in local order (reference vertices give the reference
  // functionals). For cell DOFs the field is pulled back with the map defined
  // by `verts`; edge and face functionals are written in the entity's own
  // parametrization so they are independent of the adjacent tetrahedron.
  Eigen::VectorXcd edge_functionals(const Vec3 &xa, const Vec3 &xb, const FieldFn &f,
                                    int quad_order) const;
  Eigen::VectorXcd face_functionals(const Vec3 &xa, const Vec3 &xb, const Vec3 &xc,
                                    const FieldFn &f, int quad_order) const;
  Eigen::VectorXcd cell_functionals(const std::array<Vec3, 4> &verts, const FieldFn &f,
                                    int quad_order) const;
  Eigen::VectorXcd vertex_functionals(const Vec3 &xa, const FieldFn &f) const;

  // All functionals on the reference element, in local DOF order.
  Eigen::VectorXcd apply_dofs(const FieldFn &f, int quad_order) const;
  Eigen::VectorXcd apply_dofs(const std::array<Vec3, 4> &verts, const FieldFn &f,
                              int quad_order) const;

  // Default order for moment quadrature: exact on the discrete space.
  int default_moment_order() const { return 2 * degree_ + 2; }

private:
  friend ShapeBasis build_shape_basis(Family, int);

  Family family_ = Family::nedelec1;
  int degree_ = 1;
  int poly_degree_ = 1;
  std::vector<DofInfo> dofs_;
  std::array<int, 4> per_entity_{};
  std::vector<Eigen::MatrixXd> value_coeffs_;
  std::vector<Eigen::MatrixXd> deriv_coeffs_;
  // Cached full polynomials for higher derivatives.
  std::vector<poly::VecPoly> polys_;
};

// Known dimension of each family's space.
int space_dimension(Family family, int p);
int max_supported_degree(Family family);

// Builds the nodal basis dual to the DOF functionals. Throws CapabilityError
// for unsupported (family, p).
ShapeBasis build_shape_basis(Family family, int p);

// Cached shared instance.
const ShapeBasis &shape_basis(Family family, int p);

// Tabulates values and derivatives at reference points; throws DomainError for
// points outside the reference tetrahedron.
BasisTable evaluate_basis(const ShapeBasis &basis, const std::vector<Vec3> &points);

// Shifted Legendre polynomial P_j(2t - 1).
double shifted_legendre(int j, double t);

}  // namespace mxfem

#endif  // MXFEM_REFERENCE_ELEMENT_HPP
