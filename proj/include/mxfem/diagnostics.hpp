// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MXFEM_DIAGNOSTICS_HPP
#define MXFEM_DIAGNOSTICS_HPP

#include <string>

#include "mxfem/assembly.hpp"

namespace mxfem
{

// Closed-form field with its curl. `partial` (optional) returns the partial
// derivative d^alpha of each component and is needed for piecewise H^j norms.
struct ExactField
{
  using PartialFn = std::function<Vec3c(const Vec3 &, const std::array<int, 3> &)>;

  FieldFn value;
  FieldFn curl;
  PartialFn partial;
};

enum class NormKind
{
  l2,
  curl_k,  // ||k^{-1} curl v||
  hk_curl,
  piecewise_hj
};

std::string to_string(NormKind n);
NormKind norm_kind_from_string(const std::string &s);

// Norm of a finite-element function given by its full coefficient vector.
// Quadrature order defaults to 2p + 2. piecewise_hj sums
// sum_{|alpha| <= j} ||(k^{-1} d)^alpha v||^2 element by element and needs
// 0 <= j <= p (CapabilityError otherwise).
double compute_norm(const FeSpace &space, const Eigen::VectorXcd &coeffs, double k, NormKind kind,
                    int j = 0, int quad_order = 0);

// Same for a closed-form field on the mesh. piecewise_hj with j >= 1 needs
// field.partial.
double compute_norm(const Mesh &mesh, const ExactField &field, double k, NormKind kind, int j = 0,
                    int quad_order = 8);

struct ErrorReport
{
  double k = 0.0;
  double h = 0.0;
  int p = 0;
  int dofs = 0;
  double abs_l2 = 0.0;
  double abs_curl_k = 0.0;
  double abs_hk_curl = 0.0;
  double ref_l2 = 0.0;
  double ref_curl_k = 0.0;
  double ref_hk_curl = 0.0;
  double rel_l2 = 0.0;
  double rel_curl_k = 0.0;
  double rel_hk_curl = 0.0;
  // Set when a reference norm vanishes; the matching relative error is then
  // the absolute error (0 when both vanish).
  bool zero_reference = false;
};

// Errors of the FE function (full coefficient vector) against the exact
// field at quadrature points. quad_order <= 0 picks 2p + 2.
ErrorReport relative_error(const FeSpace &space, const Eigen::VectorXcd &solution,
                           const ExactField &exact, double k, int quad_order = 0);

struct CsolEstimate
{
  double value = 0.0;
  int iterations = 0;
};

// Discrete L2 -> L2 norm of the solution operator: the largest M-norm
// singular value of P^{-1} M, both on free DOFs. Throws SingularMatrixError
// when P is singular.
CsolEstimate estimate_csol(const SparseMatrixC &P, const SparseMatrixC &M, double tol = 1e-8,
                           int max_iter = 5000);

struct GammaDvOptions
{
  Family family = Family::nedelec1;
  int p = 1;
  int enrichment = 2;
  // Measure gamma_dv(P*) (eps replaced by its adjoint) instead of gamma_dv(P).
  bool adjoint = false;
};

struct GammaDvResult
{
  double gamma = 0.0;
  int free_dofs = 0;        // Nedelec free DOFs
  int divfree_dim = 0;      // dimension of the discretely div-free subspace
  int enriched_dofs = 0;    // free DOFs of the enriched Lagrange space
};

// Divergence conformity factor
//   sup { ||Pi0 w||_{L2} / ||w||_{H_k(curl)} : w discretely eps-div-free },
// Pi0 w = grad phi with div(eps grad phi) = div(eps w), phi in H^1_0,
// approximated in Lagrange degree p + enrichment. PEC on the whole boundary.
// Throws CapabilityError unless the mesh is simply connected with connected
// boundary, ArgumentError for enrichment < 1.
GammaDvResult estimate_gamma_dv(const Mesh &mesh, const CoefficientField &eps, double k,
                                const GammaDvOptions &opts = {});

// Number of connected components of the boundary surface.
int boundary_components(const Mesh &mesh);

}  // namespace mxfem

#endif  // MXFEM_DIAGNOSTICS_HPP
