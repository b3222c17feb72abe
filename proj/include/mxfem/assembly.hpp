// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MXFEM_ASSEMBLY_HPP
#define MXFEM_ASSEMBLY_HPP

#include <string>

#include <Eigen/SparseCore>

#include "mxfem/coefficients.hpp"
#include "mxfem/spaces.hpp"

namespace mxfem
{

using SparseMatrixC = Eigen::SparseMatrix<Complex>;

// Element loops run either OpenMP-parallel with a deterministic ordered merge,
// or serially (reference kernel). Both give bitwise identical results.
enum class ExecutionMode
{
  parallel,
  serial
};

// Which quantity of a basis function enters a form: the value, or the
// derivative (curl for H(curl), gradient for H1). Both must be 3-vectors.
enum class Operand
{
  value,
  derivative
};

// B[i, j] = scale * sum_K int_K W(x) trial_j(x) . test_i(x) over all DOFs of
// both spaces. Basis functions are real, so the conjugate on test_i is
// implicit. quad_order <= 0 picks the sum of the basis degrees plus 2.
SparseMatrixC assemble_bilinear(const FeSpace &test, Operand test_op, const FeSpace &trial,
                                Operand trial_op, const CoefficientField &weight,
                                double scale = 1.0, int quad_order = 0,
                                ExecutionMode mode = ExecutionMode::parallel);

// k^{-2} (mu^{-1} curl u, curl v), all DOFs. Throws ArgumentError for k <= 0.
SparseMatrixC assemble_curlcurl(const FeSpace &space, const CoefficientField &mu_inv, double k,
                                ExecutionMode mode = ExecutionMode::parallel);

// (W u, v), all DOFs.
SparseMatrixC assemble_mass(const FeSpace &space, const CoefficientField &weight,
                            ExecutionMode mode = ExecutionMode::parallel);

// rhs[i] = int f . phi_i over all DOFs. Evaluation errors are rethrown with
// the element index.
Eigen::VectorXcd assemble_load(const FeSpace &space, const FieldFn &f, int quad_order = 0,
                               ExecutionMode mode = ExecutionMode::parallel);

// Galerkin system P = A_D - A_E on the free DOFs.
struct LinearSystem
{
  const FeSpace *space = nullptr;
  double k = 0.0;
  SparseMatrixC P;
  Eigen::VectorXcd rhs;
  std::string forms;
};

LinearSystem assemble_system(const FeSpace &space, const CoefficientField &mu_inv,
                             const CoefficientField &eps, double k,
                             ExecutionMode mode = ExecutionMode::parallel);
LinearSystem assemble_system(const FeSpace &space, const CoefficientField &mu_inv,
                             const CoefficientField &eps, double k, const FieldFn &f,
                             ExecutionMode mode = ExecutionMode::parallel);

// Restriction of a square matrix / vector on all DOFs to the free DOFs.
SparseMatrixC restrict_free(const SparseMatrixC &A, const FeSpace &space);

// Coordinate dump: header "%%complex-coo <n> <nnz>" then "i j re im" lines,
// 0-based, full precision.
std::string write_complex_coo(const SparseMatrixC &A);

}  // namespace mxfem

#endif  // MXFEM_ASSEMBLY_HPP
