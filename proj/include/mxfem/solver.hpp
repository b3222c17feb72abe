// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MXFEM_SOLVER_HPP
#define MXFEM_SOLVER_HPP

#include <functional>
#include <memory>
#include <vector>

#include "mxfem/assembly.hpp"

namespace mxfem
{

//
// Sparse complex LU (UMFPACK): row pivoting with row scaling and an
// approximate-minimum-degree column ordering, P R A Q = L U. The object owns
// the numeric factors and a copy of A for iterative refinement.
//
class Factorization
{
public:
  explicit Factorization(const SparseMatrixC &A);
  ~Factorization();
  Factorization(Factorization &&) noexcept;
  Factorization &operator=(Factorization &&) noexcept;
  Factorization(const Factorization &) = delete;
  Factorization &operator=(const Factorization &) = delete;

  long rows() const { return n_; }

  // A x = b and A^H x = b. Throws ArgumentError on dimension mismatch.
  Eigen::VectorXcd solve(const Eigen::VectorXcd &b) const;
  Eigen::VectorXcd solve_adjoint(const Eigen::VectorXcd &b) const;

  // Reciprocal condition estimate: min |U_ii| / max |U_ii|.
  double rcond() const { return rcond_; }

  // max |P R A Q - L U| / max |P R A Q| from the stored factors. Forms dense
  // copies, so meant for small matrices.
  double factor_residual() const;

private:
  Eigen::VectorXcd solve_system(long sys, const Eigen::VectorXcd &b) const;

  long n_ = 0;
  std::vector<long> ap_, ai_;
  std::vector<double> ax_;  // interleaved real/imag
  void *numeric_ = nullptr;
  double rcond_ = 0.0;
};

// Matrices with pivot ratio below this are reported as singular.
inline constexpr double kSingularRcond = 1e-14;

// Throws SingularMatrixError (with the failing column when known) for an
// exactly or numerically singular matrix.
std::unique_ptr<Factorization> factorize(const SparseMatrixC &A);

using LinearOp = std::function<Eigen::VectorXcd(const Eigen::VectorXcd &)>;

struct SingularValueEstimate
{
  double sigma = 0.0;
  int iterations = 0;
};

// Largest singular value of T in the norm ||x||_M = sqrt(x^H M x), by power
// iteration on T* T where T* = M^{-1} T^H M is the M-adjoint (supplied by the
// caller as apply_madjoint). Stops when the Rayleigh quotient changes by less
// than tol relative; throws NumericError after max_iter iterations. The start
// vector is drawn from a fixed seed.
SingularValueEstimate largest_generalized_singular_value(const LinearOp &apply_op,
                                                         const LinearOp &apply_madjoint,
                                                         const SparseMatrixC &M, double tol,
                                                         int max_iter, unsigned long seed = 2024);

}  // namespace mxfem

#endif  // MXFEM_SOLVER_HPP
