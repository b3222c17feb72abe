// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "mxfem/assembly.hpp"

#include <climits>
#include <cstdio>
#include <exception>

namespace mxfem
{

namespace
{

// Runs fn(t) for every element. Exceptions are captured and the one from the
// lowest element index is rethrown after the loop, so the reported failure
// does not depend on scheduling.
template <typename Fn>
void for_each_element(int n, ExecutionMode mode, Fn &&fn)
{
  std::exception_ptr err;
  int err_t = INT_MAX;
  auto guarded = [&](int t)
  {
    try
    {
      fn(t);
    }
    catch (...)
    {
#pragma omp critical(mxfem_assembly_error)
      {
        if (t < err_t)
        {
          err_t = t;
          err = std::current_exception();
        }
      }
    }
  };
  if (mode == ExecutionMode::parallel)
  {
#pragma omp parallel for schedule(static)
    for (int t = 0; t < n; t++)
    {
      guarded(t);
    }
  }
  else
  {
    for (int t = 0; t < n; t++)
    {
      guarded(t);
    }
  }
  if (err)
  {
    std::rethrow_exception(err);
  }
}

void check_operand(const FeSpace &s, Operand op)
{
  const int width = op == Operand::value ? s.basis().value_size() : s.basis().deriv_size();
  if (width != 3)
  {
    throw CapabilityError("operand of " + to_string(s.family()) + " is not a 3-vector");
  }
}

}  // namespace

SparseMatrixC assemble_bilinear(const FeSpace &test, Operand test_op, const FeSpace &trial,
                                Operand trial_op, const CoefficientField &weight, double scale,
                                int quad_order, ExecutionMode mode)
{
  if (&test.mesh() != &trial.mesh())
  {
    throw ArgumentError("bilinear form: spaces live on different meshes");
  }
  check_operand(test, test_op);
  check_operand(trial, trial_op);
  const int order = quad_order > 0
                        ? quad_order
                        : test.basis().poly_degree() + trial.basis().poly_degree() + 2;
  const QuadratureRule rule = build_quadrature(order);
  const BasisTable ref_test = evaluate_basis(test.basis(), rule.points);
  const BasisTable ref_trial = evaluate_basis(trial.basis(), rule.points);
  const int nt = test.mesh().num_tets();
  const int ni = test.local_dim(), nj = trial.local_dim();
  const bool real_weight = weight.real_symmetric;

  std::vector<Eigen::MatrixXcd> blocks(nt);
  for_each_element(nt, mode,
                   [&](int t)
                   {
                     const ElementMap &map = test.local_map(t);
                     const double jac = std::abs(map.det);
                     Eigen::MatrixXd re = Eigen::MatrixXd::Zero(ni, nj);
                     Eigen::MatrixXd im = Eigen::MatrixXd::Zero(ni, nj);
                     Eigen::MatrixXd tv, td, sv, sd;
                     for (std::size_t q = 0; q < rule.size(); q++)
                     {
                       push_forward(test.kind(), map, ref_test.values[q], ref_test.derivs[q], tv,
                                    td);
                       push_forward(trial.kind(), map, ref_trial.values[q],
                                    ref_trial.derivs[q], sv, sd);
                       const Eigen::MatrixXd &a = test_op == Operand::value ? tv : td;
                       const Eigen::MatrixXd &b = trial_op == Operand::value ? sv : sd;
                       const Mat3c W = weight(map(rule.points[q])) *
                                       (scale * rule.weights[q] * jac);
                       re.noalias() += a * W.real() * b.transpose();
                       if (!real_weight)
                       {
                         im.noalias() += a * W.imag() * b.transpose();
                       }
                     }
                     blocks[t] = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
                   });

  // Ordered merge: triplets in element order, duplicates summed in that order.
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(nt) * ni * nj);
  for (int t = 0; t < nt; t++)
  {
    const auto rd = test.dofs(t);
    const auto cd = trial.dofs(t);
    for (int i = 0; i < ni; i++)
    {
      for (int j = 0; j < nj; j++)
      {
        trip.emplace_back(rd[i], cd[j], blocks[t](i, j));
      }
    }
  }
  SparseMatrixC A(test.num_dofs(), trial.num_dofs());
  A.setFromTriplets(trip.begin(), trip.end());
  A.prune([](Eigen::Index, Eigen::Index, const Complex &v) { return v != Complex(0.0); });
  A.makeCompressed();
  return A;
}

SparseMatrixC assemble_curlcurl(const FeSpace &space, const CoefficientField &mu_inv, double k,
                                ExecutionMode mode)
{
  if (!(k > 0.0))
  {
    throw ArgumentError("wavenumber must be positive");
  }
  return assemble_bilinear(space, Operand::derivative, space, Operand::derivative, mu_inv,
                           1.0 / (k * k), 2 * space.degree() + 2, mode);
}

SparseMatrixC assemble_mass(const FeSpace &space, const CoefficientField &weight,
                            ExecutionMode mode)
{
  return assemble_bilinear(space, Operand::value, space, Operand::value, weight, 1.0,
                           2 * space.basis().poly_degree() + 2, mode);
}

Eigen::VectorXcd assemble_load(const FeSpace &space, const FieldFn &f, int quad_order,
                               ExecutionMode mode)
{
  check_operand(space, Operand::value);
  const int order = quad_order > 0 ? quad_order : 2 * space.basis().poly_degree() + 2;
  const QuadratureRule rule = build_quadrature(order);
  const BasisTable ref = evaluate_basis(space.basis(), rule.points);
  const int nt = space.mesh().num_tets();
  const int n = space.local_dim();
  std::vector<Eigen::VectorXcd> local(nt);
  for_each_element(nt, mode,
                   [&](int t)
                   {
                     const ElementMap &map = space.local_map(t);
                     const double jac = std::abs(map.det);
                     Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
                     Eigen::MatrixXd v, d;
                     for (std::size_t q = 0; q < rule.size(); q++)
                     {
                       push_forward(space.kind(), map, ref.values[q], ref.derivs[q], v, d);
                       Vec3c fx;
                       try
                       {
                         fx = f(map(rule.points[q]));
                       }
                       catch (const std::exception &e)
                       {
                         throw DomainError("element " + std::to_string(t) +
                                           ": field evaluation failed: " + e.what());
                       }
                       b.noalias() += v.cast<Complex>() * (fx * (rule.weights[q] * jac));
                     }
                     local[t] = b;
                   });
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(space.num_dofs());
  for (int t = 0; t < nt; t++)
  {
    const auto dofs = space.dofs(t);
    for (int i = 0; i < n; i++)
    {
      out(dofs[i]) += local[t](i);
    }
  }
  return out;
}

SparseMatrixC restrict_free(const SparseMatrixC &A, const FeSpace &space)
{
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(A.nonZeros());
  for (int c = 0; c < A.outerSize(); c++)
  {
    for (SparseMatrixC::InnerIterator it(A, c); it; ++it)
    {
      const int r = space.free_index(static_cast<int>(it.row()));
      const int cc = space.free_index(static_cast<int>(it.col()));
      if (r >= 0 && cc >= 0)
      {
        trip.emplace_back(r, cc, it.value());
      }
    }
  }
  SparseMatrixC out(space.num_free(), space.num_free());
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return out;
}

LinearSystem assemble_system(const FeSpace &space, const CoefficientField &mu_inv,
                             const CoefficientField &eps, double k, ExecutionMode mode)
{
  LinearSystem sys;
  sys.space = &space;
  sys.k = k;
  const SparseMatrixC full =
      assemble_curlcurl(space, mu_inv, k, mode) - assemble_mass(space, eps, mode);
  sys.P = restrict_free(full, space);
  sys.rhs = Eigen::VectorXcd::Zero(space.num_free());
  sys.forms = "curlcurl-mass";
  return sys;
}

LinearSystem assemble_system(const FeSpace &space, const CoefficientField &mu_inv,
                             const CoefficientField &eps, double k, const FieldFn &f,
                             ExecutionMode mode)
{
  LinearSystem sys = assemble_system(space, mu_inv, eps, k, mode);
  sys.rhs = space.restrict_to_free(assemble_load(space, f, 0, mode));
  sys.forms += "+load";
  return sys;
}

std::string write_complex_coo(const SparseMatrixC &A)
{
  std::string out =
      "%%complex-coo " + std::to_string(A.rows()) + " " + std::to_string(A.nonZeros()) + "\n";
  char buf[128];
  // Row-major listing for readability.
  const Eigen::SparseMatrix<Complex, Eigen::RowMajor> R = A;
  for (int r = 0; r < R.outerSize(); r++)
  {
    for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(R, r); it; ++it)
    {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g %.17g\n", r, static_cast<int>(it.col()),
                    it.value().real(), it.value().imag());
      out += buf;
    }
  }
  return out;
}

}  // namespace mxfem
