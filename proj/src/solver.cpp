// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "mxfem/solver.hpp"

#include <cmath>
#include <mutex>
#include <random>

#include <umfpack.h>

// Pinned to one BLAS thread so factors do not depend on the machine's core
// count. Resolved at run time when the BLAS is OpenBLAS.
extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace mxfem
{

namespace
{

void pin_blas_threads()
{
  static std::once_flag once;
  std::call_once(once,
                 []
                 {
                   if (openblas_set_num_threads != nullptr)
                   {
                     openblas_set_num_threads(1);
                   }
                 });
}

std::vector<double> interleave(const Eigen::VectorXcd &v)
{
  std::vector<double> out(2 * v.size());
  for (Eigen::Index i = 0; i < v.size(); i++)
  {
    out[2 * i] = v(i).real();
    out[2 * i + 1] = v(i).imag();
  }
  return out;
}

}  // namespace

Factorization::Factorization(const SparseMatrixC &A)
{
  pin_blas_threads();
  if (A.rows() != A.cols())
  {
    throw ArgumentError("factorize: matrix is not square");
  }
  n_ = A.rows();
  SparseMatrixC C = A;
  C.makeCompressed();
  ap_.assign(C.outerIndexPtr(), C.outerIndexPtr() + n_ + 1);
  ai_.assign(C.innerIndexPtr(), C.innerIndexPtr() + C.nonZeros());
  ax_.resize(2 * C.nonZeros());
  for (Eigen::Index i = 0; i < C.nonZeros(); i++)
  {
    ax_[2 * i] = C.valuePtr()[i].real();
    ax_[2 * i + 1] = C.valuePtr()[i].imag();
  }

  double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
  umfpack_zl_defaults(control);
  void *symbolic = nullptr;
  long status = umfpack_zl_symbolic(n_, n_, ap_.data(), ai_.data(), ax_.data(), nullptr,
                                    &symbolic, control, info);
  if (status != UMFPACK_OK)
  {
    throw NumericError("UMFPACK symbolic analysis failed (status " + std::to_string(status) +
                       ")");
  }
  status = umfpack_zl_numeric(ap_.data(), ai_.data(), ax_.data(), nullptr, symbolic, &numeric_,
                              control, info);
  umfpack_zl_free_symbolic(&symbolic);
  if (status != UMFPACK_OK && status != UMFPACK_WARNING_singular_matrix)
  {
    umfpack_zl_free_numeric(&numeric_);
    throw NumericError("UMFPACK numeric factorization failed (status " +
                       std::to_string(status) + ")");
  }
  rcond_ = info[UMFPACK_RCOND];
  if (!std::isfinite(rcond_))
  {
    rcond_ = 0.0;
  }
  if (status == UMFPACK_WARNING_singular_matrix || rcond_ < kSingularRcond)
  {
    // Locate the first vanishing pivot and report its original column.
    long pivot = -1;
    std::vector<long> q(n_);
    std::vector<double> d(2 * n_);
    if (umfpack_zl_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
                               nullptr, nullptr, q.data(), d.data(), nullptr, nullptr, nullptr,
                               numeric_) == UMFPACK_OK)
    {
      double dmax = 0.0;
      for (long i = 0; i < n_; i++)
      {
        dmax = std::max(dmax, std::hypot(d[2 * i], d[2 * i + 1]));
      }
      for (long i = 0; i < n_ && pivot < 0; i++)
      {
        if (std::hypot(d[2 * i], d[2 * i + 1]) <= kSingularRcond * dmax)
        {
          pivot = q[i];
        }
      }
    }
    umfpack_zl_free_numeric(&numeric_);
    throw SingularMatrixError("matrix is singular to working precision (rcond " +
                                  std::to_string(rcond_) + ")",
                              pivot);
  }
}

Factorization::~Factorization()
{
  if (numeric_ != nullptr)
  {
    umfpack_zl_free_numeric(&numeric_);
  }
}

Factorization::Factorization(Factorization &&o) noexcept
  : n_(o.n_), ap_(std::move(o.ap_)), ai_(std::move(o.ai_)), ax_(std::move(o.ax_)),
    numeric_(o.numeric_), rcond_(o.rcond_)
{
  o.numeric_ = nullptr;
}

Factorization &Factorization::operator=(Factorization &&o) noexcept
{
  if (this != &o)
  {
    if (numeric_ != nullptr)
    {
      umfpack_zl_free_numeric(&numeric_);
    }
    n_ = o.n_;
    ap_ = std::move(o.ap_);
    ai_ = std::move(o.ai_);
    ax_ = std::move(o.ax_);
    numeric_ = o.numeric_;
    rcond_ = o.rcond_;
    o.numeric_ = nullptr;
  }
  return *this;
}

Eigen::VectorXcd Factorization::solve_system(long sys, const Eigen::VectorXcd &b) const
{
  if (b.size() != n_)
  {
    throw ArgumentError("solve: right-hand side has size " + std::to_string(b.size()) +
                        ", expected " + std::to_string(n_));
  }
  const std::vector<double> bx = interleave(b);
  std::vector<double> xx(2 * n_);
  double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
  umfpack_zl_defaults(control);
  const long status = umfpack_zl_solve(sys, ap_.data(), ai_.data(), ax_.data(), nullptr,
                                       xx.data(), nullptr, bx.data(), nullptr, numeric_,
                                       control, info);
  if (status != UMFPACK_OK)
  {
    throw NumericError("UMFPACK solve failed (status " + std::to_string(status) + ")");
  }
  Eigen::VectorXcd x(n_);
  for (long i = 0; i < n_; i++)
  {
    x(i) = Complex(xx[2 * i], xx[2 * i + 1]);
  }
  return x;
}

Eigen::VectorXcd Factorization::solve(const Eigen::VectorXcd &b) const
{
  return solve_system(UMFPACK_A, b);
}

Eigen::VectorXcd Factorization::solve_adjoint(const Eigen::VectorXcd &b) const
{
  // For complex matrices UMFPACK_At is the conjugate transpose.
  return solve_system(UMFPACK_At, b);
}

double Factorization::factor_residual() const
{
  long lnz, unz, nr, nc, nz_udiag;
  umfpack_zl_get_lunz(&lnz, &unz, &nr, &nc, &nz_udiag, numeric_);
  std::vector<long> lp(n_ + 1), lj(lnz), up(n_ + 1), ui(unz), p(n_), q(n_);
  std::vector<double> lx(2 * lnz), ux(2 * unz), rs(n_);
  long do_recip = 0;
  umfpack_zl_get_numeric(lp.data(), lj.data(), lx.data(), nullptr, up.data(), ui.data(),
                         ux.data(), nullptr, p.data(), q.data(), nullptr, nullptr, &do_recip,
                         rs.data(), numeric_);
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(n_, n_), U = Eigen::MatrixXcd::Zero(n_, n_);
  for (long r = 0; r < n_; r++)
  {
    for (long k = lp[r]; k < lp[r + 1]; k++)
    {
      L(r, lj[k]) = Complex(lx[2 * k], lx[2 * k + 1]);
    }
  }
  for (long c = 0; c < n_; c++)
  {
    for (long k = up[c]; k < up[c + 1]; k++)
    {
      U(ui[k], c) = Complex(ux[2 * k], ux[2 * k + 1]);
    }
  }
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n_, n_);
  for (long c = 0; c < n_; c++)
  {
    for (long k = ap_[c]; k < ap_[c + 1]; k++)
    {
      A(ai_[k], c) = Complex(ax_[2 * k], ax_[2 * k + 1]);
    }
  }
  Eigen::MatrixXcd S(n_, n_);
  for (long i = 0; i < n_; i++)
  {
    const double scale = do_recip ? rs[p[i]] : 1.0 / rs[p[i]];
    for (long j = 0; j < n_; j++)
    {
      S(i, j) = scale * A(p[i], q[j]);
    }
  }
  return (S - L * U).cwiseAbs().maxCoeff() / S.cwiseAbs().maxCoeff();
}

std::unique_ptr<Factorization> factorize(const SparseMatrixC &A)
{
  return std::make_unique<Factorization>(A);
}

SingularValueEstimate largest_generalized_singular_value(const LinearOp &apply_op,
                                                         const LinearOp &apply_madjoint,
                                                         const SparseMatrixC &M, double tol,
                                                         int max_iter, unsigned long seed)
{
  const Eigen::Index n = M.rows();
  auto mnorm2 = [&M](const Eigen::VectorXcd &v) { return v.dot(M * v).real(); };
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXcd x(n);
  for (Eigen::Index i = 0; i < n; i++)
  {
    const double re = nd(gen);
    x(i) = Complex(re, nd(gen));
  }
  x /= std::sqrt(mnorm2(x));
  double lambda = 0.0, prev = 0.0, gap = 0.0;
  for (int it = 1; it <= max_iter; it++)
  {
    const Eigen::VectorXcd y = apply_op(x);
    lambda = mnorm2(y);  // ||T x||_M^2 with ||x||_M = 1
    const Eigen::VectorXcd z = apply_madjoint(y);
    const double zn = std::sqrt(mnorm2(z));
    if (!(zn > 0.0))
    {
      return {0.0, it};
    }
    gap = std::abs(lambda - prev);
    if (it > 1 && gap <= tol * lambda)
    {
      return {std::sqrt(lambda), it};
    }
    prev = lambda;
    x = z / zn;
  }
  throw NumericError("power iteration did not converge in " + std::to_string(max_iter) +
                     " iterations (last gap " + std::to_string(gap) + ")");
}

}  // namespace mxfem
