// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "mxfem/diagnostics.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/CholmodSupport>
#include <Eigen/QR>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "mxfem/quadrature.hpp"
#include "mxfem/solver.hpp"

namespace mxfem
{

std::string to_string(NormKind n)
{
  switch (n)
  {
  case NormKind::l2:
    return "l2";
  case NormKind::curl_k:
    return "curl_k";
  case NormKind::hk_curl:
    return "hk_curl";
  case NormKind::piecewise_hj:
    return "piecewise_hj";
  }
  return "?";
}

NormKind norm_kind_from_string(const std::string &s)
{
  for (const NormKind n :
       {NormKind::l2, NormKind::curl_k, NormKind::hk_curl, NormKind::piecewise_hj})
  {
    if (to_string(n) == s)
    {
      return n;
    }
  }
  throw ArgumentError("unknown norm '" + s + "'");
}

namespace
{

// Multi-indices with |alpha| <= j, graded.
std::vector<std::array<int, 3>> multi_indices(int j)
{
  std::vector<std::array<int, 3>> out;
  for (int l = 0; l <= j; l++)
  {
    for (int a = l; a >= 0; a--)
    {
      for (int b = l - a; b >= 0; b--)
      {
        out.push_back({a, b, l - a - b});
      }
    }
  }
  return out;
}

// Direction sequence realizing d^alpha, e.g. (2,0,1) -> {0,0,2}.
std::vector<int> directions(const std::array<int, 3> &alpha)
{
  std::vector<int> d;
  for (int c = 0; c < 3; c++)
  {
    d.insert(d.end(), alpha[c], c);
  }
  return d;
}

// Deterministic ordered sum of per-element contributions.
template <typename T>
T ordered_sum(const std::vector<T> &v, T zero)
{
  for (const T &x : v)
  {
    zero += x;
  }
  return zero;
}

void check_k(double k)
{
  if (!(k > 0.0))
  {
    throw ArgumentError("wavenumber must be positive");
  }
}

// Physical d^alpha of every basis function of tet t at a reference point:
// n_basis x value_size.
Eigen::MatrixXd physical_partial(const FeSpace &space, const ElementMap &map, const Vec3 &xh,
                                 const std::array<int, 3> &alpha)
{
  const ShapeBasis &basis = space.basis();
  const Mat3 Binv = map.B.inverse();
  const std::vector<int> dirs = directions(alpha);
  const int l = static_cast<int>(dirs.size());
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(basis.dim(), basis.value_size());
  // Sum over reference direction tuples (m_1..m_l).
  int combos = 1;
  for (int s = 0; s < l; s++)
  {
    combos *= 3;
  }
  for (int c = 0; c < combos; c++)
  {
    std::array<int, 3> beta{0, 0, 0};
    double factor = 1.0;
    int code = c;
    for (int s = 0; s < l; s++)
    {
      const int m = code % 3;
      code /= 3;
      beta[m]++;
      factor *= Binv(m, dirs[s]);
    }
    if (factor != 0.0)
    {
      acc += factor * basis.eval_partial(xh, beta);
    }
  }
  switch (space.kind())
  {
  case MapKind::hcurl:
    return acc * Binv;
  case MapKind::hdiv:
    return acc * map.B.transpose() / map.det;
  case MapKind::h1:
    return acc;
  }
  return acc;
}

}  // namespace

double compute_norm(const FeSpace &space, const Eigen::VectorXcd &coeffs, double k, NormKind kind,
                    int j, int quad_order)
{
  check_k(k);
  if (coeffs.size() != space.num_dofs())
  {
    throw ArgumentError("coefficient vector has the wrong length");
  }
  if (kind == NormKind::piecewise_hj && (j < 0 || j > space.degree()))
  {
    throw CapabilityError("piecewise H^" + std::to_string(j) + " norm needs 0 <= j <= p = " +
                          std::to_string(space.degree()));
  }
  if (kind != NormKind::piecewise_hj && kind != NormKind::l2 && space.basis().deriv_size() != 3)
  {
    throw CapabilityError("curl norm needs a vector derivative");
  }
  const int order = quad_order > 0 ? quad_order : 2 * space.degree() + 2;
  const QuadratureRule rule = build_quadrature(order);
  const BasisTable ref = evaluate_basis(space.basis(), rule.points);
  const std::vector<std::array<int, 3>> alphas = multi_indices(j);
  const int nt = space.mesh().num_tets();
  std::vector<double> part(nt, 0.0);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; t++)
  {
    const ElementMap &map = space.local_map(t);
    const double jac = std::abs(map.det);
    const auto dofs = space.dofs(t);
    Eigen::VectorXcd c(space.local_dim());
    for (int i = 0; i < space.local_dim(); i++)
    {
      c(i) = coeffs(dofs[i]);
    }
    Eigen::MatrixXd v, d;
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); q++)
    {
      const double w = rule.weights[q] * jac;
      if (kind == NormKind::piecewise_hj)
      {
        for (const auto &alpha : alphas)
        {
          const int l = alpha[0] + alpha[1] + alpha[2];
          const Eigen::MatrixXd D = physical_partial(space, map, rule.points[q], alpha);
          const double scale = std::pow(k, -2.0 * l);
          s += w * scale * (D.transpose().cast<Complex>() * c).squaredNorm();
        }
        continue;
      }
      push_forward(space.kind(), map, ref.values[q], ref.derivs[q], v, d);
      if (kind == NormKind::l2 || kind == NormKind::hk_curl)
      {
        s += w * (v.transpose().cast<Complex>() * c).squaredNorm();
      }
      if (kind == NormKind::curl_k || kind == NormKind::hk_curl)
      {
        s += w * (d.transpose().cast<Complex>() * c).squaredNorm() / (k * k);
      }
    }
    part[t] = s;
  }
  return std::sqrt(ordered_sum(part, 0.0));
}

double compute_norm(const Mesh &mesh, const ExactField &field, double k, NormKind kind, int j,
                    int quad_order)
{
  check_k(k);
  if (kind == NormKind::piecewise_hj && j < 0)
  {
    throw CapabilityError("piecewise H^j norm needs j >= 0");
  }
  if (kind == NormKind::piecewise_hj && j >= 1 && !field.partial)
  {
    throw CapabilityError("piecewise H^" + std::to_string(j) +
                          " norm of a closed-form field needs its partial derivatives");
  }
  if ((kind == NormKind::curl_k || kind == NormKind::hk_curl) && !field.curl)
  {
    throw CapabilityError("curl norm of a closed-form field needs its curl");
  }
  const QuadratureRule rule = build_quadrature(quad_order);
  const std::vector<std::array<int, 3>> alphas = multi_indices(j);
  const int nt = mesh.num_tets();
  std::vector<double> part(nt, 0.0);
  for (int t = 0; t < nt; t++)
  {
    const ElementMap map = element_map(mesh, t);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.size(); q++)
    {
      const Vec3 x = map(rule.points[q]);
      const double w = rule.weights[q] * map.det;
      switch (kind)
      {
      case NormKind::l2:
        s += w * field.value(x).squaredNorm();
        break;
      case NormKind::curl_k:
        s += w * field.curl(x).squaredNorm() / (k * k);
        break;
      case NormKind::hk_curl:
        s += w * (field.value(x).squaredNorm() + field.curl(x).squaredNorm() / (k * k));
        break;
      case NormKind::piecewise_hj:
        for (const auto &alpha : alphas)
        {
          const int l = alpha[0] + alpha[1] + alpha[2];
          const Vec3c v = l == 0 ? field.value(x) : field.partial(x, alpha);
          s += w * std::pow(k, -2.0 * l) * v.squaredNorm();
        }
        break;
      }
    }
    part[t] = s;
  }
  return std::sqrt(ordered_sum(part, 0.0));
}

ErrorReport relative_error(const FeSpace &space, const Eigen::VectorXcd &solution,
                           const ExactField &exact, double k, int quad_order)
{
  check_k(k);
  if (solution.size() != space.num_dofs())
  {
    throw ArgumentError("solution vector has the wrong length");
  }
  if (space.basis().value_size() != 3 || space.basis().deriv_size() != 3)
  {
    throw CapabilityError("error report needs a curl-conforming space");
  }
  const int order = quad_order > 0 ? quad_order : 2 * space.degree() + 2;
  const QuadratureRule rule = build_quadrature(order);
  const BasisTable ref = evaluate_basis(space.basis(), rule.points);
  const int nt = space.mesh().num_tets();
  // Per element: |e|^2, |curl e|^2, |E|^2, |curl E|^2.
  std::vector<Eigen::Vector4d> part(nt);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < nt; t++)
  {
    const ElementMap &map = space.local_map(t);
    const double jac = std::abs(map.det);
    const auto dofs = space.dofs(t);
    Eigen::VectorXcd c(space.local_dim());
    for (int i = 0; i < space.local_dim(); i++)
    {
      c(i) = solution(dofs[i]);
    }
    Eigen::MatrixXd v, d;
    Eigen::Vector4d s = Eigen::Vector4d::Zero();
    for (std::size_t q = 0; q < rule.size(); q++)
    {
      push_forward(space.kind(), map, ref.values[q], ref.derivs[q], v, d);
      const Vec3 x = map(rule.points[q]);
      const double w = rule.weights[q] * jac;
      const Vec3c ev = exact.value(x), ec = exact.curl(x);
      const Vec3c uv = v.transpose().cast<Complex>() * c;
      const Vec3c uc = d.transpose().cast<Complex>() * c;
      s += w * Eigen::Vector4d((uv - ev).squaredNorm(), (uc - ec).squaredNorm(),
                               ev.squaredNorm(), ec.squaredNorm());
    }
    part[t] = s;
  }
  const Eigen::Vector4d tot = ordered_sum(part, Eigen::Vector4d::Zero().eval());
  ErrorReport r;
  r.k = k;
  r.h = space.mesh().h;
  r.p = space.degree();
  r.dofs = space.num_free();
  const double k2 = k * k;
  r.abs_l2 = std::sqrt(tot(0));
  r.abs_curl_k = std::sqrt(tot(1) / k2);
  r.abs_hk_curl = std::sqrt(tot(0) + tot(1) / k2);
  r.ref_l2 = std::sqrt(tot(2));
  r.ref_curl_k = std::sqrt(tot(3) / k2);
  r.ref_hk_curl = std::sqrt(tot(2) + tot(3) / k2);
  auto rel = [&r](double a, double b)
  {
    if (b == 0.0)
    {
      r.zero_reference = true;
      return a;
    }
    return a / b;
  };
  r.rel_l2 = rel(r.abs_l2, r.ref_l2);
  r.rel_curl_k = rel(r.abs_curl_k, r.ref_curl_k);
  r.rel_hk_curl = rel(r.abs_hk_curl, r.ref_hk_curl);
  return r;
}

CsolEstimate estimate_csol(const SparseMatrixC &P, const SparseMatrixC &M, double tol,
                           int max_iter)
{
  if (P.rows() != M.rows() || P.cols() != M.cols())
  {
    throw ArgumentError("estimate_csol: P and M differ in size");
  }
  const auto lu = factorize(P);
  // T = P^{-1} M; its M-adjoint is P^{-H} M since M is Hermitian.
  const LinearOp op = [&](const Eigen::VectorXcd &x) { return lu->solve(M * x); };
  const LinearOp adj = [&](const Eigen::VectorXcd &y) { return lu->solve_adjoint(M * y); };
  const SingularValueEstimate e = largest_generalized_singular_value(op, adj, M, tol, max_iter);
  return {e.sigma, e.iterations};
}

int boundary_components(const Mesh &mesh)
{
  std::vector<int> parent(mesh.num_vertices());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int a)
  {
    while (parent[a] != a)
    {
      a = parent[a] = parent[parent[a]];
    }
    return a;
  };
  std::vector<char> on_boundary(mesh.num_vertices(), 0);
  for (int f = 0; f < mesh.num_faces(); f++)
  {
    if (!mesh.is_boundary_face(f))
    {
      continue;
    }
    const auto &fv = mesh.faces[f];
    for (int i = 0; i < 3; i++)
    {
      on_boundary[fv[i]] = 1;
      parent[find(fv[i])] = find(fv[(i + 1) % 3]);
    }
  }
  int count = 0;
  for (int v = 0; v < mesh.num_vertices(); v++)
  {
    count += on_boundary[v] && find(v) == v ? 1 : 0;
  }
  return count;
}

namespace
{

CoefficientField adjoint_field(const CoefficientField &f)
{
  CoefficientField g = f;
  g.eval = [e = f.eval](const Vec3 &x) { return Mat3c(e(x).adjoint()); };
  g.description = "adjoint(" + f.description + ")";
  return g;
}

// Rows of `rows`-space free DOFs, columns of `cols`-space free DOFs.
SparseMatrixC restrict_rect(const SparseMatrixC &A, const FeSpace &rows, const FeSpace &cols)
{
  std::vector<Eigen::Triplet<Complex>> trip;
  for (int c = 0; c < A.outerSize(); c++)
  {
    for (SparseMatrixC::InnerIterator it(A, c); it; ++it)
    {
      const int r = rows.free_index(static_cast<int>(it.row()));
      const int cc = cols.free_index(static_cast<int>(it.col()));
      if (r >= 0 && cc >= 0)
      {
        trip.emplace_back(r, cc, it.value());
      }
    }
  }
  SparseMatrixC out(rows.num_free(), cols.num_free());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Eigen::SparseMatrix<double> real_part(const SparseMatrixC &A)
{
  return A.real();
}

// Largest eigenvalue of the Hermitian pencil (A, B), B positive definite.
double top_eigenvalue(Eigen::MatrixXd A, Eigen::MatrixXd B)
{
  const lapack_int n = static_cast<lapack_int>(A.rows());
  lapack_int m = 0;
  std::vector<double> w(n);
  std::vector<lapack_int> ifail(n);
  double z = 0.0;
  const lapack_int info =
      LAPACKE_dsygvx(LAPACK_COL_MAJOR, 1, 'N', 'I', 'U', n, A.data(), n, B.data(), n, 0.0, 0.0, n,
                     n, 2.0 * LAPACKE_dlamch('S'), &m, w.data(), &z, 1, ifail.data());
  if (info != 0 || m != 1)
  {
    throw NumericError("generalized eigenproblem failed (info " + std::to_string(info) + ")");
  }
  return w[0];
}

double top_eigenvalue(Eigen::MatrixXcd A, Eigen::MatrixXcd B)
{
  const lapack_int n = static_cast<lapack_int>(A.rows());
  lapack_int m = 0;
  std::vector<double> w(n);
  std::vector<lapack_int> ifail(n);
  Complex z = 0.0;
  const lapack_int info =
      LAPACKE_zhegvx(LAPACK_COL_MAJOR, 1, 'N', 'I', 'U', n, A.data(), n, B.data(), n, 0.0, 0.0, n,
                     n, 2.0 * LAPACKE_dlamch('S'), &m, w.data(), &z, 1, ifail.data());
  if (info != 0 || m != 1)
  {
    throw NumericError("generalized eigenproblem failed (info " + std::to_string(info) + ")");
  }
  return w[0];
}

// R = X^H S_eps^{-H} S_I S_eps^{-1} X, the Gram matrix of the Pi0 images.
Eigen::MatrixXd pi0_gram(const Eigen::SparseMatrix<double> &X,
                         const Eigen::SparseMatrix<double> &Seps,
                         const Eigen::SparseMatrix<double> &SI)
{
  Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>> llt(Seps);
  if (llt.info() != Eigen::Success)
  {
    throw NumericError("weighted Poisson matrix is not positive definite");
  }
  const bool same = (Seps - SI).norm() == 0.0;
  const int n = static_cast<int>(X.cols());
  Eigen::MatrixXd R(n, n);
  constexpr int kBlock = 256;
  for (int c0 = 0; c0 < n; c0 += kBlock)
  {
    const int nb = std::min(kBlock, n - c0);
    const Eigen::MatrixXd Xb = Eigen::MatrixXd(X.middleCols(c0, nb));
    const Eigen::MatrixXd Y = llt.solve(Xb);
    const Eigen::MatrixXd V = same ? Y : Eigen::MatrixXd(llt.solve(SI * Y));
    R.middleCols(c0, nb) = X.transpose() * V;
  }
  return R;
}

Eigen::MatrixXcd pi0_gram(const SparseMatrixC &X, const SparseMatrixC &Seps,
                          const SparseMatrixC &SI)
{
  const auto lu = factorize(Seps);
  const int n = static_cast<int>(X.cols());
  Eigen::MatrixXcd R(n, n);
  std::vector<Eigen::VectorXcd> cols(n);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; j++)
  {
    const Eigen::VectorXcd y = lu->solve(Eigen::VectorXcd(X.col(j)));
    cols[j] = lu->solve_adjoint(SI * y);
  }
  const SparseMatrixC Xh = X.adjoint();
  for (int j = 0; j < n; j++)
  {
    R.col(j) = Xh * cols[j];
  }
  return R;
}

template <typename S>
double gamma_dv_impl(const Eigen::SparseMatrix<S> &Meps, const Eigen::SparseMatrix<double> &G,
                     const Eigen::SparseMatrix<S> &X, const Eigen::SparseMatrix<S> &Seps,
                     const Eigen::SparseMatrix<S> &SI, const Eigen::SparseMatrix<double> &A,
                     int &divfree_dim)
{
  using Dense = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  const int nf = static_cast<int>(A.rows());
  const int nl = static_cast<int>(G.cols());
  // W_h = null(G^T M_eps) = orthogonal complement of range(M_eps^H G).
  const Dense C = Dense(Eigen::SparseMatrix<S>(Meps.adjoint()) * G.cast<S>());
  const Eigen::HouseholderQR<Dense> qr(C);
  const auto &qrm = qr.matrixQR();
  double dmax = 0.0;
  for (int i = 0; i < nl; i++)
  {
    dmax = std::max(dmax, std::abs(qrm(i, i)));
  }
  for (int i = 0; i < nl; i++)
  {
    if (std::abs(qrm(i, i)) <= 1e-12 * dmax)
    {
      throw NumericError("gradient constraint is rank deficient");
    }
  }
  divfree_dim = nf - nl;
  if (divfree_dim == 0)
  {
    return 0.0;
  }
  Dense R = pi0_gram(X, Seps, SI);
  R = (0.5 * (R + R.adjoint())).eval();
  Dense Ad = Dense(A.cast<S>());
  const auto Q = qr.householderQ();
  Dense RQ = Q.adjoint() * R;
  RQ = RQ * Q;
  Dense AQ = Q.adjoint() * Ad;
  AQ = AQ * Q;
  Dense Rz = RQ.bottomRightCorner(divfree_dim, divfree_dim);
  Dense Az = AQ.bottomRightCorner(divfree_dim, divfree_dim);
  return top_eigenvalue(std::move(Rz), std::move(Az));
}

}  // namespace

GammaDvResult estimate_gamma_dv(const Mesh &mesh, const CoefficientField &eps, double k,
                                const GammaDvOptions &opts)
{
  check_k(k);
  if (opts.enrichment < 1)
  {
    throw ArgumentError("enrichment must be at least 1");
  }
  if (map_kind(opts.family) != MapKind::hcurl)
  {
    throw ArgumentError("gamma_dv needs a Nedelec family");
  }
  if (euler_characteristic(mesh) != 1 || boundary_components(mesh) != 1)
  {
    throw CapabilityError(
        "gamma_dv needs a simply connected domain with connected boundary (Euler characteristic "
        "1, one boundary component); got characteristic " +
        std::to_string(euler_characteristic(mesh)) + " and " +
        std::to_string(boundary_components(mesh)) + " boundary components");
  }
  const CoefficientField e = opts.adjoint ? adjoint_field(eps) : eps;
  const int p = opts.p;
  const FeSpace ned = build_fe_space(mesh, opts.family, p, BoundaryCondition::pec);
  const int lag_degree = opts.family == Family::nedelec1 ? p : p + 1;
  const FeSpace lag = build_fe_space(mesh, Family::lagrange, lag_degree, BoundaryCondition::pec);
  const FeSpace rich =
      build_fe_space(mesh, Family::lagrange, p + opts.enrichment, BoundaryCondition::pec);

  const Eigen::SparseMatrix<double> G = restrict_free(build_discrete_gradient(lag, ned), ned, lag);
  const SparseMatrixC Meps = restrict_free(assemble_mass(ned, e), ned);
  const SparseMatrixC X = restrict_rect(
      assemble_bilinear(rich, Operand::derivative, ned, Operand::value, e), rich, ned);
  const SparseMatrixC Seps = restrict_free(
      assemble_bilinear(rich, Operand::derivative, rich, Operand::derivative, e), rich);
  const SparseMatrixC SI = restrict_free(
      assemble_bilinear(rich, Operand::derivative, rich, Operand::derivative, identity_field()),
      rich);
  const SparseMatrixC A = restrict_free(assemble_curlcurl(ned, identity_field(), k), ned) +
                          restrict_free(assemble_mass(ned, identity_field()), ned);
  const Eigen::SparseMatrix<double> Ar = real_part(A);

  GammaDvResult r;
  r.free_dofs = ned.num_free();
  r.enriched_dofs = rich.num_free();
  double lambda = 0.0;
  if (e.real_symmetric)
  {
    lambda = gamma_dv_impl<double>(real_part(Meps), G, real_part(X), real_part(Seps),
                                   real_part(SI), Ar, r.divfree_dim);
  }
  else
  {
    lambda = gamma_dv_impl<Complex>(Meps, G, X, Seps, SI, Ar, r.divfree_dim);
  }
  r.gamma = std::sqrt(std::max(lambda, 0.0));
  return r;
}

}  // namespace mxfem
