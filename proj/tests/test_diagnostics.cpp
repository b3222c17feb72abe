// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <doctest.h>

#include "mxfem/diagnostics.hpp"
#include "mxfem/quadrature.hpp"
#include "mxfem/solver.hpp"

using namespace mxfem;

namespace
{

constexpr double kPi = std::numbers::pi;

ExactField constant_x()
{
  ExactField f;
  f.value = [](const Vec3 &) { return Vec3c(1.0, 0.0, 0.0); };
  f.curl = [](const Vec3 &) { return Vec3c::Zero().eval(); };
  f.partial = [](const Vec3 &, const std::array<int, 3> &) { return Vec3c::Zero().eval(); };
  return f;
}

// (x^2, x y, z) with partials.
ExactField quadratic()
{
  ExactField f;
  f.value = [](const Vec3 &x) { return Vec3c(x(0) * x(0), x(0) * x(1), x(2)); };
  f.curl = [](const Vec3 &x) { return Vec3c(0.0, 0.0, x(1)); };
  f.partial = [](const Vec3 &x, const std::array<int, 3> &a)
  {
    const int l = a[0] + a[1] + a[2];
    Vec3c d = Vec3c::Zero();
    if (l == 1)
    {
      if (a[0] == 1)
      {
        d = Vec3c(2.0 * x(0), x(1), 0.0);
      }
      else if (a[1] == 1)
      {
        d = Vec3c(0.0, x(0), 0.0);
      }
      else
      {
        d = Vec3c(0.0, 0.0, 1.0);
      }
    }
    else if (l == 2)
    {
      if (a[0] == 2)
      {
        d = Vec3c(2.0, 0.0, 0.0);
      }
      else if (a[0] == 1 && a[1] == 1)
      {
        d = Vec3c(0.0, 1.0, 0.0);
      }
    }
    return d;
  };
  return f;
}

ExactField smooth()
{
  ExactField f;
  f.value = [](const Vec3 &x)
  { return Vec3c(std::sin(x(1)) * x(2), Complex(0.0, std::cos(x(0) + x(2))), x(0) * x(1)); };
  // curl = (d_y E_z - d_z E_y, d_z E_x - d_x E_z, d_x E_y - d_y E_x)
  f.curl = [](const Vec3 &x)
  {
    const Complex s(0.0, -std::sin(x(0) + x(2)));
    return Vec3c(x(0) - s, std::sin(x(1)) - x(1), s - std::cos(x(1)) * x(2));
  };
  return f;
}

Eigen::MatrixXcd dense(const SparseMatrixC &A)
{
  return Eigen::MatrixXcd(A);
}

// Brute-force gamma_dv: kernel basis from a dense LU, Pi0 from dense solves
// and a generalized Hermitian eigensolver.
double gamma_dv_oracle(const Mesh &mesh, const CoefficientField &eps, double k, int p,
                       int enrichment)
{
  const FeSpace ned = build_fe_space(mesh, Family::nedelec1, p, BoundaryCondition::pec);
  const FeSpace lag = build_fe_space(mesh, Family::lagrange, p, BoundaryCondition::pec);
  const FeSpace rich =
      build_fe_space(mesh, Family::lagrange, p + enrichment, BoundaryCondition::pec);
  const Eigen::MatrixXd G =
      Eigen::MatrixXd(restrict_free(build_discrete_gradient(lag, ned), ned, lag));
  const Eigen::MatrixXcd Me = dense(restrict_free(assemble_mass(ned, eps), ned));
  const Eigen::MatrixXcd constraint = G.transpose().cast<Complex>() * Me;
  Eigen::MatrixXcd Z;
  if (constraint.rows() == 0)
  {
    Z = Eigen::MatrixXcd::Identity(ned.num_free(), ned.num_free());
  }
  else
  {
    Z = Eigen::FullPivLU<Eigen::MatrixXcd>(constraint).kernel();
  }
  const Eigen::MatrixXcd Xfull = dense(
      assemble_bilinear(rich, Operand::derivative, ned, Operand::value, eps));
  Eigen::MatrixXcd X(rich.num_free(), ned.num_free());
  for (int i = 0; i < rich.num_free(); i++)
  {
    for (int j = 0; j < ned.num_free(); j++)
    {
      X(i, j) = Xfull(rich.free_dofs()[i], ned.free_dofs()[j]);
    }
  }
  const Eigen::MatrixXcd Se = dense(restrict_free(
      assemble_bilinear(rich, Operand::derivative, rich, Operand::derivative, eps), rich));
  const Eigen::MatrixXcd SI = dense(restrict_free(
      assemble_bilinear(rich, Operand::derivative, rich, Operand::derivative, identity_field()),
      rich));
  const Eigen::MatrixXcd Phi = Se.partialPivLu().solve(X * Z);
  const Eigen::MatrixXcd R = Phi.adjoint() * SI * Phi;
  const Eigen::MatrixXcd A =
      dense(restrict_free(assemble_curlcurl(ned, identity_field(), k), ned)) +
      dense(restrict_free(assemble_mass(ned, identity_field()), ned));
  const Eigen::MatrixXcd Az = Z.adjoint() * A * Z;
  const Eigen::MatrixXcd Rz = 0.5 * (R + R.adjoint());
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(
      Rz, 0.5 * (Az + Az.adjoint()), Eigen::EigenvaluesOnly);
  return std::sqrt(ges.eigenvalues().maxCoeff());
}

}  // namespace

TEST_CASE("norms of closed-form and discrete fields")
{
  const Mesh mesh = generate_cube_mesh(4);
  const double k = 3.0;
  const ExactField c = constant_x();
  CHECK(std::abs(compute_norm(mesh, c, k, NormKind::l2) - 1.0) < 1e-13);
  CHECK(compute_norm(mesh, c, k, NormKind::curl_k) == 0.0);

  const FeSpace ned = build_fe_space(mesh, Family::nedelec1, 1);
  const Eigen::VectorXcd ci = canonical_interpolate(ned, c.value);
  CHECK(std::abs(compute_norm(ned, ci, k, NormKind::l2) - 1.0) < 1e-13);
  CHECK(compute_norm(ned, ci, k, NormKind::curl_k) < 1e-13);

  // E = (0, 0, sin(pi x)): ||k^{-1} curl E|| = (pi/k)/sqrt(2).
  ExactField s;
  s.value = [](const Vec3 &x) { return Vec3c(0.0, 0.0, std::sin(kPi * x(0))); };
  s.curl = [](const Vec3 &x) { return Vec3c(0.0, -kPi * std::cos(kPi * x(0)), 0.0); };
  CHECK(std::abs(compute_norm(mesh, s, k, NormKind::curl_k, 0, 14) - kPi / k / std::sqrt(2.0)) <
        1e-9);

  // H_k identity and homogeneity.
  const ExactField sm = smooth();
  const double l2 = compute_norm(mesh, sm, k, NormKind::l2);
  const double ck = compute_norm(mesh, sm, k, NormKind::curl_k);
  const double hk = compute_norm(mesh, sm, k, NormKind::hk_curl);
  CHECK(std::abs(hk * hk - (l2 * l2 + ck * ck)) < 1e-12 * hk * hk);

  const FeSpace n2 = build_fe_space(mesh, Family::nedelec2, 2);
  const Eigen::VectorXcd u = canonical_interpolate(n2, sm.value);
  const Complex scale(-1.5, 2.0);
  for (const NormKind kind : {NormKind::l2, NormKind::curl_k, NormKind::hk_curl})
  {
    const double a = compute_norm(n2, u, k, kind);
    const double b = compute_norm(n2, Eigen::VectorXcd(scale * u), k, kind);
    CHECK(std::abs(b - std::abs(scale) * a) < 1e-12 * b);
  }
  const double dl2 = compute_norm(n2, u, k, NormKind::l2);
  const double dck = compute_norm(n2, u, k, NormKind::curl_k);
  const double dhk = compute_norm(n2, u, k, NormKind::hk_curl);
  CHECK(std::abs(dhk * dhk - (dl2 * dl2 + dck * dck)) < 1e-12 * dhk * dhk);

  CHECK_THROWS_AS(compute_norm(mesh, s, -1.0, NormKind::l2), ArgumentError);
  CHECK(norm_kind_from_string("hk_curl") == NormKind::hk_curl);
  CHECK_THROWS_AS(norm_kind_from_string("h2"), ArgumentError);
}

TEST_CASE("piecewise norms")
{
  const Mesh mesh = generate_cube_mesh(2);
  const double k = 2.0;
  const ExactField q = quadratic();
  // Closed form on the unit cube: j = 0 gives int x^4 + x^2 y^2 + z^2 = 1/5 + 1/9 + 1/3.
  const double j0 = 1.0 / 5.0 + 1.0 / 9.0 + 1.0 / 3.0;
  CHECK(std::abs(compute_norm(mesh, q, k, NormKind::piecewise_hj, 0) - std::sqrt(j0)) < 1e-13);
  // First derivatives: (2x, y, 0), (0, x, 0), (0, 0, 1) -> 4/3 + 1/3 + 1/3 + 1.
  const double j1 = j0 + (4.0 / 3.0 + 1.0 / 3.0 + 1.0 / 3.0 + 1.0) / (k * k);
  CHECK(std::abs(compute_norm(mesh, q, k, NormKind::piecewise_hj, 1) - std::sqrt(j1)) < 1e-13);
  const double j2 = j1 + (4.0 + 1.0) / std::pow(k, 4.0);
  CHECK(std::abs(compute_norm(mesh, q, k, NormKind::piecewise_hj, 2) - std::sqrt(j2)) < 1e-13);

  // The quadratic field lies in the second-kind space of degree 2.
  const FeSpace n2 = build_fe_space(mesh, Family::nedelec2, 2);
  const Eigen::VectorXcd u = canonical_interpolate(n2, q.value);
  for (int j = 0; j <= 2; j++)
  {
    CAPTURE(j);
    CHECK(std::abs(compute_norm(n2, u, k, NormKind::piecewise_hj, j) -
                   compute_norm(mesh, q, k, NormKind::piecewise_hj, j)) < 1e-12);
  }
  CHECK_THROWS_AS(compute_norm(n2, u, k, NormKind::piecewise_hj, 3), CapabilityError);
  CHECK_THROWS_AS(compute_norm(mesh, smooth(), k, NormKind::piecewise_hj, 1), CapabilityError);

  // Scalar Lagrange field x y z: ||v||^2 = 1/27, gradient (yz, xz, xy) adds 3/9 k^{-2}.
  const FeSpace lag = build_fe_space(mesh, Family::lagrange, 3);
  const Eigen::VectorXcd l =
      canonical_interpolate(lag, [](const Vec3 &x) { return Vec3c(x.prod(), 0.0, 0.0); });
  CHECK(std::abs(compute_norm(lag, l, k, NormKind::piecewise_hj, 1) -
                 std::sqrt(1.0 / 27.0 + 1.0 / 3.0 / (k * k))) < 1e-12);
}

TEST_CASE("error reports")
{
  const Mesh mesh = generate_cube_mesh(3);
  const double k = 4.0;
  const FeSpace ned = build_fe_space(mesh, Family::nedelec1, 2);
  const ExactField e = smooth();
  const Eigen::VectorXcd u = canonical_interpolate(ned, e.value, 24);
  const int order = 8;
  const ErrorReport r = relative_error(ned, u, e, k, order);

  // Independent path: pointwise evaluation of the FE function.
  const QuadratureRule rule = build_quadrature(order);
  double el2 = 0.0, ecurl = 0.0;
  for (int t = 0; t < mesh.num_tets(); t++)
  {
    const ElementMap &map = ned.local_map(t);
    for (std::size_t q = 0; q < rule.size(); q++)
    {
      const PointValue pv = evaluate(ned, u, t, rule.points[q]);
      const Vec3 x = map(rule.points[q]);
      const double w = rule.weights[q] * std::abs(map.det);
      el2 += w * (pv.value - e.value(x)).squaredNorm();
      ecurl += w * (pv.deriv - e.curl(x)).squaredNorm();
    }
  }
  CHECK(std::abs(r.abs_l2 - std::sqrt(el2)) < 1e-10 * r.abs_l2);
  CHECK(std::abs(r.abs_curl_k - std::sqrt(ecurl) / k) < 1e-10 * r.abs_curl_k);
  CHECK(std::abs(r.abs_hk_curl * r.abs_hk_curl -
                 (r.abs_l2 * r.abs_l2 + r.abs_curl_k * r.abs_curl_k)) <
        1e-12 * r.abs_hk_curl * r.abs_hk_curl);
  CHECK(std::abs(r.ref_hk_curl - compute_norm(mesh, e, k, NormKind::hk_curl, 0, order)) <
        1e-12 * r.ref_hk_curl);
  CHECK(r.rel_hk_curl == doctest::Approx(r.abs_hk_curl / r.ref_hk_curl).epsilon(1e-14));
  CHECK(!r.zero_reference);
  CHECK(r.p == 2);
  CHECK(r.dofs == ned.num_free());
  CHECK(r.h == mesh.h);

  // A field the space reproduces has no error.
  const ExactField q = quadratic();
  const FeSpace n2 = build_fe_space(mesh, Family::nedelec2, 2);
  const ErrorReport rq = relative_error(n2, canonical_interpolate(n2, q.value), q, k);
  CHECK(rq.rel_hk_curl < 1e-13);

  ExactField zero;
  zero.value = [](const Vec3 &) { return Vec3c::Zero().eval(); };
  zero.curl = zero.value;
  const ErrorReport rz = relative_error(ned, Eigen::VectorXcd::Zero(ned.num_dofs()), zero, k);
  CHECK(rz.zero_reference);
  CHECK(rz.rel_l2 == 0.0);
  CHECK(rz.rel_hk_curl == 0.0);
}

TEST_CASE("solution operator norm")
{
  // Coercive surrogate A_D + M: C_sol <= 1.
  const Mesh m2 = generate_cube_mesh(2);
  const FeSpace ned = build_fe_space(m2, Family::nedelec1, 1, BoundaryCondition::pec);
  const double k = 3.0;
  const SparseMatrixC C = restrict_free(assemble_curlcurl(ned, identity_field(), k), ned);
  const SparseMatrixC M = restrict_free(assemble_mass(ned, identity_field()), ned);
  const CsolEstimate cs = estimate_csol(SparseMatrixC(C + M), M, 1e-12);
  CHECK(cs.value <= 1.0 + 1e-6);
  CHECK(cs.value > 0.9);

  // Dense oracle on one cube cell, with and without boundary conditions.
  const Mesh m1 = generate_cube_mesh(1);
  const CoefficientSet pml = make_coefficients("pml", build_pml_profile(0.5, 0.3, 0.8));
  for (const BoundaryCondition bc : {BoundaryCondition::pec, BoundaryCondition::none})
  {
    const FeSpace s = build_fe_space(m1, Family::nedelec1, 2, bc);
    const LinearSystem sys = assemble_system(s, pml.mu_inv, pml.eps, 2.5);
    const SparseMatrixC Ms = restrict_free(assemble_mass(s, identity_field()), s);
    const Eigen::MatrixXcd Md = dense(Ms);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Md);
    const Eigen::MatrixXcd Mh = es.operatorSqrt();
    const Eigen::MatrixXcd T = Mh * dense(sys.P).partialPivLu().solve(Mh);
    const double oracle = Eigen::JacobiSVD<Eigen::MatrixXcd>(T).singularValues()(0);
    const CsolEstimate est = estimate_csol(sys.P, Ms, 1e-14, 100000);
    CHECK(std::abs(est.value - oracle) < 1e-6 * oracle);
  }

  // Near a discrete cavity resonance C_sol peaks.
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      Eigen::MatrixXd(dense(restrict_free(assemble_curlcurl(ned, identity_field(), 1.0), ned))
                          .real()),
      Eigen::MatrixXd(dense(M).real()), Eigen::EigenvaluesOnly);
  // First nonzero eigenvalue and the next distinct one.
  double kr = 0.0, kr2 = 0.0;
  for (Eigen::Index i = 0; i < ges.eigenvalues().size(); i++)
  {
    const double lam = ges.eigenvalues()(i);
    if (kr == 0.0 && lam > 1e-8)
    {
      kr = std::sqrt(lam);
    }
    else if (kr > 0.0 && std::sqrt(lam) > kr * (1.0 + 1e-6))
    {
      kr2 = std::sqrt(lam);
      break;
    }
  }
  REQUIRE(kr > 0.0);
  REQUIRE(kr2 > kr);
  std::vector<double> ks;
  for (const double f : {0.85, 0.93, 0.98})
  {
    ks.push_back(f * kr);
  }
  for (const double f : {0.03, 0.15, 0.35})
  {
    ks.push_back(kr + f * (kr2 - kr));
  }
  std::vector<double> cs_scan;
  for (const double kk : ks)
  {
    const LinearSystem sys = assemble_system(ned, identity_field(), identity_field(), kk);
    cs_scan.push_back(estimate_csol(sys.P, M, 1e-10, 100000).value);
  }
  CHECK(cs_scan[0] < cs_scan[1]);
  CHECK(cs_scan[1] < cs_scan[2]);
  CHECK(cs_scan[3] > cs_scan[4]);
  CHECK(cs_scan[4] > cs_scan[5]);

  // The curl-curl matrix alone has the gradients as kernel.
  CHECK_THROWS_AS(estimate_csol(C, M), SingularMatrixError);
}

TEST_CASE("divergence conformity factor")
{
  const Mesh m1 = generate_cube_mesh(1);
  const Mesh m2 = generate_cube_mesh(2);
  const CoefficientField I = identity_field();
  const double k = 5.0;
  for (const int p : {1, 2})
  {
    CAPTURE(p);
    GammaDvOptions o;
    o.p = p;
    const GammaDvResult r = estimate_gamma_dv(m1, I, k, o);
    CHECK(std::abs(r.gamma - gamma_dv_oracle(m1, I, k, p, 2)) < 1e-8);
    CHECK(r.gamma >= 0.0);
  }
  GammaDvOptions o;
  const GammaDvResult r2 = estimate_gamma_dv(m2, I, k, o);
  CHECK(std::abs(r2.gamma - gamma_dv_oracle(m2, I, k, 1, 2)) < 1e-8);
  CHECK(r2.divfree_dim == r2.free_dofs - 1);  // one interior vertex

  // Variable real weight; adjoint coincides.
  const CoefficientField w =
      scalar_field([](const Vec3 &x) { return 1.0 + x(0) + 0.5 * x(1) * x(2); }, "1+x+yz/2");
  const double gw = estimate_gamma_dv(m2, w, k, o).gamma;
  CHECK(std::abs(gw - gamma_dv_oracle(m2, w, k, 1, 2)) < 1e-8);
  GammaDvOptions adj = o;
  adj.adjoint = true;
  CHECK(std::abs(estimate_gamma_dv(m2, w, k, adj).gamma - gw) < 1e-12);

  // Complex weight: separate code path, same oracle.
  const CoefficientField ce =
      constant_field(Mat3c(Complex(2.0, 1.0) * Mat3c::Identity()), "(2+i) I");
  GammaDvOptions p2;
  p2.p = 2;
  CHECK(std::abs(estimate_gamma_dv(m1, ce, k, p2).gamma - gamma_dv_oracle(m1, ce, k, 2, 2)) <
        1e-8);

  GammaDvOptions bad;
  bad.enrichment = 0;
  CHECK_THROWS_AS(estimate_gamma_dv(m2, I, k, bad), ArgumentError);
  const Mesh shell = generate_shell_mesh(4, 0.25, 0.5);
  CHECK(boundary_components(shell) == 2);
  CHECK(boundary_components(m2) == 1);
  CHECK_THROWS_AS(estimate_gamma_dv(shell, I, k, o), CapabilityError);
}
