// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <random>

#include <doctest.h>

#include "mxfem/assembly.hpp"
#include "mxfem/solver.hpp"

using namespace mxfem;

namespace
{

Eigen::MatrixXcd dense(const SparseMatrixC &A)
{
  return Eigen::MatrixXcd(A);
}

Eigen::VectorXcd random_vector(int n, unsigned seed)
{
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; i++)
  {
    const double re = nd(gen);
    v(i) = Complex(re, nd(gen));
  }
  return v;
}

int count_below(const Eigen::VectorXd &ev, double tol)
{
  int c = 0;
  for (Eigen::Index i = 0; i < ev.size(); i++)
  {
    c += std::abs(ev(i)) < tol ? 1 : 0;
  }
  return c;
}

bool bitwise_equal(const SparseMatrixC &a, const SparseMatrixC &b)
{
  return a.nonZeros() == b.nonZeros() &&
         std::memcmp(a.valuePtr(), b.valuePtr(), sizeof(Complex) * a.nonZeros()) == 0 &&
         std::memcmp(a.innerIndexPtr(), b.innerIndexPtr(), sizeof(int) * a.nonZeros()) == 0;
}

Mesh pml_box()
{
  return generate_box_mesh({4, 4, 4}, Vec3(-2, -2, -2), Vec3(2, 2, 2));
}

}  // namespace

TEST_CASE("curl-curl kernel")
{
  const Mesh mesh = generate_cube_mesh(2);
  for (const int p : {1, 2})
  {
    CAPTURE(p);
    const FeSpace ned = build_fe_space(mesh, Family::nedelec1, p, BoundaryCondition::pec);
    const FeSpace lag = build_fe_space(mesh, Family::lagrange, p, BoundaryCondition::pec);
    const SparseMatrixC C = assemble_curlcurl(ned, identity_field(), 1.0);
    const SparseMatrixC Cf = restrict_free(C, ned);

    // A_D G q = 0 for any nodal vector q.
    const Eigen::SparseMatrix<double> G = build_discrete_gradient(lag, ned);
    const Eigen::VectorXcd q = random_vector(lag.num_dofs(), 5);
    const Eigen::VectorXcd gq = G.cast<Complex>() * q;
    CHECK((C * gq).norm() < 1e-12 * C.norm() * gq.norm());

    const Eigen::MatrixXcd D = dense(Cf);
    CHECK((D - D.adjoint()).norm() < 1e-14 * D.norm());
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(D).eigenvalues();
    CHECK(ev.minCoeff() > -1e-12 * ev.maxCoeff());
    CHECK(count_below(ev, 1e-10 * ev.maxCoeff()) == lag.num_free());
  }

  // Without boundary conditions the kernel is the gradients modulo constants.
  const FeSpace ned = build_fe_space(mesh, Family::nedelec1, 1);
  const Eigen::VectorXd ev =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(dense(assemble_curlcurl(ned, identity_field(), 1.0)))
          .eigenvalues();
  CHECK(count_below(ev, 1e-10 * ev.maxCoeff()) == mesh.num_vertices() - 1);

  // Quadratic scaling in 1/k.
  const SparseMatrixC C1 = assemble_curlcurl(ned, identity_field(), 1.5);
  const SparseMatrixC C2 = assemble_curlcurl(ned, identity_field(), 3.0);
  CHECK((C1 - 4.0 * C2).norm() < 1e-14 * C1.norm());

  CHECK_THROWS_AS(assemble_curlcurl(ned, identity_field(), 0.0), ArgumentError);
  CHECK_THROWS_AS(assemble_curlcurl(ned, identity_field(), -1.0), ArgumentError);
}

TEST_CASE("mass matrices")
{
  const Mesh mesh = generate_cube_mesh(2);
  const FeSpace ned = build_fe_space(mesh, Family::nedelec2, 2, BoundaryCondition::pec);
  const SparseMatrixC M = restrict_free(assemble_mass(ned, identity_field()), ned);
  const Eigen::MatrixXcd Md = dense(M);
  CHECK((Md - Md.adjoint()).norm() < 1e-14 * Md.norm());
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(Md).eigenvalues();
  CHECK(ev.minCoeff() > 0.0);

  // Weight bounded below by c gives M_w - c M_I positive semidefinite.
  const double c = 0.75;
  const CoefficientField w = scalar_field(
      [c](const Vec3 &x) { return c + x.squaredNorm(); }, "c + |x|^2");
  const Eigen::MatrixXcd Mw = dense(restrict_free(assemble_mass(ned, w), ned));
  const Eigen::VectorXd evw =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(Mw - c * Md).eigenvalues();
  CHECK(evw.minCoeff() > -1e-12 * evw.maxCoeff());

  // Complex symmetric weights give M^T = M but not M^H = M.
  const CoefficientSet pml = make_coefficients("pml", build_pml_profile(0.6, 1.0, 1.8));
  const Mesh box = pml_box();
  const FeSpace nb = build_fe_space(box, Family::nedelec1, 1, BoundaryCondition::pec);
  const SparseMatrixC Mp = assemble_mass(nb, pml.mu_inv);
  CHECK(SparseMatrixC(Mp - SparseMatrixC(Mp.transpose())).norm() < 1e-14 * Mp.norm());
  CHECK(SparseMatrixC(Mp - SparseMatrixC(Mp.adjoint())).norm() > 1e-3 * Mp.norm());

  CHECK_THROWS_AS(assemble_mass(build_fe_space(mesh, Family::lagrange, 1), identity_field()),
                  CapabilityError);
}

TEST_CASE("garding inequality with absorbing layer")
{
  const CoefficientSet pml =
      make_coefficients("pml_with_scatterer_bump", build_pml_profile(0.6, 1.0, 1.8));
  const Mesh box = pml_box();
  const double k = 2.0;
  const FeSpace ned = build_fe_space(box, Family::nedelec1, 1, BoundaryCondition::pec);
  const LinearSystem sys = assemble_system(ned, pml.mu_inv, pml.eps, k);
  const CoefficientField re_eps{[&pml](const Vec3 &x) { return Mat3c(pml.eps(x).real()); },
                                true,
                                {},
                                "Re eps"};
  const SparseMatrixC Me = restrict_free(assemble_mass(ned, re_eps), ned);
  for (unsigned s = 0; s < 8; s++)
  {
    const Eigen::VectorXcd x = random_vector(ned.num_free(), 100 + s);
    const double lhs = x.dot(sys.P * x).real() + x.dot(Me * x).real();
    CHECK(lhs >= 0.0);
  }
  CHECK(sys.P.rows() == ned.num_free());
  CHECK(sys.rhs.size() == ned.num_free());
}

TEST_CASE("lowest order system is nonsingular")
{
  const Mesh mesh = generate_cube_mesh(1);
  const FeSpace ned = build_fe_space(mesh, Family::nedelec1, 1, BoundaryCondition::pec);
  const LinearSystem sys = assemble_system(ned, identity_field(), identity_field(), 1.0);
  CHECK(sys.P.rows() == 1);
  CHECK_NOTHROW(factorize(sys.P));
}

TEST_CASE("load vectors")
{
  const Mesh mesh = generate_cube_mesh(2);
  const FeSpace ned = build_fe_space(mesh, Family::nedelec1, 2);
  const FieldFn zero = [](const Vec3 &) { return Vec3c::Zero().eval(); };
  CHECK(assemble_load(ned, zero).norm() == 0.0);

  const FieldFn f = [](const Vec3 &x) { return Vec3c(std::sin(x(1)), x(0) * x(2), 1.0); };
  const FieldFn g = [](const Vec3 &x) { return Vec3c(Complex(0.0, x(0)), 2.0, x(1) * x(1)); };
  const Complex a(0.5, -2.0);
  const FieldFn h = [&](const Vec3 &x) { return Vec3c(a * f(x) + g(x)); };
  const Eigen::VectorXcd bf = assemble_load(ned, f), bg = assemble_load(ned, g);
  CHECK((assemble_load(ned, h) - (a * bf + bg)).norm() < 1e-13 * bf.norm());

  // A field the space reproduces: b = M alpha with alpha its interpolant.
  const Vec3c c(1.0, Complex(-2.0, 0.5), 3.0);
  const FieldFn cf = [c](const Vec3 &) { return c; };
  const Eigen::VectorXcd alpha = canonical_interpolate(ned, cf);
  const SparseMatrixC M = assemble_mass(ned, identity_field());
  CHECK((assemble_load(ned, cf) - M * alpha).norm() < 1e-13 * alpha.norm());

  // Lowest-order closed form on one tet: int_K phi_e = |K|/4 (grad l_b - grad l_a).
  Mesh one;
  one.vertices = {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 1, 0), Vec3(0.5, 0.5, 1.5)};
  one.tets = {{0, 1, 2, 3}};
  one.regions = {0};
  build_topology(one);
  const FeSpace w = build_fe_space(one, Family::nedelec1, 1);
  const ElementMap map = w.local_map(0);
  const double vol = std::abs(map.det) / 6.0;
  const Mat3 Binv = map.B.inverse();
  // Barycentric gradients: rows of B^{-1} for l_1..l_3, l_0 = -(sum).
  std::array<Vec3, 4> grad;
  for (int i = 0; i < 3; i++)
  {
    grad[i + 1] = Binv.row(i).transpose();
  }
  grad[0] = -(grad[1] + grad[2] + grad[3]);
  for (int comp = 0; comp < 3; comp++)
  {
    const FieldFn unit = [comp](const Vec3 &) { return Vec3c(Vec3c::Unit(comp)); };
    const Eigen::VectorXcd b = assemble_load(w, unit);
    for (int e = 0; e < 6; e++)
    {
      const auto &ev = one.edges[e];
      const int la = static_cast<int>(std::find(one.sorted_tets[0].begin(),
                                                one.sorted_tets[0].end(), ev[0]) -
                                      one.sorted_tets[0].begin());
      const int lb = static_cast<int>(std::find(one.sorted_tets[0].begin(),
                                                one.sorted_tets[0].end(), ev[1]) -
                                      one.sorted_tets[0].begin());
      const double expect = vol / 4.0 * (grad[lb] - grad[la])(comp);
      CHECK(std::abs(b(w.entity_dof(EntityKind::edge, e)) - expect) < 1e-14);
    }
  }

  const FieldFn bad = [](const Vec3 &x) -> Vec3c
  {
    if (x(0) > 0.5)
    {
      throw std::runtime_error("outside");
    }
    return Vec3c::Zero();
  };
  CHECK_THROWS_AS(assemble_load(ned, bad), DomainError);
}

TEST_CASE("serial and parallel assembly agree bitwise")
{
  const CoefficientSet pml =
      make_coefficients("pml_with_scatterer_bump", build_pml_profile(0.4, 1.0, 1.8));
  const Mesh box = pml_box();
  const FeSpace ned = build_fe_space(box, Family::nedelec2, 2, BoundaryCondition::pec);
  const FieldFn f = [](const Vec3 &x) { return Vec3c(std::cos(x(2)), x(0), Complex(0.0, 1.0)); };
  const LinearSystem par = assemble_system(ned, pml.mu_inv, pml.eps, 3.0, f);
  const LinearSystem ser = assemble_system(ned, pml.mu_inv, pml.eps, 3.0, f, ExecutionMode::serial);
  CHECK(bitwise_equal(par.P, ser.P));
  CHECK(std::memcmp(par.rhs.data(), ser.rhs.data(), sizeof(Complex) * par.rhs.size()) == 0);
}

TEST_CASE("coordinate dump")
{
  SparseMatrixC A(3, 3);
  A.insert(2, 0) = Complex(1.0, -0.5);
  A.insert(0, 1) = Complex(0.1, 0.0);
  A.makeCompressed();
  const std::string coo = write_complex_coo(A);
  CHECK(coo == "%%complex-coo 3 2\n0 1 0.10000000000000001 0\n2 0 1 -0.5\n");
}
