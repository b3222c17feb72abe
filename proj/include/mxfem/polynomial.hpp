// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MXFEM_POLYNOMIAL_HPP
#define MXFEM_POLYNOMIAL_HPP

#include <array>

#include "mxfem/types.hpp"

namespace mxfem::poly
{

// Trivariate polynomials in the monomial basis x^a y^b z^c, stored as dense
// coefficient vectors over all monomials of total degree <= kMaxDegree. The
// enumeration is graded: degree 0 first, then degree 1, and so on, so the
// first monomial_count(d) entries span P_d.
inline constexpr int kMaxDegree = 9;

int monomial_count(int degree);
const std::array<int, 3> &exponents(int index);
int index_of(int a, int b, int c);
int total_degree(int index);

using Poly = Eigen::VectorXd;
using VecPoly = std::array<Poly, 3>;

Poly zero();
Poly monomial(int a, int b, int c, double coeff = 1.0);

// Values of the first monomial_count(degree) monomials at x.
Eigen::VectorXd monomial_values(const Vec3 &x, int degree);

double eval(const Poly &p, const Vec3 &x);
Poly derivative(const Poly &p, int dir);
Poly times_coordinate(const Poly &p, int dir);
int degree(const Poly &p, double tol = 0.0);

Poly divergence(const VecPoly &v);
VecPoly curl(const VecPoly &v);
VecPoly gradient(const Poly &p);
// x × v
VecPoly cross_x(const VecPoly &v);

}  // namespace mxfem::poly

#endif  // MXFEM_POLYNOMIAL_HPP
