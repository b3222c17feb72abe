// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MXFEM_EXPERIMENTS_HPP
#define MXFEM_EXPERIMENTS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mxfem/diagnostics.hpp"

namespace mxfem
{

//
// Manufactured solutions for mu = eps = I: E with vanishing tangential trace
// on the domain boundary, its curl, and f = k^{-2} curl curl E - E.
//
//   sine3     (sin pi y sin pi z, sin pi x sin pi z, sin pi x sin pi y) on
//             [0,1]^3 or [-1,1]^3
//   gradient  grad(x y z (1-x)(1-y)(1-z)) on [0,1]^3; curl E = 0
//   tm_mode   (0, 0, sin(m pi x/L) sin(m pi y/L)) on [0,L]^2 x [0,t]
//   tm_wave   (0, 0, g(x) sin(m pi y/L) e^{i kappa x}) on [0,L]^2 x [0,t],
//             kappa = sqrt(k^2 - (m pi/L)^2), g a C^2 ramp of width pi/k at
//             x = 0 and x = L; needs k L >= 2 pi; no `partial`
//
struct ManufacturedParams
{
  double side = 1.0;  // L for tm_mode and tm_wave
  int mode = 0;       // m; 0 picks tm_mode_number or tm_wave_mode_number
};

struct ManufacturedSolution
{
  std::string id;
  ExactField E;
  FieldFn f;
};

// Throws ArgumentError for an unknown id or k <= 0.
ManufacturedSolution manufactured_solution(const std::string &id, double k,
                                           const ManufacturedParams &params = {});

// Mode number used by tm_mode when params.mode == 0: ceil(k L / (sqrt(2) pi)).
int tm_mode_number(double k, double side);

// Mode number used by tm_wave when params.mode == 0: max(1, round(k L / 2 pi)).
int tm_wave_mode_number(double k, double side);

// f = k^{-2} curl(mu^{-1} curl E) - eps E with the outer curl taken by central
// differences of step `step` applied to mu^{-1} curl E.
FieldFn numerical_load(const ExactField &E, const CoefficientField &mu_inv,
                       const CoefficientField &eps, double k, double step);

enum class StudyKind
{
  convergence,
  interpolation,
  pollution,
  preasymptotic,
  pml_verify,
  gamma_dv_scan,
  csol_scan
};

std::string to_string(StudyKind s);
StudyKind study_kind_from_string(const std::string &s);

struct StudyConfig
{
  StudyKind kind = StudyKind::convergence;
  std::string mesh_kind = "cube";  // cube | box | slab
  std::vector<int> n_list{4, 8, 16};
  double mesh_side = 1.0;          // slab side length L
  int p = 1;
  Family family = Family::nedelec1;
  std::vector<double> k_list{5.0};
  std::string coeff_kind = "identity";
  double pml_theta = 0.7853981633974483;
  double pml_r_minus = 0.5;
  double pml_r_plus = 0.9;
  std::vector<double> pml_theta_list{0.39269908169872414, 0.7853981633974483,
                                     1.1780972450961828};
  std::string solution_id = "sine3";
  // pollution / preasymptotic
  double pollution_kh = 0.6;
  double pollution_target = 0.5;  // bound on (kh)^2 C_sol
  bool pollution_csol = false;
  int max_dofs = 60000;
  // diagnostics
  double csol_tol = 1e-8;
  int gamma_enrichment = 2;
  std::string output_csv;
  bool timing = false;

  // Throws ArgumentError for non-increasing refinements, non-positive k, etc.
  void validate() const;
};

struct StudyRow
{
  std::string study;
  double k = 0.0;
  double h = 0.0;
  int p = 0;
  int dofs = 0;
  std::optional<double> err_l2_rel;
  std::optional<double> err_curlk_rel;
  std::optional<double> err_hkcurl_rel;
  std::optional<double> best_approx_rel;
  std::optional<double> gamma_dv;
  std::optional<double> c_sol;
  std::optional<double> rate_hkcurl;
  std::optional<double> wall_ms;
  bool singular = false;
};

// Coefficient certification for one PML angle.
struct PmlCertificate
{
  double theta = 0.0;
  double coercivity_mu_inv = 0.0;      // sampled min over the whole sample set
  double coercivity_eps = 0.0;
  double far_coercivity_mu_inv = 0.0;  // r >= R+ only
  double far_coercivity_eps = 0.0;
  double boundedness_mu_inv = 0.0;
  double boundedness_eps = 0.0;
  double far_deviation = 0.0;          // max |tensor - (1 + i tan theta) I|
  double junction_residual = 0.0;      // C^1 mismatch of the profile at R-, R+
};

struct StudyReport
{
  StudyConfig config;
  std::vector<StudyRow> rows;
  std::vector<PmlCertificate> certificates;
  // Named scalar statistics (monotonicity flags, ratios, fitted slopes).
  std::map<std::string, double> statistics;
};

// observed rate log(e_i/e_{i+1}) / log(h_i/h_{i+1}), absent when either
// error is below 1e-12.
std::optional<double> observed_rate(double e0, double h0, double e1, double h1);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y);

StudyReport run_convergence_study(const StudyConfig &cfg);
StudyReport run_interpolation_study(const StudyConfig &cfg);
StudyReport run_pollution_study(const StudyConfig &cfg);
StudyReport run_pml_verification(const StudyConfig &cfg);
StudyReport run_gamma_dv_scan(const StudyConfig &cfg);
StudyReport run_csol_scan(const StudyConfig &cfg);

// Dispatches on cfg.kind (preasymptotic runs the pollution study with the
// rescaled regime).
StudyReport run_study(const StudyConfig &cfg);

// CSV with the fixed header
// study,k,h,p,dofs,err_l2_rel,err_curlk_rel,err_hkcurl_rel,best_approx_rel,
// gamma_dv,c_sol,rate_hkcurl,wall_ms; absent fields empty.
std::string format_csv(const StudyReport &report);
std::string format_certificates_csv(const StudyReport &report);

// Mesh used by the studies for refinement n.
Mesh study_mesh(const StudyConfig &cfg, int n);

}  // namespace mxfem

#endif  // MXFEM_EXPERIMENTS_HPP
