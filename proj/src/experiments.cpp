// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "mxfem/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "mxfem/solver.hpp"

namespace mxfem
{

namespace
{

constexpr double kPi = std::numbers::pi;

// n-th derivative of sin(a t).
double dsin(double a, double t, int n)
{
  return std::pow(a, n) * std::sin(a * t + n * kPi / 2.0);
}

// n-th derivative of g(t) = t (1 - t).
double dg(double t, int n)
{
  switch (n)
  {
  case 0:
    return t * (1.0 - t);
  case 1:
    return 1.0 - 2.0 * t;
  case 2:
    return -2.0;
  default:
    return 0.0;
  }
}

void check_k(double k)
{
  if (!(k > 0.0))
  {
    throw ArgumentError("wavenumber must be positive");
  }
}

ManufacturedSolution sine3(double k)
{
  ManufacturedSolution m;
  m.id = "sine3";
  m.E.value = [](const Vec3 &x)
  {
    const double sx = std::sin(kPi * x(0)), sy = std::sin(kPi * x(1)), sz = std::sin(kPi * x(2));
    return Vec3c(sy * sz, sx * sz, sx * sy);
  };
  m.E.curl = [](const Vec3 &x)
  {
    const double sx = std::sin(kPi * x(0)), sy = std::sin(kPi * x(1)), sz = std::sin(kPi * x(2));
    const double cx = std::cos(kPi * x(0)), cy = std::cos(kPi * x(1)), cz = std::cos(kPi * x(2));
    return Vec3c(kPi * sx * (cy - cz), kPi * sy * (cz - cx), kPi * sz * (cx - cy));
  };
  m.E.partial = [](const Vec3 &x, const std::array<int, 3> &a)
  {
    // Component i omits the sine in direction i.
    Vec3c d;
    for (int i = 0; i < 3; i++)
    {
      double v = a[i] == 0 ? 1.0 : 0.0;
      for (int j = 0; j < 3; j++)
      {
        if (j != i)
        {
          v *= dsin(kPi, x(j), a[j]);
        }
      }
      d(i) = v;
    }
    return d;
  };
  const double c = 2.0 * kPi * kPi / (k * k) - 1.0;
  m.f = [c, E = m.E.value](const Vec3 &x) { return Vec3c(c * E(x)); };
  return m;
}

ManufacturedSolution gradient_bump()
{
  ManufacturedSolution m;
  m.id = "gradient";
  m.E.partial = [](const Vec3 &x, const std::array<int, 3> &a)
  {
    Vec3c d;
    for (int i = 0; i < 3; i++)
    {
      double v = 1.0;
      for (int j = 0; j < 3; j++)
      {
        v *= dg(x(j), a[j] + (j == i ? 1 : 0));
      }
      d(i) = v;
    }
    return d;
  };
  m.E.value = [P = m.E.partial](const Vec3 &x) { return P(x, {0, 0, 0}); };
  m.E.curl = [](const Vec3 &) { return Vec3c::Zero().eval(); };
  m.f = [E = m.E.value](const Vec3 &x) { return Vec3c(-E(x)); };
  return m;
}

ManufacturedSolution tm_mode(double k, const ManufacturedParams &params)
{
  if (!(params.side > 0.0))
  {
    throw ArgumentError("tm_mode needs a positive side length");
  }
  const int mode = params.mode > 0 ? params.mode : tm_mode_number(k, params.side);
  const double a = mode * kPi / params.side;
  ManufacturedSolution m;
  m.id = "tm_mode";
  m.E.value = [a](const Vec3 &x)
  { return Vec3c(0.0, 0.0, std::sin(a * x(0)) * std::sin(a * x(1))); };
  m.E.curl = [a](const Vec3 &x)
  {
    return Vec3c(a * std::sin(a * x(0)) * std::cos(a * x(1)),
                 -a * std::cos(a * x(0)) * std::sin(a * x(1)), 0.0);
  };
  m.E.partial = [a](const Vec3 &x, const std::array<int, 3> &al)
  {
    const double v = al[2] == 0 ? dsin(a, x(0), al[0]) * dsin(a, x(1), al[1]) : 0.0;
    return Vec3c(0.0, 0.0, v);
  };
  const double c = 2.0 * a * a / (k * k) - 1.0;
  m.f = [c, E = m.E.value](const Vec3 &x) { return Vec3c(c * E(x)); };
  return m;
}

// Smootherstep r(t) = 6t^5 - 15t^4 + 10t^3 on [0, 1], constant outside; r,
// r', r''.
std::array<double, 3> smootherstep(double t)
{
  if (t <= 0.0)
  {
    return {0.0, 0.0, 0.0};
  }
  if (t >= 1.0)
  {
    return {1.0, 0.0, 0.0};
  }
  return {t * t * t * (10.0 + t * (6.0 * t - 15.0)), 30.0 * t * t * (t - 1.0) * (t - 1.0),
          60.0 * t * (t - 1.0) * (2.0 * t - 1.0)};
}

// E_z = g(x) sin(b y) e^{i kappa x}, b = m pi / L, kappa^2 + b^2 = k^2, where
// g ramps from 0 to 1 over a width pi / k at both ends. Away from the ramps
// the field solves the homogeneous equation, so the load sits near x = 0 and
// x = L and the field is self-similar in k up to the number of wavelengths.
ManufacturedSolution tm_wave(double k, const ManufacturedParams &params)
{
  if (!(params.side > 0.0))
  {
    throw ArgumentError("tm_wave needs a positive side length");
  }
  const double L = params.side;
  const int mode = params.mode > 0 ? params.mode : tm_wave_mode_number(k, L);
  const double b = mode * kPi / L;
  const double w = kPi / k;
  if (!(k > b) || !(2.0 * w <= L))
  {
    throw ArgumentError("tm_wave needs k > m pi / L and k L >= 2 pi");
  }
  const Complex ik(0.0, std::sqrt(k * k - b * b));
  // g, g', g''
  auto envelope = [L, w](double x)
  {
    const auto l = smootherstep(x / w);
    const auto r = smootherstep((L - x) / w);
    return std::array{l[0] * r[0], (l[1] * r[0] - l[0] * r[1]) / w,
                      (l[2] * r[0] - 2.0 * l[1] * r[1] + l[0] * r[2]) / (w * w)};
  };
  ManufacturedSolution m;
  m.id = "tm_wave";
  m.E.value = [b, ik, envelope](const Vec3 &x)
  { return Vec3c(0.0, 0.0, envelope(x(0))[0] * std::sin(b * x(1)) * std::exp(ik * x(0))); };
  m.E.curl = [b, ik, envelope](const Vec3 &x)
  {
    const auto g = envelope(x(0));
    const Complex e = std::exp(ik * x(0));
    return Vec3c(g[0] * b * std::cos(b * x(1)) * e, -(g[1] + ik * g[0]) * std::sin(b * x(1)) * e,
                 0.0);
  };
  m.f = [b, k, ik, envelope](const Vec3 &x)
  {
    const auto g = envelope(x(0));
    return Vec3c(0.0, 0.0,
                 -(g[2] + 2.0 * ik * g[1]) / (k * k) * std::sin(b * x(1)) * std::exp(ik * x(0)));
  };
  return m;
}

}  // namespace

int tm_wave_mode_number(double k, double side)
{
  check_k(k);
  if (!(side > 0.0))
  {
    throw ArgumentError("side length must be positive");
  }
  return std::max(1, static_cast<int>(std::lround(k * side / (2.0 * kPi))));
}

int tm_mode_number(double k, double side)
{
  return std::max(1, static_cast<int>(std::ceil(k * side / (std::sqrt(2.0) * kPi))));
}

ManufacturedSolution manufactured_solution(const std::string &id, double k,
                                           const ManufacturedParams &params)
{
  check_k(k);
  if (id == "sine3")
  {
    return sine3(k);
  }
  if (id == "gradient")
  {
    return gradient_bump();
  }
  if (id == "tm_mode")
  {
    return tm_mode(k, params);
  }
  if (id == "tm_wave")
  {
    return tm_wave(k, params);
  }
  throw ArgumentError("unknown manufactured solution '" + id + "'");
}

FieldFn numerical_load(const ExactField &E, const CoefficientField &mu_inv,
                       const CoefficientField &eps, double k, double step)
{
  check_k(k);
  if (!(step > 0.0))
  {
    throw ArgumentError("finite-difference step must be positive");
  }
  return [E, mu_inv, eps, k, step](const Vec3 &x)
  {
    auto flux = [&](const Vec3 &y) { return Vec3c(mu_inv(y) * E.curl(y)); };
    // D(i, j) = d_j flux_i
    Mat3c D;
    for (int j = 0; j < 3; j++)
    {
      const Vec3 dx = step * Vec3::Unit(j);
      D.col(j) = (flux(x + dx) - flux(x - dx)) / (2.0 * step);
    }
    const Vec3c curl(D(2, 1) - D(1, 2), D(0, 2) - D(2, 0), D(1, 0) - D(0, 1));
    return Vec3c(curl / (k * k) - eps(x) * E.value(x));
  };
}

std::string to_string(StudyKind s)
{
  switch (s)
  {
  case StudyKind::convergence:
    return "convergence";
  case StudyKind::interpolation:
    return "interpolation";
  case StudyKind::pollution:
    return "pollution";
  case StudyKind::preasymptotic:
    return "preasymptotic";
  case StudyKind::pml_verify:
    return "pml_verify";
  case StudyKind::gamma_dv_scan:
    return "gamma_dv_scan";
  case StudyKind::csol_scan:
    return "csol_scan";
  }
  return "?";
}

StudyKind study_kind_from_string(const std::string &s)
{
  for (const StudyKind k :
       {StudyKind::convergence, StudyKind::interpolation, StudyKind::pollution,
        StudyKind::preasymptotic, StudyKind::pml_verify, StudyKind::gamma_dv_scan,
        StudyKind::csol_scan})
  {
    if (to_string(k) == s)
    {
      return k;
    }
  }
  throw ArgumentError("unknown study kind '" + s + "'");
}

void StudyConfig::validate() const
{
  if (n_list.empty())
  {
    throw ArgumentError("mesh.n_list is empty");
  }
  for (std::size_t i = 0; i < n_list.size(); i++)
  {
    if (n_list[i] < 1 || (i > 0 && n_list[i] <= n_list[i - 1]))
    {
      throw ArgumentError("mesh.n_list must be strictly increasing positive integers");
    }
  }
  if (k_list.empty())
  {
    throw ArgumentError("problem.k_list is empty");
  }
  for (const double k : k_list)
  {
    if (!(k > 0.0) || !std::isfinite(k))
    {
      throw ArgumentError("problem.k_list entries must be positive");
    }
  }
  if (p < 1)
  {
    throw ArgumentError("fem.p must be at least 1");
  }
  if (family != Family::nedelec1 && family != Family::nedelec2)
  {
    throw ArgumentError("fem.family must be nedelec1 or nedelec2");
  }
  if (mesh_kind != "cube" && mesh_kind != "box" && mesh_kind != "slab")
  {
    throw ArgumentError("mesh.kind must be cube, box or slab");
  }
  if (!(mesh_side > 0.0))
  {
    throw ArgumentError("mesh.side must be positive");
  }
  if (!(pollution_kh > 0.0) || !(pollution_target > 0.0))
  {
    throw ArgumentError("pollution.kh and pollution.target must be positive");
  }
  if (gamma_enrichment < 1)
  {
    throw ArgumentError("gamma.enrichment must be at least 1");
  }
  if (!(csol_tol > 0.0))
  {
    throw ArgumentError("csol.tol must be positive");
  }
  build_pml_profile(pml_theta, pml_r_minus, pml_r_plus);
  for (const double t : pml_theta_list)
  {
    build_pml_profile(t, pml_r_minus, pml_r_plus);
  }
}

std::optional<double> observed_rate(double e0, double h0, double e1, double h1)
{
  if (e0 < 1e-12 || e1 < 1e-12)
  {
    return std::nullopt;
  }
  return std::log(e0 / e1) / std::log(h0 / h1);
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y)
{
  if (x.size() != y.size() || x.size() < 2)
  {
    throw ArgumentError("slope fit needs at least two points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); i++)
  {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Mesh study_mesh(const StudyConfig &cfg, int n)
{
  if (cfg.mesh_kind == "box")
  {
    return generate_box_mesh({n, n, n}, Vec3(-1, -1, -1), Vec3(1, 1, 1));
  }
  if (cfg.mesh_kind == "slab")
  {
    const double L = cfg.mesh_side;
    return generate_box_mesh({n, n, 1}, Vec3(0, 0, 0), Vec3(L, L, L / n));
  }
  return generate_cube_mesh(n, cfg.mesh_side);
}

namespace
{

using Clock = std::chrono::steady_clock;

StudyRow make_row(const std::string &study, double k, double h, int p, int dofs)
{
  StudyRow row;
  row.study = study;
  row.k = k;
  row.h = h;
  row.p = p;
  row.dofs = dofs;
  return row;
}

double elapsed_ms(Clock::time_point t0)
{
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

CoefficientSet study_coefficients(const StudyConfig &cfg)
{
  return make_coefficients(cfg.coeff_kind,
                           build_pml_profile(cfg.pml_theta, cfg.pml_r_minus, cfg.pml_r_plus));
}

// Moment quadrature for interpolating smooth closed-form fields.
int smooth_order(int p)
{
  return 2 * p + 6;
}

ManufacturedParams params_for(const StudyConfig &cfg)
{
  ManufacturedParams mp;
  mp.side = cfg.mesh_side;
  return mp;
}

struct SolveResult
{
  bool singular = false;
  Eigen::VectorXcd full;
};

SolveResult solve_problem(const FeSpace &space, const CoefficientField &mu_inv,
                          const CoefficientField &eps, double k, const FieldFn &f)
{
  const LinearSystem sys = assemble_system(space, mu_inv, eps, k, f);
  SolveResult r;
  try
  {
    const auto lu = factorize(sys.P);
    r.full = space.extend_from_free(lu->solve(sys.rhs));
  }
  catch (const SingularMatrixError &)
  {
    r.singular = true;
  }
  return r;
}

void fill_errors(StudyRow &row, const ErrorReport &e)
{
  row.err_l2_rel = e.rel_l2;
  row.err_curlk_rel = e.rel_curl_k;
  row.err_hkcurl_rel = e.rel_hk_curl;
}

// Rates between consecutive rows of the same study, k and p.
void append_rates(std::vector<StudyRow> &rows)
{
  for (std::size_t i = 1; i < rows.size(); i++)
  {
    const StudyRow &a = rows[i - 1];
    StudyRow &b = rows[i];
    if (a.study != b.study || a.k != b.k || a.p != b.p || !a.err_hkcurl_rel || !b.err_hkcurl_rel)
    {
      continue;
    }
    b.rate_hkcurl = observed_rate(*a.err_hkcurl_rel, a.h, *b.err_hkcurl_rel, b.h);
  }
}

std::string fmt(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt(const std::optional<double> &v)
{
  return v ? fmt(*v) : std::string();
}

std::string slope_key(const std::string &name, double k)
{
  return name + "_k=" + fmt(k);
}

}  // namespace

StudyReport run_convergence_study(const StudyConfig &cfg)
{
  cfg.validate();
  StudyReport rep;
  rep.config = cfg;
  const CoefficientSet coeffs = study_coefficients(cfg);
  for (const double k : cfg.k_list)
  {
    const ManufacturedSolution ms = manufactured_solution(cfg.solution_id, k, params_for(cfg));
    for (const int n : cfg.n_list)
    {
      const auto t0 = Clock::now();
      const Mesh mesh = study_mesh(cfg, n);
      const FeSpace space = build_fe_space(mesh, cfg.family, cfg.p, BoundaryCondition::pec);
      StudyRow row = make_row("convergence", k, mesh.h, cfg.p, space.num_free());
      const FieldFn f = coeffs.kind == "identity"
                            ? ms.f
                            : numerical_load(ms.E, coeffs.mu_inv, coeffs.eps, k, mesh.h / 100.0);
      const SolveResult sol = solve_problem(space, coeffs.mu_inv, coeffs.eps, k, f);
      const Eigen::VectorXcd interp =
          canonical_interpolate(space, ms.E.value, smooth_order(cfg.p));
      row.best_approx_rel = relative_error(space, interp, ms.E, k).rel_hk_curl;
      if (sol.singular)
      {
        row.singular = true;
      }
      else
      {
        fill_errors(row, relative_error(space, sol.full, ms.E, k));
      }
      if (cfg.timing)
      {
        row.wall_ms = elapsed_ms(t0);
      }
      rep.rows.push_back(row);
    }
  }
  append_rates(rep.rows);
  for (const double k : cfg.k_list)
  {
    std::vector<double> hs, es, ratio;
    for (const StudyRow &r : rep.rows)
    {
      if (r.k == k && r.err_hkcurl_rel && *r.err_hkcurl_rel > 0.0)
      {
        hs.push_back(r.h);
        es.push_back(*r.err_hkcurl_rel);
        ratio.push_back(*r.err_hkcurl_rel / *r.best_approx_rel);
      }
    }
    if (hs.size() >= 2)
    {
      rep.statistics[slope_key("hkcurl_slope", k)] = loglog_slope(hs, es);
      rep.statistics[slope_key("quasiopt_ratio_finest", k)] =
          std::max(ratio[ratio.size() - 1], ratio[ratio.size() - 2]);
    }
  }
  return rep;
}

StudyReport run_interpolation_study(const StudyConfig &cfg)
{
  cfg.validate();
  StudyReport rep;
  rep.config = cfg;
  for (const double k : cfg.k_list)
  {
    const ManufacturedSolution ms = manufactured_solution(cfg.solution_id, k, params_for(cfg));
    for (const int n : cfg.n_list)
    {
      const auto t0 = Clock::now();
      const Mesh mesh = study_mesh(cfg, n);
      const FeSpace space = build_fe_space(mesh, cfg.family, cfg.p, BoundaryCondition::pec);
      StudyRow row = make_row("interpolation", k, mesh.h, cfg.p, space.num_free());
      const Eigen::VectorXcd interp =
          canonical_interpolate(space, ms.E.value, smooth_order(cfg.p));
      const ErrorReport e = relative_error(space, interp, ms.E, k);
      fill_errors(row, e);
      row.best_approx_rel = e.rel_hk_curl;
      if (cfg.timing)
      {
        row.wall_ms = elapsed_ms(t0);
      }
      rep.rows.push_back(row);
    }
  }
  append_rates(rep.rows);
  for (const double k : cfg.k_list)
  {
    std::vector<double> hs, es;
    for (const StudyRow &r : rep.rows)
    {
      if (r.k == k && *r.err_hkcurl_rel > 0.0)
      {
        hs.push_back(r.h);
        es.push_back(*r.err_hkcurl_rel);
      }
    }
    if (hs.size() >= 2)
    {
      rep.statistics[slope_key("hkcurl_slope", k)] = loglog_slope(hs, es);
    }
  }
  return rep;
}

namespace
{

// Slab refinement with k h closest to the requested value.
int slab_cells(const StudyConfig &cfg, double k, double kh)
{
  return std::max(1, static_cast<int>(std::lround(k * std::sqrt(3.0) * cfg.mesh_side / kh)));
}

int free_dofs(const StudyConfig &cfg, int n)
{
  const Mesh mesh = study_mesh(cfg, n);
  return build_fe_space(mesh, cfg.family, cfg.p, BoundaryCondition::pec).num_free();
}

}  // namespace

StudyReport run_pollution_study(const StudyConfig &cfg)
{
  cfg.validate();
  const bool rescaled = cfg.kind == StudyKind::preasymptotic;
  const std::string name = rescaled ? "preasymptotic" : "pollution";
  StudyReport rep;
  rep.config = cfg;
  const CoefficientSet coeffs = study_coefficients(cfg);
  std::vector<double> ks = cfg.k_list;
  std::sort(ks.begin(), ks.end());
  bool dof_cap_hit = false;
  for (const double k : ks)
  {
    const auto t0 = Clock::now();
    ManufacturedParams mp = params_for(cfg);
    const ManufacturedSolution ms = manufactured_solution(cfg.solution_id, k, mp);
    int n = cfg.mesh_kind == "slab" ? slab_cells(cfg, k, cfg.pollution_kh)
                                    : std::max(1, static_cast<int>(std::lround(
                                                      k * std::sqrt(3.0) * cfg.mesh_side /
                                                      cfg.pollution_kh)));
    std::optional<double> csol;
    bool singular = false;
    // Rescaled regime: refine until (k h)^2 C_sol <= target on the mesh used.
    for (int pass = 0; pass < (rescaled ? 6 : 1); pass++)
    {
      if (!rescaled && !cfg.pollution_csol)
      {
        break;
      }
      const Mesh mesh = study_mesh(cfg, n);
      const FeSpace space = build_fe_space(mesh, cfg.family, cfg.p, BoundaryCondition::pec);
      const LinearSystem sys = assemble_system(space, coeffs.mu_inv, coeffs.eps, k);
      const SparseMatrixC M = restrict_free(assemble_mass(space, identity_field()), space);
      try
      {
        csol = estimate_csol(sys.P, M, cfg.csol_tol, 20000).value;
      }
      catch (const SingularMatrixError &)
      {
        singular = true;
        break;
      }
      const double kh = k * mesh.h;
      if (!rescaled || kh * kh * *csol <= cfg.pollution_target)
      {
        break;
      }
      const double h_needed = std::sqrt(cfg.pollution_target / *csol) / k;
      const int n_next = std::max(
          n + 1, static_cast<int>(std::ceil(n * mesh.h / h_needed)));
      if (free_dofs(cfg, n_next) > cfg.max_dofs)
      {
        dof_cap_hit = true;
        break;
      }
      n = n_next;
      csol.reset();
    }
    const Mesh mesh = study_mesh(cfg, n);
    const FeSpace space = build_fe_space(mesh, cfg.family, cfg.p, BoundaryCondition::pec);
    StudyRow row = make_row(name, k, mesh.h, cfg.p, space.num_free());
    row.c_sol = csol;
    const SolveResult sol =
        singular ? SolveResult{true, {}} : solve_problem(space, coeffs.mu_inv, coeffs.eps, k, ms.f);
    const Eigen::VectorXcd interp = canonical_interpolate(space, ms.E.value, smooth_order(cfg.p));
    row.best_approx_rel = relative_error(space, interp, ms.E, k).rel_hk_curl;
    if (sol.singular)
    {
      row.singular = true;
    }
    else
    {
      fill_errors(row, relative_error(space, sol.full, ms.E, k));
    }
    if (cfg.timing)
    {
      row.wall_ms = elapsed_ms(t0);
    }
    rep.rows.push_back(row);
  }
  bool increasing = true;
  double emin = INFINITY, emax = 0.0;
  for (std::size_t i = 0; i < rep.rows.size(); i++)
  {
    const StudyRow &r = rep.rows[i];
    if (!r.err_hkcurl_rel)
    {
      increasing = false;
      continue;
    }
    emin = std::min(emin, *r.err_hkcurl_rel);
    emax = std::max(emax, *r.err_hkcurl_rel);
    if (i > 0 && rep.rows[i - 1].err_hkcurl_rel &&
        !(*r.err_hkcurl_rel > *rep.rows[i - 1].err_hkcurl_rel))
    {
      increasing = false;
    }
  }
  rep.statistics["error_strictly_increasing"] = increasing ? 1.0 : 0.0;
  if (emax > 0.0)
  {
    rep.statistics["error_max_min_ratio"] = emax / emin;
  }
  if (rescaled)
  {
    rep.statistics["dof_cap_hit"] = dof_cap_hit ? 1.0 : 0.0;
  }
  return rep;
}

namespace
{

// Sample points on spherical shells, including both poles.
std::vector<Vec3> shell_samples(const std::vector<double> &radii, int directions)
{
  std::vector<Vec3> dirs{Vec3(0, 0, 1), Vec3(0, 0, -1)};
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < directions; i++)
  {
    const double z = 1.0 - 2.0 * (i + 0.5) / directions;
    const double rho = std::sqrt(1.0 - z * z);
    dirs.emplace_back(rho * std::cos(golden * i), rho * std::sin(golden * i), z);
  }
  std::vector<Vec3> out;
  for (const double r : radii)
  {
    for (const Vec3 &d : dirs)
    {
      out.push_back(r * d);
    }
  }
  return out;
}

PmlCertificate certify(const StudyConfig &cfg, double theta)
{
  const PmlProfile prof = build_pml_profile(theta, cfg.pml_r_minus, cfg.pml_r_plus);
  const CoefficientSet c = make_coefficients(cfg.coeff_kind == "identity" ? "pml" : cfg.coeff_kind,
                                             prof);
  const double rm = prof.r_minus, rp = prof.r_plus;
  std::vector<double> all_r, far_r;
  for (int i = 0; i <= 60; i++)
  {
    all_r.push_back(1e-3 + (rp + 1.0) * i / 60.0);
  }
  for (int i = 0; i <= 20; i++)
  {
    far_r.push_back(rp + 2.0 * rp * i / 20.0);
  }
  const std::vector<Vec3> all = shell_samples(all_r, 60);
  const std::vector<Vec3> far = shell_samples(far_r, 60);

  PmlCertificate pc;
  pc.theta = theta;
  const BoundReport cm = verify_coefficient_bounds(c.mu_inv, all, BoundMode::coercivity);
  const BoundReport ce = verify_coefficient_bounds(c.eps, all, BoundMode::coercivity);
  for (const auto &[rep, what] : {std::pair{cm, "Re mu^{-1}"}, std::pair{ce, "Re eps"}})
  {
    if (!(rep.value > 0.0))
    {
      char buf[256];
      std::snprintf(buf, sizeof(buf),
                    "PML coercivity check failed for %s at theta=%.6g: value %.6g at (%.6g, "
                    "%.6g, %.6g)",
                    what, theta, rep.value, rep.worst_point(0), rep.worst_point(1),
                    rep.worst_point(2));
      throw NumericError(buf);
    }
  }
  pc.coercivity_mu_inv = cm.value;
  pc.coercivity_eps = ce.value;
  pc.far_coercivity_mu_inv =
      verify_coefficient_bounds(c.mu_inv, far, BoundMode::coercivity).value;
  pc.far_coercivity_eps = verify_coefficient_bounds(c.eps, far, BoundMode::coercivity).value;
  pc.boundedness_mu_inv = verify_coefficient_bounds(c.mu_inv, all, BoundMode::boundedness).value;
  pc.boundedness_eps = verify_coefficient_bounds(c.eps, all, BoundMode::boundedness).value;
  const Mat3c target = Complex(1.0, std::tan(theta)) * Mat3c::Identity();
  for (const Vec3 &x : far)
  {
    pc.far_deviation = std::max(pc.far_deviation, (c.eps(x) - target).cwiseAbs().maxCoeff());
    pc.far_deviation = std::max(pc.far_deviation, (c.mu(x) - target).cwiseAbs().maxCoeff());
  }
  const double above = std::nextafter(rm, 2.0 * rp);
  const double below = std::nextafter(rp, 0.0);
  pc.junction_residual = std::max({std::abs(prof.f(above)), std::abs(prof.fp(above)),
                                   std::abs(prof.f(below) - rp), std::abs(prof.fp(below) - 1.0)});
  return pc;
}

}  // namespace

StudyReport run_pml_verification(const StudyConfig &cfg)
{
  cfg.validate();
  StudyReport rep;
  rep.config = cfg;
  for (const double theta : cfg.pml_theta_list)
  {
    rep.certificates.push_back(certify(cfg, theta));
  }
  // Manufactured convergence with the complex coefficients.
  const CoefficientSet coeffs =
      make_coefficients(cfg.coeff_kind == "identity" ? "pml" : cfg.coeff_kind,
                        build_pml_profile(cfg.pml_theta, cfg.pml_r_minus, cfg.pml_r_plus));
  for (const double k : cfg.k_list)
  {
    const ManufacturedSolution ms = manufactured_solution(cfg.solution_id, k, params_for(cfg));
    for (const int n : cfg.n_list)
    {
      const auto t0 = Clock::now();
      const Mesh mesh = study_mesh(cfg, n);
      const FeSpace space = build_fe_space(mesh, cfg.family, cfg.p, BoundaryCondition::pec);
      StudyRow row = make_row("pml_verify", k, mesh.h, cfg.p, space.num_free());
      const FieldFn f = numerical_load(ms.E, coeffs.mu_inv, coeffs.eps, k, mesh.h / 100.0);
      const SolveResult sol = solve_problem(space, coeffs.mu_inv, coeffs.eps, k, f);
      const Eigen::VectorXcd interp =
          canonical_interpolate(space, ms.E.value, smooth_order(cfg.p));
      row.best_approx_rel = relative_error(space, interp, ms.E, k).rel_hk_curl;
      if (sol.singular)
      {
        row.singular = true;
      }
      else
      {
        fill_errors(row, relative_error(space, sol.full, ms.E, k));
      }
      if (cfg.timing)
      {
        row.wall_ms = elapsed_ms(t0);
      }
      rep.rows.push_back(row);
    }
  }
  append_rates(rep.rows);
  for (const double k : cfg.k_list)
  {
    std::vector<double> hs, es;
    for (const StudyRow &r : rep.rows)
    {
      if (r.k == k && r.err_hkcurl_rel && *r.err_hkcurl_rel > 0.0)
      {
        hs.push_back(r.h);
        es.push_back(*r.err_hkcurl_rel);
      }
    }
    if (hs.size() >= 2)
    {
      rep.statistics[slope_key("hkcurl_slope", k)] = loglog_slope(hs, es);
    }
  }
  return rep;
}

StudyReport run_gamma_dv_scan(const StudyConfig &cfg)
{
  cfg.validate();
  StudyReport rep;
  rep.config = cfg;
  const CoefficientSet coeffs = study_coefficients(cfg);
  GammaDvOptions opts;
  opts.family = cfg.family;
  opts.p = cfg.p;
  opts.enrichment = cfg.gamma_enrichment;
  std::map<int, Mesh> meshes;
  for (const int n : cfg.n_list)
  {
    meshes.emplace(n, study_mesh(cfg, n));
  }
  for (const double k : cfg.k_list)
  {
    for (const int n : cfg.n_list)
    {
      const auto t0 = Clock::now();
      const Mesh &mesh = meshes.at(n);
      const GammaDvResult g = estimate_gamma_dv(mesh, coeffs.eps, k, opts);
      StudyRow row = make_row("gamma_dv_scan", k, mesh.h, cfg.p, g.free_dofs);
      row.gamma_dv = g.gamma;
      if (cfg.timing)
      {
        row.wall_ms = elapsed_ms(t0);
      }
      rep.rows.push_back(row);
    }
  }
  for (const double k : cfg.k_list)
  {
    std::vector<double> hs, gs;
    for (const StudyRow &r : rep.rows)
    {
      if (r.k == k)
      {
        hs.push_back(r.h);
        gs.push_back(*r.gamma_dv);
      }
    }
    if (hs.size() >= 2)
    {
      rep.statistics[slope_key("gamma_h_slope", k)] = loglog_slope(hs, gs);
    }
  }
  if (cfg.k_list.size() >= 2)
  {
    const int n = cfg.n_list.back();
    std::vector<double> ks, gs;
    for (const StudyRow &r : rep.rows)
    {
      if (r.h == meshes.at(n).h)
      {
        ks.push_back(r.k);
        gs.push_back(*r.gamma_dv);
      }
    }
    rep.statistics["gamma_k_slope_n=" + std::to_string(n)] = loglog_slope(ks, gs);
  }
  return rep;
}

StudyReport run_csol_scan(const StudyConfig &cfg)
{
  cfg.validate();
  StudyReport rep;
  rep.config = cfg;
  const CoefficientSet coeffs = study_coefficients(cfg);
  for (const int n : cfg.n_list)
  {
    const Mesh mesh = study_mesh(cfg, n);
    const FeSpace space = build_fe_space(mesh, cfg.family, cfg.p, BoundaryCondition::pec);
    const SparseMatrixC M = restrict_free(assemble_mass(space, identity_field()), space);
    std::vector<double> ks, cs;
    for (const double k : cfg.k_list)
    {
      const auto t0 = Clock::now();
      StudyRow row = make_row("csol_scan", k, mesh.h, cfg.p, space.num_free());
      const LinearSystem sys = assemble_system(space, coeffs.mu_inv, coeffs.eps, k);
      try
      {
        row.c_sol = estimate_csol(sys.P, M, cfg.csol_tol, 20000).value;
        ks.push_back(k);
        cs.push_back(*row.c_sol);
      }
      catch (const SingularMatrixError &)
      {
        row.singular = true;
      }
      if (cfg.timing)
      {
        row.wall_ms = elapsed_ms(t0);
      }
      rep.rows.push_back(row);
    }
    if (ks.size() >= 2)
    {
      rep.statistics["csol_k_slope_n=" + std::to_string(n)] = loglog_slope(ks, cs);
    }
  }
  return rep;
}

StudyReport run_study(const StudyConfig &cfg)
{
  switch (cfg.kind)
  {
  case StudyKind::convergence:
    return run_convergence_study(cfg);
  case StudyKind::interpolation:
    return run_interpolation_study(cfg);
  case StudyKind::pollution:
  case StudyKind::preasymptotic:
    return run_pollution_study(cfg);
  case StudyKind::pml_verify:
    return run_pml_verification(cfg);
  case StudyKind::gamma_dv_scan:
    return run_gamma_dv_scan(cfg);
  case StudyKind::csol_scan:
    return run_csol_scan(cfg);
  }
  throw ArgumentError("unknown study kind");
}

std::string format_csv(const StudyReport &report)
{
  std::string out = "study,k,h,p,dofs,err_l2_rel,err_curlk_rel,err_hkcurl_rel,best_approx_rel,"
                    "gamma_dv,c_sol,rate_hkcurl,wall_ms\n";
  for (const StudyRow &r : report.rows)
  {
    out += r.study + "," + fmt(r.k) + "," + fmt(r.h) + "," + std::to_string(r.p) + "," +
           std::to_string(r.dofs) + "," + fmt(r.err_l2_rel) + "," + fmt(r.err_curlk_rel) + "," +
           fmt(r.err_hkcurl_rel) + "," + fmt(r.best_approx_rel) + "," + fmt(r.gamma_dv) + "," +
           fmt(r.c_sol) + "," + fmt(r.rate_hkcurl) + "," + fmt(r.wall_ms) + "\n";
  }
  return out;
}

std::string format_certificates_csv(const StudyReport &report)
{
  std::string out = "theta,coercivity_mu_inv,coercivity_eps,far_coercivity_mu_inv,"
                    "far_coercivity_eps,boundedness_mu_inv,boundedness_eps,far_deviation,"
                    "junction_residual\n";
  for (const PmlCertificate &c : report.certificates)
  {
    out += fmt(c.theta) + "," + fmt(c.coercivity_mu_inv) + "," + fmt(c.coercivity_eps) + "," +
           fmt(c.far_coercivity_mu_inv) + "," + fmt(c.far_coercivity_eps) + "," +
           fmt(c.boundedness_mu_inv) + "," + fmt(c.boundedness_eps) + "," +
           fmt(c.far_deviation) + "," + fmt(c.junction_residual) + "\n";
  }
  return out;
}

}  // namespace mxfem
