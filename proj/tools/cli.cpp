// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <charconv>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

namespace mxfem::cli
{

const std::vector<KeySpec> &config_keys()
{
  static const std::vector<KeySpec> keys{
      {"study.kind", "string",
       "convergence | interpolation | pollution | preasymptotic | pml_verify | gamma_dv_scan | "
       "csol_scan"},
      {"mesh.kind", "string", "cube | box ([-1,1]^3) | slab ([0,L]^2 x [0,L/n])"},
      {"mesh.n_list", "int list", "refinements, strictly increasing"},
      {"mesh.side", "float", "cube or slab side length L"},
      {"fem.p", "int", "polynomial degree"},
      {"fem.family", "string", "nedelec1 | nedelec2"},
      {"problem.k_list", "float list", "wavenumbers"},
      {"coeff.kind", "string", "identity | pml | pml_with_scatterer_bump"},
      {"pml.theta", "float", "PML scaling angle (radians)"},
      {"pml.r_minus", "float", "inner PML radius"},
      {"pml.r_plus", "float", "outer PML radius"},
      {"pml.theta_list", "float list", "angles certified by pml-check"},
      {"solution.id", "string", "sine3 | gradient | tm_mode | tm_wave"},
      {"pollution.kh", "float", "fixed k h of the pollution scan"},
      {"pollution.target", "float", "bound on (kh)^2 C_sol in the preasymptotic scan"},
      {"pollution.csol", "bool", "also estimate C_sol in the pollution scan"},
      {"pollution.max_dofs", "int", "DOF cap of the preasymptotic refinement"},
      {"csol.tol", "float", "power-iteration tolerance"},
      {"gamma.enrichment", "int", "Lagrange degree increase for the divergence diagnostic"},
      {"output.dir", "string", "output directory (overridden by --out-dir)"},
      {"output.csv", "string", "CSV file name inside the output directory"},
      {"output.timing", "bool", "fill the wall_ms column"},
      {"threads", "int", "OpenMP thread cap (0 = runtime default)"},
  };
  return keys;
}

namespace
{

const KeySpec *find_key(const std::string &name)
{
  for (const KeySpec &k : config_keys())
  {
    if (k.name == name)
    {
      return &k;
    }
  }
  return nullptr;
}

std::string trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
  {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Removes a trailing comment outside quotes.
std::string strip_comment(const std::string &s)
{
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); i++)
  {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\'))
    {
      quoted = !quoted;
    }
    else if (s[i] == '#' && !quoted)
    {
      return s.substr(0, i);
    }
  }
  return s;
}

// Normalized raw value: strings unquoted, arrays as comma-separated items.
std::string normalize_value(const std::string &value, bool allow_bare)
{
  const std::string v = trim(value);
  if (v.empty())
  {
    throw ArgumentError("missing value");
  }
  if (v.front() == '"')
  {
    if (v.size() < 2 || v.back() != '"')
    {
      throw ArgumentError("unterminated string");
    }
    std::string out;
    for (std::size_t i = 1; i + 1 < v.size(); i++)
    {
      if (v[i] == '\\' && i + 2 < v.size())
      {
        i++;
      }
      else if (v[i] == '"')
      {
        throw ArgumentError("unexpected quote in string");
      }
      out += v[i];
    }
    return out;
  }
  if (v.front() == '[')
  {
    if (v.back() != ']')
    {
      throw ArgumentError("unterminated array");
    }
    std::string out;
    std::stringstream ss(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(ss, item, ','))
    {
      item = trim(item);
      if (item.empty())
      {
        throw ArgumentError("empty array item");
      }
      out += (out.empty() ? "" : ",") + item;
    }
    return out;
  }
  if (!allow_bare && v.find_first_of(" \t") != std::string::npos)
  {
    throw ArgumentError("unquoted value contains spaces");
  }
  return v;
}

double to_double(const std::string &key, const std::string &s)
{
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
  {
    throw ArgumentError(key + ": expected a number, got '" + s + "'");
  }
  return v;
}

int to_int(const std::string &key, const std::string &s)
{
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
  {
    throw ArgumentError(key + ": expected an integer, got '" + s + "'");
  }
  return v;
}

bool to_bool(const std::string &key, const std::string &s)
{
  if (s == "true")
  {
    return true;
  }
  if (s == "false")
  {
    return false;
  }
  throw ArgumentError(key + ": expected true or false, got '" + s + "'");
}

std::vector<std::string> split_list(const std::string &s)
{
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    out.push_back(trim(item));
  }
  return out;
}

std::string keys_help()
{
  std::string out = "\nConfig keys (file sections or key=value overrides):\n";
  for (const KeySpec &k : config_keys())
  {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "  %-20s %-11s %s\n", k.name.c_str(), k.type.c_str(),
                  k.help.c_str());
    out += buf;
  }
  return out;
}

std::string read_file(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw ArgumentError("cannot read config file '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path &path, const std::string &content)
{
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out)
  {
    throw ArgumentError("cannot write '" + path.string() + "'");
  }
}

std::string quote(const std::string &s)
{
  std::string out = "\"";
  for (const char c : s)
  {
    if (c == '"' || c == '\\')
    {
      out += '\\';
    }
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string num(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

RawConfig parse_config(const std::string &text)
{
  RawConfig raw;
  std::string section;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line))
  {
    lineno++;
    line = trim(strip_comment(line));
    if (line.empty())
    {
      continue;
    }
    if (line.front() == '[')
    {
      if (line.back() != ']' || line.size() < 3)
      {
        throw ParseError(lineno, "malformed section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw ParseError(lineno, "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string name = section.empty() ? key : section + "." + key;
    if (find_key(name) == nullptr)
    {
      throw ParseError(lineno, "unknown key '" + name + "'");
    }
    if (raw.count(name) != 0)
    {
      throw ParseError(lineno, "duplicate key '" + name + "'");
    }
    try
    {
      raw[name] = normalize_value(line.substr(eq + 1), false);
    }
    catch (const ArgumentError &e)
    {
      throw ParseError(lineno, name + ": " + e.what());
    }
  }
  return raw;
}

void apply_override(RawConfig &raw, const std::string &pair)
{
  const auto eq = pair.find('=');
  if (eq == std::string::npos)
  {
    throw ArgumentError("override '" + pair + "' is not key=value");
  }
  const std::string key = trim(pair.substr(0, eq));
  if (find_key(key) == nullptr)
  {
    throw ArgumentError("unknown key '" + key + "'");
  }
  raw[key] = normalize_value(pair.substr(eq + 1), true);
}

ResolvedConfig resolve_config(const RawConfig &raw, const std::filesystem::path &output_dir)
{
  ResolvedConfig rc;
  rc.output_dir = output_dir;
  StudyConfig &c = rc.study;
  for (const auto &[key, v] : raw)
  {
    if (key == "study.kind")
    {
      c.kind = study_kind_from_string(v);
    }
    else if (key == "mesh.kind")
    {
      c.mesh_kind = v;
    }
    else if (key == "mesh.n_list")
    {
      c.n_list.clear();
      for (const std::string &s : split_list(v))
      {
        c.n_list.push_back(to_int(key, s));
      }
    }
    else if (key == "mesh.side")
    {
      c.mesh_side = to_double(key, v);
    }
    else if (key == "fem.p")
    {
      c.p = to_int(key, v);
    }
    else if (key == "fem.family")
    {
      c.family = family_from_string(v);
    }
    else if (key == "problem.k_list")
    {
      c.k_list.clear();
      for (const std::string &s : split_list(v))
      {
        c.k_list.push_back(to_double(key, s));
      }
    }
    else if (key == "coeff.kind")
    {
      if (v != "identity" && v != "pml" && v != "pml_with_scatterer_bump")
      {
        throw ArgumentError("coeff.kind: unknown coefficient set '" + v + "'");
      }
      c.coeff_kind = v;
    }
    else if (key == "pml.theta")
    {
      c.pml_theta = to_double(key, v);
    }
    else if (key == "pml.r_minus")
    {
      c.pml_r_minus = to_double(key, v);
    }
    else if (key == "pml.r_plus")
    {
      c.pml_r_plus = to_double(key, v);
    }
    else if (key == "pml.theta_list")
    {
      c.pml_theta_list.clear();
      for (const std::string &s : split_list(v))
      {
        c.pml_theta_list.push_back(to_double(key, s));
      }
    }
    else if (key == "solution.id")
    {
      c.solution_id = v;
    }
    else if (key == "pollution.kh")
    {
      c.pollution_kh = to_double(key, v);
    }
    else if (key == "pollution.target")
    {
      c.pollution_target = to_double(key, v);
    }
    else if (key == "pollution.csol")
    {
      c.pollution_csol = to_bool(key, v);
    }
    else if (key == "pollution.max_dofs")
    {
      c.max_dofs = to_int(key, v);
    }
    else if (key == "csol.tol")
    {
      c.csol_tol = to_double(key, v);
    }
    else if (key == "gamma.enrichment")
    {
      c.gamma_enrichment = to_int(key, v);
    }
    else if (key == "output.dir")
    {
      if (output_dir.empty())
      {
        rc.output_dir = v;
      }
    }
    else if (key == "output.csv")
    {
      c.output_csv = v;
    }
    else if (key == "output.timing")
    {
      c.timing = to_bool(key, v);
    }
    else if (key == "threads")
    {
      rc.threads = to_int(key, v);
      if (rc.threads < 0)
      {
        throw ArgumentError("threads must be non-negative");
      }
    }
  }
  if (rc.output_dir.empty())
  {
    rc.output_dir = ".";
  }
  // Unknown manufactured ids and unsupported k fail here rather than mid-study.
  for (const double k : c.k_list)
  {
    if (k > 0.0)
    {
      manufactured_solution(c.solution_id, k, ManufacturedParams{c.mesh_side, 0});
    }
  }
  c.validate();
  return rc;
}

std::filesystem::path output_path(const std::filesystem::path &dir, const std::string &relative)
{
  const std::filesystem::path rel(relative);
  if (relative.empty() || rel.is_absolute() || rel.has_root_name())
  {
    throw ArgumentError("output path '" + relative + "' must be relative to the output directory");
  }
  const std::filesystem::path norm = rel.lexically_normal();
  if (norm.empty() || *norm.begin() == ".." || norm == ".")
  {
    throw ArgumentError("output path '" + relative + "' leaves the output directory");
  }
  return dir / norm;
}

namespace
{

struct Options
{
  CliConfig cli;
  std::optional<int> n;
  std::optional<double> k;
  std::string mesh_out = "mesh.msh";
};

struct Command
{
  std::string name;
  std::string description;
  std::set<StudyKind> kinds;  // accepted study.kind values; first is the default
  StudyKind default_kind;
};

const std::vector<Command> &commands()
{
  static const std::vector<Command> cmds{
      {"mesh-gen", "write a structured tetrahedral mesh (mesh-v1)", {}, StudyKind::convergence},
      {"solve", "solve one manufactured problem and report its errors", {},
       StudyKind::convergence},
      {"convergence", "convergence or interpolation study",
       {StudyKind::convergence, StudyKind::interpolation}, StudyKind::convergence},
      {"pollution", "fixed-kh pollution or rescaled preasymptotic scan",
       {StudyKind::pollution, StudyKind::preasymptotic}, StudyKind::pollution},
      {"pml-check", "PML coefficient certification and complex-coefficient convergence",
       {StudyKind::pml_verify}, StudyKind::pml_verify},
      {"gamma-dv", "divergence conformity factor scan", {StudyKind::gamma_dv_scan},
       StudyKind::gamma_dv_scan},
      {"csol", "solution-operator norm scan", {StudyKind::csol_scan}, StudyKind::csol_scan},
  };
  return cmds;
}

class Runner
{
public:
  Runner(const Command &cmd, const Options &opt, std::ostream &out)
    : cmd_(cmd), opt_(opt), out_(out)
  {
  }

  int run()
  {
    RawConfig raw;
    if (!opt_.cli.config_path.empty())
    {
      raw = parse_config(read_file(opt_.cli.config_path));
    }
    if (!cmd_.kinds.empty() && raw.count("study.kind") == 0)
    {
      raw["study.kind"] = to_string(cmd_.default_kind);
    }
    for (const std::string &o : opt_.cli.overrides)
    {
      apply_override(raw, o);
    }
    rc_ = resolve_config(raw, opt_.cli.output_dir);
    if (!cmd_.kinds.empty() && cmd_.kinds.count(rc_.study.kind) == 0)
    {
      throw ArgumentError("study.kind '" + to_string(rc_.study.kind) + "' does not belong to '" +
                          cmd_.name + "'");
    }
    if (rc_.threads > 0)
    {
      omp_set_num_threads(rc_.threads);
    }
    if (cmd_.name == "mesh-gen")
    {
      return mesh_gen();
    }
    if (cmd_.name == "solve")
    {
      return solve();
    }
    return study();
  }

  double current_k() const { return current_k_; }

private:
  int mesh_gen()
  {
    const int n = opt_.n.value_or(rc_.study.n_list.front());
    if (n < 1)
    {
      throw ArgumentError("--n must be positive");
    }
    const Mesh mesh = study_mesh(rc_.study, n);
    const auto path = output_path(rc_.output_dir, opt_.mesh_out);
    write_file(path, write_mesh(mesh));
    out_ << "status=ok command=mesh-gen path=" << path.string()
         << " vertices=" << mesh.num_vertices() << " tets=" << mesh.num_tets() << "\n";
    return kExitOk;
  }

  int solve()
  {
    StudyConfig cfg = rc_.study;
    cfg.kind = StudyKind::convergence;
    cfg.n_list = {opt_.n.value_or(cfg.n_list.front())};
    cfg.k_list = {opt_.k.value_or(cfg.k_list.front())};
    current_k_ = cfg.k_list.front();
    StudyReport rep = run_convergence_study(cfg);
    StudyRow &row = rep.rows.front();
    row.study = "solve";
    if (!cfg.output_csv.empty())
    {
      write_file(output_path(rc_.output_dir, cfg.output_csv), format_csv(rep));
    }
    if (row.singular)
    {
      out_ << "status=singular k=" << num(row.k) << "\n";
      return kExitNumeric;
    }
    out_ << "status=ok command=solve k=" << num(row.k) << " h=" << num(row.h)
         << " dofs=" << row.dofs << " err_l2_rel=" << num(*row.err_l2_rel)
         << " err_hkcurl_rel=" << num(*row.err_hkcurl_rel) << "\n";
    return kExitOk;
  }

  int study()
  {
    StudyConfig &cfg = rc_.study;
    if (cfg.output_csv.empty())
    {
      cfg.output_csv = to_string(cfg.kind) + ".csv";
    }
    const auto csv_path = output_path(rc_.output_dir, cfg.output_csv);
    current_k_ = cfg.k_list.front();
    const StudyReport rep = run_study(cfg);
    const std::string csv = format_csv(rep);
    write_file(csv_path, csv);
    if (!rep.certificates.empty())
    {
      const auto cert = csv_path.parent_path() / (csv_path.stem().string() + "_certificates.csv");
      write_file(cert, format_certificates_csv(rep));
    }
    if (opt_.cli.verbosity > 0)
    {
      out_ << csv;
    }
    for (const auto &[name, value] : rep.statistics)
    {
      out_ << "stat " << name << "=" << num(value) << "\n";
    }
    for (const StudyRow &r : rep.rows)
    {
      if (r.singular)
      {
        out_ << "status=singular k=" << num(r.k) << " h=" << num(r.h)
             << " csv=" << csv_path.string() << "\n";
        return kExitNumeric;
      }
    }
    out_ << "status=ok command=" << cmd_.name << " study=" << to_string(cfg.kind)
         << " rows=" << rep.rows.size() << " csv=" << csv_path.string() << "\n";
    return kExitOk;
  }

  const Command &cmd_;
  const Options &opt_;
  std::ostream &out_;
  ResolvedConfig rc_;
  double current_k_ = 0.0;
};

}  // namespace

int dispatch(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Maxwell finite-element studies on tetrahedral meshes", "mxfem"};
  app.require_subcommand(1);
  app.footer("Run 'mxfem <command> --help' for the config keys.");
  Options opt;
  std::string out_dir;
  for (const Command &c : commands())
  {
    CLI::App *s = app.add_subcommand(c.name, c.description);
    s->footer(keys_help());
    s->add_option("--config", opt.cli.config_path, "config file");
    s->add_option("--out-dir", out_dir, "output directory");
    s->add_flag("-v,--verbose", opt.cli.verbosity, "echo the CSV");
    s->add_option("overrides", opt.cli.overrides, "key=value config overrides");
    if (c.name == "mesh-gen" || c.name == "solve")
    {
      s->add_option("--n", opt.n, "cells per direction");
    }
    if (c.name == "mesh-gen")
    {
      s->add_option("--out", opt.mesh_out, "mesh file name inside the output directory");
    }
    if (c.name == "solve")
    {
      s->add_option("--k", opt.k, "wavenumber");
    }
  }

  std::vector<const char *> argv;
  for (const std::string &a : args)
  {
    argv.push_back(a.c_str());
  }
  try
  {
    app.parse(static_cast<int>(argv.size()), argv.data());
  }
  catch (const CLI::CallForHelp &e)
  {
    app.exit(e, out, err);
    out << "status=ok command=help\n";
    return kExitOk;
  }
  catch (const CLI::ParseError &e)
  {
    err << e.what() << "\n" << app.help();
    out << "status=usage message=" << quote(e.what()) << "\n";
    return kExitUsage;
  }

  const Command *cmd = nullptr;
  for (const Command &c : commands())
  {
    if (app.got_subcommand(c.name))
    {
      cmd = &c;
      opt.cli.subcommand = c.name;
    }
  }
  opt.cli.output_dir = out_dir;

  Runner runner(*cmd, opt, out);
  try
  {
    return runner.run();
  }
  catch (const SingularMatrixError &e)
  {
    out << "status=singular k=" << num(runner.current_k()) << " message=" << quote(e.what())
        << "\n";
    return kExitNumeric;
  }
  catch (const NumericError &e)
  {
    out << "status=numeric_error message=" << quote(e.what()) << "\n";
    return kExitNumeric;
  }
  catch (const std::exception &e)
  {
    // Parse, argument, capability and domain errors, and unreadable files.
    out << "status=invalid message=" << quote(e.what()) << "\n";
    return kExitInvalid;
  }
}

}  // namespace mxfem::cli
