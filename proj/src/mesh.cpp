// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#include "mxfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "mxfem/reference_element.hpp"

namespace mxfem
{

std::string to_string(FaceLabel l)
{
  switch (l)
  {
    case FaceLabel::interior:
      return "interior";
    case FaceLabel::pec_outer:
      return "pec_outer";
    case FaceLabel::pec_scatterer:
      return "pec_scatterer";
  }
  return "unknown";
}

FaceLabel face_label_from_string(const std::string &s)
{
  if (s == "interior")
  {
    return FaceLabel::interior;
  }
  if (s == "pec_outer")
  {
    return FaceLabel::pec_outer;
  }
  if (s == "pec_scatterer")
  {
    return FaceLabel::pec_scatterer;
  }
  throw ArgumentError("unknown face label '" + s + "'");
}

namespace
{

double signed_volume(const Vec3 &a, const Vec3 &b, const Vec3 &c, const Vec3 &d)
{
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

}  // namespace

double Mesh::tet_volume(int t) const
{
  const auto &v = tets[t];
  return signed_volume(vertices[v[0]], vertices[v[1]], vertices[v[2]], vertices[v[3]]);
}

double Mesh::total_volume() const
{
  double s = 0.0;
  for (int t = 0; t < num_tets(); t++)
  {
    s += tet_volume(t);
  }
  return s;
}

Vec3 Mesh::centroid(int t) const
{
  const auto &v = tets[t];
  return 0.25 * (vertices[v[0]] + vertices[v[1]] + vertices[v[2]] + vertices[v[3]]);
}

void build_topology(Mesh &mesh)
{
  const int nt = mesh.num_tets();
  if (mesh.regions.size() != mesh.tets.size())
  {
    mesh.regions.resize(mesh.tets.size(), 0);
  }
  mesh.sorted_tets.resize(nt);
  mesh.tet_diameter.resize(nt);
  mesh.h = 0.0;
  for (int t = 0; t < nt; t++)
  {
    if (!(mesh.tet_volume(t) > 0.0))
    {
      throw NumericError("tet " + std::to_string(t) + " has non-positive volume");
    }
    auto s = mesh.tets[t];
    std::sort(s.begin(), s.end());
    mesh.sorted_tets[t] = s;
    double d = 0.0;
    for (int a = 0; a < 4; a++)
    {
      for (int b = a + 1; b < 4; b++)
      {
        d = std::max(d, (mesh.vertices[s[a]] - mesh.vertices[s[b]]).norm());
      }
    }
    mesh.tet_diameter[t] = d;
    mesh.h = std::max(mesh.h, d);
  }

  // Edges: collect (key, tet, local), sort, number.
  struct EdgeRec
  {
    std::array<int, 2> key;
    int tet, local;
  };
  std::vector<EdgeRec> er;
  er.reserve(6 * nt);
  for (int t = 0; t < nt; t++)
  {
    const auto &s = mesh.sorted_tets[t];
    for (int e = 0; e < 6; e++)
    {
      const auto &le = reference_tet::edges()[e];
      er.push_back({{s[le[0]], s[le[1]]}, t, e});
    }
  }
  std::sort(er.begin(), er.end(), [](const EdgeRec &a, const EdgeRec &b)
            { return std::tie(a.key, a.tet, a.local) < std::tie(b.key, b.tet, b.local); });
  mesh.edges.clear();
  mesh.tet_edges.assign(nt, {});
  for (std::size_t i = 0; i < er.size(); i++)
  {
    if (i == 0 || er[i].key != er[i - 1].key)
    {
      mesh.edges.push_back(er[i].key);
    }
    mesh.tet_edges[er[i].tet][er[i].local] = mesh.num_edges() - 1;
  }

  struct FaceRec
  {
    std::array<int, 3> key;
    int tet, local;
  };
  std::vector<FaceRec> fr;
  fr.reserve(4 * nt);
  for (int t = 0; t < nt; t++)
  {
    const auto &s = mesh.sorted_tets[t];
    for (int f = 0; f < 4; f++)
    {
      const auto &lf = reference_tet::faces()[f];
      fr.push_back({{s[lf[0]], s[lf[1]], s[lf[2]]}, t, f});
    }
  }
  std::sort(fr.begin(), fr.end(), [](const FaceRec &a, const FaceRec &b)
            { return std::tie(a.key, a.tet, a.local) < std::tie(b.key, b.tet, b.local); });
  mesh.faces.clear();
  mesh.face_tets.clear();
  mesh.tet_faces.assign(nt, {});
  for (std::size_t i = 0; i < fr.size(); i++)
  {
    if (i == 0 || fr[i].key != fr[i - 1].key)
    {
      mesh.faces.push_back(fr[i].key);
      mesh.face_tets.push_back({fr[i].tet, -1});
    }
    else
    {
      auto &adj = mesh.face_tets.back();
      if (adj[1] >= 0)
      {
        throw ArgumentError("non-conforming mesh: face shared by more than two tets");
      }
      adj[1] = fr[i].tet;
    }
    mesh.tet_faces[fr[i].tet][fr[i].local] = mesh.num_faces() - 1;
  }
  mesh.face_labels.assign(mesh.faces.size(), FaceLabel::interior);
  for (int f = 0; f < mesh.num_faces(); f++)
  {
    if (mesh.is_boundary_face(f))
    {
      mesh.face_labels[f] = FaceLabel::pec_outer;
    }
  }

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
  Vec3 hi = -lo;
  for (const auto &v : mesh.vertices)
  {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  mesh.L = mesh.vertices.empty() ? 0.0 : (hi - lo).norm();
}

ElementMap affine_map(const std::array<Vec3, 4> &verts)
{
  ElementMap m;
  m.B.col(0) = verts[1] - verts[0];
  m.B.col(1) = verts[2] - verts[0];
  m.B.col(2) = verts[3] - verts[0];
  m.b = verts[0];
  m.det = m.B.determinant();
  if (m.det == 0.0)
  {
    throw NumericError("singular element map");
  }
  m.inv_transpose = m.B.inverse().transpose();
  for (int a = 0; a < 4; a++)
  {
    for (int b = a + 1; b < 4; b++)
    {
      m.h = std::max(m.h, (verts[a] - verts[b]).norm());
    }
  }
  return m;
}

ElementMap element_map(const Mesh &mesh, int t)
{
  const auto &v = mesh.tets[t];
  return affine_map({mesh.vertices[v[0]], mesh.vertices[v[1]], mesh.vertices[v[2]],
                     mesh.vertices[v[3]]});
}

Mesh generate_box_mesh(const std::array<int, 3> &n, const Vec3 &lower, const Vec3 &upper,
                       const RegionRule &rule)
{
  for (int d = 0; d < 3; d++)
  {
    if (n[d] < 1)
    {
      throw ArgumentError("box mesh needs at least one cell per direction");
    }
    if (!(upper(d) > lower(d)))
    {
      throw ArgumentError("box mesh needs upper > lower");
    }
  }
  Mesh mesh;
  const int nx = n[0], ny = n[1], nz = n[2];
  auto vid = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };
  mesh.vertices.resize((nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; k++)
  {
    for (int j = 0; j <= ny; j++)
    {
      for (int i = 0; i <= nx; i++)
      {
        const Vec3 s(static_cast<double>(i) / nx, static_cast<double>(j) / ny,
                     static_cast<double>(k) / nz);
        mesh.vertices[vid(i, j, k)] = lower + s.cwiseProduct(upper - lower);
      }
    }
  }
  static const std::array<std::array<int, 3>, 6> perms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (int k = 0; k < nz; k++)
  {
    for (int j = 0; j < ny; j++)
    {
      for (int i = 0; i < nx; i++)
      {
        for (const auto &perm : perms)
        {
          std::array<int, 3> c = {i, j, k};
          std::array<int, 4> tet;
          tet[0] = vid(c[0], c[1], c[2]);
          for (int s = 0; s < 3; s++)
          {
            c[perm[s]] += 1;
            tet[s + 1] = vid(c[0], c[1], c[2]);
          }
          const double vol = signed_volume(mesh.vertices[tet[0]], mesh.vertices[tet[1]],
                                           mesh.vertices[tet[2]], mesh.vertices[tet[3]]);
          if (vol < 0.0)
          {
            std::swap(tet[2], tet[3]);
          }
          mesh.tets.push_back(tet);
        }
      }
    }
  }
  mesh.regions.assign(mesh.tets.size(), 0);
  if (rule)
  {
    for (int t = 0; t < mesh.num_tets(); t++)
    {
      mesh.regions[t] = rule(mesh.centroid(t));
    }
  }
  build_topology(mesh);
  return mesh;
}

Mesh generate_cube_mesh(int n, double side_length, const RegionRule &rule)
{
  if (n < 1)
  {
    throw ArgumentError("cube mesh needs n >= 1");
  }
  return generate_box_mesh({n, n, n}, Vec3::Zero(), Vec3::Constant(side_length), rule);
}

Mesh generate_shell_mesh(int n, double inner_half_width, double outer_half_width)
{
  if (n < 1)
  {
    throw ArgumentError("shell mesh needs n >= 1");
  }
  if (!(inner_half_width > 0.0) || !(outer_half_width > inner_half_width))
  {
    throw ArgumentError("shell mesh needs 0 < inner < outer");
  }
  const double cells_inner = inner_half_width * n / (2.0 * outer_half_width);
  const int m = static_cast<int>(std::lround(cells_inner));
  if (std::abs(cells_inner - m) > 1e-9 || m < 1 || (n - 2 * m) % 2 != 0)
  {
    throw ArgumentError("inner cube is not a union of grid cells (non-commensurate radii)");
  }
  const Mesh box = generate_box_mesh({n, n, n}, Vec3::Constant(-outer_half_width),
                                     Vec3::Constant(outer_half_width));
  const int lo = (n - 2 * m) / 2, hi = lo + 2 * m;
  const double cell = 2.0 * outer_half_width / n;
  Mesh mesh;
  std::vector<int> remap(box.vertices.size(), -1);
  for (int t = 0; t < box.num_tets(); t++)
  {
    const Vec3 c = box.centroid(t);
    bool inside = true;
    for (int d = 0; d < 3; d++)
    {
      const double idx = (c(d) + outer_half_width) / cell;
      if (idx < lo || idx > hi)
      {
        inside = false;
      }
    }
    if (inside)
    {
      continue;
    }
    std::array<int, 4> tet;
    for (int a = 0; a < 4; a++)
    {
      const int v = box.tets[t][a];
      if (remap[v] < 0)
      {
        remap[v] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(box.vertices[v]);
      }
      tet[a] = remap[v];
    }
    mesh.tets.push_back(tet);
  }
  mesh.regions.assign(mesh.tets.size(), 0);
  build_topology(mesh);
  const double tol = 1e-9 * outer_half_width;
  for (int f = 0; f < mesh.num_faces(); f++)
  {
    if (!mesh.is_boundary_face(f))
    {
      continue;
    }
    bool on_outer = false;
    for (int d = 0; d < 3; d++)
    {
      bool all = true;
      for (int a = 0; a < 3; a++)
      {
        all = all && std::abs(std::abs(mesh.vertices[mesh.faces[f][a]](d)) - outer_half_width) < tol;
      }
      on_outer = on_outer || all;
    }
    mesh.face_labels[f] = on_outer ? FaceLabel::pec_outer : FaceLabel::pec_scatterer;
  }
  return mesh;
}

namespace
{

std::string format_double(double x)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

bool next_content_line(std::istringstream &in, std::string &line, int &lineno)
{
  while (std::getline(in, line))
  {
    lineno++;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos != std::string::npos)
    {
      return true;
    }
  }
  return false;
}

}  // namespace

std::string write_mesh(const Mesh &mesh)
{
  std::string out = "mesh-v1\n";
  out += std::to_string(mesh.num_vertices()) + " " + std::to_string(mesh.num_tets()) + "\n";
  for (const auto &v : mesh.vertices)
  {
    out += format_double(v(0)) + " " + format_double(v(1)) + " " + format_double(v(2)) + "\n";
  }
  for (int t = 0; t < mesh.num_tets(); t++)
  {
    const auto &v = mesh.tets[t];
    out += std::to_string(v[0]) + " " + std::to_string(v[1]) + " " + std::to_string(v[2]) + " " +
           std::to_string(v[3]) + " " + std::to_string(mesh.regions[t]) + "\n";
  }
  bool header = false;
  for (int f = 0; f < mesh.num_faces(); f++)
  {
    if (!mesh.is_boundary_face(f))
    {
      continue;
    }
    if (!header)
    {
      out += "boundary\n";
      header = true;
    }
    const auto &fv = mesh.faces[f];
    out += std::to_string(fv[0]) + " " + std::to_string(fv[1]) + " " + std::to_string(fv[2]) +
           " " + to_string(mesh.face_labels[f]) + "\n";
  }
  return out;
}

Mesh parse_mesh(const std::string &text)
{
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  if (!next_content_line(in, line, lineno) || line.substr(0, 7) != "mesh-v1")
  {
    throw ParseError(std::max(lineno, 1), "malformed header: expected 'mesh-v1'");
  }
  if (!next_content_line(in, line, lineno))
  {
    throw ParseError(lineno + 1, "missing counts line");
  }
  long nv = -1, nt = -1;
  {
    std::istringstream ls(line);
    std::string extra;
    if (!(ls >> nv >> nt) || nv < 0 || nt < 0 || (ls >> extra))
    {
      throw ParseError(lineno, "malformed header: expected '<n_vertices> <n_tets>'");
    }
  }
  Mesh mesh;
  mesh.vertices.reserve(nv);
  for (long i = 0; i < nv; i++)
  {
    if (!next_content_line(in, line, lineno))
    {
      throw ParseError(lineno + 1, "unexpected end of file in vertex section");
    }
    std::istringstream ls(line);
    double x, y, z;
    std::string extra;
    if (!(ls >> x >> y >> z) || (ls >> extra))
    {
      throw ParseError(lineno, "malformed vertex line");
    }
    mesh.vertices.emplace_back(x, y, z);
  }
  for (long i = 0; i < nt; i++)
  {
    if (!next_content_line(in, line, lineno))
    {
      throw ParseError(lineno + 1, "unexpected end of file in tet section");
    }
    std::istringstream ls(line);
    std::array<long, 4> v;
    long region;
    std::string extra;
    if (!(ls >> v[0] >> v[1] >> v[2] >> v[3] >> region) || (ls >> extra))
    {
      throw ParseError(lineno, "malformed tet line");
    }
    std::array<int, 4> tet;
    for (int a = 0; a < 4; a++)
    {
      if (v[a] < 0 || v[a] >= nv)
      {
        throw ParseError(lineno, "vertex index " + std::to_string(v[a]) + " out of range");
      }
      tet[a] = static_cast<int>(v[a]);
    }
    const double vol = signed_volume(mesh.vertices[tet[0]], mesh.vertices[tet[1]],
                                     mesh.vertices[tet[2]], mesh.vertices[tet[3]]);
    if (vol < 0.0)
    {
      throw ParseError(lineno, "negative volume tet");
    }
    if (vol == 0.0)
    {
      throw ParseError(lineno, "degenerate (zero volume) tet");
    }
    mesh.tets.push_back(tet);
    mesh.regions.push_back(static_cast<int>(region));
  }
  try
  {
    build_topology(mesh);
  }
  catch (const std::exception &e)
  {
    throw ParseError(lineno, e.what());
  }
  if (!next_content_line(in, line, lineno))
  {
    return mesh;
  }
  if (line.find("boundary") == std::string::npos)
  {
    throw ParseError(lineno, "expected 'boundary' section or end of file");
  }
  std::map<std::array<int, 3>, int> face_index;
  for (int f = 0; f < mesh.num_faces(); f++)
  {
    face_index[mesh.faces[f]] = f;
  }
  while (next_content_line(in, line, lineno))
  {
    std::istringstream ls(line);
    std::array<long, 3> v;
    std::string label, extra;
    if (!(ls >> v[0] >> v[1] >> v[2] >> label) || (ls >> extra))
    {
      throw ParseError(lineno, "malformed boundary line");
    }
    std::array<int, 3> key;
    for (int a = 0; a < 3; a++)
    {
      if (v[a] < 0 || v[a] >= nv)
      {
        throw ParseError(lineno, "vertex index " + std::to_string(v[a]) + " out of range");
      }
      key[a] = static_cast<int>(v[a]);
    }
    std::sort(key.begin(), key.end());
    auto it = face_index.find(key);
    if (it == face_index.end() || !mesh.is_boundary_face(it->second))
    {
      throw ParseError(lineno, "boundary entry is not a boundary face of the mesh");
    }
    try
    {
      mesh.face_labels[it->second] = face_label_from_string(label);
    }
    catch (const ArgumentError &e)
    {
      throw ParseError(lineno, e.what());
    }
  }
  return mesh;
}

std::string check_conformity(const Mesh &mesh)
{
  for (int f = 0; f < mesh.num_faces(); f++)
  {
    const auto &adj = mesh.face_tets[f];
    if (adj[1] < 0)
    {
      if (mesh.face_labels[f] == FaceLabel::interior)
      {
        return "boundary face " + std::to_string(f) + " labeled interior";
      }
      continue;
    }
    // Orientation induced by each tet: outward normal sign relative to the
    // face's canonical normal.
    const auto &fv = mesh.faces[f];
    const Vec3 a = mesh.vertices[fv[0]], b = mesh.vertices[fv[1]], c = mesh.vertices[fv[2]];
    const Vec3 nrm = (b - a).cross(c - a);
    double sgn[2];
    for (int s = 0; s < 2; s++)
    {
      const Vec3 ctr = mesh.centroid(adj[s]);
      sgn[s] = (ctr - a).dot(nrm) < 0.0 ? 1.0 : -1.0;  // +1 if normal points outward
    }
    if (sgn[0] * sgn[1] > 0.0)
    {
      return "interior face " + std::to_string(f) + " has inconsistent orientation";
    }
  }
  return {};
}

int euler_characteristic(const Mesh &mesh)
{
  return mesh.num_vertices() - mesh.num_edges() + mesh.num_faces() - mesh.num_tets();
}

}  // namespace mxfem
