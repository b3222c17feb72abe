// Copyright the mxfem authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MXFEM_MESH_HPP
#define MXFEM_MESH_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "mxfem/types.hpp"

namespace mxfem
{

enum class FaceLabel
{
  interior,
  pec_outer,
  pec_scatterer
};

std::string to_string(FaceLabel l);
FaceLabel face_label_from_string(const std::string &s);

//
// Conforming tetrahedral mesh. Tets are stored positively oriented. Edges and
// faces are identified by their sorted global vertex IDs, which also fixes
// their global orientation (lower ID to higher ID).
//
struct Mesh
{
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;
  std::vector<int> regions;

  // Derived by build_topology().
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> faces;
  // Per-tet vertices in ascending global order; local edges/faces below refer
  // to this ordering with the reference-tet numbering.
  std::vector<std::array<int, 4>> sorted_tets;
  std::vector<std::array<int, 6>> tet_edges;
  std::vector<std::array<int, 4>> tet_faces;
  std::vector<std::array<int, 2>> face_tets;  // second entry -1 on the boundary
  std::vector<FaceLabel> face_labels;
  std::vector<double> tet_diameter;
  double h = 0.0;  // max tet diameter
  double L = 0.0;  // domain diameter (bounding-box diagonal)

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_tets() const { return static_cast<int>(tets.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_faces() const { return static_cast<int>(faces.size()); }

  double tet_volume(int t) const;
  double total_volume() const;
  Vec3 centroid(int t) const;
  bool is_boundary_face(int f) const { return face_tets[f][1] < 0; }
};

// Populates edges, faces, adjacency, diameters and default boundary labels
// (pec_outer). Throws NumericError for non-positive tets and ArgumentError for
// non-conforming meshes (a face shared by more than two tets).
void build_topology(Mesh &mesh);

// Affine map F(x̂) = B x̂ + b from the reference tetrahedron.
struct ElementMap
{
  Mat3 B;
  Vec3 b;
  double det = 0.0;
  Mat3 inv_transpose;
  double h = 0.0;  // element diameter

  Vec3 operator()(const Vec3 &xh) const { return B * xh + b; }
};

ElementMap affine_map(const std::array<Vec3, 4> &verts);

// Map for tet `t` in stored (positively oriented) vertex order.
ElementMap element_map(const Mesh &mesh, int t);

using RegionRule = std::function<int(const Vec3 &centroid)>;

// Structured nx × ny × nz Kuhn mesh of the box [lower, upper]; every cell is
// split into six tets around its main diagonal.
Mesh generate_box_mesh(const std::array<int, 3> &n, const Vec3 &lower, const Vec3 &upper,
                       const RegionRule &rule = {});

Mesh generate_cube_mesh(int n, double side_length = 1.0, const RegionRule &rule = {});

// Cube [-outer, outer]^3 minus the cube [-inner, inner]^3 on an n^3 grid. The
// inner boundary is labeled pec_scatterer, the outer pec_outer.
Mesh generate_shell_mesh(int n, double inner_half_width, double outer_half_width);

// mesh-v1 text format.
Mesh parse_mesh(const std::string &text);
std::string write_mesh(const Mesh &mesh);

// Checks conformity: every interior face is shared by exactly two tets that
// induce opposite orientations on it. Returns an empty string on success.
std::string check_conformity(const Mesh &mesh);

// V - E + F - T
int euler_characteristic(const Mesh &mesh);

}  // namespace mxfem

#endif  // MXFEM_MESH_HPP
