#pragma once

#include "bdie/coefficient.hpp"

#include <array>
#include <string>
#include <vector>

namespace bdie {

struct BoundaryMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Point3> normals;  // outward unit normal per triangle
  std::vector<double> areas;
  std::vector<int> domain_vertex;  // boundary vertex -> domain vertex
  std::vector<int> triangle_tet;   // tet owning each boundary triangle

  std::size_t num_vertices() const noexcept { return vertices.size(); }
  std::size_t num_triangles() const noexcept { return triangles.size(); }
  double total_area() const;
  std::array<Point3, 3> corners(std::size_t t) const {
    const auto& tr = triangles[t];
    return {vertices[tr[0]], vertices[tr[1]], vertices[tr[2]]};
  }
};

struct DomainMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<int, 4>> tets;  // positively oriented
  std::vector<double> volumes;
  std::vector<int> interior_nodes;
  std::vector<int> boundary_node;  // domain vertex -> boundary vertex, or -1

  std::size_t num_vertices() const noexcept { return vertices.size(); }
  std::size_t num_tets() const noexcept { return tets.size(); }
  double total_volume() const;
  std::array<Point3, 4> corners(std::size_t k) const {
    const auto& t = tets[k];
    return {vertices[t[0]], vertices[t[1]], vertices[t[2]], vertices[t[3]]};
  }
  // Constant gradients of the four barycentric functions on tet k.
  std::array<Point3, 4> basis_gradients(std::size_t k) const;
};

struct MeshPair {
  DomainMesh dom;
  BoundaryMesh bnd;
  std::string shape;  // "cube", "ball" or "file"
  int level = 0;
  double h = 0.0;  // max edge length
};

MeshPair build_cube_mesh(int m);
MeshPair build_ball_mesh(int level);

// Builds the derived data from raw connectivity and validates it. When tris is
// empty the boundary is extracted from the tetrahedra.
MeshPair assemble_mesh(std::vector<Point3> vertices, std::vector<std::array<int, 4>> tets,
                       std::vector<std::array<int, 3>> tris, std::string shape, int level);

void save_mesh(const std::string& path, const MeshPair& mesh);
MeshPair load_mesh(const std::string& path);

double max_edge_length(const DomainMesh& dom);

}  // namespace bdie
