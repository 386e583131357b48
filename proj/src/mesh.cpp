#include "bdie/mesh.hpp"

#include "bdie/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace bdie {

namespace {

double signed_volume(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

using FaceKey = std::array<int, 3>;

FaceKey sorted_face(int a, int b, int c) {
  FaceKey f{a, b, c};
  std::sort(f.begin(), f.end());
  return f;
}

constexpr int kFaceOf[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};

}  // namespace

double BoundaryMesh::total_area() const {
  double s = 0.0;
  for (double a : areas) s += a;
  return s;
}

double DomainMesh::total_volume() const {
  double s = 0.0;
  for (double v : volumes) s += v;
  return s;
}

std::array<Point3, 4> DomainMesh::basis_gradients(std::size_t k) const {
  const auto c = corners(k);
  Eigen::Matrix3d e;
  e.col(0) = c[1] - c[0];
  e.col(1) = c[2] - c[0];
  e.col(2) = c[3] - c[0];
  const Eigen::Matrix3d inv = e.inverse();
  std::array<Point3, 4> g;
  g[1] = inv.row(0).transpose();
  g[2] = inv.row(1).transpose();
  g[3] = inv.row(2).transpose();
  g[0] = -(g[1] + g[2] + g[3]);
  return g;
}

double max_edge_length(const DomainMesh& dom) {
  double h = 0.0;
  for (const auto& t : dom.tets)
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) h = std::max(h, (dom.vertices[t[i]] - dom.vertices[t[j]]).norm());
  return h;
}

MeshPair assemble_mesh(std::vector<Point3> vertices, std::vector<std::array<int, 4>> tets,
                       std::vector<std::array<int, 3>> tris, std::string shape, int level) {
  const int nv = static_cast<int>(vertices.size());
  require(nv >= 4 && !tets.empty(), ErrorKind::validation, "mesh needs vertices and tetrahedra");
  MeshPair mp;
  mp.shape = std::move(shape);
  mp.level = level;
  auto& dom = mp.dom;
  dom.vertices = std::move(vertices);
  dom.tets = std::move(tets);
  for (const auto& x : dom.vertices)
    require(x.allFinite(), ErrorKind::validation, "non-finite vertex coordinate");
  dom.volumes.reserve(dom.tets.size());
  for (std::size_t k = 0; k < dom.tets.size(); ++k) {
    const auto& t = dom.tets[k];
    for (int v : t) require(v >= 0 && v < nv, ErrorKind::validation, "tet references a missing vertex");
    const double vol = signed_volume(dom.vertices[t[0]], dom.vertices[t[1]], dom.vertices[t[2]], dom.vertices[t[3]]);
    if (!(vol > 0.0))
      fail(ErrorKind::validation, "tet " + std::to_string(k) + " has non-positive volume " + std::to_string(vol));
    dom.volumes.push_back(vol);
  }

  // faces used by exactly one tet form the boundary
  std::map<FaceKey, std::pair<int, int>> faces;  // key -> (count, tet)
  for (std::size_t k = 0; k < dom.tets.size(); ++k) {
    const auto& t = dom.tets[k];
    for (const auto& f : kFaceOf) {
      auto& e = faces[sorted_face(t[f[0]], t[f[1]], t[f[2]])];
      e.first += 1;
      e.second = static_cast<int>(k);
    }
  }
  std::map<FaceKey, int> boundary_faces;
  for (const auto& [key, e] : faces) {
    require(e.first <= 2, ErrorKind::validation, "face shared by more than two tets");
    if (e.first == 1) boundary_faces.emplace(key, e.second);
  }

  if (tris.empty()) {
    for (const auto& [key, k] : boundary_faces) {
      const auto& t = dom.tets[k];
      int opp = -1;
      for (int i = 0; i < 4; ++i)
        if (std::find(key.begin(), key.end(), t[i]) == key.end()) opp = t[i];
      std::array<int, 3> tri{key[0], key[1], key[2]};
      const Point3 n = (dom.vertices[tri[1]] - dom.vertices[tri[0]]).cross(dom.vertices[tri[2]] - dom.vertices[tri[0]]);
      if (n.dot(dom.vertices[opp] - dom.vertices[tri[0]]) > 0.0) std::swap(tri[1], tri[2]);
      tris.push_back(tri);
    }
  } else {
    require(tris.size() == boundary_faces.size(), ErrorKind::validation,
            "boundary triangle count does not match the tetrahedra boundary");
  }

  // boundary vertex numbering in order of first appearance
  dom.boundary_node.assign(nv, -1);
  auto& bnd = mp.bnd;
  for (const auto& tri : tris)
    for (int v : tri) {
      require(v >= 0 && v < nv, ErrorKind::validation, "triangle references a missing vertex");
      if (dom.boundary_node[v] < 0) {
        dom.boundary_node[v] = static_cast<int>(bnd.domain_vertex.size());
        bnd.domain_vertex.push_back(v);
        bnd.vertices.push_back(dom.vertices[v]);
      }
    }
  for (int v = 0; v < nv; ++v)
    if (dom.boundary_node[v] < 0) dom.interior_nodes.push_back(v);

  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : tris) {
    auto it = boundary_faces.find(sorted_face(tri[0], tri[1], tri[2]));
    require(it != boundary_faces.end(), ErrorKind::validation, "triangle is not a boundary face of the tetrahedra");
    const int k = it->second;
    const auto& t = dom.tets[k];
    int opp = -1;
    for (int i = 0; i < 4; ++i)
      if (t[i] != tri[0] && t[i] != tri[1] && t[i] != tri[2]) opp = t[i];
    const Point3& p0 = dom.vertices[tri[0]];
    Point3 n = (dom.vertices[tri[1]] - p0).cross(dom.vertices[tri[2]] - p0);
    const double twice_area = n.norm();
    require(twice_area > 0.0, ErrorKind::validation, "degenerate boundary triangle");
    n /= twice_area;
    require(n.dot(dom.vertices[opp] - p0) < 0.0, ErrorKind::validation,
            "boundary triangle is not oriented outward");
    bnd.triangles.push_back({dom.boundary_node[tri[0]], dom.boundary_node[tri[1]], dom.boundary_node[tri[2]]});
    bnd.normals.push_back(n);
    bnd.areas.push_back(0.5 * twice_area);
    bnd.triangle_tet.push_back(k);
    for (int i = 0; i < 3; ++i) {
      const int a = tri[i], b = tri[(i + 1) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}] += 1;
    }
  }
  for (const auto& [e, c] : edge_count)
    require(c == 2, ErrorKind::validation, "boundary is not watertight");

  mp.h = max_edge_length(dom);
  return mp;
}

MeshPair build_cube_mesh(int m) {
  require(m >= 1, ErrorKind::contract, "cube refinement must be positive");
  require(m <= 24, ErrorKind::resource, "cube refinement too large for dense assembly");
  const int n1 = m + 1;
  std::vector<Point3> verts;
  verts.reserve(n1 * n1 * n1);
  for (int k = 0; k <= m; ++k)
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i)
        verts.emplace_back(static_cast<double>(i) / m, static_cast<double>(j) / m, static_cast<double>(k) / m);
  auto id = [n1](int i, int j, int k) { return i + n1 * (j + n1 * k); };
  std::vector<std::array<int, 4>> tets;
  tets.reserve(6 * m * m * m);
  std::array<int, 3> perm{0, 1, 2};
  std::vector<std::array<int, 3>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> t;
          t[0] = id(c[0], c[1], c[2]);
          c[p[0]] += 1;
          t[1] = id(c[0], c[1], c[2]);
          c[p[1]] += 1;
          t[2] = id(c[0], c[1], c[2]);
          c[p[2]] += 1;
          t[3] = id(c[0], c[1], c[2]);
          if (signed_volume(verts[t[0]], verts[t[1]], verts[t[2]], verts[t[3]]) < 0.0) std::swap(t[2], t[3]);
          tets.push_back(t);
        }
  return assemble_mesh(std::move(verts), std::move(tets), {}, "cube", m);
}

MeshPair build_ball_mesh(int level) {
  require(level >= 0, ErrorKind::contract, "ball level must be non-negative");
  require(level <= 4, ErrorKind::resource, "ball level above 4 exceeds the dense-assembly size guard");
  const int n = 1 << level;
  using Key = std::array<int, 3>;

  // surface: recursive midpoint subdivision of the octahedron, projected each step
  std::map<Key, Point3> surf;
  std::vector<std::array<Key, 3>> faces;
  for (int sx : {1, -1})
    for (int sy : {1, -1})
      for (int sz : {1, -1}) {
        const Key a{sx * n, 0, 0}, b{0, sy * n, 0}, c{0, 0, sz * n};
        surf[a] = Point3(sx, 0, 0);
        surf[b] = Point3(0, sy, 0);
        surf[c] = Point3(0, 0, sz);
        faces.push_back({a, b, c});
      }
  for (int l = 0; l < level; ++l) {
    std::vector<std::array<Key, 3>> next;
    auto mid = [&surf](const Key& p, const Key& q) {
      const Key m{(p[0] + q[0]) / 2, (p[1] + q[1]) / 2, (p[2] + q[2]) / 2};
      if (!surf.count(m)) surf[m] = (surf[p] + surf[q]).normalized();
      return m;
    };
    for (const auto& f : faces) {
      const Key ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({ab, f[1], bc});
      next.push_back({ca, bc, f[2]});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  // volume: Kuhn simplices of the positive octant written in s-coordinates
  // s1 = i+j+k, s2 = j+k, s3 = k, reflected into all eight octants
  std::map<Key, int> index;
  std::vector<Key> keys;
  auto vid = [&](const Key& k) {
    auto [it, fresh] = index.emplace(k, static_cast<int>(keys.size()));
    if (fresh) keys.push_back(k);
    return it->second;
  };
  std::vector<std::array<Key, 4>> ref_tets;
  std::array<int, 3> perm{0, 1, 2};
  std::vector<std::array<int, 3>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));
  auto inside = [n](const Key& s) { return n >= s[0] && s[0] >= s[1] && s[1] >= s[2] && s[2] >= 0; };
  for (int c1 = 0; c1 < n; ++c1)
    for (int c2 = 0; c2 < n; ++c2)
      for (int c3 = 0; c3 < n; ++c3)
        for (const auto& p : perms) {
          std::array<Key, 4> s;
          Key c{c1, c2, c3};
          s[0] = c;
          c[p[0]] += 1;
          s[1] = c;
          c[p[1]] += 1;
          s[2] = c;
          c[p[2]] += 1;
          s[3] = c;
          if (!std::all_of(s.begin(), s.end(), inside)) continue;
          std::array<Key, 4> x;
          for (int v = 0; v < 4; ++v) x[v] = {s[v][0] - s[v][1], s[v][1] - s[v][2], s[v][2]};
          ref_tets.push_back(x);
        }
  std::vector<std::array<int, 4>> tets;
  for (int sx : {1, -1})
    for (int sy : {1, -1})
      for (int sz : {1, -1})
        for (const auto& rt : ref_tets) {
          std::array<Key, 4> kk;
          for (int v = 0; v < 4; ++v) kk[v] = {sx * rt[v][0], sy * rt[v][1], sz * rt[v][2]};
          auto kvol = [&kk]() {
            auto d = [&kk](int v, int c) { return static_cast<double>(kk[v][c] - kk[0][c]); };
            const Point3 e1(d(1, 0), d(1, 1), d(1, 2)), e2(d(2, 0), d(2, 1), d(2, 2)), e3(d(3, 0), d(3, 1), d(3, 2));
            return e1.dot(e2.cross(e3));
          };
          if (kvol() < 0.0) std::swap(kk[2], kk[3]);
          tets.push_back({vid(kk[0]), vid(kk[1]), vid(kk[2]), vid(kk[3])});
        }

  std::vector<Point3> verts(keys.size());
  for (std::size_t v = 0; v < keys.size(); ++v) {
    const Key& k = keys[v];
    const int l1 = std::abs(k[0]) + std::abs(k[1]) + std::abs(k[2]);
    if (l1 == n) {
      auto it = surf.find(k);
      require(it != surf.end(), ErrorKind::validation, "surface vertex missing from subdivision");
      verts[v] = it->second;
    } else if (l1 == 0) {
      verts[v] = Point3::Zero();
    } else {
      const Point3 x(static_cast<double>(k[0]) / n, static_cast<double>(k[1]) / n, static_cast<double>(k[2]) / n);
      verts[v] = x * (static_cast<double>(l1) / n) / x.norm();
    }
  }
  return assemble_mesh(std::move(verts), std::move(tets), {}, "ball", level);
}

void save_mesh(const std::string& path, const MeshPair& mesh) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::resource, "cannot open '" + path + "' for writing");
  out << "bdiemesh 1\n";
  out << "vertices " << mesh.dom.vertices.size() << "\n";
  out << std::setprecision(17);
  for (const auto& x : mesh.dom.vertices) out << x[0] << " " << x[1] << " " << x[2] << "\n";
  out << "tets " << mesh.dom.tets.size() << "\n";
  for (const auto& t : mesh.dom.tets) out << t[0] << " " << t[1] << " " << t[2] << " " << t[3] << "\n";
  out << "tris " << mesh.bnd.triangles.size() << "\n";
  for (const auto& t : mesh.bnd.triangles)
    out << mesh.bnd.domain_vertex[t[0]] << " " << mesh.bnd.domain_vertex[t[1]] << " "
        << mesh.bnd.domain_vertex[t[2]] << "\n";
  require(static_cast<bool>(out), ErrorKind::resource, "write to '" + path + "' failed");
}

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
    }
    fail(ErrorKind::parse, "line " + std::to_string(line_no_ + 1) + ": unexpected end of file, expected " + what);
  }

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::parse, "line " + std::to_string(line_no_) + ": " + msg);
  }

  template <class T, std::size_t N>
  std::array<T, N> values(const char* what) {
    auto ls = next(what);
    std::array<T, N> v{};
    for (auto& x : v)
      if (!(ls >> x)) error(std::string("expected ") + what);
    std::string extra;
    if (ls >> extra) error("trailing text '" + extra + "'");
    return v;
  }

  std::size_t count(const std::string& keyword) {
    auto ls = next(keyword.c_str());
    std::string word;
    long long n = -1;
    if (!(ls >> word >> n) || word != keyword || n < 0) error("expected '" + keyword + " <count>'");
    return static_cast<std::size_t>(n);
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

}  // namespace

MeshPair load_mesh(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::resource, "cannot open '" + path + "'");
  LineReader rd(in);
  {
    auto ls = rd.next("header");
    std::string magic;
    int version = 0;
    if (!(ls >> magic >> version) || magic != "bdiemesh" || version != 1) rd.error("expected header 'bdiemesh 1'");
  }
  std::vector<Point3> verts(rd.count("vertices"));
  for (auto& x : verts) {
    auto v = rd.values<double, 3>("three coordinates");
    x = Point3(v[0], v[1], v[2]);
  }
  std::vector<std::array<int, 4>> tets(rd.count("tets"));
  for (auto& t : tets) t = rd.values<int, 4>("four vertex indices");
  std::vector<std::array<int, 3>> tris(rd.count("tris"));
  for (auto& t : tris) t = rd.values<int, 3>("three vertex indices");
  require(!tris.empty(), ErrorKind::validation, "mesh file has no boundary triangles");
  return assemble_mesh(std::move(verts), std::move(tets), std::move(tris), "file", 0);
}

}  // namespace bdie
