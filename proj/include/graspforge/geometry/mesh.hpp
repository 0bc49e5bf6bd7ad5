#pragma once

#include "graspforge/core.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace graspforge::geometry {

using Triangle = std::array<int, 3>;

struct TriangleMesh {
  Points3 vertices;
  std::vector<Triangle> triangles;
  double scale = 1.0;
  bool watertight = false;

  Vec3 corner(std::size_t tri, int k) const { return vertices[static_cast<std::size_t>(triangles[tri][k])]; }

  double triangle_area(std::size_t tri) const {
    return 0.5 * (corner(tri, 1) - corner(tri, 0)).cross(corner(tri, 2) - corner(tri, 0)).norm();
  }

  Eigen::AlignedBox3d bounds() const {
    Eigen::AlignedBox3d box;
    for (const auto& v : vertices) box.extend(v);
    return box;
  }
};

/// True iff every directed edge appears exactly once and its reverse exactly once.
inline bool compute_watertight(const std::vector<Triangle>& triangles) {
  if (triangles.empty()) return false;
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k) ++directed[{t[k], t[(k + 1) % 3]}];
  }
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    auto it = directed.find({edge.second, edge.first});
    if (it == directed.end() || it->second != 1) return false;
  }
  return true;
}

namespace detail {

struct CellHash {
  std::size_t operator()(const std::array<std::int64_t, 3>& c) const noexcept {
    std::uint64_t h = rng::splitmix64(static_cast<std::uint64_t>(c[0]));
    h = rng::splitmix64(h ^ static_cast<std::uint64_t>(c[1]));
    h = rng::splitmix64(h ^ static_cast<std::uint64_t>(c[2]));
    return static_cast<std::size_t>(h);
  }
};

}  // namespace detail

/// Merges vertices closer than `tolerance`, drops degenerate triangles and
/// unreferenced vertices, and recomputes the watertight flag.
inline TriangleMesh clean_mesh(Points3 vertices, const std::vector<Triangle>& triangles, double scale,
                               double tolerance = 1e-9) {
  using Cell = std::array<std::int64_t, 3>;
  std::unordered_map<Cell, std::vector<int>, detail::CellHash> grid;
  std::vector<int> remap(vertices.size());
  Points3 merged;
  auto cell_of = [&](const Vec3& p) {
    return Cell{static_cast<std::int64_t>(std::floor(p.x() / tolerance)),
                static_cast<std::int64_t>(std::floor(p.y() / tolerance)),
                static_cast<std::int64_t>(std::floor(p.z() / tolerance))};
  };
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Vec3& p = vertices[i];
    const Cell c = cell_of(p);
    int found = -1;
    for (int dx = -1; dx <= 1 && found < 0; ++dx)
      for (int dy = -1; dy <= 1 && found < 0; ++dy)
        for (int dz = -1; dz <= 1 && found < 0; ++dz) {
          auto it = grid.find({c[0] + dx, c[1] + dy, c[2] + dz});
          if (it == grid.end()) continue;
          for (int j : it->second) {
            if ((merged[static_cast<std::size_t>(j)] - p).norm() <= tolerance) {
              found = j;
              break;
            }
          }
        }
    if (found < 0) {
      found = static_cast<int>(merged.size());
      merged.push_back(p);
      grid[c].push_back(found);
    }
    remap[i] = found;
  }

  std::vector<Triangle> kept;
  kept.reserve(triangles.size());
  for (const auto& t : triangles) {
    const Triangle r{remap[static_cast<std::size_t>(t[0])], remap[static_cast<std::size_t>(t[1])],
                     remap[static_cast<std::size_t>(t[2])]};
    if (r[0] == r[1] || r[1] == r[2] || r[0] == r[2]) continue;
    const Vec3& a = merged[static_cast<std::size_t>(r[0])];
    const double twice_area = (merged[static_cast<std::size_t>(r[1])] - a).cross(merged[static_cast<std::size_t>(r[2])] - a).norm();
    if (!(twice_area > 0.0)) continue;
    kept.push_back(r);
  }
  if (kept.empty()) throw Error(ErrorCode::EmptyMesh, "no valid triangles after cleanup");

  std::vector<int> compact(merged.size(), -1);
  TriangleMesh mesh;
  mesh.scale = scale;
  for (auto& t : kept) {
    for (int& idx : t) {
      auto& slot = compact[static_cast<std::size_t>(idx)];
      if (slot < 0) {
        slot = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(merged[static_cast<std::size_t>(idx)]);
      }
      idx = slot;
    }
  }
  mesh.triangles = std::move(kept);
  mesh.watertight = compute_watertight(mesh.triangles);
  return mesh;
}

namespace detail {

inline int resolve_obj_index(const std::string& token, std::size_t vertex_count, const std::string& where) {
  const std::string head = token.substr(0, token.find('/'));
  std::size_t used = 0;
  long idx = 0;
  try {
    idx = std::stol(head, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, where + ": bad face index '" + token + "'");
  }
  if (used != head.size() || idx == 0) throw Error(ErrorCode::ParseError, where + ": bad face index '" + token + "'");
  const long resolved = idx > 0 ? idx - 1 : static_cast<long>(vertex_count) + idx;
  if (resolved < 0 || resolved >= static_cast<long>(vertex_count))
    throw Error(ErrorCode::ParseError, where + ": face index out of range '" + token + "'");
  return static_cast<int>(resolved);
}

/// Fan triangulation; quads split along the (0,2) diagonal.
inline void triangulate(const std::vector<int>& poly, std::vector<Triangle>& out) {
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) out.push_back({poly[0], poly[k], poly[k + 1]});
}

}  // namespace detail

inline void parse_obj(std::istream& in, const std::string& name, Points3& vertices, std::vector<Triangle>& triangles) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = name + ":" + std::to_string(lineno);
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) throw Error(ErrorCode::ParseError, where + ": malformed vertex");
      vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      while (ss >> tok) poly.push_back(detail::resolve_obj_index(tok, vertices.size(), where));
      if (poly.size() < 3) throw Error(ErrorCode::ParseError, where + ": face with fewer than 3 vertices");
      detail::triangulate(poly, triangles);
    }
  }
}

inline void parse_off(std::istream& in, const std::string& name, Points3& vertices, std::vector<Triangle>& triangles) {
  // Tokenize with comments stripped; OFF allows free-form whitespace.
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
  }
  std::size_t pos = 0;
  auto next_number = [&](auto& value) {
    if (pos >= tokens.size()) throw Error(ErrorCode::ParseError, name + ": unexpected end of OFF data");
    std::istringstream ss(tokens[pos++]);
    if (!(ss >> value)) throw Error(ErrorCode::ParseError, name + ": bad number '" + tokens[pos - 1] + "'");
  };
  if (tokens.empty() || tokens[0] != "OFF") throw Error(ErrorCode::ParseError, name + ": missing OFF header");
  pos = 1;
  long nv = 0, nf = 0, ne = 0;
  next_number(nv);
  next_number(nf);
  next_number(ne);
  if (nv < 0 || nf < 0) throw Error(ErrorCode::ParseError, name + ": negative counts");
  for (long i = 0; i < nv; ++i) {
    double x, y, z;
    next_number(x);
    next_number(y);
    next_number(z);
    vertices.emplace_back(x, y, z);
  }
  for (long f = 0; f < nf; ++f) {
    long n = 0;
    next_number(n);
    if (n < 3) throw Error(ErrorCode::ParseError, name + ": face with fewer than 3 vertices");
    std::vector<int> poly;
    for (long k = 0; k < n; ++k) {
      long idx = 0;
      next_number(idx);
      if (idx < 0 || idx >= nv) throw Error(ErrorCode::ParseError, name + ": face index out of range");
      poly.push_back(static_cast<int>(idx));
    }
    detail::triangulate(poly, triangles);
  }
}

/// Loads a Wavefront OBJ or OFF file, scales it uniformly, and cleans it.
inline TriangleMesh load_mesh(const std::string& path, double scale = 1.0) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw Error(ErrorCode::InvalidArgument, "mesh scale must be positive");
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open mesh '" + path + "'");
  Points3 vertices;
  std::vector<Triangle> triangles;
  std::string ext = path.size() >= 4 ? path.substr(path.size() - 4) : "";
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (ext == ".off") {
    parse_off(in, path, vertices, triangles);
  } else {
    parse_obj(in, path, vertices, triangles);
  }
  for (auto& v : vertices) {
    if (!v.allFinite()) throw Error(ErrorCode::ParseError, path + ": non-finite vertex coordinate");
    v *= scale;
  }
  return clean_mesh(std::move(vertices), triangles, scale);
}

inline void write_obj(const TriangleMesh& mesh, std::ostream& out) {
  out.precision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

inline void write_obj(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  write_obj(mesh, out);
}

/// Reflection across x = 0 with triangle winding reversed.
inline TriangleMesh mirror_mesh(const TriangleMesh& mesh) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v.x() = -v.x();
  for (auto& t : out.triangles) std::swap(t[1], t[2]);
  return out;
}

inline TriangleMesh transformed(const TriangleMesh& mesh, const Mat3& R, const Vec3& t) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = R * v + t;
  return out;
}

}  // namespace graspforge::geometry
