#pragma once

// Procedural test meshes. All are consistently oriented; closed ones have
// outward normals.

#include <cmath>
#include <map>
#include <numbers>
#include <tuple>
#include <utility>
#include <vector>

#include "meshdenoise/mesh.hpp"

namespace mdn::shapes {

inline Mesh single_triangle() {
  return Mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{0, 1, 2}});
}

/// Unit cube [0,1]^3 with two triangles per side.
inline Mesh cube() {
  std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  std::vector<Face> f = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7}, {0, 1, 5}, {0, 5, 4},
                         {1, 2, 6}, {1, 6, 5}, {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7}};
  return Mesh(std::move(v), std::move(f));
}

/// Regular hexagon fan of unit radius around a center vertex (index 0) at
/// height `apex`.
inline Mesh hexagon_fan(double apex = 0.0) {
  std::vector<Vec3> v = {{0, 0, apex}};
  std::vector<Face> f;
  for (int k = 0; k < 6; ++k) {
    const double a = k * std::numbers::pi / 3.0;
    v.emplace_back(std::cos(a), std::sin(a), 0.0);
  }
  for (Index k = 0; k < 6; ++k) f.push_back({0, 1 + k, 1 + (k + 1) % 6});
  return Mesh(std::move(v), std::move(f));
}

/// Regular n-gon fan helper used by tests that need other valences.
inline Mesh polygon_fan(int sides, double apex = 0.0) {
  std::vector<Vec3> v = {{0, 0, apex}};
  std::vector<Face> f;
  for (int k = 0; k < sides; ++k) {
    const double a = 2.0 * k * std::numbers::pi / sides;
    v.emplace_back(std::cos(a), std::sin(a), 0.0);
  }
  for (Index k = 0; k < static_cast<Index>(sides); ++k) f.push_back({0, 1 + k, 1 + (k + 1) % sides});
  return Mesh(std::move(v), std::move(f));
}

/// Strip of 2*cells triangles along x with unit height and cell width `w`.
inline Mesh strip(int cells, double w = 1.0) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  for (int i = 0; i <= cells; ++i) {
    v.emplace_back(i * w, 0.0, 0.0);
    v.emplace_back(i * w, 1.0, 0.0);
  }
  for (Index i = 0; i < static_cast<Index>(cells); ++i) {
    const Index a = 2 * i, b = 2 * i + 1, c = 2 * i + 2, d = 2 * i + 3;
    f.push_back({a, c, b});
    f.push_back({b, c, d});
  }
  return Mesh(std::move(v), std::move(f));
}

/// Planar n x m grid over [0, n*h] x [0, m*h] at z = 0.
inline Mesh grid(int n, int m, double h = 1.0) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  for (int j = 0; j <= m; ++j)
    for (int i = 0; i <= n; ++i) v.emplace_back(i * h, j * h, 0.0);
  auto id = [&](int i, int j) { return static_cast<Index>(j * (n + 1) + i); };
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return Mesh(std::move(v), std::move(f));
}

/// Two planar sheets meeting along the y axis. Sheet A lies in z = 0 for
/// x <= 0 with normal +z; sheet B is the continuation of A rotated about the
/// y axis so the two normals differ by `crease_deg`. `cells` grid cells per
/// sheet across and along the crease, cell size `h`.
inline Mesh dihedral(double crease_deg, int cells, double h = 1.0) {
  const double a = crease_deg * std::numbers::pi / 180.0;
  std::vector<Vec3> v;
  std::vector<Face> f;
  const int nu = 2 * cells;
  for (int j = 0; j <= cells; ++j) {
    for (int i = 0; i <= nu; ++i) {
      const double u = (i - cells) * h;
      const double y = j * h;
      if (u <= 0.0) {
        v.emplace_back(u, y, 0.0);
      } else {
        v.emplace_back(u * std::cos(a), y, -u * std::sin(a));
      }
    }
  }
  auto id = [&](int i, int j) { return static_cast<Index>(j * (nu + 1) + i); };
  for (int j = 0; j < cells; ++j)
    for (int i = 0; i < nu; ++i) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return Mesh(std::move(v), std::move(f));
}

/// Unit cube with an n x n grid (2 n^2 triangles) on every side.
inline Mesh subdivided_cube(int n) {
  std::vector<Vec3> v;
  std::vector<Face> f;
  std::map<std::tuple<int, int, int>, Index> lookup;
  auto vertex = [&](int x, int y, int z) {
    const auto key = std::make_tuple(x, y, z);
    auto it = lookup.find(key);
    if (it != lookup.end()) return it->second;
    const Index id = static_cast<Index>(v.size());
    v.emplace_back(double(x) / n, double(y) / n, double(z) / n);
    lookup.emplace(key, id);
    return id;
  };
  // Each side: origin corner plus two in-plane axes whose cross product points outward.
  struct Side {
    std::array<int, 3> origin, du, dv;
  };
  const Side sides[] = {
      {{0, 0, 0}, {0, 1, 0}, {1, 0, 0}},  // z = 0, normal -z
      {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},  // z = 1, normal +z
      {{0, 0, 0}, {1, 0, 0}, {0, 0, 1}},  // y = 0, normal -y
      {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}},  // y = 1, normal +y
      {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}},  // x = 0, normal -x
      {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},  // x = 1, normal +x
  };
  for (const Side& s : sides) {
    auto at = [&](int i, int j) {
      int c[3];
      for (int k = 0; k < 3; ++k) c[k] = s.origin[k] * n + s.du[k] * i + s.dv[k] * j;
      return vertex(c[0], c[1], c[2]);
    };
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Index a = at(i, j), b = at(i + 1, j), c = at(i + 1, j + 1), d = at(i, j + 1);
        f.push_back({a, b, c});
        f.push_back({a, c, d});
      }
  }
  return Mesh(std::move(v), std::move(f));
}

/// Unit icosahedron (circumradius 1).
inline Mesh icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                         {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (Vec3& p : v) p.normalize();
  std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                         {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                         {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  return Mesh(std::move(v), std::move(f));
}

/// Icosphere of unit radius: the icosahedron split `levels` times (20 * 4^levels faces).
inline Mesh icosphere(int levels) {
  const Mesh base = icosahedron();
  std::vector<Vec3> v = base.vertices();
  std::vector<Face> f(base.faces().begin(), base.faces().end());
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<Index, Index>, Index> mid;
    auto midpoint = [&](Index a, Index b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      const Index id = static_cast<Index>(v.size());
      v.push_back((v[a] + v[b]).normalized());
      mid.emplace(key, id);
      return id;
    };
    std::vector<Face> next;
    next.reserve(f.size() * 4);
    for (const Face& t : f) {
      const Index ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    f = std::move(next);
  }
  return Mesh(std::move(v), std::move(f));
}

/// Latitude/longitude sphere: two poles plus `rings` x `segments` vertices.
inline Mesh uv_sphere(int rings, int segments) {
  std::vector<Vec3> v = {{0, 0, 1}};
  for (int r = 1; r <= rings; ++r) {
    const double theta = std::numbers::pi * r / (rings + 1);
    for (int s = 0; s < segments; ++s) {
      const double phi = 2.0 * std::numbers::pi * s / segments;
      v.emplace_back(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
    }
  }
  v.emplace_back(0, 0, -1);
  const Index south = static_cast<Index>(v.size() - 1);
  auto id = [&](int r, int s) { return static_cast<Index>(1 + (r - 1) * segments + (s % segments)); };
  std::vector<Face> f;
  for (int s = 0; s < segments; ++s) f.push_back({0, id(1, s), id(1, s + 1)});
  for (int r = 1; r < rings; ++r)
    for (int s = 0; s < segments; ++s) {
      f.push_back({id(r, s), id(r + 1, s), id(r + 1, s + 1)});
      f.push_back({id(r, s), id(r + 1, s + 1), id(r, s + 1)});
    }
  for (int s = 0; s < segments; ++s) f.push_back({south, id(rings, s + 1), id(rings, s)});
  return Mesh(std::move(v), std::move(f));
}

}  // namespace mdn::shapes
