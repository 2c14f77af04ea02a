#pragma once

#include "hypflux/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hypflux {

struct Cell {
  int id = 0;
  double volume = 0.0;
  Vec2 centroid = Vec2::Zero();
  std::vector<int> interface_ids;
  // Polygon corners, counter-clockwise. In 1D: the two end points on the x axis.
  std::vector<Vec2> vertices;
};

struct Interface {
  int id = 0;
  int left = 0;
  int right = 0;
  double area = 0.0;
  Vec2 normal = Vec2::Zero();  // unit, from left to right
  Vec2 midpoint = Vec2::Zero();
};

class Mesh {
 public:
  Mesh() = default;
  Mesh(int dim, std::vector<Cell> cells, std::vector<Interface> interfaces,
       std::vector<double> domain);

  int dim() const { return dim_; }
  double h() const { return h_; }
  double a() const { return a_; }
  const std::vector<double>& domain() const { return domain_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Interface>& interfaces() const { return interfaces_; }
  const Cell& cell(int k) const { return cells_[static_cast<std::size_t>(k)]; }
  const Interface& interface(int s) const {
    return interfaces_[static_cast<std::size_t>(s)];
  }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_interfaces() const { return interfaces_.size(); }

  /// Cell on the other side of interface s as seen from cell k.
  int neighbor(int k, int s) const;
  /// n_KL for K = k; flips the stored normal when k is the right cell.
  Vec2 outward_normal(int k, int s) const;
  /// Sum of interface areas around cell k.
  double perimeter(int k) const;

  /// Hash of the geometry, stable across runs and platforms with IEEE doubles.
  std::uint64_t id() const { return id_; }
  std::string id_hex() const;

  /// Periodic minimal-image distance between two points.
  double periodic_distance(const Vec2& x, const Vec2& y) const;

 private:
  int dim_ = 1;
  std::vector<Cell> cells_;
  std::vector<Interface> interfaces_;
  std::vector<double> domain_;
  double h_ = 0.0;
  double a_ = 0.0;
  std::uint64_t id_ = 0;
};

Mesh build_uniform_1d(int n_cells, double length);
Mesh build_uniform_quad_2d(int nx, int ny, double lx, double ly);
Mesh build_perturbed_quad_2d(int nx, int ny, double lx, double ly, double jitter,
                             std::uint64_t seed);

/// Largest a with |K| >= a h^d and |dK| <= h^(d-1)/a on every cell.
double regularity_constant(const Mesh& mesh);

/// Throws StructuralError if any mesh invariant is broken.
void validate_mesh(const Mesh& mesh);

bool cell_is_convex(const Cell& cell);

enum class QuadratureRule { Midpoint, Gauss3 };

struct QuadraturePoint {
  Vec2 x;
  double w;  // weights over a cell sum to |K|
};

/// Quadrature on cell k, optionally on a subdiv x subdiv (or subdiv in 1D) split.
std::vector<QuadraturePoint> cell_quadrature(const Mesh& mesh, int k,
                                             QuadratureRule rule, int subdiv = 1);

std::string to_string(QuadratureRule rule);
QuadratureRule quadrature_from_string(const std::string& name);

// JSON import/export; round-trips bit-exactly.
std::string mesh_to_json(const Mesh& mesh);
Mesh mesh_from_json(const std::string& text);

}  // namespace hypflux
