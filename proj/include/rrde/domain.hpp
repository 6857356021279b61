#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rrde/grid_path.hpp"

namespace rrde {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();
/// Constraint activity tolerance for normal cones.
inline constexpr double kActiveTol = 1e-8;

/// Certified condition constants of a catalogue domain.
struct DomainConstants {
  double r0 = kUnbounded;   // condition (A); kUnbounded for flat or convex sets treated as such
  double beta = 1;          // condition (B)
  double delta = 1;         // condition (B)
  std::optional<double> C_D;  // condition (H1), when known
  bool C_D_empirical = false;
  std::string C_D_provenance;
  bool beta_certified = true;
  bool convex = true;
  bool condition_c = true;  // f = 0 works for convex domains
  Vecd l;                   // a direction realising beta where one direction serves everywhere
};

/// Reflecting domain from the built-in catalogue. Half-spaces and polyhedra
/// are written {x : <n_i, x> >= c_i} with the normals stored at unit length.
class Domain {
 public:
  enum class Shape { HalfSpace, Orthant, Ball, Polyhedron, BallExterior };

  static Domain half_space(const Vecd& normal, double offset);
  static Domain orthant(Index d);
  static Domain ball(const Vecd& center, double radius);
  static Domain polyhedron(const Matd& normals, const Vecd& offsets);
  /// Non-convex exterior of a ball; usable for geometry, rejected by solvers.
  static Domain ball_exterior(const Vecd& center, double radius);

  Shape shape() const { return shape_; }
  std::string shape_name() const;
  Index dim() const { return dim_; }
  bool convex() const { return consts_.convex; }
  const DomainConstants& constants() const { return consts_; }

  /// Constraint rows (unit normals) and offsets; for the ball, center and radius.
  const Matd& normals() const { return N_; }
  const Vecd& offsets() const { return c_; }
  const Vecd& center() const { return center_; }
  double radius() const { return radius_; }

  bool contains(const Vecd& x, double tol = 1e-10) const;
  /// Nearest point of the closure.
  Vecd project(const Vecd& x) const;
  /// Distance from a point of the closure to the boundary.
  double boundary_distance(const Vecd& x) const;
  /// Inward unit normals of the constraints active at x (empty in the interior).
  std::vector<Vecd> normals_at(const Vecd& x, double tol = kActiveTol) const;
  /// Scale used for relative tolerances.
  double scale() const;

 private:
  Domain() = default;
  Vecd project_polyhedron(const Vecd& z, const std::vector<Index>* equalities) const;
  void certify();

  Shape shape_ = Shape::HalfSpace;
  Index dim_ = 0;
  Matd N_;
  Vecd c_;
  Vecd center_;
  double radius_ = 0;
  DomainConstants consts_;
};

/// Euclidean projection of v onto the cone generated by the given vectors.
Vecd project_onto_cone(const Vecd& v, const std::vector<Vecd>& generators);
/// Minimum-norm point of the convex hull of the given points.
Vecd min_norm_in_hull(const std::vector<Vecd>& points);

DomainConstants domain_constants(const Domain& domain);

}  // namespace rrde
