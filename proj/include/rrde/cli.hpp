#pragma once

#include <ostream>
#include <string>

#include "rrde/config.hpp"
#include "rrde/csv.hpp"
#include "rrde/domain.hpp"
#include "rrde/rough_path.hpp"
#include "rrde/vector_field.hpp"

namespace rrde {

inline constexpr const char* kVersion = "rrde 0.1.0";

enum ExitStatus { kOk = 0, kUsage = 2, kRegime = 3, kSolverFailure = 4 };

/// Builtin "name(key=value,...)" (zero, identity, constant, smooth, affine)
/// or the path of a coefficient file (kind=constant|affine, d, n, M0, M1..Md
/// as row-major entries).
VectorField parse_sigma(const std::string& spec, const Config& cfg);

/// Domain description: shape=halfspace (normal, offset), orthant (dim),
/// ball (center, radius), polyhedron (repeated constraint=n_1 .. n_d c),
/// ball-exterior (center, radius).
Domain parse_domain(const Config& desc);
Domain load_domain(const std::string& path);

GridPathd path_from_table(const Table& t);
Table path_table(const GridPathd& x, const std::string& prefix);
/// Columns t, x1..xn, A11..Ann.
RoughPathd rough_from_table(const Table& t, double p);
Table rough_table(const RoughPathd& X);

/// Dispatch on cfg's "command". Writes the artifact to cfg's "out" and a
/// diagnostic to <out>.diag on solver failure.
int run(const Config& cfg, std::ostream& log);

}  // namespace rrde
