#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rrde/domain.hpp"

namespace rrde {

/// sigma : R^d -> d x n matrices with first derivative Dsigma (entry b of the
/// returned vector is d sigma / d y_b) and optional second derivative
/// (entry [b][c] is d^2 sigma / d y_b d y_c). Bounds are max-entry sups.
class VectorField {
 public:
  using Sigma = std::function<Matd(const Vecd&)>;
  using DSigma = std::function<std::vector<Matd>(const Vecd&)>;
  using D2Sigma = std::function<std::vector<std::vector<Matd>>(const Vecd&)>;

  struct Bounds {
    double sigma = kUnbounded;
    double dsigma = kUnbounded;
    double d2sigma = kUnbounded;
  };

  VectorField(Index d, Index n, Sigma s, DSigma ds, std::optional<D2Sigma> d2s, Bounds b, std::string name);

  static VectorField zero(Index d, Index n);
  static VectorField identity(Index d);
  static VectorField constant(const Matd& M);
  /// sigma^a_j(y) = base [a == j] + amp sin(freq y_{(a+j) mod d} + 0.7 a + 1.3 j).
  static VectorField smooth(Index d, Index n, double base, double amp, double freq);
  /// sigma(y) = M0 + sum_b y_b M[b].
  static VectorField affine(const Matd& M0, const std::vector<Matd>& M);

  Index dim() const { return d_; }
  Index noise_dim() const { return n_; }
  const std::string& name() const { return name_; }
  const Bounds& bounds() const { return bounds_; }
  /// True when Dsigma vanishes identically.
  bool is_constant() const { return bounds_.dsigma == 0; }
  bool has_second_derivative() const { return d2s_.has_value(); }

  Matd sigma(const Vecd& y) const;
  std::vector<Matd> dsigma(const Vecd& y) const;
  std::vector<std::vector<Matd>> d2sigma(const Vecd& y) const;

 private:
  Index d_, n_;
  Sigma s_;
  DSigma ds_;
  std::optional<D2Sigma> d2s_;
  Bounds bounds_;
  std::string name_;
};

/// F_y(M)^a = sum_{b,j} d_b sigma^a_j(y) M^{bj} for a d x n matrix M.
Vecd apply_F(const std::vector<Matd>& Ds, const Matd& M);
/// Operator norm of F from max-entry to max-entry: max_a sum_{b,j} |d_b sigma^a_j|.
double F_norm(const std::vector<Matd>& Ds);
/// Directional derivative sum_b v^b d_b sigma (d x n).
Matd directional(const std::vector<Matd>& Ds, const Vecd& v);

/// Max error of central differences against Dsigma at y with step h.
double derivative_check(const VectorField& f, const Vecd& y, double h);

}  // namespace rrde
