#include "rrde/vector_field.hpp"

#include <cmath>

#include "rrde/errors.hpp"

namespace rrde {

VectorField::VectorField(Index d, Index n, Sigma s, DSigma ds, std::optional<D2Sigma> d2s, Bounds b, std::string name)
    : d_(d), n_(n), s_(std::move(s)), ds_(std::move(ds)), d2s_(std::move(d2s)), bounds_(b), name_(std::move(name)) {
  if (d < 1 || n < 1) throw DomainError("VectorField: dimensions must be positive");
}

Matd VectorField::sigma(const Vecd& y) const {
  if (y.size() != d_) throw DomainError("VectorField: point dimension mismatch");
  return s_(y);
}

std::vector<Matd> VectorField::dsigma(const Vecd& y) const {
  if (y.size() != d_) throw DomainError("VectorField: point dimension mismatch");
  return ds_(y);
}

std::vector<std::vector<Matd>> VectorField::d2sigma(const Vecd& y) const {
  if (!d2s_) throw DomainError("VectorField: no second derivative for " + name_);
  return (*d2s_)(y);
}

namespace {

std::vector<Matd> zeros(Index d, Index n) { return std::vector<Matd>(static_cast<std::size_t>(d), Matd::Zero(d, n)); }

std::vector<std::vector<Matd>> zeros2(Index d, Index n) {
  return std::vector<std::vector<Matd>>(static_cast<std::size_t>(d), zeros(d, n));
}

}  // namespace

VectorField VectorField::constant(const Matd& M) {
  const Index d = M.rows(), n = M.cols();
  return VectorField(
      d, n, [M](const Vecd&) { return M; }, [d, n](const Vecd&) { return zeros(d, n); },
      D2Sigma([d, n](const Vecd&) { return zeros2(d, n); }), Bounds{M.cwiseAbs().maxCoeff(), 0, 0}, "constant");
}

VectorField VectorField::zero(Index d, Index n) {
  VectorField f = constant(Matd::Zero(d, n));
  f.name_ = "zero";
  return f;
}

VectorField VectorField::identity(Index d) {
  VectorField f = constant(Matd::Identity(d, d));
  f.name_ = "identity";
  return f;
}

VectorField VectorField::smooth(Index d, Index n, double base, double amp, double freq) {
  auto phase = [](Index a, Index j) { return 0.7 * static_cast<double>(a) + 1.3 * static_cast<double>(j); };
  Sigma s = [=](const Vecd& y) {
    Matd m(d, n);
    for (Index a = 0; a < d; ++a)
      for (Index j = 0; j < n; ++j)
        m(a, j) = (a == j ? base : 0.0) + amp * std::sin(freq * y((a + j) % d) + phase(a, j));
    return m;
  };
  DSigma ds = [=](const Vecd& y) {
    std::vector<Matd> D = zeros(d, n);
    for (Index a = 0; a < d; ++a)
      for (Index j = 0; j < n; ++j) {
        const Index b = (a + j) % d;
        D[b](a, j) = amp * freq * std::cos(freq * y(b) + phase(a, j));
      }
    return D;
  };
  D2Sigma d2s = [=](const Vecd& y) {
    std::vector<std::vector<Matd>> H = zeros2(d, n);
    for (Index a = 0; a < d; ++a)
      for (Index j = 0; j < n; ++j) {
        const Index b = (a + j) % d;
        H[b][b](a, j) = -amp * freq * freq * std::sin(freq * y(b) + phase(a, j));
      }
    return H;
  };
  Bounds bd{std::abs(base) + std::abs(amp), std::abs(amp * freq), std::abs(amp) * freq * freq};
  return VectorField(d, n, std::move(s), std::move(ds), std::move(d2s), bd, "smooth");
}

VectorField VectorField::affine(const Matd& M0, const std::vector<Matd>& M) {
  const Index d = M0.rows(), n = M0.cols();
  if (static_cast<Index>(M.size()) != d) throw DomainError("affine: need one slope matrix per state coordinate");
  double ds = 0;
  for (const auto& m : M) {
    if (m.rows() != d || m.cols() != n) throw DomainError("affine: slope matrix has the wrong shape");
    ds = std::max(ds, m.cwiseAbs().maxCoeff());
  }
  Sigma s = [M0, M](const Vecd& y) {
    Matd r = M0;
    for (std::size_t b = 0; b < M.size(); ++b) r += y(static_cast<Index>(b)) * M[b];
    return r;
  };
  Bounds bd{ds == 0 ? M0.cwiseAbs().maxCoeff() : kUnbounded, ds, 0};
  return VectorField(
      d, n, std::move(s), [M](const Vecd&) { return M; }, D2Sigma([d, n](const Vecd&) { return zeros2(d, n); }), bd,
      "affine");
}

Vecd apply_F(const std::vector<Matd>& Ds, const Matd& M) {
  const Index d = static_cast<Index>(Ds.size());
  Vecd out = Vecd::Zero(d);
  for (Index b = 0; b < d; ++b) {
    // sum_j d_b sigma^a_j M^{bj}
    out.noalias() += Ds[b] * M.row(b).transpose();
  }
  return out;
}

double F_norm(const std::vector<Matd>& Ds) {
  if (Ds.empty()) return 0;
  Vecd rows = Vecd::Zero(Ds.front().rows());
  for (const auto& m : Ds) rows += m.cwiseAbs().rowwise().sum();
  return rows.maxCoeff();
}

Matd directional(const std::vector<Matd>& Ds, const Vecd& v) {
  Matd out = Matd::Zero(Ds.front().rows(), Ds.front().cols());
  for (std::size_t b = 0; b < Ds.size(); ++b) out += v(static_cast<Index>(b)) * Ds[b];
  return out;
}

double derivative_check(const VectorField& f, const Vecd& y, double h) {
  const std::vector<Matd> D = f.dsigma(y);
  double err = 0;
  for (Index b = 0; b < f.dim(); ++b) {
    Vecd e = Vecd::Zero(f.dim());
    e(b) = h;
    const Matd fd = (f.sigma(y + e) - f.sigma(y - e)) / (2 * h);
    err = std::max(err, (fd - D[b]).cwiseAbs().maxCoeff());
  }
  return err;
}

}  // namespace rrde
