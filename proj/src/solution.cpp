#include "rrde/solution.hpp"

#include <algorithm>
#include <cmath>

#include "rrde/errors.hpp"

namespace rrde {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw DomainError("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    f.residuals.push_back(r);
    ss += r * r;
  }
  if (x.size() > 2) f.halfwidth = 1.96 * std::sqrt(ss / (n - 2) / sxx);
  return f;
}

DefectReport bucket_profile(const std::vector<double>& omega, const std::vector<double>& value, int nb) {
  DefectReport rep;
  double lo = kUnbounded, hi = 0;
  for (std::size_t i = 0; i < omega.size(); ++i)
    if (omega[i] > 0) {
      lo = std::min(lo, omega[i]);
      hi = std::max(hi, omega[i]);
    }
  rep.pairs = static_cast<Index>(omega.size());
  if (!(hi > lo)) return rep;
  const double llo = std::log(lo), lhi = std::log(hi);
  rep.buckets.resize(static_cast<std::size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    rep.buckets[b].omega_lo = std::exp(llo + (lhi - llo) * b / nb);
    rep.buckets[b].omega_hi = std::exp(llo + (lhi - llo) * (b + 1) / nb);
  }
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (!(omega[i] > 0)) continue;
    int b = static_cast<int>((std::log(omega[i]) - llo) / (lhi - llo) * nb);
    b = std::clamp(b, 0, nb - 1);
    auto& B = rep.buckets[b];
    ++B.count;
    if (value[i] > B.max_abs) {
      B.max_abs = value[i];
      B.omega_at_max = omega[i];
    }
  }
  std::vector<double> lx, ly;
  for (const auto& B : rep.buckets)
    if (B.max_abs > 0) {
      lx.push_back(std::log(B.omega_at_max));
      ly.push_back(std::log(B.max_abs));
    }
  if (lx.size() >= 2) {
    const LineFit f = fit_line(lx, ly);
    rep.slope = f.slope;
    rep.intercept = f.intercept;
  }
  return rep;
}

MeasuredConstants measure_constants(const GridPathd& Y, const std::vector<double>& tv, const std::vector<Index>& nodes,
                                    const Controld& ctrl, double p, int power) {
  MeasuredConstants mc;
  mc.power = power;
  mc.omega_total = ctrl.nodes(0, ctrl.size() - 1);
  const double scale = std::pow(1 + mc.omega_total, power);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const std::vector<double> row = ctrl.row(nodes[i]);
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const double w = row[nodes[j] - nodes[i]];
      if (!(w > 0)) continue;
      const double den = scale * std::pow(w, 1 / p);
      mc.C_Y = std::max(mc.C_Y, (Y.point(nodes[j]) - Y.point(nodes[i])).norm() / den);
      mc.C_Phi = std::max(mc.C_Phi, (tv[nodes[j]] - tv[nodes[i]]) / den);
    }
  }
  return mc;
}

}  // namespace rrde
