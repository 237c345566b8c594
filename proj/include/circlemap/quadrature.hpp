#ifndef CIRCLEMAP_QUADRATURE_HPP
#define CIRCLEMAP_QUADRATURE_HPP

#include <functional>
#include <memory>
#include <vector>

namespace circlemap {

/// Adaptive cumulative integral of a smooth positive function over [0, 1].
/// Panels are bisected until a Gauss-Legendre 7 vs 15 comparison meets the
/// local error share; upto(x) then combines stored prefix sums with one
/// partial-panel quadrature.
class CumulativeQuadrature {
  public:
    CumulativeQuadrature(std::function<double(double)> f, double abs_tol,
                         long max_panels = 1 << 20);

    double total() const { return prefix_.back(); }
    /// Integral from 0 to x, x in [0, 1].
    double upto(double x) const;
    /// Solve upto(x) = target for target in [0, total()]; the integrand must
    /// be positive.  Panel prefix sums give the bracket, Newton finishes.
    double solve_upto(double target) const;
    long panel_count() const { return static_cast<long>(boundaries_.size()) - 1; }

  private:
    double panel_gl7(double a, double b) const;
    double panel_gl15(double a, double b) const;

    std::function<double(double)> f_;
    std::vector<double> boundaries_;  // 0 = x_0 < ... < x_K = 1
    std::vector<double> prefix_;      // prefix_[i] = integral over [0, x_i]
};

} // namespace circlemap

#endif
