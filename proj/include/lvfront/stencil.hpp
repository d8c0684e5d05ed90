#pragma once

#include <vector>

namespace lvfront {

/// Finite-difference weights for derivatives 0..max_order at z from the nodes x
/// (Fornberg's recursion). Result is indexed [order][node].
std::vector<std::vector<double>> fornberg_weights(double z, const std::vector<double>& x,
                                                  int max_order);

/// Precomputed uniform-grid stencils of a fixed width. Near the ends the
/// stencil is shifted inward so it stays inside the grid.
class UniformStencil {
 public:
  UniformStencil(int n_points, double h, int width);

  /// First node index of the stencil used at grid point i.
  int start(int i) const;
  int width() const { return width_; }
  /// Weights for d^order/dxi^order at grid point i (order 1 or 2).
  const std::vector<double>& weights(int i, int order) const;

 private:
  int n_;
  int width_;
  // Per offset (i - start) tables for orders 1 and 2.
  std::vector<std::vector<double>> d1_;
  std::vector<std::vector<double>> d2_;
};

/// Lagrange interpolation of values y at nodes x, with first and second
/// derivatives, at the point z.
struct InterpJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};
InterpJet lagrange_jet(double z, const double* x, const double* y, int n);

}  // namespace lvfront
