#include "lvfront/stencil.hpp"

#include <algorithm>

#include "lvfront/errors.hpp"

namespace lvfront {

std::vector<std::vector<double>> fornberg_weights(double z, const std::vector<double>& x,
                                                  int max_order) {
  const int n = static_cast<int>(x.size());
  if (n == 0 || max_order < 0) fail(ErrorKind::InvalidArgument, "empty stencil");
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        }
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      }
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

UniformStencil::UniformStencil(int n_points, double h, int width) : n_(n_points), width_(width) {
  if (width < 3 || n_points < width) fail(ErrorKind::InvalidArgument, "stencil wider than grid");
  std::vector<double> nodes(width);
  for (int k = 0; k < width; ++k) nodes[k] = k * h;
  d1_.resize(width);
  d2_.resize(width);
  for (int off = 0; off < width; ++off) {
    auto w = fornberg_weights(off * h, nodes, 2);
    d1_[off] = w[1];
    d2_[off] = w[2];
  }
}

int UniformStencil::start(int i) const {
  const int half = width_ / 2;
  return std::clamp(i - half, 0, n_ - width_);
}

const std::vector<double>& UniformStencil::weights(int i, int order) const {
  const int off = i - start(i);
  return order == 1 ? d1_[off] : d2_[off];
}

InterpJet lagrange_jet(double z, const double* x, const double* y, int n) {
  std::vector<double> nodes(x, x + n);
  auto w = fornberg_weights(z, nodes, 2);
  InterpJet jet;
  for (int k = 0; k < n; ++k) {
    jet.value += w[0][k] * y[k];
    jet.d1 += w[1][k] * y[k];
    jet.d2 += w[2][k] * y[k];
  }
  return jet;
}

}  // namespace lvfront
