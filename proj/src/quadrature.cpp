#include "invlearn/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace invlearn {

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      // p0 = P_n(z); derivative from the standard identity.
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

QuadratureRule composite_gauss_legendre_01(int nodes_per_panel, int panels) {
  if (panels < 1) throw std::invalid_argument("composite rule: panels must be >= 1");
  const QuadratureRule base = gauss_legendre(nodes_per_panel);
  QuadratureRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(nodes_per_panel) * panels);
  rule.weights.reserve(static_cast<std::size_t>(nodes_per_panel) * panels);
  const double width = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    const double left = p * width;
    for (int i = 0; i < nodes_per_panel; ++i) {
      rule.nodes.push_back(left + 0.5 * width * (base.nodes[i] + 1.0));
      rule.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return rule;
}

}
