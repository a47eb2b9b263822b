#pragma once

// Gauss-Legendre quadrature used for population-operator assembly and the
// design-density integrals.

#include <vector>

namespace invlearn {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on the Legendre
/// recurrence).
QuadratureRule gauss_legendre(int n);

/// Composite rule on [0, 1]: `panels` equal panels, an n-point rule on each.
QuadratureRule composite_gauss_legendre_01(int nodes_per_panel, int panels);

inline constexpr int kQuadNodesPerPanel = 64;
inline constexpr int kQuadPanels = 8;

}
