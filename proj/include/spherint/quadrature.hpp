#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace spherint::quad {

struct GaussLegendre {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Nodes and weights of the n-point Gauss-Legendre rule, cached per n.
const GaussLegendre& gauss_legendre(int n);

// Composite n-point Gauss-Legendre over [a, b] split into `panels` equal panels.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels, int n = 32);

// Panel-doubling refinement until two successive estimates differ by less
// than abs_tol + rel_tol * |I|.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol = 1e-10,
                          double abs_tol = 1e-12, int max_panels = 256);

// Tensor-product rule for complex integrands over [lo, hi]^2.
std::complex<double> integrate2d(
    const std::function<std::complex<double>(double, double)>& f, double lo,
    double hi, int panels, int n = 32);

}  // namespace spherint::quad
