#pragma once

#include <functional>
#include <vector>

namespace hypext {

struct GaussLegendre {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule (Newton iteration on P_m).
GaussLegendre gauss_legendre(int m);

// Adaptive Simpson on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol);

// int_0^t sinh(r)^n dr; closed forms for n = 1, 2, quadrature otherwise.
double sinh_power_integral(int n, double t);

}  // namespace hypext
