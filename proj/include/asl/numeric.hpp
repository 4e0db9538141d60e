#pragma once

#include <functional>
#include <vector>

namespace asl {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_intervals = 4000;
};

// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a, b]. Handles
// a > b by sign convention. Optional breakpoints force initial subdivision at
// known kinks (absolute-value terms in Laplace log-likelihoods).
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {},
                 const std::vector<double>& breakpoints = {});

// Unique negative zero of a continuous convex function with f(0) = 0 and
// f'(0) > 0. `guess` seeds the bracket search (any negative value works).
// Throws root_not_bracketed when expansion hits |t| = 1e6 without a sign
// change.
double negative_root(const std::function<double(double)>& f, double guess,
                     double tol);

// Integral of lambda(tau)/tau from 0 to t, with the integrand extended by
// continuity at tau = 0 using the slope d0 and curvature rho0 of lambda.
double phi_integral(const std::function<double(double)>& lambda, double d0,
                    double rho0, double t, double abs_tol = 1e-10);

}  // namespace asl
