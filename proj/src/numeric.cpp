#include "asl/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "asl/error.hpp"

namespace asl {
namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
constexpr double kWeightsKronrod[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
constexpr double kWeightsGauss[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct Panel {
  double a, b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a,
                     double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = 0.0;
  double gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double offset = half * kNodes[i];
    const double fsum =
        (i == 7) ? f(center) : f(center - offset) + f(center + offset);
    kronrod += kWeightsKronrod[i] * fsum;
    if (i % 2 == 1) gauss += kWeightsGauss[i / 2] * fsum;
  }
  Panel panel;
  panel.a = a;
  panel.b = b;
  panel.value = kronrod * half;
  const double diff = (kronrod - gauss) * half;
  panel.error = std::pow(200.0 * std::abs(diff), 1.5);
  if (!std::isfinite(panel.error)) panel.error = std::abs(diff);
  panel.error = std::max(panel.error, std::abs(diff) * 1e-6);
  return panel;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts,
                 const std::vector<double>& breakpoints) {
  if (a == b) return 0.0;
  const double sign = (a < b) ? 1.0 : -1.0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);

  std::vector<double> cuts;
  cuts.push_back(lo);
  for (double x : breakpoints) {
    if (x > lo && x < hi) cuts.push_back(x);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> queue;
  double total = 0.0;
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel panel = evaluate_panel(f, cuts[i], cuts[i + 1]);
    total += panel.value;
    total_error += panel.error;
    queue.push(panel);
  }

  int panels = static_cast<int>(queue.size());
  while (total_error > opts.abs_tol && panels < opts.max_intervals) {
    Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval at floating-point resolution; cannot refine further.
      queue.push(Panel{worst.a, worst.b, worst.value, 0.0});
      total_error -= worst.error;
      continue;
    }
    Panel left = evaluate_panel(f, worst.a, mid);
    Panel right = evaluate_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++panels;
  }

  if (!std::isfinite(total)) {
    raise(Errc::integration_failure, "integrand produced a non-finite value");
  }
  if (total_error > std::max(opts.abs_tol, 1e-8 * std::abs(total)) &&
      panels >= opts.max_intervals) {
    raise(Errc::integration_failure,
          "adaptive quadrature did not reach the requested tolerance");
  }
  return sign * total;
}

double negative_root(const std::function<double(double)>& f, double guess,
                     double tol) {
  constexpr double kExpansionCap = 1e6;
  double t = (guess < 0.0 && std::isfinite(guess)) ? guess : -1.0;
  if (t > -1e-12) t = -1e-12;

  double hi;  // f(hi) < 0, hi closer to zero
  double lo;  // f(lo) >= 0
  double ft = f(t);
  if (ft < 0.0) {
    hi = t;
    lo = t;
    do {
      lo *= 2.0;
      if (lo < -kExpansionCap) {
        raise(Errc::root_not_bracketed,
              "no sign change up to t = -1e6; check convexity assumptions");
      }
      ft = f(lo);
    } while (ft < 0.0);
  } else {
    lo = t;
    hi = t;
    do {
      hi *= 0.5;
      if (hi > -1e-300) {
        raise(Errc::root_not_bracketed,
              "function stays nonnegative arbitrarily close to zero");
      }
      ft = f(hi);
    } while (ft >= 0.0);
  }

  double flo = f(lo);
  double fhi = f(hi);
  for (int iter = 0; iter < 200 && (hi - lo) > tol; ++iter) {
    double mid = 0.5 * (lo + hi);
    // Secant proposal, accepted only when it falls inside the bracket.
    if (fhi != flo) {
      const double secant = hi - fhi * (hi - lo) / (fhi - flo);
      if (secant > lo + 0.1 * tol && secant < hi - 0.1 * tol) mid = secant;
    }
    const double fmid = f(mid);
    if (fmid >= 0.0) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
  }
  return 0.5 * (lo + hi);
}

double phi_integral(const std::function<double(double)>& lambda, double d0,
                    double rho0, double t, double abs_tol) {
  if (!std::isfinite(t)) raise(Errc::domain_error, "non-finite t");
  constexpr double kSeriesCutoff = 1e-6;
  if (std::abs(t) <= kSeriesCutoff) {
    return d0 * t + 0.25 * rho0 * t * t;
  }
  auto integrand = [&](double tau) {
    if (std::abs(tau) < kSeriesCutoff) return d0 + 0.5 * rho0 * tau;
    return lambda(tau) / tau;
  };
  QuadratureOptions opts;
  opts.abs_tol = abs_tol;
  return integrate(integrand, 0.0, t, opts);
}

}  // namespace asl
