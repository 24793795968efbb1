#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "nvberry/errors.hpp"

namespace nvberry {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

namespace detail {

// Gauss-7 / Kronrod-15 nodes and weights on [-1, 1], positive half
inline constexpr double kKronrodX[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <typename Func>
inline void gk15(const Func& f, double a, double b, double& kronrod, double& gauss) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  kronrod = kKronrodW[7] * fc;
  gauss = kGaussW[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * kKronrodX[i];
    const double fsum = f(c - x) + f(c + x);
    kronrod += kKronrodW[i] * fsum;
    if (i % 2 == 1) gauss += kGaussW[i / 2] * fsum;
  }
  kronrod *= h;
  gauss *= h;
}

}  // namespace detail

// adaptive bisection on a worst-interval-first stack until the summed error
// estimate drops below max(rel_tol * |integral|, abs_floor)
template <typename Func>
QuadratureResult integrate_adaptive(const Func& f, double a, double b, double rel_tol,
                                    double abs_floor = 1e-13, int max_intervals = 4096) {
  struct Interval {
    double a, b, value, error;
  };

  auto evaluate = [&f](double lo, double hi) {
    Interval iv{lo, hi, 0.0, 0.0};
    double g = 0.0;
    detail::gk15(f, lo, hi, iv.value, g);
    iv.error = std::abs(iv.value - g);
    return iv;
  };

  std::vector<Interval> stack;
  stack.push_back(evaluate(a, b));
  int evals = 15;

  while (static_cast<int>(stack.size()) < max_intervals) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < stack.size(); ++i) {
      total += stack[i].value;
      err += stack[i].error;
      if (stack[i].error > stack[worst].error) worst = i;
    }
    if (err <= std::max(rel_tol * std::abs(total), abs_floor))
      return {total, err, evals};

    Interval iv = stack[worst];
    const double mid = 0.5 * (iv.a + iv.b);
    if (mid <= iv.a || mid >= iv.b) break;  // interval no longer splittable
    stack[worst] = evaluate(iv.a, mid);
    stack.push_back(evaluate(mid, iv.b));
    evals += 30;
  }
  throw QuadratureFailure("line integral did not reach the requested tolerance");
}

// composite trapezoid on a fixed sample grid, with one Richardson step from the
// half-resolution grid as the error estimate; used for tabulated trajectories
inline QuadratureResult integrate_sampled(std::span<const double> t, std::span<const double> f) {
  if (t.size() != f.size() || t.size() < 3)
    throw ValidationError("sampled integration needs matching grids with at least 3 points");
  double fine = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    fine += 0.5 * (f[i] + f[i + 1]) * (t[i + 1] - t[i]);
  double coarse = 0.0;
  std::size_t i = 0;
  for (; i + 2 < t.size(); i += 2)
    coarse += 0.5 * (f[i] + f[i + 2]) * (t[i + 2] - t[i]);
  if (i + 1 < t.size())
    coarse += 0.5 * (f[i] + f[i + 1]) * (t[i + 1] - t[i]);
  const double richardson = fine + (fine - coarse) / 3.0;
  return {richardson, std::abs(fine - coarse) / 3.0, static_cast<int>(t.size())};
}

}  // namespace nvberry
