#pragma once

#include <functional>
#include <span>
#include <vector>

namespace pmol {

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
  double rms_residual = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Continuous two-segment linear fit with a free breakpoint. Used for
/// log-log threshold knee extraction.
struct PiecewiseFit {
  double break_x = 0.0;
  double break_y = 0.0;
  double slope_lo = 0.0;
  double slope_hi = 0.0;
  double rms_residual = 0.0;
};

PiecewiseFit fit_piecewise_linear(std::span<const double> x, std::span<const double> y);

/// Solve a*sol = rhs in place for a dense n x n system (Gaussian elimination
/// with partial pivoting). a is row-major and is destroyed.
void solve_dense(std::span<double> a, std::span<double> rhs, int n);

/// Small-model Levenberg-Marquardt. eval fills the residual vector and, when
/// jac is non-null, the row-major n_resid x n_param Jacobian of the residuals.
struct LmOptions {
  int max_iter = 200;
  double rel_step_tol = 1e-8;
};

struct LmResult {
  std::vector<double> params;
  double rms_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

using LmEval = std::function<void(std::span<const double> params, std::span<double> resid,
                                  double* jac)>;

LmResult levenberg_marquardt(const LmEval& eval, std::vector<double> p0, int n_resid,
                             const LmOptions& opt = {});

}  // namespace pmol
