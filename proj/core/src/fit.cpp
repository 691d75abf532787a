#include "pmol/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmol/errors.hpp"

namespace pmol {

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  if (n != y.size() || n < 2) throw validation_error("fit_line: need >= 2 paired samples");

  double sx = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / double(n), my = sy / double(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw validation_error("fit_line: degenerate design (all x equal)");

  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    sse += r * r;
  }
  f.rms_residual = std::sqrt(sse / double(n));
  f.r_squared = syy > 0 ? 1.0 - sse / syy : 1.0;
  return f;
}

void solve_dense(std::span<double> a, std::span<double> rhs, int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (a[pivot * n + col] == 0.0) throw compute_error("solve_dense: singular matrix");
    if (pivot != col) {
      for (int c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
      std::swap(rhs[pivot], rhs[col]);
    }
    const double d = a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / d;
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = rhs[r];
    for (int c = r + 1; c < n; ++c) acc -= a[r * n + c] * rhs[c];
    rhs[r] = acc / a[r * n + r];
  }
}

namespace {

// Least squares of the continuous two-segment model with fixed breakpoint xb:
// y = a + s1*min(x-xb,0) + s2*max(x-xb,0). Returns SSE; fills (a,s1,s2).
double piecewise_sse(std::span<const double> x, std::span<const double> y, double xb,
                     double out[3]) {
  double ata[9] = {0}, atb[3] = {0};
  for (size_t i = 0; i < x.size(); ++i) {
    const double lo = std::min(x[i] - xb, 0.0);
    const double hi = std::max(x[i] - xb, 0.0);
    const double row[3] = {1.0, lo, hi};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) ata[r * 3 + c] += row[r] * row[c];
      atb[r] += row[r] * y[i];
    }
  }
  // Ridge the (possibly empty) segment terms so the solve stays well posed.
  ata[4] += 1e-12;
  ata[8] += 1e-12;
  solve_dense(std::span<double>(ata, 9), std::span<double>(atb, 3), 3);
  double sse = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double lo = std::min(x[i] - xb, 0.0);
    const double hi = std::max(x[i] - xb, 0.0);
    const double r = y[i] - (atb[0] + atb[1] * lo + atb[2] * hi);
    sse += r * r;
  }
  out[0] = atb[0];
  out[1] = atb[1];
  out[2] = atb[2];
  return sse;
}

}  // namespace

PiecewiseFit fit_piecewise_linear(std::span<const double> x, std::span<const double> y) {
  const size_t n = x.size();
  if (n != y.size() || n < 5)
    throw validation_error("fit_piecewise_linear: need >= 5 paired samples");
  if (!std::is_sorted(x.begin(), x.end()))
    throw validation_error("fit_piecewise_linear: x must be sorted");

  // Scan breakpoint candidates on a fine grid strictly inside the data range,
  // keeping at least two points on each side.
  const double lo = x[1], hi = x[n - 2];
  if (!(hi > lo)) throw validation_error("fit_piecewise_linear: degenerate x range");

  double best_sse = std::numeric_limits<double>::infinity();
  double best_xb = lo, best_p[3] = {0, 0, 0};
  const int grid = 400;
  for (int k = 0; k <= grid; ++k) {
    const double xb = lo + (hi - lo) * double(k) / double(grid);
    double p[3];
    const double sse = piecewise_sse(x, y, xb, p);
    if (sse < best_sse) {
      best_sse = sse;
      best_xb = xb;
      best_p[0] = p[0];
      best_p[1] = p[1];
      best_p[2] = p[2];
    }
  }

  PiecewiseFit f;
  f.break_x = best_xb;
  f.break_y = best_p[0];
  f.slope_lo = best_p[1];
  f.slope_hi = best_p[2];
  f.rms_residual = std::sqrt(best_sse / double(n));
  return f;
}

LmResult levenberg_marquardt(const LmEval& eval, std::vector<double> p0, int n_resid,
                             const LmOptions& opt) {
  const int np = int(p0.size());
  std::vector<double> resid(n_resid), jac(size_t(n_resid) * np);
  std::vector<double> jtj(size_t(np) * np), jtr(np), trial(np), resid_trial(n_resid);

  auto sse_of = [&](std::span<const double> p, std::span<double> r) {
    eval(p, r, nullptr);
    double s = 0;
    for (double v : r) s += v * v;
    return s;
  };

  double lambda = 1e-3;
  double sse = sse_of(p0, resid);
  LmResult out;
  out.params = p0;

  for (int it = 0; it < opt.max_iter; ++it) {
    out.iterations = it + 1;
    eval(out.params, resid, jac.data());
    std::fill(jtj.begin(), jtj.end(), 0.0);
    std::fill(jtr.begin(), jtr.end(), 0.0);
    for (int i = 0; i < n_resid; ++i) {
      const double* row = &jac[size_t(i) * np];
      for (int r = 0; r < np; ++r) {
        jtr[r] -= row[r] * resid[i];
        for (int c = r; c < np; ++c) jtj[size_t(r) * np + c] += row[r] * row[c];
      }
    }
    for (int r = 0; r < np; ++r)
      for (int c = 0; c < r; ++c) jtj[size_t(r) * np + c] = jtj[size_t(c) * np + r];

    bool stepped = false;
    for (int attempt = 0; attempt < 24 && !stepped; ++attempt) {
      std::vector<double> m = jtj, g = jtr;
      for (int r = 0; r < np; ++r)
        m[size_t(r) * np + r] += lambda * std::max(jtj[size_t(r) * np + r], 1e-30);
      try {
        solve_dense(m, g, np);
      } catch (const compute_error&) {
        lambda *= 10.0;
        continue;
      }
      for (int r = 0; r < np; ++r) trial[r] = out.params[r] + g[r];
      const double sse_trial = sse_of(trial, resid_trial);
      if (sse_trial <= sse) {
        double max_rel = 0;
        for (int r = 0; r < np; ++r) {
          const double scale = std::max(std::abs(out.params[r]), 1e-300);
          max_rel = std::max(max_rel, std::abs(g[r]) / scale);
        }
        out.params = trial;
        sse = sse_trial;
        lambda = std::max(lambda * 0.1, 1e-14);
        stepped = true;
        if (max_rel < opt.rel_step_tol) {
          out.converged = true;
          out.rms_residual = std::sqrt(sse / n_resid);
          return out;
        }
      } else {
        lambda *= 10.0;
      }
    }
    if (!stepped) {  // stuck in a flat or ill-conditioned region
      out.converged = true;
      out.rms_residual = std::sqrt(sse / n_resid);
      return out;
    }
  }
  out.rms_residual = std::sqrt(sse / n_resid);
  return out;
}

}  // namespace pmol
