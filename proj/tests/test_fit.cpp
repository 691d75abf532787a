#include <cmath>
#include <vector>

#include "doctest.h"
#include "pmol/fit.hpp"
#include "pmol/errors.hpp"

using namespace pmol;

TEST_CASE("line fit recovers exact lines") {
  std::vector<double> x, y;
  for (int i = 0; i < 20; ++i) {
    x.push_back(0.5 * i);
    y.push_back(3.25 - 1.75 * x.back());
  }
  const LineFit f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(-1.75).epsilon(1e-13));
  CHECK(f.intercept == doctest::Approx(3.25).epsilon(1e-13));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.rms_residual < 1e-12);

  std::vector<double> flat_x = {1.0, 1.0, 1.0}, flat_y = {0.0, 1.0, 2.0};
  CHECK_THROWS_AS(fit_line(flat_x, flat_y), validation_error);
}

TEST_CASE("dense solve") {
  // [[2,1,0],[1,3,1],[0,1,4]] x = [3,10,18] -> x = [0.62264..., 1.75471..., 4.06132...]
  std::vector<double> a = {2, 1, 0, 1, 3, 1, 0, 1, 4};
  std::vector<double> b = {3, 10, 18};
  solve_dense(a, b, 3);
  CHECK(2 * b[0] + b[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(b[0] + 3 * b[1] + b[2] == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(b[1] + 4 * b[2] == doctest::Approx(18.0).epsilon(1e-12));

  std::vector<double> sing = {1, 2, 2, 4};
  std::vector<double> rhs = {1, 2};
  CHECK_THROWS_AS(solve_dense(sing, rhs, 2), compute_error);
}

TEST_CASE("piecewise linear fit finds a clean knee") {
  std::vector<double> x, y;
  for (int i = 0; i <= 30; ++i) {
    const double xv = -1.5 + 0.1 * i;
    x.push_back(xv);
    y.push_back(xv <= 0.4 ? 1.0 + 0.8 * (xv - 0.4) : 1.0 + 4.5 * (xv - 0.4));
  }
  const PiecewiseFit f = fit_piecewise_linear(x, y);
  CHECK(f.break_x == doctest::Approx(0.4).epsilon(0.02));
  CHECK(f.slope_lo == doctest::Approx(0.8).epsilon(0.02));
  CHECK(f.slope_hi == doctest::Approx(4.5).epsilon(0.02));
  CHECK(f.rms_residual < 0.02);
}

TEST_CASE("levenberg-marquardt on an exponential") {
  // y = a * exp(b x), residuals and analytic jacobian.
  std::vector<double> x, y;
  for (int i = 0; i < 40; ++i) {
    x.push_back(0.05 * i);
    y.push_back(2.5 * std::exp(-1.3 * x.back()));
  }
  LmEval eval = [&](std::span<const double> p, std::span<double> r, double* jac) {
    for (size_t i = 0; i < x.size(); ++i) {
      const double e = std::exp(p[1] * x[i]);
      r[i] = p[0] * e - y[i];
      if (jac) {
        jac[i * 2 + 0] = e;
        jac[i * 2 + 1] = p[0] * x[i] * e;
      }
    }
  };
  const LmResult res = levenberg_marquardt(eval, {1.0, -0.5}, int(x.size()));
  CHECK(res.converged);
  CHECK(res.params[0] == doctest::Approx(2.5).epsilon(1e-8));
  CHECK(res.params[1] == doctest::Approx(-1.3).epsilon(1e-8));
}
