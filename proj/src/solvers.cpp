#include "alsq/solvers.hpp"

#include <cmath>
#include <limits>

#include "alsq/rng.hpp"

namespace alsq {

namespace {

struct Dense {
  Matrix A;
  Vector b;
  Vector w;
};

Dense restrict_support(const Matrix& A, const Vector& b, const WeightVector& w) {
  require(b.size() == A.rows(), "solver: A/b size mismatch");
  require(w.n() == A.rows(), "solver: A/w size mismatch");
  check_finite(b, "solver");
  Dense d;
  const Index m = w.nnz();
  d.A.resize(m, A.cols());
  d.b.resize(m);
  d.w.resize(m);
  Index j = 0;
  for (const auto& [i, wi] : w.entries()) {
    d.A.row(j) = A.row(i);
    d.b[j] = b[i];
    d.w[j] = wi;
    ++j;
  }
  return d;
}

Vector wls(const Matrix& A, const Vector& b, const Vector& omega) {
  const Index m = A.rows(), d = A.cols();
  Matrix As(m, d);
  Vector bs(m);
  for (Index i = 0; i < m; ++i) {
    const double s = std::sqrt(std::max(omega[i], 0.0));
    As.row(i) = s * A.row(i);
    bs[i] = s * b[i];
  }
  return As.colPivHouseholderQr().solve(bs);
}

// IRLS state shared by the lp and M-loss paths. `irls_weight(s, mu)` maps the
// smoothed residual magnitude s = sqrt(r^2 + mu) to the working WLS weight,
// `smooth_obj` to the smoothed pointwise loss.
struct IrlsFuncs {
  std::function<double(double)> irls_weight;
  std::function<double(double)> smooth_obj;
  std::function<double(double)> dloss;   // dM/dx used in the KKT check
  std::function<double(double)> d2loss;  // d2M/dx2 for the Newton polish
};

double smoothed_objective(const Dense& d, const Vector& x, double mu, const IrlsFuncs& f) {
  Vector r = d.A * x - d.b;
  double s = 0.0;
  for (Index i = 0; i < r.size(); ++i)
    s += d.w[i] * f.smooth_obj(std::sqrt(r[i] * r[i] + mu));
  return s;
}

struct KktInfo {
  double grad_norm = 0.0;
  double scale = 1.0;
};

KktInfo kkt_residual(const Dense& d, const Vector& x, double mu, const IrlsFuncs& f) {
  Vector r = d.A * x - d.b;
  Vector g = Vector::Zero(d.A.cols());
  double scale = 1e-300;
  for (Index i = 0; i < r.size(); ++i) {
    const double s = std::sqrt(r[i] * r[i] + mu);
    const double gi = s > 0 ? d.w[i] * f.dloss(s) * r[i] / s : 0.0;
    g += gi * d.A.row(i).transpose();
    scale += d.w[i] * f.dloss(s) * d.A.row(i).norm();
  }
  return {g.norm(), scale};
}

// Newton steps with backtracking on the smoothed objective at the mu floor;
// IRLS alone converges too slowly near kinks to certify the KKT tolerance.
int newton_polish(const Dense& d, Vector& x, double mu, const IrlsFuncs& f,
                  const SolverOptions& opt) {
  const Index cols = d.A.cols();
  double fval = smoothed_objective(d, x, mu, f);
  int steps = 0;
  for (int it = 0; it < 60; ++it) {
    Vector r = d.A * x - d.b;
    Vector g = Vector::Zero(cols);
    Matrix H = Matrix::Zero(cols, cols);
    double scale = 1e-300;
    for (Index i = 0; i < r.size(); ++i) {
      const double s = std::sqrt(r[i] * r[i] + mu);
      const double m1 = f.dloss(s);
      const double m2 = f.d2loss(s);
      const double gi = d.w[i] * m1 * r[i] / s;
      double hi = d.w[i] * (m2 * r[i] * r[i] / (s * s) + m1 * mu / (s * s * s));
      hi = std::max(hi, 1e-12 * d.w[i]);  // keep PSD at nonconvex kinks
      g += gi * d.A.row(i).transpose();
      H += hi * d.A.row(i).transpose() * d.A.row(i);
      scale += d.w[i] * m1 * d.A.row(i).norm();
    }
    if (g.norm() <= 0.2 * opt.tol * scale) break;
    Vector dx = H.ldlt().solve(-g);
    if (!dx.allFinite()) break;
    double alpha = 1.0;
    Vector x_new = x + dx;
    double f_new = smoothed_objective(d, x_new, mu, f);
    while (f_new > fval && alpha > 1e-10) {
      alpha *= 0.5;
      x_new = x + alpha * dx;
      f_new = smoothed_objective(d, x_new, mu, f);
    }
    if (f_new > fval) break;
    x = x_new;
    fval = f_new;
    ++steps;
  }
  return steps;
}

SolveResult irls_from(const Dense& d, Vector x, const IrlsFuncs& f, const SolverOptions& opt) {
  SolveResult res;
  double mu = 1.0;
  const double mu_floor = opt.tol * opt.tol;
  double fval = smoothed_objective(d, x, mu, f);
  double last_step = std::numeric_limits<double>::infinity();
  int iter = 0, stall = 0;
  while (iter < opt.max_iter) {
    ++iter;
    Vector r = d.A * x - d.b;
    Vector omega(r.size());
    for (Index i = 0; i < r.size(); ++i)
      omega[i] = d.w[i] * f.irls_weight(std::sqrt(r[i] * r[i] + mu));
    Vector x_cand = wls(d.A, d.b, omega);
    if (!x_cand.allFinite()) break;

    // backtrack toward the WLS point until the smoothed objective decreases
    double alpha = 1.0;
    Vector x_new = x_cand;
    double f_new = smoothed_objective(d, x_new, mu, f);
    while (f_new > fval && alpha > 1e-8) {
      alpha *= 0.5;
      x_new = x + alpha * (x_cand - x);
      f_new = smoothed_objective(d, x_new, mu, f);
    }

    const double rel_drop = (fval - f_new) / std::max(std::abs(fval), 1e-300);
    last_step = (x_new - x).norm();
    x = x_new;
    fval = f_new;
    // coarse stall threshold while annealing; strict only at the floor
    if (rel_drop < (mu <= mu_floor ? 1e-13 : 1e-4)) {
      if (mu <= mu_floor) {
        if (++stall >= 3) break;
      } else {
        mu = std::max(mu * 0.01, mu_floor);
        fval = smoothed_objective(d, x, mu, f);
        stall = 0;
      }
    } else {
      stall = 0;
    }
  }
  if (f.d2loss) iter += newton_polish(d, x, mu_floor, f, opt);
  res.x = x;
  res.iterations = iter;
  KktInfo k = kkt_residual(d, x, mu_floor, f);
  res.converged = k.grad_norm <= opt.tol * k.scale ||
                  last_step <= opt.tol * (1.0 + x.norm());
  return res;
}

SolveResult irls_multistart(const Dense& d, const IrlsFuncs& f,
                            std::function<double(const Vector&)> true_obj, bool convex,
                            const SolverOptions& opt) {
  SolveResult best;
  if (d.A.rows() == 0) {
    best.x = Vector::Zero(d.A.cols());
    best.converged = true;
    return best;
  }
  Vector x0 = wls(d.A, d.b, d.w);
  if (!x0.allFinite()) x0 = Vector::Zero(d.A.cols());
  const int nstarts = convex ? 1 : std::max(1, opt.starts);
  RngStream rng(opt.multistart_seed, 0);
  for (int s = 0; s < nstarts; ++s) {
    Vector xs = x0;
    if (s > 0) {
      // random exponential reweighting gives diverse convex starting points
      Vector omega(d.w.size());
      for (Index i = 0; i < omega.size(); ++i)
        omega[i] = d.w[i] * -std::log(1.0 - rng.uniform());
      xs = wls(d.A, d.b, omega);
      if (!xs.allFinite()) continue;
    }
    SolveResult r = irls_from(d, xs, f, opt);
    r.objective = true_obj(r.x);
    if (best.x.size() == 0 || r.objective < best.objective) best = r;
  }
  if (best.x.size() == 0) {
    best.x = x0;
    best.objective = true_obj(x0);
  }
  best.local_only = !convex;
  return best;
}

}  // namespace

SolveResult solve_weighted_lp(const Matrix& A, const Vector& b, const WeightVector& w,
                              double p, const SolverOptions& opt) {
  require(p > 0, "solve_weighted_lp: p must be > 0");
  Dense d = restrict_support(A, b, w);
  if (d.A.rows() == 0) {
    SolveResult res;
    res.x = Vector::Zero(A.cols());
    res.converged = true;
    return res;
  }
  auto true_obj = [&](const Vector& x) {
    Vector r = d.A * x - d.b;
    double s = 0.0;
    for (Index i = 0; i < r.size(); ++i) s += d.w[i] * std::pow(std::abs(r[i]), p);
    return s;
  };
  if (p == 2.0) {
    SolveResult res;
    res.x = wls(d.A, d.b, d.w);
    res.objective = true_obj(res.x);
    res.iterations = 1;
    res.converged = res.x.allFinite();
    return res;
  }
  IrlsFuncs f;
  f.irls_weight = [p](double s) { return std::pow(s, p - 2.0); };
  f.smooth_obj = [p](double s) { return std::pow(s, p); };
  f.dloss = [p](double s) { return p * std::pow(s, p - 1.0); };
  f.d2loss = [p](double s) { return p * (p - 1.0) * std::pow(s, p - 2.0); };
  return irls_multistart(d, f, true_obj, p >= 1.0, opt);
}

SolveResult solve_weighted_lp(const Matrix& A, const Vector& b, double p,
                              const SolverOptions& opt) {
  return solve_weighted_lp(A, b, WeightVector::ones(A.rows()), p, opt);
}

SolveResult solve_weighted_mloss(const Matrix& A, const Vector& b, const WeightVector& w,
                                 const LossDescriptor& M, const SolverOptions& opt) {
  require(static_cast<bool>(M.deriv), "solve_weighted_mloss: loss has no derivative");
  Dense d = restrict_support(A, b, w);
  if (d.A.rows() == 0) {
    SolveResult res;
    res.x = Vector::Zero(A.cols());
    res.converged = true;
    return res;
  }
  auto true_obj = [&](const Vector& x) {
    Vector r = d.A * x - d.b;
    double s = 0.0;
    for (Index i = 0; i < r.size(); ++i) s += d.w[i] * M.eval(std::abs(r[i]));
    return s;
  };
  IrlsFuncs f;
  f.irls_weight = [&M](double s) { return s > 0 ? M.deriv(s) / (2.0 * s) : 0.0; };
  f.smooth_obj = [&M](double s) { return M.eval(s); };
  f.dloss = M.deriv;
  if (M.deriv2) {
    f.d2loss = M.deriv2;
  } else {
    auto d1 = M.deriv;  // one-sided numeric fallback for custom losses
    f.d2loss = [d1](double s) {
      const double h = 1e-6 * (1.0 + s);
      return (d1(s + h) - d1(s)) / h;
    };
  }
  return irls_multistart(d, f, true_obj, M.convex, opt);
}

SolveResult solve_weighted_mloss(const Matrix& A, const Vector& b, const LossDescriptor& M,
                                 const SolverOptions& opt) {
  return solve_weighted_mloss(A, b, WeightVector::ones(A.rows()), M, opt);
}

SolveResult brute_force_1d(const Vector& a, const Vector& b, const LossDescriptor& M,
                           const WeightVector& w, int grid_points) {
  require(a.size() == b.size(), "brute_force_1d: size mismatch");
  require(grid_points >= 3, "brute_force_1d: need at least 3 grid points");

  auto obj = [&](double x) {
    double s = 0.0;
    for (const auto& [i, wi] : w.entries()) s += wi * M.eval(std::abs(a[i] * x - b[i]));
    return s;
  };

  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto& [i, wi] : w.entries()) {
    if (a[i] == 0.0) continue;
    const double c = b[i] / a[i];
    if (!any) {
      lo = hi = c;
      any = true;
    } else {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  SolveResult res;
  if (!any) {
    res.x = Vector::Zero(1);
    res.objective = obj(0.0);
    res.converged = true;
    return res;
  }
  const double pad = 0.05 * (hi - lo) + 1e-9;
  lo -= pad;
  hi += pad;

  double best_x = lo, best_f = obj(lo);
  const double h = (hi - lo) / (grid_points - 1);
  for (int j = 1; j < grid_points; ++j) {
    const double x = lo + h * j;
    const double fx = obj(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }

  // golden-section refinement in the bracket around the best grid point
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double xl = std::max(lo, best_x - h), xr = std::min(hi, best_x + h);
  double c = xr - gr * (xr - xl), e = xl + gr * (xr - xl);
  double fc = obj(c), fe = obj(e);
  for (int it = 0; it < 200 && xr - xl > 1e-14 * (1.0 + std::abs(best_x)); ++it) {
    if (fc < fe) {
      xr = e;
      e = c;
      fe = fc;
      c = xr - gr * (xr - xl);
      fc = obj(c);
    } else {
      xl = c;
      c = e;
      fc = fe;
      e = xl + gr * (xr - xl);
      fe = obj(e);
    }
    if (fc < best_f) {
      best_f = fc;
      best_x = c;
    }
    if (fe < best_f) {
      best_f = fe;
      best_x = e;
    }
  }

  res.x = Vector::Constant(1, best_x);
  res.objective = best_f;
  res.iterations = grid_points;
  res.converged = true;
  res.local_only = !M.convex;
  return res;
}

}  // namespace alsq
