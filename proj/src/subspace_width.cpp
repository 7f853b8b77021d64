#include "approxwidths/subspace_width.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>

#include "approxwidths/error.hpp"

namespace approxwidths {

const char* to_string(WidthMethod m) {
  switch (m) {
    case WidthMethod::exact_reduction: return "exact-reduction";
    case WidthMethod::spectral_upper: return "spectral-upper";
    case WidthMethod::search: return "search";
    case WidthMethod::sweep: return "sweep";
    case WidthMethod::sampled: return "sampled";
  }
  return "unknown";
}

namespace {

VectorXd squared_residuals(const MatrixXd& X, const MatrixXd& B) {
  if (B.cols() == 0) return X.colwise().squaredNorm().transpose();
  const MatrixXd res = X - B * (B.transpose() * X);
  return res.colwise().squaredNorm().transpose();
}

MatrixXd orthonormalize(const MatrixXd& A) {
  Eigen::HouseholderQR<MatrixXd> qr(A);
  MatrixXd Q = qr.householderQ() * MatrixXd::Identity(A.rows(), A.cols());
  return Q;
}

struct Candidate {
  double value = std::numeric_limits<double>::infinity();
  MatrixXd basis;
};

void offer(Candidate& best, const MatrixXd& X, const MatrixXd& B) {
  const double v = std::sqrt(squared_residuals(X, B).maxCoeff());
  if (v < best.value) {
    best.value = v;
    best.basis = B;
  }
}

// Top-n eigenvectors of the weighted second moment, and the tail eigenvalue sum.
struct DualEval {
  double tail = 0.0;
  MatrixXd top;
};

DualEval dual_eval(const MatrixXd& X, const VectorXd& w, Index n) {
  const Index d = X.rows();
  MatrixXd C = X * w.asDiagonal() * X.transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(C);
  DualEval out;
  const VectorXd& ev = es.eigenvalues();  // ascending
  for (Index i = 0; i < d - n; ++i) out.tail += std::max(0.0, ev(i));
  out.top = es.eigenvectors().rightCols(n);
  return out;
}

// Smoothed-max descent on the Grassmannian from a given start.
void descend(const MatrixXd& X, MatrixXd B, int iterations, double R2, Candidate& best) {
  static constexpr double kTaus[] = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 1e-6};
  const int per = std::max(1, iterations / static_cast<int>(std::size(kTaus)));
  const auto smoothed = [&](const MatrixXd& U, double tau, VectorXd* pi) {
    VectorXd r2 = squared_residuals(X, U);
    const double m = r2.maxCoeff();
    VectorXd e = ((r2.array() - m) / tau).exp().matrix();
    const double s = e.sum();
    if (pi) *pi = e / s;
    return m + tau * std::log(s);
  };
  for (double t : kTaus) {
    const double tau = t * R2;
    double step = 1.0 / R2;
    for (int it = 0; it < per; ++it) {
      VectorXd pi;
      const double f0 = smoothed(B, tau, &pi);
      MatrixXd G = -2.0 * (X * pi.asDiagonal() * X.transpose()) * B;
      G -= B * (B.transpose() * G);
      const double g2 = G.squaredNorm();
      if (g2 <= 1e-30 * R2 * R2) break;
      bool moved = false;
      for (int ls = 0; ls < 30; ++ls) {
        MatrixXd trial = orthonormalize(B - step * G);
        if (smoothed(trial, tau, nullptr) <= f0 - 1e-4 * step * g2) {
          B = std::move(trial);
          moved = true;
          step *= 2.0;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
      offer(best, X, B);
    }
  }
}

// Line direction on S^1 or S^2, or plane normal on S^2.
VectorXd direction(Index d, double theta, double phi) {
  VectorXd u(d);
  if (d == 2) {
    u << std::cos(theta), std::sin(theta);
  } else {
    u << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
  }
  return u;
}

double sweep_objective(const MatrixXd& X, const VectorXd& norms2, Index n, const VectorXd& u) {
  VectorXd proj = X.transpose() * u;
  if (n == 2 && X.rows() == 3) return proj.cwiseAbs().maxCoeff();
  return std::sqrt((norms2 - proj.cwiseAbs2()).cwiseMax(0.0).maxCoeff());
}

struct Cell {
  double lb;
  double t0, t1, p0, p1;
  bool operator<(const Cell& o) const { return lb > o.lb; }  // min-heap
};

}  // namespace

double max_residual(const MatrixXd& points, const MatrixXd& basis) {
  if (points.cols() == 0) return 0.0;
  return std::sqrt(squared_residuals(points, basis).maxCoeff());
}

SweepResult grassmann_sweep(const MatrixXd& X, Index n, double gap, Index max_cells) {
  const Index d = X.rows();
  detail::require((d == 2 && n == 1) || (d == 3 && (n == 1 || n == 2)),
                  "grassmann_sweep: supports lines in R^2, R^3 and planes in R^3");
  const VectorXd norms2 = X.colwise().squaredNorm().transpose();
  const double R = std::sqrt(norms2.maxCoeff());
  SweepResult out;
  out.upper = std::numeric_limits<double>::infinity();

  std::priority_queue<Cell> heap;
  const auto push = [&](double t0, double t1, double p0, double p1) {
    const double tc = 0.5 * (t0 + t1);
    const double pc = 0.5 * (p0 + p1);
    const VectorXd u = direction(d, tc, pc);
    const double g = sweep_objective(X, norms2, n, u);
    ++out.cells;
    if (g < out.upper) {
      out.upper = g;
      out.direction = u;
    }
    double radius;
    if (d == 2) {
      radius = 0.5 * (t1 - t0);
    } else {
      const double smax = (t0 <= 0.5 * std::numbers::pi && t1 >= 0.5 * std::numbers::pi)
                              ? 1.0
                              : std::max(std::sin(t0), std::sin(t1));
      radius = 0.5 * (t1 - t0) + smax * 0.5 * (p1 - p0);
    }
    heap.push(Cell{g - R * radius, t0, t1, p0, p1});
  };

  const double pi = std::numbers::pi;
  if (d == 2) {
    const int cells = 64;
    for (int i = 0; i < cells; ++i) push(pi * i / cells, pi * (i + 1) / cells, 0.0, 0.0);
  } else {
    const int nt = 16, np = 64;
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < np; ++j)
        push(0.5 * pi * i / nt, 0.5 * pi * (i + 1) / nt, 2.0 * pi * j / np,
             2.0 * pi * (j + 1) / np);
  }

  const double target = gap * std::max(R, 1e-300);
  while (!heap.empty()) {
    Cell c = heap.top();
    if (c.lb >= out.upper - target) {
      out.lower = std::max(0.0, c.lb);
      out.complete = true;
      return out;
    }
    if (out.cells + 4 > max_cells) break;
    heap.pop();
    const double tm = 0.5 * (c.t0 + c.t1);
    if (d == 2) {
      push(c.t0, tm, 0.0, 0.0);
      push(tm, c.t1, 0.0, 0.0);
    } else {
      const double pm = 0.5 * (c.p0 + c.p1);
      push(c.t0, tm, c.p0, pm);
      push(c.t0, tm, pm, c.p1);
      push(tm, c.t1, c.p0, pm);
      push(tm, c.t1, pm, c.p1);
    }
  }
  out.lower = heap.empty() ? out.upper : std::max(0.0, heap.top().lb);
  out.lower = std::min(out.lower, out.upper);
  return out;
}

SubspaceWidth kolmogorov_width(const MatrixXd& X, Index n, const WidthOptions& opts) {
  const Index d = X.rows();
  detail::require(n >= 0, "kolmogorov_width: n must be >= 0");
  detail::require(d >= 1, "kolmogorov_width: dimension must be >= 1");
  detail::require(X.allFinite(), "kolmogorov_width: points must be finite");

  SubspaceWidth out;
  out.n = n;
  out.method = WidthMethod::exact_reduction;
  const Index keep = std::min(n, d);
  out.basis = MatrixXd::Zero(d, keep);

  const double R = X.cols() == 0 ? 0.0 : std::sqrt(X.colwise().squaredNorm().maxCoeff());
  if (R == 0.0) {
    out.basis = MatrixXd::Identity(d, keep);
    return out;
  }
  if (n == 0) {
    out.lower = out.upper = R;
    return out;
  }

  Eigen::JacobiSVD<MatrixXd> svd(X, Eigen::ComputeFullU);
  const VectorXd& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-12 * sv(0)) ++rank;
  Candidate best;
  offer(best, X, svd.matrixU().leftCols(keep));
  if (n >= rank) {
    out.basis = best.basis;
    out.upper = best.value;
    out.lower = 0.0;
    return out;
  }

  const double R2 = R * R;
  // Dual ascent: exponentiated gradient over the simplex.
  const Index N = X.cols();
  VectorXd w = VectorXd::Constant(N, 1.0 / static_cast<double>(N));
  double lower2 = 0.0;
  VectorXd best_w = w;
  for (int t = 0; t < opts.dual_iterations; ++t) {
    DualEval ev = dual_eval(X, w, n);
    if (ev.tail > lower2) {
      lower2 = ev.tail;
      best_w = w;
    }
    VectorXd r2 = squared_residuals(X, ev.top);
    offer(best, X, ev.top);
    if (best.value * best.value - lower2 <= opts.value_tol * R2) break;
    const double eta = 4.0 / std::sqrt(static_cast<double>(t + 1));
    VectorXd logits = w.array().max(1e-300).log().matrix() + (eta / R2) * r2;
    logits.array() -= logits.maxCoeff();
    w = logits.array().exp().matrix();
    w /= w.sum();
  }
  out.dual_weights = best_w;

  // Primal multi-start descent.
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  for (int s = 0; s < opts.starts; ++s) {
    MatrixXd start;
    if (s == 0) {
      start = svd.matrixU().leftCols(n);
    } else if (s == 1) {
      start = best.basis;
    } else {
      MatrixXd G(d, n);
      for (Index i = 0; i < G.size(); ++i) G.data()[i] = gauss(rng);
      start = orthonormalize(G);
    }
    descend(X, start, opts.descent_iterations, R2, best);
  }

  double lower = std::sqrt(lower2);
  double upper = best.value;
  out.method = WidthMethod::search;

  if (opts.use_sweep && d <= 3 && n < d && ((d == 2 && n == 1) || d == 3)) {
    SweepResult sw = grassmann_sweep(X, n, opts.sweep_gap, opts.sweep_max_cells);
    out.sweep_used = true;
    lower = std::max(lower, sw.lower);
    if (sw.upper < upper) {
      upper = sw.upper;
      if (n == 2) {
        // plane with normal u: orthonormal complement
        Eigen::HouseholderQR<MatrixXd> qr(sw.direction);
        MatrixXd Q = qr.householderQ();
        best.basis = Q.rightCols(2);
      } else {
        best.basis = sw.direction;
      }
      best.value = max_residual(X, best.basis);
      upper = best.value;
    }
    if (sw.complete) out.method = WidthMethod::sweep;
  }

  if (lower > upper) {
    detail::ensure(lower - upper <= 1e-9 * R, "kolmogorov_width: bounds crossed");
    lower = upper;
  }
  out.lower = lower;
  out.upper = upper;
  out.basis = best.basis;
  return out;
}

}  // namespace approxwidths
