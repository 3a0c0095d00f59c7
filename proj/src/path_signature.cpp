#include "surfsig/path_signature.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "surfsig/holder.hpp"

namespace surfsig {

PiecewiseLinearPath::PiecewiseLinearPath(std::vector<double> u, std::vector<Eigen::VectorXd> x)
    : u_(std::move(u)), x_(std::move(x)) {
  if (u_.size() < 2) throw DomainError("path needs at least two samples");
  if (u_.size() != x_.size()) throw ShapeError("parameter and point counts differ");
  for (size_t i = 1; i < u_.size(); ++i) {
    if (!(u_[i] > u_[i - 1])) throw DomainError("path parameters must be strictly increasing");
    if (x_[i].size() != x_[0].size()) throw ShapeError("path points have mixed dimensions");
  }
}

static size_t segment_of(const std::vector<double>& u, double s) {
  auto it = std::upper_bound(u.begin(), u.end(), s);
  size_t k = it == u.begin() ? 0 : static_cast<size_t>(it - u.begin()) - 1;
  return std::min(k, u.size() - 2);
}

Eigen::VectorXd PiecewiseLinearPath::at(double s) const {
  if (s <= u_.front()) return x_.front();
  if (s >= u_.back()) return x_.back();
  const size_t k = segment_of(u_, s);
  const double w = (s - u_[k]) / (u_[k + 1] - u_[k]);
  return (1.0 - w) * x_[k] + w * x_[k + 1];
}

PiecewiseLinearPath PiecewiseLinearPath::restrict(double a, double b) const {
  if (!(a < b)) throw DomainError("restriction needs a < b");
  std::vector<double> u{a};
  std::vector<Eigen::VectorXd> x{at(a)};
  for (size_t i = 0; i < u_.size(); ++i)
    if (u_[i] > a && u_[i] < b) {
      u.push_back(u_[i]);
      x.push_back(x_[i]);
    }
  u.push_back(b);
  x.push_back(at(b));
  return {std::move(u), std::move(x)};
}

PiecewiseLinearPath PiecewiseLinearPath::then(const PiecewiseLinearPath& o) const {
  if (o.dim() != dim()) throw ShapeError("concatenating paths of different dimension");
  std::vector<double> u = u_;
  std::vector<Eigen::VectorXd> x = x_;
  const double shift = u_.back() - o.u_.front();
  const Eigen::VectorXd off = x_.back() - o.x_.front();
  for (size_t i = 1; i < o.u_.size(); ++i) {
    u.push_back(o.u_[i] + shift);
    x.push_back(o.x_[i] + off);
  }
  return {std::move(u), std::move(x)};
}

GradedTensor0 segment_signature(const Eigen::VectorXd& delta, int N) { return exp_letter_vector(delta, N); }

GradedTensor0 pl_signature(const PiecewiseLinearPath& p, int N) { return pl_signature(p, p.start(), p.end(), N); }

GradedTensor0 pl_signature(const PiecewiseLinearPath& p, double a, double b, int N) {
  const int d = p.dim();
  GradedTensor0 r = GradedTensor0::unit(d, N);
  if (!(a < b)) return r;
  const auto& u = p.params();
  const auto& x = p.points();
  Eigen::VectorXd prev = p.at(a);
  for (size_t i = 0; i < u.size(); ++i) {
    if (u[i] <= a || u[i] >= b) continue;
    r = r * segment_signature(x[i] - prev, N);
    prev = x[i];
  }
  return r * segment_signature(p.at(b) - prev, N);
}

PiecewiseLinearPath tail_path(const SurfaceGrid& g, double s, double t) {
  const Rect& D = g.domain();
  const double eps = 1e-12 * std::max(1.0, std::abs(D.s2 - D.s1) + std::abs(D.t2 - D.t1));
  if (s < D.s1 - eps || s > D.s2 + eps || t < D.t1 - eps || t > D.t2 + eps)
    throw DomainError("tail path endpoint outside the grid domain");
  s = std::clamp(s, D.s1, D.s2);
  t = std::clamp(t, D.t1, D.t2);
  std::vector<double> u{0.0};
  std::vector<Eigen::VectorXd> x{g.at(0, 0)};
  for (int j = 1; j <= g.nt() && g.t_at(j) < t; ++j) {
    u.push_back(g.t_at(j) - D.t1);
    x.push_back(g.at(0, j));
  }
  if (t > u.back() + D.t1) {
    u.push_back(t - D.t1);
    x.push_back(g.eval(D.s1, t));
  }
  const double u0 = t - D.t1;
  for (int i = 1; i <= g.ns() && g.s_at(i) < s; ++i) {
    u.push_back(u0 + g.s_at(i) - D.s1);
    x.push_back(g.eval(g.s_at(i), t));
  }
  if (s > D.s1 && u0 + s - D.s1 > u.back()) {
    u.push_back(u0 + s - D.s1);
    x.push_back(g.eval(s, t));
  }
  if (u.size() == 1) {
    u.push_back(1.0);
    x.push_back(x.front());
  }
  return {std::move(u), std::move(x)};
}

double holder_constant(const PiecewiseLinearPath& p, double rho) {
  const auto& u = p.params();
  const auto& x = p.points();
  double c = 0.0;
  for (size_t i = 0; i < u.size(); ++i)
    for (size_t j = i + 1; j < u.size(); ++j) c = std::max(c, (x[j] - x[i]).norm() / std::pow(u[j] - u[i], rho));
  return c;
}

PathFunctional functional_from_path(const PiecewiseLinearPath& p, int N, double rho, double C_omega, double beta) {
  PathFunctional f;
  f.d = p.dim();
  f.N = N;
  f.a = p.start();
  f.b = p.end();
  f.rho = rho;
  f.C_omega = C_omega > 0.0 ? C_omega : std::max(holder_constant(p, rho), 1e-300);
  f.beta = beta > 0.0 ? beta : beta_auto(rho);
  f.eval = [p, N](double s1, double s2) { return pl_signature(p, s1, s2, N); };
  return f;
}

std::vector<double> path_regularity(const PathFunctional& f, int depth) {
  std::vector<double> worst(f.N + 1, 0.0);
  for (int m = 0; m <= depth; ++m) {
    const long K = 1L << m;
    const double h = (f.b - f.a) / K;
    for (long k = 0; k < K; ++k) {
      const double s1 = f.a + k * h, s2 = s1 + h;
      const double w = f.omega(s1, s2);
      GradedTensor0 x = f.eval(s1, s2);
      for (int n = 1; n <= f.N; ++n) {
        const double bound = std::pow(w, n * f.rho) / (f.beta * frac_factorial(n * f.rho));
        const double v = level_norm(x, n);
        if (bound > 0.0) worst[n] = std::max(worst[n], v / bound);
        else if (v > 0.0) worst[n] = INFINITY;
      }
    }
  }
  return worst;
}

double multiplicativity_residual(const PathFunctional& f, int samples, unsigned long seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> U(f.a, f.b);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    double s[3] = {U(gen), U(gen), U(gen)};
    std::sort(s, s + 3);
    GradedTensor0 whole = f.eval(s[0], s[2]);
    worst = std::max(worst, max_level_diff(f.eval(s[0], s[1]) * f.eval(s[1], s[2]), whole));
  }
  return worst;
}

static double new_level_gap(const GradedTensor0& a, const GradedTensor0& b, int from) {
  double m = 0.0;
  for (int n = from; n <= a.cap(); ++n) m = std::max(m, (a.level(n) - b.level(n)).norm());
  return m;
}

static double last_gap(const ExtensionTrace& t) {
  if (!t.extrapolated_gaps.empty()) return t.extrapolated_gaps.back();
  return t.gaps.empty() ? 0.0 : t.gaps.back();
}

GradedTensor0 lyons_value(const PathFunctional& f, int target, double s1, double s2, const ExtensionOptions& opt,
                          ExtensionTrace* trace) {
  if (target < f.N) throw DomainError("extension target below the current level");
  if (opt.base < 2) throw DomainError("refinement base must be at least 2");
  GradedTensor0 G = f.eval(s1, s2).with_cap(target);
  ExtensionTrace tr;
  if (target == f.N || s1 == s2) {
    tr.converged = true;
    if (trace) *trace = tr;
    return G;
  }
  const double q = std::pow(opt.base, (f.N + 1) * f.rho - 1.0);
  GradedTensor0 R = G, raw_prev = G;
  long K = 1;
  for (int m = 1; m <= opt.m_max; ++m) {
    K *= opt.base;
    const double h = (s2 - s1) / K;
    GradedTensor0 P = GradedTensor0::unit(f.d, target);
    for (long k = 0; k < K; ++k) {
      const double a = s1 + k * h, b = k + 1 == K ? s2 : s1 + (k + 1) * h;
      P = P * f.eval(a, b).with_cap(target);
    }
    const double gap = new_level_gap(P, raw_prev, f.N + 1);
    tr.gaps.push_back(gap);
    tr.depth = m;
    double used = gap;
    if (opt.extrapolate && m >= 2) {
      GradedTensor0 Rn = (1.0 / (q - 1.0)) * (q * P - raw_prev);
      used = new_level_gap(Rn, R, f.N + 1);
      tr.extrapolated_gaps.push_back(used);
      R = std::move(Rn);
    } else {
      R = P;
    }
    raw_prev = std::move(P);
    if (m >= (opt.extrapolate ? 3 : 1) && used < opt.tol) {
      tr.converged = true;
      break;
    }
  }
  G = std::move(R);
  if (trace) *trace = tr;
  if (!tr.converged && opt.throw_on_fail)
    throw ConvergenceError("path extension did not converge, last gap " + std::to_string(last_gap(tr)),
                           last_gap(tr));
  return G;
}

PathFunctional lyons_extend(const PathFunctional& f, int target, const ExtensionOptions& opt) {
  PathFunctional g = f;
  g.N = target;
  g.eval = [f, target, opt](double s1, double s2) { return lyons_value(f, target, s1, s2, opt); };
  return g;
}

}  // namespace surfsig
