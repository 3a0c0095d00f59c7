#include "surfsig/young_zust.hpp"

#include <algorithm>
#include <cmath>

#include "surfsig/crossed_module.hpp"
#include "surfsig/errors.hpp"

namespace surfsig {

ScalarField2D::ScalarField2D(const SurfaceGrid& g, int channel)
    : grid_(std::make_shared<SurfaceGrid>(g.channel(channel))), dom_(g.domain()) {}

ScalarField2D::ScalarField2D(std::function<double(double, double)> f, Rect domain) : f_(std::move(f)), dom_(domain) {
  if (!f_) throw DomainError("empty field");
  if (!(domain.s2 > domain.s1) || !(domain.t2 > domain.t1)) throw DomainError("field domain is empty");
}

double ScalarField2D::operator()(double s, double t) const { return grid_ ? grid_->eval(s, t)[0] : f_(s, t); }

static std::vector<double> breaks(double a, double b, double x0, double h, int n) {
  std::vector<double> out;
  const int k0 = std::max(1, static_cast<int>(std::floor((a - x0) / h)) + 1);
  for (int k = k0; k < n; ++k) {
    const double u = x0 + k * h;
    if (u <= a + 1e-13 * h) continue;
    if (u >= b - 1e-13 * h) break;
    out.push_back(u);
  }
  return out;
}

std::vector<double> ScalarField2D::s_breaks(double a, double b) const {
  if (!grid_) return {};
  return breaks(a, b, dom_.s1, grid_->ds(), grid_->ns());
}

std::vector<double> ScalarField2D::t_breaks(double a, double b) const {
  if (!grid_) return {};
  return breaks(a, b, dom_.t1, grid_->dt(), grid_->nt());
}

static void check_inside(const Rect& dom, const Rect& r) {
  const double es = 1e-12 * (dom.s2 - dom.s1), et = 1e-12 * (dom.t2 - dom.t1);
  if (!(r.s1 < r.s2 && r.t1 < r.t2)) throw DomainError("rectangle is empty");
  if (r.s1 < dom.s1 - es || r.s2 > dom.s2 + es || r.t1 < dom.t1 - et || r.t2 > dom.t2 + et)
    throw DomainError("rectangle leaves the field domain");
}

double increment2d(const ScalarField2D& f, const Rect& r) {
  if (f.grid()) {
    int i0, i1, j0, j1;
    f.grid()->lattice_rect(r, i0, i1, j0, j1);
    const SurfaceGrid& g = *f.grid();
    return g.at(i0, j0)[0] - g.at(i0, j1)[0] - g.at(i1, j0)[0] + g.at(i1, j1)[0];
  }
  check_inside(f.domain(), r);
  return f(r.s1, r.t1) - f(r.s1, r.t2) - f(r.s2, r.t1) + f(r.s2, r.t2);
}

Eigen::VectorXd increment2d(const SurfaceGrid& X, const Rect& r) {
  int i0, i1, j0, j1;
  X.lattice_rect(r, i0, i1, j0, j1);
  return X.at(i0, j0) - X.at(i0, j1) - X.at(i1, j0) + X.at(i1, j1);
}

static Eigen::VectorXd tree_sum(const std::vector<Eigen::VectorXd>& v, size_t lo, size_t hi) {
  if (hi - lo == 1) return v[lo];
  const size_t mid = lo + (hi - lo) / 2;
  return tree_sum(v, lo, mid) + tree_sum(v, mid, hi);
}

static double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

static void finish_trace(DyadicTrace& tr, int romberg) {
  const int depth = static_cast<int>(tr.raw.size()) - 1;
  const int lo = std::max(0, depth - std::max(romberg, 0));
  std::vector<Eigen::VectorXd> prev, cur;
  for (int m = lo; m <= depth; ++m) {
    cur.assign(1, tr.raw[m]);
    for (int k = 1; k <= m - lo; ++k) {
      const double f = std::ldexp(1.0, k);
      cur.push_back((f * cur[k - 1] - prev[k - 1]) / (f - 1.0));
    }
    prev = cur;
  }
  tr.value = cur.back();

  std::vector<double> xs, ys;
  for (size_t m = 0; m < tr.gaps.size(); ++m)
    if (tr.gaps[m] > 0.0) {
      xs.push_back(static_cast<double>(m + 1));
      ys.push_back(std::log2(tr.gaps[m]));
    }
  const size_t k = std::min<size_t>(4, xs.size());
  tr.slope = 0.0;
  if (k >= 2) {
    double mx = 0, my = 0;
    for (size_t i = xs.size() - k; i < xs.size(); ++i) mx += xs[i] / k, my += ys[i] / k;
    double sxy = 0, sxx = 0;
    for (size_t i = xs.size() - k; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    tr.slope = sxy / sxx;
  }
  const double scale = std::max(1.0, max_abs(tr.value));
  tr.cauchy = tr.gaps.empty() || tr.gaps.back() <= 1e-12 * scale || (k >= 2 && tr.slope < -0.25);
}

DyadicTrace dyadic_sum(const Rect& r, const CellTerm& term, int depth, int romberg) {
  if (depth < 0 || depth > 12) throw DomainError("dyadic depth must lie in [0, 12]");
  if (!(r.s2 > r.s1 && r.t2 > r.t1)) throw DomainError("rectangle is empty");
  DyadicTrace tr;
  std::vector<Eigen::VectorXd> terms;
  for (int m = 0; m <= depth; ++m) {
    const int n = 1 << m;
    terms.clear();
    terms.reserve(static_cast<size_t>(n) * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) terms.push_back(term(dyadic_rect(r, m, i, j)));
    tr.raw.push_back(tree_sum(terms, 0, terms.size()));
    if (m > 0) tr.gaps.push_back(max_abs(tr.raw[m] - tr.raw[m - 1]));
  }
  finish_trace(tr, romberg);
  return tr;
}

static IntegralTrace scalar_trace(const DyadicTrace& t) {
  IntegralTrace s;
  s.value = t.value[0];
  for (auto& v : t.raw) s.raw.push_back(v[0]);
  s.gaps = t.gaps;
  s.slope = t.slope;
  s.cauchy = t.cauchy;
  return s;
}

static std::vector<double> merged(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// boundary vertices of a cell, counterclockwise from the lower-left corner
static std::vector<std::pair<double, double>> loop_vertices(const Rect& c, const std::vector<double>& sb,
                                                            const std::vector<double>& tb) {
  std::vector<std::pair<double, double>> p;
  p.emplace_back(c.s1, c.t1);
  for (double s : sb) p.emplace_back(s, c.t1);
  p.emplace_back(c.s2, c.t1);
  for (double t : tb) p.emplace_back(c.s2, t);
  p.emplace_back(c.s2, c.t2);
  for (auto it = sb.rbegin(); it != sb.rend(); ++it) p.emplace_back(*it, c.t2);
  p.emplace_back(c.s1, c.t2);
  for (auto it = tb.rbegin(); it != tb.rend(); ++it) p.emplace_back(c.s1, *it);
  return p;
}

double loop_area(const ScalarField2D& g1, const ScalarField2D& g2, const Rect& c) {
  auto sb = merged(g1.s_breaks(c.s1, c.s2), g2.s_breaks(c.s1, c.s2));
  auto tb = merged(g1.t_breaks(c.t1, c.t2), g2.t_breaks(c.t1, c.t2));
  auto p = loop_vertices(c, sb, tb);
  const double x0 = g1(c.s1, c.t1), y0 = g2(c.s1, c.t1);
  std::vector<double> x, y;
  for (auto& [s, t] : p) {
    x.push_back(g1(s, t) - x0);
    y.push_back(g2(s, t) - y0);
  }
  double a = 0.0;
  for (size_t k = 0; k < x.size(); ++k) {
    const size_t l = (k + 1) % x.size();
    a += x[k] * y[l] - x[l] * y[k];
  }
  return 0.5 * a;
}

IntegralTrace zust_integral(const ScalarField2D& f, const ScalarField2D& g1, const ScalarField2D& g2, const Rect& r,
                            int depth, int romberg) {
  check_inside(f.domain(), r);
  check_inside(g1.domain(), r);
  check_inside(g2.domain(), r);
  CellTerm term = [&](const Rect& c) {
    Eigen::VectorXd v(1);
    v[0] = f(c.s1, c.t1) * loop_area(g1, g2, c);
    return v;
  };
  return scalar_trace(dyadic_sum(r, term, depth, romberg));
}

IntegralTrace young_increment_integral(const ScalarField2D& f, const ScalarField2D& g, const Rect& r, int depth,
                                       int romberg) {
  check_inside(f.domain(), r);
  check_inside(g.domain(), r);
  CellTerm term = [&](const Rect& c) {
    Eigen::VectorXd v(1);
    v[0] = f(c.s1, c.t1) * (g(c.s1, c.t1) - g(c.s1, c.t2) - g(c.s2, c.t1) + g(c.s2, c.t2));
    return v;
  };
  return scalar_trace(dyadic_sum(r, term, depth, romberg));
}

Eigen::VectorXd cell_area(const SurfaceGrid& X, const Rect& c) {
  const int d = X.dim();
  if (d < 2) throw DomainError("areas need d >= 2");
  const Rect& D = X.domain();
  auto p = loop_vertices(c, breaks(c.s1, c.s2, D.s1, X.ds(), X.ns()), breaks(c.t1, c.t2, D.t1, X.dt(), X.nt()));
  const Eigen::VectorXd x0 = X.eval(c.s1, c.t1);
  std::vector<Eigen::VectorXd> x;
  x.reserve(p.size());
  for (auto& [s, t] : p) x.push_back(X.eval(s, t) - x0);
  Eigen::VectorXd A = Eigen::VectorXd::Zero(d * (d - 1) / 2);
  for (size_t k = 0; k < x.size(); ++k) {
    const Eigen::VectorXd &u = x[k], &v = x[(k + 1) % x.size()];
    int q = 0;
    for (int a = 0; a < d; ++a)
      for (int b = a + 1; b < d; ++b) A[q++] += u[a] * v[b] - v[a] * u[b];
  }
  return 0.5 * A;
}

SurfaceGrid area_process(const SurfaceGrid& X) {
  const int d = X.dim();
  if (d < 2) throw DomainError("area process needs d >= 2");
  SurfaceGrid A(d * (d - 1) / 2, X.ns(), X.nt(), X.domain());
  for (int j = 1; j <= X.nt(); ++j)
    for (int i = 1; i <= X.ns(); ++i)
      A.at(i, j) = A.at(i - 1, j) + A.at(i, j - 1) - A.at(i - 1, j - 1) +
                   cell_area(X, {X.s_at(i - 1), X.s_at(i), X.t_at(j - 1), X.t_at(j)});
  return A;
}

DGF zust_lift_level2(std::shared_ptr<const SurfaceGrid> X, const HolderParams& hp) {
  if (!X || X->dim() < 2) throw DomainError("lift needs a grid with d >= 2");
  DGF f = grid_paths(X, 2, hp);
  const int d = X->dim();
  f.surface = [X, d](const Rect& r) {
    check_inside(X->domain(), r);
    Tensor1Hat E = Tensor1Hat::one(d, 2);
    E.body.level(2) = cell_area(*X, r);
    return E;
  };
  return f;
}

static Eigen::VectorXd act_level1(int d, const Eigen::VectorXd& x, const Eigen::VectorXd& w) {
  return bar::left_mul(d, x, 1, w, 2) - bar::right_mul(d, w, 2, x, 1);
}

Eigen::VectorXd young_level3(const SurfaceGrid& X, const Rect& r, int depth) {
  check_inside(X.domain(), r);
  if (X.dim() < 2) throw DomainError("lift needs d >= 2");
  const int d = X.dim();
  const Rect& D = X.domain();
  const Eigen::VectorXd base = X.eval(r.s1, r.t1);
  std::vector<double> sc{r.s1}, tc{r.t1};
  for (double s : breaks(r.s1, r.s2, D.s1, X.ds(), X.ns())) sc.push_back(s);
  for (double t : breaks(r.t1, r.t2, D.t1, X.dt(), X.nt())) tc.push_back(t);
  sc.push_back(r.s2);
  tc.push_back(r.t2);
  CellTerm term = [&](const Rect& c) { return act_level1(d, X.eval(c.s1, c.t1) - base, cell_area(X, c)); };
  std::vector<Eigen::VectorXd> pieces;
  for (size_t j = 0; j + 1 < tc.size(); ++j)
    for (size_t i = 0; i + 1 < sc.size(); ++i)
      pieces.push_back(dyadic_sum({sc[i], sc[i + 1], tc[j], tc[j + 1]}, term, depth, depth).value);
  return tree_sum(pieces, 0, pieces.size());
}

DyadicTrace young_level3_trace(const SurfaceGrid& X, const Rect& r, int depth) {
  check_inside(X.domain(), r);
  const int d = X.dim();
  const Eigen::VectorXd base = X.eval(r.s1, r.t1);
  CellTerm term = [&](const Rect& c) { return act_level1(d, X.eval(c.s1, c.t1) - base, cell_area(X, c)); };
  return dyadic_sum(r, term, depth, 0);
}

static double rect_holder_constant(const SurfaceGrid& X, double rho) {
  double best = 0.0;
  for (int k = 1; k <= std::min(X.ns(), X.nt()); k *= 2)
    for (int j = 0; j + k <= X.nt(); j += k)
      for (int i = 0; i + k <= X.ns(); i += k) {
        const Eigen::VectorXd b = X.at(i, j) - X.at(i, j + k) - X.at(i + k, j) + X.at(i + k, j + k);
        best = std::max(best, b.norm() / std::pow(k * X.ds(), rho) / std::pow(k * X.dt(), rho));
      }
  return best;
}

DGF young_lift_level3(std::shared_ptr<const SurfaceGrid> X, const HolderParams& hp, int depth, YoungReport* report) {
  if (!X || X->dim() < 2) throw DomainError("lift needs a grid with d >= 2");
  if (depth < 0 || depth > 8) throw DomainError("young lift depth must lie in [0, 8]");
  DGF f = grid_paths(X, 3, hp);
  if (report) {
    report->rect_holder = rect_holder_constant(*X, hp.rho);
    report->young_regime = hp.rho > 0.5;
  }
  const int d = X->dim();
  f.surface = [X, d, depth](const Rect& r) {
    Tensor1Hat E = Tensor1Hat::one(d, 3);
    E.body.level(2) = cell_area(*X, r);
    std::vector<Eigen::VectorXd> bars(4);
    bars[3] = young_level3(*X, r, depth);
    E.body.level(3) = Tensor1::from_bar(d, 3, bars).level(3);
    return E;
  };
  return f;
}

}  // namespace surfsig
