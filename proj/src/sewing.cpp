#include "surfsig/sewing.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "surfsig/errors.hpp"
#include "surfsig/free_lie.hpp"
#include "surfsig/young_zust.hpp"

namespace surfsig {

namespace {

template <class F>
void parallel_for(size_t n, int jobs, F fn) {
  const size_t nt = std::min<size_t>(std::max(jobs, 1), n);
  if (nt <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex mu;
  for (size_t w = 0; w < nt; ++w)
    pool.emplace_back([&, w] {
      try {
        for (size_t i = w; i < n; i += nt) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(mu);
        if (!err) err = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

double max_abs(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

Tensor1Hat raise_cap(const Tensor1Hat& E, int N) { return {E.unit, E.body.with_cap(N)}; }

// path functional of one horizontal (or vertical) line of f
PathFunctional line_functional(const DGF& f, bool horizontal, double fixed) {
  PathFunctional p;
  p.d = f.d;
  p.N = f.N;
  p.rho = f.hp.rho;
  p.beta = f.hp.beta_value();
  p.C_omega = f.hp.C_omega;
  if (horizontal) {
    p.a = f.domain.s1;
    p.b = f.domain.s2;
    auto h = f.horizontal;
    p.eval = [h, fixed](double a, double b) { return h(a, b, fixed); };
  } else {
    p.a = f.domain.t1;
    p.b = f.domain.t2;
    auto v = f.vertical;
    p.eval = [v, fixed](double a, double b) { return v(fixed, a, b); };
  }
  return p;
}

Square compose_block(const Square& LL, const Square& LR, const Square& UL, const Square& UR, bool v_first) {
  const double tol = 1e-6;
  if (v_first) return compose_h(compose_v(LL, UL, tol), compose_v(LR, UR, tol), tol);
  return compose_v(compose_h(LL, LR, tol), compose_h(UL, UR, tol), tol);
}

// squares of the 2^m x 2^m subdivision of r composed up to the top; table[k]
// receives the level-n values of the depth-k nodes when requested
Square pyramid(const DGF& f, const Rect& r, int m, bool v_first, int jobs,
               std::vector<std::vector<Eigen::VectorXd>>* table, int n) {
  if (m < 0 || m > 10) throw DomainError("grid multiplication depth must lie in [0, 10]");
  int w = 1 << m;
  std::vector<Square> cur(static_cast<size_t>(w) * w);
  parallel_for(cur.size(), jobs, [&](size_t idx) {
    const int i = static_cast<int>(idx % w), j = static_cast<int>(idx / w);
    cur[idx] = f.square(dyadic_rect(r, m, i, j));
  });
  if (table) {
    table->assign(m + 1, {});
    (*table)[m].resize(cur.size());
    for (size_t k = 0; k < cur.size(); ++k) (*table)[m][k] = cur[k].E.body.level(n);
  }
  for (int k = m - 1; k >= 0; --k) {
    const int pw = 1 << k;
    std::vector<Square> next(static_cast<size_t>(pw) * pw);
    parallel_for(next.size(), jobs, [&](size_t idx) {
      const int i = static_cast<int>(idx % pw), j = static_cast<int>(idx / pw);
      auto at = [&](int a, int b) -> const Square& { return cur[static_cast<size_t>(b) * w + a]; };
      next[idx] = compose_block(at(2 * i, 2 * j), at(2 * i + 1, 2 * j), at(2 * i, 2 * j + 1),
                                at(2 * i + 1, 2 * j + 1), v_first);
    });
    cur = std::move(next);
    w = pw;
    if (table) {
      (*table)[k].resize(cur.size());
      for (size_t q = 0; q < cur.size(); ++q) (*table)[k][q] = cur[q].E.body.level(n);
    }
  }
  return cur[0];
}

double theoretical_ratio(const HolderParams& hp, int new_level) {
  return std::pow(2.0, 2.0 * (1.0 - new_level * hp.sigma()));
}

// coarse-to-fine sequence eliminated with ratios r, r^2, ...
Eigen::VectorXd romberg(std::vector<Eigen::VectorXd> seq, double r) {
  for (size_t i = 1; i < seq.size(); ++i) {
    const double ri = std::pow(r, static_cast<double>(i));
    for (size_t j = seq.size() - 1; j >= i; --j) seq[j] = (seq[j] - ri * seq[j - 1]) / (1.0 - ri);
  }
  return seq.back();
}

struct Memo {
  double ratio = 0.0;
  int steps = 0;
  // tables of the last steps + 1 depths, oldest first
  std::vector<std::vector<std::vector<Eigen::VectorXd>>> tables;

  int depth() const { return tables.empty() ? -1 : static_cast<int>(tables.back().size()) - 1; }

  bool lookup(const Rect& dom, const Rect& r, Eigen::VectorXd& out) const {
    int i, j;
    // nodes finer than depth() - steps lack a full elimination
    for (int k = 0; k <= depth() - steps; ++k) {
      if (!dyadic_index(dom, r, k, i, j)) continue;
      const size_t idx = static_cast<size_t>(j) * (1u << k) + i;
      std::vector<Eigen::VectorXd> seq;
      for (const auto& t : tables) seq.push_back(t[k][idx]);
      out = romberg(std::move(seq), ratio);
      return true;
    }
    return false;
  }
};

void fit_slope(LevelTrace& tr) {
  std::vector<double> xs, ys;
  for (size_t k = 0; k < tr.gaps.size(); ++k)
    if (tr.gaps[k] > 0.0) {
      xs.push_back(tr.depths[k + 1]);
      ys.push_back(std::log2(tr.gaps[k]));
    }
  tr.slope = 0.0;
  if (xs.size() < 2) return;
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  tr.slope = sxy / sxx;
}

}  // namespace

DGF pathwise_extend(const DGF& f, Candidate c, const ExtensionOptions& path_opt) {
  if (f.d < 2 || f.N < 2) throw DomainError("extension needs d >= 2 and a level-2 functional");
  if (!f.horizontal || !f.vertical || !f.surface) throw DomainError("functional is incomplete");
  const int n1 = f.N + 1;
  DGF g = f;
  g.N = n1;
  if (f.grid) {
    auto grid = f.grid;
    g.horizontal = [grid, n1](double s1, double s2, double t) { return horizontal_line_signature(*grid, s1, s2, t, n1); };
    g.vertical = [grid, n1](double s, double t1, double t2) { return vertical_line_signature(*grid, s, t1, t2, n1); };
  } else {
    g.horizontal = [f, n1, path_opt](double s1, double s2, double t) {
      return lyons_value(line_functional(f, true, t), n1, s1, s2, path_opt);
    };
    g.vertical = [f, n1, path_opt](double s, double t1, double t2) {
      return lyons_value(line_functional(f, false, s), n1, t1, t2, path_opt);
    };
  }
  auto state = std::make_shared<std::atomic<bool>>(false);
  g.section_fallback = state;
  const int d = f.d;
  auto low = f.surface;
  auto h = g.horizontal;
  auto v = g.vertical;
  g.surface = [low, h, v, c, d, n1, state](const Rect& r) {
    Tensor1Hat E = raise_cap(low(r), n1);
    if (c == Candidate::zero) return E;
    const GradedTensor0 loop = h(r.s1, r.s2, r.t1) * v(r.s2, r.t1, r.t2) * t0_inverse(h(r.s1, r.s2, r.t2)) *
                               t0_inverse(v(r.s1, r.t1, r.t2));
    const Eigen::VectorXd& b = loop.level(n1);
    if (b.norm() == 0.0) return E;
    const CommutantBasis& basis = CommutantBasis::get(d, n1);
    try {
      Decomposition dc = decompose_in_commutant(b, n1, basis, 1e-6);
      E.body.level(n1) = basis.section[n1] * dc.coeffs;
    } catch (const DomainError&) {
      E.body.level(n1) = min_norm_preimage(b, d, n1);
      state->store(true);
    }
    return E;
  };
  return g;
}

Square grid_multiply(const DGF& f, const Rect& r, int m, bool v_first) {
  return pyramid(f, r, m, v_first, 1, nullptr, f.N);
}

DGF extend_one_level(const DGF& f, const SewingOptions& opt, LevelTrace* trace) {
  if (opt.m_min < 0 || opt.m_max < opt.m_min || opt.m_max > 9) throw DomainError("need 0 <= m_min <= m_max <= 9");
  if (opt.extrapolation < 0 || opt.extrapolation > 6) throw DomainError("extrapolation steps must lie in [0, 6]");
  if (opt.local_depth < 1 || opt.local_depth > 6) throw DomainError("local depth must lie in [1, 6]");
  validate(f.hp);
  const int n1 = f.N + 1;
  DGF cand = pathwise_extend(f, opt.candidate, opt.path);
  LevelTrace tr;
  tr.level = n1;
  tr.ratio = theoretical_ratio(f.hp, n1);
  tr.regime_warning = !(tr.ratio < 1.0);
  const int steps = tr.regime_warning ? 0 : opt.extrapolation;

  auto memo = std::make_shared<Memo>();
  memo->ratio = tr.ratio;
  memo->steps = steps;
  std::vector<Eigen::VectorXd> seq;
  Eigen::VectorXd G_prev, R_prev;
  for (int m = opt.m_min; m <= opt.m_max; ++m) {
    std::vector<std::vector<Eigen::VectorXd>> table;
    pyramid(cand, f.domain, m, false, opt.jobs, &table, n1);
    const Eigen::VectorXd G = table[0][0];
    tr.depths.push_back(m);
    memo->tables.push_back(std::move(table));
    if (static_cast<int>(memo->tables.size()) > steps + 1) memo->tables.erase(memo->tables.begin());
    seq.push_back(G);
    if (static_cast<int>(seq.size()) > steps + 1) seq.erase(seq.begin());
    tr.depth = m;
    if (m == opt.m_min) {
      G_prev = G;
      continue;
    }
    tr.gaps.push_back(max_abs(G - G_prev));
    G_prev = G;
    double used = tr.gaps.back();
    bool have = true;
    if (steps > 0) {
      // a gap is only trusted once the full elimination is available
      const Eigen::VectorXd R = romberg(seq, tr.ratio);
      have = static_cast<int>(seq.size()) == steps + 1 && R_prev.size() > 0;
      if (R_prev.size() > 0) tr.extrapolated_gaps.push_back(max_abs(R - R_prev));
      if (have) used = tr.extrapolated_gaps.back();
      R_prev = static_cast<int>(seq.size()) == steps + 1 ? R : Eigen::VectorXd();
    }
    if (have && used < opt.tol) {
      tr.converged = true;
      break;
    }
  }
  fit_slope(tr);

  tr.section_fallback = cand.section_fallback && cand.section_fallback->load();
  if (!tr.converged && opt.throw_on_fail) {
    const double gap = tr.extrapolated_gaps.empty() ? (tr.gaps.empty() ? NAN : tr.gaps.back())
                                                    : tr.extrapolated_gaps.back();
    std::string msg = "surface extension to level " + std::to_string(n1) + " did not converge; gaps";
    for (double gp : tr.gaps) msg += " " + std::to_string(gp);
    if (!tr.extrapolated_gaps.empty()) {
      msg += "; extrapolated";
      for (double gp : tr.extrapolated_gaps) msg += " " + std::to_string(gp);
    }
    throw ConvergenceError(msg, gap);
  }

  DGF out = cand;
  const Rect dom = f.domain;
  const int local = opt.local_depth;
  auto low = f.surface;
  out.surface = [low, cand, memo, dom, n1, local, steps](const Rect& r) {
    Tensor1Hat E = raise_cap(low(r), n1);
    Eigen::VectorXd v;
    if (!memo->lookup(dom, r, v)) {
      // refine until the leaves are no larger than the trusted table cells
      const double cells = std::ldexp(1.0, std::max(0, memo->depth() - steps));
      const double rel = std::max((r.s2 - r.s1) / (dom.s2 - dom.s1), (r.t2 - r.t1) / (dom.t2 - dom.t1)) * cells;
      const int top = std::min(local + 3, local + std::max(0, static_cast<int>(std::ceil(std::log2(rel) - 1e-9))));
      std::vector<Eigen::VectorXd> loc;
      for (int m = std::max(0, top - steps); m <= top; ++m) loc.push_back(grid_multiply(cand, r, m).E.body.level(n1));
      v = romberg(std::move(loc), memo->ratio);
    }
    E.body.level(n1) = v;
    return E;
  };
  if (trace) *trace = tr;
  return out;
}

DGF extend_to_level(const DGF& f, int target, const SewingOptions& opt, std::vector<LevelTrace>* traces) {
  if (target < f.N) throw DomainError("target level below the current level");
  DGF g = f;
  while (g.N < target) {
    LevelTrace tr;
    g = extend_one_level(g, opt, &tr);
    if (traces) traces->push_back(tr);
  }
  return g;
}

Square signature_of_rough_surface(const DGF& f, int target, const SewingOptions& opt,
                                  std::vector<LevelTrace>* traces) {
  return extend_to_level(f, target, opt, traces).square(f.domain);
}

void write_trace_csv(std::ostream& os, const std::vector<LevelTrace>& traces) {
  os << "level,depth,gap\n";
  for (const LevelTrace& t : traces)
    for (size_t k = 0; k < t.gaps.size(); ++k) os << t.level << ',' << t.depths[k + 1] << ',' << t.gaps[k] << '\n';
}

namespace {

// dyadic intervals of [a, b] up to depth
std::vector<std::pair<double, double>> dyadic_intervals(double a, double b, int depth) {
  std::vector<std::pair<double, double>> out;
  for (int m = 0; m <= depth; ++m) {
    const int n = 1 << m;
    for (int i = 0; i < n; ++i) out.emplace_back(a + (b - a) * i / n, i + 1 == n ? b : a + (b - a) * (i + 1) / n);
  }
  return out;
}

std::vector<double> dyadic_points(double a, double b, int depth) {
  const int n = 1 << depth;
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(i == n ? b : a + (b - a) * i / n);
  return out;
}

std::vector<Rect> dyadic_rects(const Rect& dom, int depth) {
  std::vector<Rect> out;
  for (int m = 0; m <= depth; ++m)
    for (int j = 0; j < (1 << m); ++j)
      for (int i = 0; i < (1 << m); ++i) out.push_back(dyadic_rect(dom, m, i, j));
  return out;
}

void bump(RegularityReport& rep, const std::string& name, int level, double ratio) {
  for (RegularityRow& row : rep.rows)
    if (row.name == name && row.level == level) {
      row.ratio = std::max(row.ratio, ratio);
      return;
    }
  rep.rows.push_back({name, level, ratio});
}

double safe_ratio(double num, double den) {
  if (den > 0.0) return num / den;
  return num == 0.0 ? 0.0 : INFINITY;
}

using PathEval = std::function<GradedTensor0(double, double, double)>;

// sup over dyadic data of the path regularity and continuity ratios; the
// fixed coordinate runs over the cross direction
void path_rows(RegularityReport& rep, const std::string& tag, const PathEval& x, double a, double b, double c,
               double e, int N, const HolderParams& hp, RegularityMode mode, int depth, double beta) {
  const double rho = hp.rho, sig = hp.sigma();
  const auto along = dyadic_intervals(a, b, depth);
  const auto across = dyadic_intervals(c, e, depth);
  const auto lines = dyadic_points(c, e, depth);
  for (const auto& I : along) {
    const double wa = hp.omega(I.first, I.second);
    for (double u : lines) {
      const GradedTensor0 v = x(I.first, I.second, u);
      for (int k = 1; k <= N; ++k)
        bump(rep, tag + "_regularity", k,
             safe_ratio(v.level(k).norm(), std::pow(wa, k * rho) / (beta * frac_factorial(k * rho))));
    }
    for (const auto& J : across) {
      const double wc = hp.omega(J.first, J.second);
      const GradedTensor0 v1 = x(I.first, I.second, J.first), v2 = x(I.first, I.second, J.second);
      for (int k = 1; k <= N; ++k) {
        double bound;
        if (mode == RegularityMode::rectangular)
          bound = std::pow(wa, k * rho) * std::pow(wc, rho) / (beta * frac_factorial(k * rho) * frac_factorial(rho));
        else
          bound = std::pow(wa, (2 * k - 1) * sig) * std::pow(wc, sig) /
                  (beta * frac_factorial((2 * k - 1) * sig) * frac_factorial(sig));
        bump(rep, tag + "_continuity", k, safe_ratio((v2.level(k) - v1.level(k)).norm(), bound));
      }
    }
  }
}

}  // namespace

RegularityReport regularity_report(const DGF& f, RegularityMode mode, int depth) {
  if (depth < 0 || depth > 6) throw DomainError("report depth must lie in [0, 6]");
  if (!f.horizontal || !f.vertical || !f.surface) throw DomainError("functional is incomplete");
  validate(f.hp);
  RegularityReport rep;
  rep.beta = f.hp.beta_value();
  rep.beta_rp = beta_rp(f.hp.rho);
  rep.beta_rs = beta_rs(f.hp.rho);
  const Rect& D = f.domain;
  path_rows(rep, "horizontal", f.horizontal, D.s1, D.s2, D.t1, D.t2, f.N, f.hp, mode, depth, rep.beta);
  auto vert = [&f](double t1, double t2, double s) { return f.vertical(s, t1, t2); };
  path_rows(rep, "vertical", vert, D.t1, D.t2, D.s1, D.s2, f.N, f.hp, mode, depth, rep.beta);
  const double sig = f.hp.sigma();
  for (const Rect& r : dyadic_rects(D, depth)) {
    const Tensor1Hat E = f.surface(r);
    const double ws = f.hp.omega(r.s1, r.s2), wt = f.hp.omega(r.t1, r.t2);
    for (int k = 2; k <= f.N; ++k)
      bump(rep, "surface", k, safe_ratio(E.body.level(k).norm(), w_poly(k, sig, ws, wt) / rep.beta));
  }
  if (f.grid) {
    // |X|_rho over the dyadic lattice points that lie on the grid
    std::vector<std::pair<double, double>> pts;
    for (double s : dyadic_points(D.s1, D.s2, depth))
      for (double t : dyadic_points(D.t1, D.t2, depth)) pts.emplace_back(s, t);
    std::vector<Eigen::VectorXd> vals;
    for (const auto& p : pts) vals.push_back(f.grid->eval(p.first, p.second));
    double hn = 0.0;
    for (size_t a = 0; a < pts.size(); ++a)
      for (size_t b = a + 1; b < pts.size(); ++b) {
        const double dist = std::hypot(pts[a].first - pts[b].first, pts[a].second - pts[b].second);
        hn = std::max(hn, (vals[a] - vals[b]).norm() / std::pow(dist, f.hp.rho));
      }
    rep.holder_norm = hn;
    for (const Rect& r : dyadic_rects(D, depth)) {
      const Eigen::VectorXd box = f.grid->eval(r.s2, r.t2) - f.grid->eval(r.s1, r.t2) - f.grid->eval(r.s2, r.t1) +
                                  f.grid->eval(r.s1, r.t1);
      const double bound = 2.0 * hn * std::pow(r.s2 - r.s1, sig) * std::pow(r.t2 - r.t1, sig);
      bump(rep, "box_increment", 0, safe_ratio(box.norm(), bound));
    }
  }
  for (const RegularityRow& row : rep.rows) rep.worst = std::max(rep.worst, row.ratio);
  return rep;
}

double dgf_metric(const DGF& f, const DGF& g, double rho, int depth) {
  if (!(rho > 0.0 && rho <= 1.0)) throw DomainError("rho must lie in (0,1]");
  if (depth < 0 || depth > 6) throw DomainError("metric depth must lie in [0, 6]");
  if (f.d != g.d) throw DomainError("functionals have different dimensions");
  const Rect& D = f.domain;
  if (std::abs(D.s1 - g.domain.s1) + std::abs(D.s2 - g.domain.s2) + std::abs(D.t1 - g.domain.t1) +
          std::abs(D.t2 - g.domain.t2) > 1e-12)
    throw DomainError("functionals have different domains");
  const int N = std::min(f.N, g.N);
  const double sig = 0.5 * rho;

  auto path_term = [&](const PathEval& x, const PathEval& y, double a, double b, double c, double e) {
    double reg = 0.0, cont = 0.0;
    const auto along = dyadic_intervals(a, b, depth);
    const auto across = dyadic_intervals(c, e, depth);
    for (const auto& I : along) {
      const double l = I.second - I.first;
      for (double u : dyadic_points(c, e, depth)) {
        const GradedTensor0 p = x(I.first, I.second, u), q = y(I.first, I.second, u);
        for (int k = 1; k <= N; ++k) reg = std::max(reg, (p.level(k) - q.level(k)).norm() / std::pow(l, k * rho));
      }
      for (const auto& J : across) {
        const double lc = J.second - J.first;
        const GradedTensor0 p1 = x(I.first, I.second, J.first), p2 = x(I.first, I.second, J.second);
        const GradedTensor0 q1 = y(I.first, I.second, J.first), q2 = y(I.first, I.second, J.second);
        for (int k = 1; k <= N; ++k) {
          const double num = ((p2.level(k) - q2.level(k)) - (p1.level(k) - q1.level(k))).norm();
          cont = std::max(cont, num / (std::pow(l, (2 * k - 1) * sig) * std::pow(lc, sig)));
        }
      }
    }
    return reg + cont;
  };
  auto fv = [&f](double t1, double t2, double s) { return f.vertical(s, t1, t2); };
  auto gv = [&g](double t1, double t2, double s) { return g.vertical(s, t1, t2); };
  const double dh = path_term(f.horizontal, g.horizontal, D.s1, D.s2, D.t1, D.t2);
  const double dv = path_term(fv, gv, D.t1, D.t2, D.s1, D.s2);
  double ds = 0.0;
  for (const Rect& r : dyadic_rects(D, depth)) {
    const Tensor1Hat a = f.surface(r), b = g.surface(r);
    for (int k = 2; k <= N; ++k)
      ds = std::max(ds, (a.body.level(k) - b.body.level(k)).norm() / w_poly(k, sig, r.s2 - r.s1, r.t2 - r.t1));
  }
  return dh + dv + ds;
}

}  // namespace surfsig
