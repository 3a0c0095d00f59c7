#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "surfsig/crossed_module.hpp"
#include "surfsig/free_lie.hpp"
#include "surfsig/holder.hpp"
#include "surfsig/io.hpp"
#include "surfsig/matrix_holonomy.hpp"
#include "surfsig/path_signature.hpp"
#include "surfsig/sewing.hpp"
#include "surfsig/surface_signature.hpp"
#include "surfsig/young_zust.hpp"

using namespace surfsig;

namespace {

struct RunConfig {
  int level = 2;
  int target = 4;
  double rho = 1.0;
  double beta = 0.0;
  double c_omega = 1.0;
  int t_steps = 8;
  int s_nodes = 8;
  std::string rule = "gauss";
  bool fixed_quadrature = false;
  int depth = 7;
  int min_depth = 1;
  double tol = 1e-6;
  int extrapolation = 2;
  int local_depth = 2;
  int report_depth = 3;
  int jobs = 1;
  unsigned long seed = 42;
  int lift = 2;
  std::string candidate = "section";
  std::string mode = "standard";
  std::string part = "square";
  bool rough = false;
  double eps = 0.1;
  double check_tol = 1e-3;
  int n = 2, m = 1, p = 1;
  std::string input, input2, connection, output, report, trace, dump_bases;
};

void validate(const RunConfig& c) {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) throw ParseError("config: " + msg);
  };
  need(c.level >= 2, "level must be >= 2");
  need(c.target >= 2, "target must be >= 2");
  need(c.rho > 0.0 && c.rho <= 1.0, "rho must lie in (0, 1]");
  need(c.c_omega > 0.0, "c-omega must be > 0");
  need(c.t_steps >= 1 && c.s_nodes >= 1, "quadrature counts must be >= 1");
  need(c.rule == "gauss" || c.rule == "trapezoid", "rule must be gauss or trapezoid");
  need(c.depth >= 1 && c.min_depth >= 1 && c.min_depth <= c.depth, "need 1 <= min-depth <= depth");
  need(c.tol > 0.0 && c.check_tol > 0.0, "tolerances must be > 0");
  need(c.jobs >= 1, "jobs must be >= 1");
  need(c.lift == 2 || c.lift == 3, "lift must be 2 or 3");
  need(c.candidate == "section" || c.candidate == "zero", "candidate must be section or zero");
  need(c.mode == "standard" || c.mode == "rectangular", "mode must be standard or rectangular");
  need(c.part == "square" || c.part == "interior" || c.part == "boundary", "part must be square, interior or boundary");
  need(c.eps >= 0.0, "eps must be >= 0");
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError(path + ": cannot open");
  return f;
}

// writes to the output file, or stdout when none was given
void emit(const std::string& path, const std::function<void(std::ostream&)>& w) {
  if (path.empty()) {
    w(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw ParseError(path + ": cannot write");
  w(f);
}

SurfaceGrid load_grid(const std::string& path) {
  if (path.empty()) throw ParseError("missing --input");
  std::ifstream f = open_in(path);
  return read_grid(f, path);
}

CellQuadrature quadrature(const RunConfig& c) {
  CellQuadrature q;
  q.t_steps = c.t_steps;
  q.s_nodes = c.s_nodes;
  q.rule = c.rule == "gauss" ? SRule::gauss : SRule::trapezoid;
  q.adaptive = !c.fixed_quadrature;
  return q;
}

HolderParams holder(const RunConfig& c) {
  HolderParams hp;
  hp.rho = c.rho;
  hp.beta = c.beta;
  hp.C_omega = c.c_omega;
  return hp;
}

SewingOptions sewing(const RunConfig& c) {
  SewingOptions o;
  o.m_min = c.min_depth;
  o.m_max = c.depth;
  o.tol = c.tol;
  o.extrapolation = c.extrapolation;
  o.local_depth = c.local_depth;
  o.jobs = c.jobs;
  o.candidate = c.candidate == "zero" ? Candidate::zero : Candidate::section;
  return o;
}

DGF make_lift(const RunConfig& c, const SurfaceGrid& g) {
  auto sp = std::make_shared<const SurfaceGrid>(g);
  return c.lift == 2 ? zust_lift_level2(sp, holder(c)) : young_lift_level3(sp, holder(c));
}

void write_matrix(std::ostream& os, const Eigen::MatrixXd& M) {
  for (int i = 0; i < M.rows(); ++i) {
    for (int j = 0; j < M.cols(); ++j) os << (j ? "," : "") << format_number(M(i, j));
    os << '\n';
  }
}

ChainConnection load_connection(const RunConfig& c, int d) {
  if (!c.connection.empty()) {
    std::ifstream f = open_in(c.connection);
    ChainConnection k = read_connection(f, c.connection);
    if (k.d != d) throw ShapeError("connection has " + std::to_string(k.d) + " letters, surface dimension is " +
                                   std::to_string(d));
    return k;
  }
  return random_fake_flat({c.n, c.m, c.p}, d, c.seed);
}

void write_output(const RunConfig& c, const Square& S) {
  emit(c.output, [&](std::ostream& os) {
    if (c.part == "interior")
      write_tensor1(os, S.E);
    else if (c.part == "boundary")
      write_tensor(os, cm_delta(S.E));
    else
      write_square(os, S);
  });
}

// Verification report rows.
struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct Report {
  std::vector<Check> rows;

  void add(const std::string& name, double value, double bound) {
    rows.push_back({name, value, bound, std::isfinite(value) && value <= bound});
  }
  bool ok() const {
    for (const Check& c : rows)
      if (!c.pass) return false;
    return true;
  }
  void write(std::ostream& os) const {
    os << "name,value,bound,pass\n";
    for (const Check& c : rows)
      os << c.name << ',' << format_number(c.value) << ',' << format_number(c.bound) << ','
         << (c.pass ? "pass" : "fail") << '\n';
  }
};

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(unsigned long seed) : gen(seed) {}
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
};

Tensor1 random_t1(Rng& r, int d, int N) {
  Tensor1 t(d, N);
  for (int n = 2; n <= N; ++n)
    for (long i = 0; i < t.level(n).size(); ++i) t.level(n)[i] = r.normal();
  return t;
}

GradedTensor0 random_tensor(Rng& r, int d, int N) {
  GradedTensor0 t(d, N);
  for (int n = 0; n <= N; ++n)
    for (long i = 0; i < t.level(n).size(); ++i) t.level(n)[i] = r.normal();
  return t;
}

double rel(const GradedTensor0& a, const GradedTensor0& b) {
  return max_level_diff(a, b) / std::max(1.0, p_lambda(b));
}

double rel(const Tensor1& a, const Tensor1& b) { return max_level_diff(a, b) / std::max(1.0, b.norm()); }

void algebra_suite(const RunConfig& c, Report& rep) {
  Rng r(c.seed);
  double p1 = 0, p2 = 0, morph = 0, sub = 0;
  for (int it = 0; it < 20; ++it) {
    const int d = r.integer(2, 3), N = d == 2 ? 5 : 4;
    const Tensor1 E = random_t1(r, d, N), F = random_t1(r, d, N);
    const GradedTensor0 a = random_tensor(r, d, N);
    const Tensor1 s = star(E, F);
    p1 = std::max({p1, rel(cm_delta(act_left(a, E)), (a * cm_delta(E)).with_cap(N)),
                   rel(cm_delta(act_right(E, a)), cm_delta(E) * a)});
    p2 = std::max({p2, rel(act_left(cm_delta(E), F), s), rel(act_right(E, cm_delta(F)), s)});
    morph = std::max(morph, rel(cm_delta(s), cm_delta(E) * cm_delta(F)));
    sub = std::max(sub, s.norm() / (E.norm() * F.norm()));
  }
  rep.add("first_peiffer", p1, 1e-10);
  rep.add("second_peiffer", p2, 1e-10);
  rep.add("delta_morphism", morph, 1e-10);
  rep.add("star_submultiplicativity", sub, 1.0 + 1e-10);

  double dn = 0.0;
  for (int d = 2; d <= 3; ++d)
    for (int n = 2; n <= 5; ++n)
      for (int k = 0; k <= n - 2; ++k) dn = std::max(dn, std::abs(delta_block_norm(d, n, k) - std::sqrt(2.0)));
  rep.add("delta_block_norm", dn, 1e-12);

  const CommutantBasis& B = CommutantBasis::get(2, 5);
  double sec = 0.0, contraction = 0.0;
  for (int it = 0; it < 20; ++it) {
    const int n = r.integer(2, 5);
    Eigen::VectorXd coeff(B.words[n].size());
    for (long i = 0; i < coeff.size(); ++i) coeff[i] = r.normal();
    const Eigen::VectorXd b = B.expansions[n] * coeff;
    const Tensor1 t = algebra_section(b, n, B);
    sec = std::max(sec, (cm_delta(t).level(n) - b).norm() / b.norm());
    contraction = std::max(contraction, t.level(n).norm() / b.norm());
  }
  rep.add("section_delta_identity", sec, 1e-10);
  rep.add("section_contraction", contraction, 1.0 + 1e-12);

  long witt_gap = 0;
  const LieBasis H = hall_basis(2, 6);
  for (int n = 1; n <= 6; ++n)
    witt_gap += std::abs(static_cast<long>(H.by_degree[n].size()) - witt_count(2, n));
  rep.add("hall_witt_count", static_cast<double>(witt_gap), 0.0);

  double neo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const NeoclassicalResult q = neoclassical_check(r.uniform(0.05, 1.0), r.integer(1, 8), r.uniform(0, 2), r.uniform(0, 2));
    if (q.rhs > 0) neo = std::max(neo, q.lhs / q.rhs);
  }
  rep.add("neoclassical", neo, 1.0 + 1e-12);
}

void path_suite(const RunConfig& c, Report& rep) {
  Rng r(c.seed + 1);
  const int d = 3, N = 5;
  std::vector<double> u;
  std::vector<Eigen::VectorXd> x;
  for (int i = 0; i <= 6; ++i) {
    u.push_back(i);
    x.push_back(Eigen::VectorXd::NullaryExpr(d, [&](Eigen::Index) { return r.normal(); }));
  }
  const PiecewiseLinearPath p(u, x);
  const GradedTensor0 whole = pl_signature(p, N);
  double chen = 0.0;
  for (double mid : {1.0, 2.5, 4.2}) chen = std::max(chen, rel(pl_signature(p, 0, mid, N) * pl_signature(p, mid, 6, N), whole));
  rep.add("chen_identity", chen, 1e-12);
  rep.add("path_grouplike", t0_is_grouplike(whole, hall_basis(d, N), 1e-8) ? 0.0 : 1.0, 0.0);
}

void surface_suite(const RunConfig& c, const SurfaceGrid& g, Report& rep) {
  const int N = std::min(c.level, 4);
  const CellQuadrature q = quadrature(c);
  const Square S = surface_signature(g, N, q, 1, 1, c.jobs);
  rep.add("surface_boundary", boundary_residual(S) / std::max(1.0, p_lambda(S.x)), 1e-6);
  if (g.ns() >= 2) {
    const Square T = surface_signature(g, N, q, 2, 1, c.jobs);
    rep.add("surface_split_horizontal", square_diff(S, T), 1e-6);
  }
  if (g.nt() >= 2) {
    const Square T = surface_signature(g, N, q, 1, 2, c.jobs);
    rep.add("surface_split_vertical", square_diff(S, T), 1e-6);
  }
  rep.add("surface_grouplike", is_grouplike_1(S.E, g1_basis(g.dim(), N), 1e-8) ? 0.0 : 1.0, 0.0);
  const DGF f = make_lift(c, g);
  rep.add("lift_boundary", dgf_boundary_residual(f, g.domain()), 1e-6);
  rep.add("metric_identity", dgf_metric(f, f, c.rho, 2), 1e-10);
}

void holonomy_suite(const RunConfig& c, Report& rep) {
  const ChainConnection k = random_fake_flat({c.n, c.m, c.p}, 2, c.seed);
  rep.add("fake_flatness", fake_flatness_residual(k), 1e-10);
  rep.add("peiffer_annihilation", UniversalMorphism(k, 4).peiffer_residual(), 1e-10);
}

void dump_bases(const std::string& path, int N) {
  emit(path, [&](std::ostream& os) {
    for (int d = 2; d <= 3; ++d) {
      const LieBasis H = hall_basis(d, N);
      os << "# hall d=" << d << " N=" << N << '\n';
      for (size_t e = 0; e < H.elements.size(); ++e) os << H.layer[e] << ',' << H.to_string(static_cast<int>(e)) << '\n';
      const CommutantBasis& B = CommutantBasis::get(d, N);
      os << "# commutant d=" << d << " N=" << N << '\n';
      for (const CommutantGenerator& g : B.generators) os << g.degree() << ',' << g.to_string() << '\n';
      os << "# frame d=" << d << " N=" << N << '\n';
      write_frame(os, d, N);
    }
  });
}

// default input for check and verify
SurfaceGrid smooth_surface(int d) {
  return SurfaceGrid::sample(d, 4, 4, {0, 1, 0, 1}, [d](double s, double t) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = std::sin((i + 1) * s + 0.5 * t) + 0.3 * (i + 1) * s * t;
    return v;
  });
}

int run(const std::string& cmd, const RunConfig& c) {
  validate(c);
  if (cmd == "path-sig") {
    if (c.input.empty()) throw ParseError("missing --input");
    std::ifstream f = open_in(c.input);
    const PiecewiseLinearPath p = read_path(f, c.input);
    const GradedTensor0 S = pl_signature(p, c.level);
    emit(c.output, [&](std::ostream& os) { write_tensor(os, S); });
    return 0;
  }
  if (cmd == "surf-sig") {
    const SurfaceGrid g = load_grid(c.input);
    const int blocks = std::max(1, std::min(c.jobs, g.nt()));
    write_output(c, surface_signature(g, c.level, quadrature(c), 1, blocks, c.jobs));
    return 0;
  }
  if (cmd == "lift") {
    const SurfaceGrid g = load_grid(c.input);
    const DGF f = make_lift(c, g);
    write_output(c, f.square(g.domain()));
    if (!c.report.empty()) {
      const RegularityReport rr =
          regularity_report(f, c.mode == "rectangular" ? RegularityMode::rectangular : RegularityMode::standard,
                            c.report_depth);
      emit(c.report, [&](std::ostream& os) {
        os << "name,level,ratio\n";
        for (const RegularityRow& row : rr.rows) os << row.name << ',' << row.level << ',' << format_number(row.ratio) << '\n';
        os << "beta,0," << format_number(rr.beta) << '\n';
        os << "holder_norm,0," << format_number(rr.holder_norm) << '\n';
      });
    }
    return 0;
  }
  if (cmd == "extend") {
    const SurfaceGrid g = load_grid(c.input);
    const DGF f = make_lift(c, g);
    if (c.target < f.N) throw DomainError("target below the lift level");
    std::vector<LevelTrace> traces;
    SewingOptions o = sewing(c);
    o.throw_on_fail = false;
    const Square S = signature_of_rough_surface(f, c.target, o, &traces);
    if (!c.trace.empty()) emit(c.trace, [&](std::ostream& os) { write_trace_csv(os, traces); });
    write_output(c, S);
    for (const LevelTrace& t : traces) {
      std::cerr << "level " << t.level << ": depth " << t.depth << " slope " << t.slope
                << (t.converged ? "" : " not converged") << (t.section_fallback ? " section fallback" : "")
                << (t.regime_warning ? " outside the sewing regime" : "") << '\n';
      if (!t.converged) {
        const double gap = t.extrapolated_gaps.empty() ? 0.0 : t.extrapolated_gaps.back();
        throw ConvergenceError("level " + std::to_string(t.level) + " did not reach tol", gap);
      }
    }
    return 0;
  }
  if (cmd == "holonomy") {
    const SurfaceGrid g = load_grid(c.input);
    const ChainConnection k = scaled(load_connection(c, g.dim()), c.eps);
    Eigen::MatrixXd H;
    if (c.rough) {
      const Square S = signature_of_rough_surface(make_lift(c, g), c.target, sewing(c));
      H = universal_factorization(k, c.target, 1e-8)(S.E.body);
    } else {
      HolonomyOptions ho;
      ho.t_steps = c.t_steps;
      ho.s_nodes = c.s_nodes;
      ho.rule = c.rule == "gauss" ? SRule::gauss : SRule::trapezoid;
      H = matrix_surface_holonomy(g, k, ho);
    }
    emit(c.output, [&](std::ostream& os) { write_matrix(os, H); });
    return 0;
  }
  if (cmd == "check") {
    const SurfaceGrid g = c.input.empty() ? smooth_surface(2) : load_grid(c.input);
    const ChainConnection k = load_connection(c, g.dim());
    HolonomyOptions ho;
    ho.t_steps = c.t_steps;
    ho.s_nodes = c.s_nodes;
    ho.rule = c.rule == "gauss" ? SRule::gauss : SRule::trapezoid;
    const UniversalCheck u = universal_check(g, k, c.level, c.eps, ho);
    Report rep;
    rep.add("universal_rel_gap", u.rel_gap, c.check_tol);
    rep.add("peiffer_annihilation", UniversalMorphism(scaled(k, c.eps), c.level).peiffer_residual(),
            1e-10 * std::max(1.0, c.eps * c.eps));
    emit(c.output, [&](std::ostream& os) { rep.write(os); });
    if (!rep.ok()) throw VerificationError("universal property check failed");
    return 0;
  }
  if (cmd == "verify") {
    if (!c.dump_bases.empty()) dump_bases(c.dump_bases, std::min(c.level, 6));
    Report rep;
    algebra_suite(c, rep);
    path_suite(c, rep);
    holonomy_suite(c, rep);
    surface_suite(c, c.input.empty() ? smooth_surface(3) : load_grid(c.input), rep);
    emit(c.output, [&](std::ostream& os) { rep.write(os); });
    if (!rep.ok()) throw VerificationError("verification failed");
    return 0;
  }
  if (cmd == "metric") {
    if (c.input2.empty()) throw ParseError("missing --input2");
    const DGF f = make_lift(c, load_grid(c.input));
    const DGF g = make_lift(c, load_grid(c.input2));
    const double dist = dgf_metric(f, g, c.rho, c.report_depth);
    emit(c.output, [&](std::ostream& os) { os << format_number(dist) << '\n'; });
    return 0;
  }
  throw ParseError("unknown command " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surface signatures, sewing and surface holonomy"};
  app.set_config("--config", "", "key=value file; flags override it");
  app.fallthrough();
  app.require_subcommand(1);

  RunConfig c;
  app.add_option("-i,--input", c.input, "input grid or path file");
  app.add_option("--input2", c.input2, "second grid for metric");
  app.add_option("-o,--output", c.output, "output file (stdout by default)");
  app.add_option("-N,--level", c.level, "truncation level")->capture_default_str();
  app.add_option("--target", c.target, "extension target level")->capture_default_str();
  app.add_option("--rho", c.rho, "Hoelder regularity")->capture_default_str();
  app.add_option("--beta", c.beta, "extension constant, <= 0 for the automatic value")->capture_default_str();
  app.add_option("--c-omega", c.c_omega, "control constant")->capture_default_str();
  app.add_option("--t-steps", c.t_steps, "RK4 steps per cell")->capture_default_str();
  app.add_option("--s-nodes", c.s_nodes, "inner quadrature nodes per cell")->capture_default_str();
  app.add_option("--rule", c.rule, "gauss or trapezoid")->capture_default_str();
  app.add_flag("--fixed-quadrature", c.fixed_quadrature, "disable quadrature doubling");
  app.add_option("--depth", c.depth, "maximal dyadic depth")->capture_default_str();
  app.add_option("--min-depth", c.min_depth, "first dyadic depth")->capture_default_str();
  app.add_option("--tol", c.tol, "Cauchy gap tolerance")->capture_default_str();
  app.add_option("--extrapolation", c.extrapolation, "Romberg steps")->capture_default_str();
  app.add_option("--local-depth", c.local_depth, "extra depth off the dyadic table")->capture_default_str();
  app.add_option("--report-depth", c.report_depth, "dyadic depth of regularity reports and metrics")
      ->capture_default_str();
  app.add_option("-j,--jobs", c.jobs, "worker threads")->capture_default_str();
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  app.add_option("--lift", c.lift, "2: area lift, 3: Young lift")->capture_default_str();
  app.add_option("--candidate", c.candidate, "section or zero")->capture_default_str();
  app.add_option("--mode", c.mode, "standard or rectangular regularity")->capture_default_str();
  app.add_option("--part", c.part, "square, interior or boundary")->capture_default_str();
  app.add_flag("--rough", c.rough, "holonomy through the extended signature");
  app.add_option("--eps", c.eps, "connection scale")->capture_default_str();
  app.add_option("--check-tol", c.check_tol, "relative gap bound for check")->capture_default_str();
  app.add_option("--n", c.n, "shared block size of the chain complex")->capture_default_str();
  app.add_option("--m", c.m, "extra dimensions of W0")->capture_default_str();
  app.add_option("--p", c.p, "extra dimensions of W1")->capture_default_str();
  app.add_option("--connection", c.connection, "connection JSON (random fake-flat by default)");
  app.add_option("--report", c.report, "regularity report CSV");
  app.add_option("--trace", c.trace, "gap trace CSV");
  app.add_option("--dump-bases", c.dump_bases, "write Hall, commutant and frame bases");

  for (const char* name : {"path-sig", "surf-sig", "lift", "extend", "holonomy", "check", "verify", "metric"})
    app.add_subcommand(name);
  app.get_subcommand("path-sig")->description("signature of a piecewise linear path");
  app.get_subcommand("surf-sig")->description("surface signature of a sampled surface");
  app.get_subcommand("lift")->description("level 2 or 3 Hoelder lift");
  app.get_subcommand("extend")->description("extension of a lift by sewing");
  app.get_subcommand("holonomy")->description("matrix surface holonomy");
  app.get_subcommand("check")->description("universal property against the holonomy ODE");
  app.get_subcommand("verify")->description("invariant suites");
  app.get_subcommand("metric")->description("Hoelder distance of two lifts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ErrorKind::parse);
  }

  try {
    return run(app.get_subcommands().front()->get_name(), c);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::domain);
  }
}
