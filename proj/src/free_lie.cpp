#include "surfsig/free_lie.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <functional>
#include <map>
#include <mutex>

#include "linalg.hpp"

namespace surfsig {

namespace {

Eigen::VectorXd kron(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size() * b.size());
  kron_add(a, b, 1.0, out.data());
  return out;
}

Eigen::VectorXd letter_vec(int d, int i) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
  e[i] = 1.0;
  return e;
}

int moebius(int n) {
  int m = 1;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      n /= p;
      if (n % p == 0) return 0;
      m = -m;
    }
  }
  if (n > 1) m = -m;
  return m;
}

}  // namespace

long witt_count(int d, int n) {
  long s = 0;
  for (int k = 1; k <= n; ++k)
    if (n % k == 0) s += moebius(k) * ipow(d, n / k);
  return s / n;
}

std::string LieBasis::to_string(int element) const {
  std::function<std::string(int)> rec = [&](int id) -> std::string {
    const LieNode& nd = nodes[id];
    if (nd.letter >= 0) return std::to_string(nd.letter + 1);
    return "[" + rec(nd.left) + "," + rec(nd.right) + "]";
  };
  return rec(elements[element]);
}

Eigen::VectorXd LieBasis::expand(int node) const {
  const LieNode& nd = nodes[node];
  if (nd.letter >= 0) return letter_vec(d, nd.letter);
  Eigen::VectorXd a = expand(nd.left), b = expand(nd.right);
  return kron(a, b) - kron(b, a);
}

LieBasis hall_basis(int d, int N) {
  if (d < 1 || N < 1) throw DomainError("hall basis needs d >= 1 and N >= 1");
  LieBasis B;
  B.d = d;
  B.N = N;
  auto add_node = [&](LieNode nd) {
    B.nodes.push_back(nd);
    return static_cast<int>(B.nodes.size()) - 1;
  };
  auto bracket_node = [&](int l, int r) {
    return add_node({-1, l, r, B.nodes[l].degree + B.nodes[r].degree});
  };

  std::vector<int> cur;
  for (int i = 0; i < d; ++i) cur.push_back(add_node({i, -1, -1, 1}));
  int layer = 0;
  while (!cur.empty()) {
    for (int id : cur) {
      B.elements.push_back(id);
      B.layer.push_back(layer);
    }
    struct Cand {
      int degree;
      std::vector<int> key;
      int node;
    };
    std::vector<Cand> next;
    const int sz = static_cast<int>(cur.size());
    for (int hi = 0; hi < sz; ++hi) {
      for (int lo = 0; lo < hi; ++lo) {
        const int deg0 = B.nodes[cur[hi]].degree + B.nodes[cur[lo]].degree;
        if (deg0 > N) continue;
        std::vector<int> prefix;
        std::function<void(int, int)> rec = [&](int minpos, int deg) {
          int node = bracket_node(cur[hi], cur[lo]);
          for (int i = static_cast<int>(prefix.size()) - 1; i >= 0; --i) node = bracket_node(cur[prefix[i]], node);
          std::vector<int> key = prefix;
          key.push_back(hi);
          key.push_back(lo);
          next.push_back({deg, key, node});
          for (int a = minpos; a <= hi; ++a) {
            int da = B.nodes[cur[a]].degree;
            if (deg + da > N) continue;
            prefix.push_back(a);
            rec(a, deg + da);
            prefix.pop_back();
          }
        };
        rec(0, deg0);
      }
    }
    std::sort(next.begin(), next.end(), [](const Cand& x, const Cand& y) {
      if (x.degree != y.degree) return x.degree < y.degree;
      return x.key < y.key;
    });
    cur.clear();
    for (auto& c : next) cur.push_back(c.node);
    ++layer;
  }

  B.by_degree.assign(N + 1, {});
  for (int e = 0; e < static_cast<int>(B.elements.size()); ++e) B.by_degree[B.nodes[B.elements[e]].degree].push_back(e);
  B.expansions.resize(N + 1);
  B.ortho.resize(N + 1);
  for (int n = 0; n <= N; ++n) {
    Eigen::MatrixXd M(ipow(d, n), B.by_degree[n].size());
    for (int c = 0; c < static_cast<int>(B.by_degree[n].size()); ++c)
      M.col(c) = B.expand(B.elements[B.by_degree[n][c]]);
    B.expansions[n] = M;
    B.ortho[n] = detail::orthonormal_span(M);
  }
  return B;
}

std::string CommutantGenerator::to_string() const {
  std::string s;
  for (int a : prefix) s += "[" + std::to_string(a + 1) + ",";
  s += "[" + std::to_string(lo + 1) + "," + std::to_string(hi + 1) + "]";
  for (size_t i = 0; i < prefix.size(); ++i) s += "]";
  return s;
}

Eigen::VectorXd generator_expansion(int d, const CommutantGenerator& g) {
  Eigen::VectorXd el = letter_vec(d, g.lo), eh = letter_vec(d, g.hi);
  Eigen::VectorXd v = kron(el, eh) - kron(eh, el);
  for (int i = static_cast<int>(g.prefix.size()) - 1; i >= 0; --i) {
    Eigen::VectorXd a = letter_vec(d, g.prefix[i]);
    v = kron(a, v) - kron(v, a);
  }
  return v;
}

static Eigen::VectorXd generator_section_bar(int d, const CommutantGenerator& g) {
  if (g.lo < 0 || g.hi >= d || g.lo >= g.hi) throw DomainError("malformed generator " + g.to_string());
  for (size_t i = 0; i < g.prefix.size(); ++i) {
    if (g.prefix[i] < 0 || g.prefix[i] > g.hi || (i > 0 && g.prefix[i] < g.prefix[i - 1]))
      throw DomainError("generator violates ordering: " + g.to_string());
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(bar::dim(d, 2));
  v[bar::pair_index(d, g.lo, g.hi)] = 1.0;
  int m = 2;
  for (int i = static_cast<int>(g.prefix.size()) - 1; i >= 0; --i, ++m) {
    Eigen::VectorXd a = letter_vec(d, g.prefix[i]);
    v = bar::left_mul(d, a, 1, v, m) - bar::right_mul(d, v, m, a, 1);
  }
  return v;
}

Tensor1 section_s(const CommutantGenerator& g, int d, int N) {
  Tensor1 t(d, N);
  const int n = g.degree();
  if (n > N) return t;
  t.level(n) = PeifferCache::get(d).project(n, generator_section_bar(d, g));
  return t;
}

CommutantBasis commutant_generators(int d, int N) {
  if (N < 2 || d < 2) throw DomainError("commutant basis needs d >= 2 and N >= 2");
  CommutantBasis B;
  B.d = d;
  B.N = N;
  B.gens_by_degree.assign(N + 1, {});
  for (int m = 2; m <= N; ++m) {
    for (int lo = 0; lo < d; ++lo) {
      for (int hi = lo + 1; hi < d; ++hi) {
        std::vector<int> prefix;
        std::function<void(int)> rec = [&](int minv) {
          if (static_cast<int>(prefix.size()) == m - 2) {
            B.generators.push_back({prefix, lo, hi});
            return;
          }
          for (int a = minv; a <= hi; ++a) {
            prefix.push_back(a);
            rec(a);
            prefix.pop_back();
          }
        };
        rec(0);
      }
    }
  }
  std::stable_sort(B.generators.begin(), B.generators.end(), [](const CommutantGenerator& x, const CommutantGenerator& y) {
    if (x.degree() != y.degree()) return x.degree() < y.degree();
    if (x.prefix != y.prefix) return x.prefix < y.prefix;
    return std::make_pair(x.lo, x.hi) < std::make_pair(y.lo, y.hi);
  });
  for (int i = 0; i < static_cast<int>(B.generators.size()); ++i) B.gens_by_degree[B.generators[i].degree()].push_back(i);

  std::vector<Eigen::VectorXd> gexp(B.generators.size()), gsec(B.generators.size());
  for (size_t i = 0; i < B.generators.size(); ++i) {
    gexp[i] = generator_expansion(d, B.generators[i]);
    gsec[i] = generator_section_bar(d, B.generators[i]);
  }

  const PeifferCache& cache = build_cache(d, N);
  B.words.assign(N + 1, {});
  B.expansions.resize(N + 1);
  B.pinv.resize(N + 1);
  B.section.resize(N + 1);
  for (int n = 2; n <= N; ++n) {
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int rem) {
      if (rem == 0) {
        B.words[n].push_back({cur, n});
        return;
      }
      for (int deg = 2; deg <= rem; ++deg)
        for (int gi : B.gens_by_degree[deg]) {
          cur.push_back(gi);
          rec(rem - deg);
          cur.pop_back();
        }
    };
    rec(n);
    const long W = static_cast<long>(B.words[n].size());
    Eigen::MatrixXd M(ipow(d, n), W);
    Eigen::MatrixXd S(cache.level(n).dim, W);
    for (long w = 0; w < W; ++w) {
      const auto& gs = B.words[n][w].gens;
      Eigen::VectorXd a = Eigen::VectorXd::Ones(1);
      int pdeg = 0;
      for (size_t i = 0; i + 1 < gs.size(); ++i) {
        a = kron(a, gexp[gs[i]]);
        pdeg += B.generators[gs[i]].degree();
      }
      const int last = gs.back();
      M.col(w) = kron(a, gexp[last]);
      Eigen::VectorXd sb = bar::left_mul(d, a, pdeg, gsec[last], B.generators[last].degree());
      S.col(w) = cache.project(n, sb);
    }
    B.expansions[n] = M;
    B.section[n] = S;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    if (qr.rank() != W) throw DomainError("generator words are not independent at level " + std::to_string(n));
    B.pinv[n] = qr.solve(Eigen::MatrixXd::Identity(M.rows(), M.rows()));
  }
  return B;
}

const CommutantBasis& CommutantBasis::get(int d, int N) {
  static std::mutex m;
  static std::map<std::pair<int, int>, std::unique_ptr<CommutantBasis>> cache;
  std::lock_guard<std::mutex> lk(m);
  auto& p = cache[{d, N}];
  if (!p) p = std::make_unique<CommutantBasis>(commutant_generators(d, N));
  return *p;
}

Decomposition decompose_in_commutant(const Eigen::VectorXd& b, int n, const CommutantBasis& basis, double rel_tol) {
  Decomposition r;
  const double bn = b.norm();
  if (n < 2 || n > basis.N || basis.words[n].empty()) {
    r.coeffs = Eigen::VectorXd::Zero(0);
    r.residual = bn;
  } else {
    if (b.size() != basis.expansions[n].rows()) throw ShapeError("slice has wrong length for level");
    r.coeffs = basis.pinv[n] * b;
    r.residual = (basis.expansions[n] * r.coeffs - b).norm();
  }
  if (r.residual > rel_tol * bn && bn > 0.0)
    throw DomainError("not in commutant envelope at level " + std::to_string(n) +
                      ", residual " + std::to_string(r.residual));
  return r;
}

Tensor1 algebra_section(const Eigen::VectorXd& b, int n, const CommutantBasis& basis, double rel_tol) {
  Tensor1 t(basis.d, basis.N);
  if (b.norm() == 0.0) return t;
  Decomposition dc = decompose_in_commutant(b, n, basis, rel_tol);
  t.level(n) = basis.section[n] * dc.coeffs;
  return t;
}

Tensor1 algebra_section(const GradedTensor0& b, const CommutantBasis& basis, double rel_tol) {
  Tensor1 t(basis.d, basis.N);
  for (int n = 2; n <= std::min(b.cap(), basis.N); ++n) {
    if (b.level(n).norm() == 0.0) continue;
    Decomposition dc = decompose_in_commutant(b.level(n), n, basis, rel_tol);
    t.level(n) = basis.section[n] * dc.coeffs;
  }
  return t;
}

Eigen::VectorXd min_norm_preimage(const Eigen::VectorXd& b, int d, int n) {
  const PeifferLevel& L = PeifferCache::get(d).level(n);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(L.delta);
  return cod.solve(b);
}

}  // namespace surfsig
