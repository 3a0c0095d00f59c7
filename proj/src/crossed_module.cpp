#include "surfsig/crossed_module.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <map>

#include "linalg.hpp"

namespace surfsig {

namespace bar {

int pairs(int d) { return d * (d - 1) / 2; }

int pair_index(int d, int i, int j) { return i * d - i * (i + 1) / 2 + (j - i - 1); }

std::pair<int, int> pair_of(int d, int idx) {
  for (int i = 0; i < d; ++i) {
    int row = d - 1 - i;
    if (idx < row) return {i, i + 1 + idx};
    idx -= row;
  }
  throw ShapeError("pair index out of range");
}

long block_len(int d, int n) { return n < 2 ? 0 : ipow(d, n - 2) * pairs(d); }

long dim(int d, int n) { return n < 2 ? 0 : (n - 1) * block_len(d, n); }

Eigen::VectorXd left_mul(int d, const Eigen::VectorXd& a, int p, const Eigen::VectorXd& v, int q) {
  const int n = p + q;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim(d, n));
  const long Lq = block_len(d, q), Ln = block_len(d, n);
  for (int k = 0; k <= q - 2; ++k) {
    Eigen::VectorXd blk = v.segment(k * Lq, Lq);
    kron_add(a, blk, 1.0, out.data() + (k + p) * Ln);
  }
  return out;
}

Eigen::VectorXd right_mul(int d, const Eigen::VectorXd& v, int q, const Eigen::VectorXd& b, int r) {
  const int n = q + r;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(dim(d, n));
  const long Lq = block_len(d, q), Ln = block_len(d, n);
  for (int k = 0; k <= q - 2; ++k) {
    Eigen::VectorXd blk = v.segment(k * Lq, Lq);
    kron_add(blk, b, 1.0, out.data() + k * Ln);
  }
  return out;
}

void sandwich_add(int d, const Eigen::VectorXd& a, int p, const Eigen::VectorXd& v, int q, const Eigen::VectorXd& b,
                  int r, Eigen::VectorXd& out) {
  const int n = p + q + r;
  const long Lq = block_len(d, q), Ln = block_len(d, n);
  const long Lm = block_len(d, q + r);
  Eigen::VectorXd tmp(Lm);
  for (int k = 0; k <= q - 2; ++k) {
    tmp.setZero();
    Eigen::VectorXd blk = v.segment(k * Lq, Lq);
    kron_add(blk, b, 1.0, tmp.data());
    kron_add(a, tmp, 1.0, out.data() + (k + p) * Ln);
  }
}

Eigen::MatrixXd delta_block(int d, int n, int k) {
  const long L = block_len(d, n);
  const int P = pairs(d);
  const long suf_n = ipow(d, n - 2 - k);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(ipow(d, n), L);
  for (long idx = 0; idx < L; ++idx) {
    long suf = idx % suf_n;
    long rest = idx / suf_n;
    int pr = static_cast<int>(rest % P);
    long pre = rest / P;
    auto [i, j] = pair_of(d, pr);
    long base = pre * ipow(d, n - k);
    D(base + (i * d + j) * suf_n + suf, idx) += 1.0;
    D(base + (j * d + i) * suf_n + suf, idx) -= 1.0;
  }
  return D;
}

Eigen::MatrixXd delta_matrix(int d, int n) {
  const long L = block_len(d, n);
  Eigen::MatrixXd D(ipow(d, n), dim(d, n));
  for (int k = 0; k <= n - 2; ++k) D.middleCols(k * L, L) = delta_block(d, n, k);
  return D;
}

std::string label(int d, int n, long idx) {
  const long L = block_len(d, n);
  const int P = pairs(d);
  int k = static_cast<int>(idx / L);
  long w = idx % L;
  const long suf_n = ipow(d, n - 2 - k);
  long suf = w % suf_n;
  long rest = w / suf_n;
  int pr = static_cast<int>(rest % P);
  long pre = rest / P;
  auto [i, j] = pair_of(d, pr);
  std::string s = word_string(d, k, pre);
  s += "[";
  s.push_back(static_cast<char>('1' + i));
  s.push_back(static_cast<char>('1' + j));
  s += "]";
  s += word_string(d, n - 2 - k, suf);
  return s;
}

}  // namespace bar

static Eigen::VectorXd unit_vec(long n, long i) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  v[i] = 1.0;
  return v;
}

static std::unique_ptr<PeifferLevel> build_level(int d, int n) {
  auto L = std::make_unique<PeifferLevel>();
  L->n = n;
  L->bar_dim = bar::dim(d, n);
  L->delta_bar = bar::delta_matrix(d, n);
  if (n < 4 || bar::pairs(d) == 0) {
    L->identity = true;
    L->dim = L->bar_dim;
    L->pf_basis = Eigen::MatrixXd::Zero(L->bar_dim, 0);
    L->delta = L->delta_bar;
    return L;
  }
  long cols = 0;
  for (int n1 = 2; n1 <= n - 2; ++n1) cols += bar::dim(d, n1) * bar::dim(d, n - n1);
  Eigen::MatrixXd S(L->bar_dim, cols);
  long c = 0;
  for (int n1 = 2; n1 <= n - 2; ++n1) {
    const int n2 = n - n1;
    Eigen::MatrixXd D1 = bar::delta_matrix(d, n1);
    Eigen::MatrixXd D2 = bar::delta_matrix(d, n2);
    const long b1 = bar::dim(d, n1), b2 = bar::dim(d, n2);
    for (long e = 0; e < b1; ++e) {
      Eigen::VectorXd ue = unit_vec(b1, e);
      for (long f = 0; f < b2; ++f) {
        Eigen::VectorXd uf = unit_vec(b2, f);
        S.col(c++) = bar::left_mul(d, D1.col(e), n1, uf, n2) - bar::right_mul(d, ue, n1, D2.col(f), n2);
      }
    }
  }
  detail::RangeSplit rs = detail::range_split(S);
  L->identity = false;
  L->pf_basis = std::move(rs.range);
  L->frame = std::move(rs.complement);
  L->dim = L->frame.cols();
  L->delta = L->delta_bar * L->frame;
  return L;
}

const PeifferCache& PeifferCache::get(int d) {
  static std::mutex m;
  static std::map<int, std::unique_ptr<PeifferCache>> caches;
  std::lock_guard<std::mutex> lk(m);
  auto& p = caches[d];
  if (!p) p = std::make_unique<PeifferCache>(d);
  return *p;
}

const PeifferLevel& PeifferCache::level(int n) const {
  std::lock_guard<std::mutex> lk(mu_);
  if (n < 0) throw ShapeError("negative level");
  if (static_cast<int>(levels_.size()) <= n) levels_.resize(n + 1);
  if (!levels_[n]) levels_[n] = build_level(d_, n);
  return *levels_[n];
}

Eigen::VectorXd PeifferCache::embed(int n, const Eigen::VectorXd& c) const {
  const PeifferLevel& L = level(n);
  return L.identity ? c : Eigen::VectorXd(L.frame * c);
}

Eigen::VectorXd PeifferCache::project(int n, const Eigen::VectorXd& v) const {
  const PeifferLevel& L = level(n);
  return L.identity ? v : Eigen::VectorXd(L.frame.transpose() * v);
}

const PeifferCache& build_cache(int d, int N) {
  if (N < 2) throw DomainError("cache needs N >= 2");
  const PeifferCache& c = PeifferCache::get(d);
  for (int n = 2; n <= N; ++n) c.level(n);
  return c;
}

Tensor1::Tensor1(int d, int N) : d_(d), N_(N) {
  if (d < 2 || N < 2) throw ShapeError("Tensor1 needs d >= 2 and N >= 2");
  const PeifferCache& c = PeifferCache::get(d);
  lv_.resize(N + 1);
  for (int n = 2; n <= N; ++n) lv_[n] = Eigen::VectorXd::Zero(c.level(n).dim);
}

Tensor1 Tensor1::wedge(int d, int N, int i, int j, double c) {
  Tensor1 t(d, N);
  if (i == j) return t;
  if (i > j) {
    std::swap(i, j);
    c = -c;
  }
  t.lv_[2][bar::pair_index(d, i, j)] = c;
  return t;
}

Tensor1 Tensor1::from_bar(int d, int N, const std::vector<Eigen::VectorXd>& bar_levels) {
  Tensor1 t(d, N);
  const PeifferCache& c = PeifferCache::get(d);
  for (int n = 2; n <= N && n < static_cast<int>(bar_levels.size()); ++n)
    if (bar_levels[n].size()) t.lv_[n] = c.project(n, bar_levels[n]);
  return t;
}

Eigen::VectorXd Tensor1::bar_level(int n) const { return PeifferCache::get(d_).embed(n, lv_[n]); }

void require_same_shape(const Tensor1& a, const Tensor1& b) {
  if (a.dim() != b.dim() || a.cap() != b.cap()) throw ShapeError("Tensor1 shapes differ");
}

Tensor1& Tensor1::operator+=(const Tensor1& o) {
  require_same_shape(*this, o);
  for (int n = 2; n <= N_; ++n) lv_[n] += o.lv_[n];
  return *this;
}

Tensor1& Tensor1::operator-=(const Tensor1& o) {
  require_same_shape(*this, o);
  for (int n = 2; n <= N_; ++n) lv_[n] -= o.lv_[n];
  return *this;
}

Tensor1& Tensor1::operator*=(double c) {
  for (int n = 2; n <= N_; ++n) lv_[n] *= c;
  return *this;
}

double Tensor1::norm() const {
  double s = 0.0;
  for (int n = 2; n <= N_; ++n) s += lv_[n].squaredNorm();
  return std::sqrt(s);
}

Tensor1 Tensor1::with_cap(int newN) const {
  Tensor1 t(d_, newN);
  for (int n = 2; n <= std::min(N_, newN); ++n) t.lv_[n] = lv_[n];
  return t;
}

Tensor1 operator+(Tensor1 a, const Tensor1& b) { return a += b; }
Tensor1 operator-(Tensor1 a, const Tensor1& b) { return a -= b; }
Tensor1 operator*(double c, Tensor1 a) { return a *= c; }

GradedTensor0 cm_delta(const Tensor1& E) {
  const PeifferCache& c = PeifferCache::get(E.dim());
  GradedTensor0 r(E.dim(), E.cap());
  for (int n = 2; n <= E.cap(); ++n) r.level(n) = c.level(n).delta * E.level(n);
  return r;
}

GradedTensor0 cm_delta(const Tensor1Hat& E) {
  GradedTensor0 r = cm_delta(E.body);
  r.scalar() = E.unit;
  return r;
}

static std::vector<Eigen::VectorXd> bars(const Tensor1& E) {
  std::vector<Eigen::VectorXd> b(E.cap() + 1);
  for (int n = 2; n <= E.cap(); ++n)
    if (!E.level(n).isZero(0.0)) b[n] = E.bar_level(n);
  return b;
}

Tensor1 sandwich(const GradedTensor0& a, const Tensor1& E, const GradedTensor0& b) {
  const int d = E.dim(), N = E.cap();
  if (a.dim() != d || b.dim() != d) throw ShapeError("acting tensor has wrong dim");
  std::vector<Eigen::VectorXd> Eb = bars(E);
  std::vector<Eigen::VectorXd> out(N + 1);
  for (int n = 2; n <= N; ++n) out[n] = Eigen::VectorXd::Zero(bar::dim(d, n));
  for (int q = 2; q <= N; ++q) {
    if (!Eb[q].size()) continue;
    for (int p = 0; p <= std::min(a.cap(), N - q); ++p) {
      if (a.level(p).isZero(0.0)) continue;
      for (int r = 0; r <= std::min(b.cap(), N - q - p); ++r) {
        if (b.level(r).isZero(0.0)) continue;
        bar::sandwich_add(d, a.level(p), p, Eb[q], q, b.level(r), r, out[p + q + r]);
      }
    }
  }
  return Tensor1::from_bar(d, N, out);
}

Tensor1 act_left(const GradedTensor0& a, const Tensor1& E) {
  return sandwich(a, E, GradedTensor0::unit(E.dim(), 0));
}

Tensor1 act_right(const Tensor1& E, const GradedTensor0& a) {
  return sandwich(GradedTensor0::unit(E.dim(), 0), E, a);
}

Tensor1 star(const Tensor1& E, const Tensor1& F) {
  require_same_shape(E, F);
  const int d = E.dim(), N = E.cap();
  const PeifferCache& c = PeifferCache::get(d);
  std::vector<Eigen::VectorXd> Fb = bars(F);
  std::vector<Eigen::VectorXd> out(N + 1);
  for (int n = 4; n <= N; ++n) out[n] = Eigen::VectorXd::Zero(bar::dim(d, n));
  for (int p = 2; p + 2 <= N; ++p) {
    if (E.level(p).isZero(0.0)) continue;
    Eigen::VectorXd dE = c.level(p).delta * E.level(p);
    for (int q = 2; p + q <= N; ++q) {
      if (!Fb[q].size()) continue;
      out[p + q] += bar::left_mul(d, dE, p, Fb[q], q);
    }
  }
  return Tensor1::from_bar(d, N, out);
}

Tensor1 star_right_form(const Tensor1& E, const Tensor1& F) {
  require_same_shape(E, F);
  const int d = E.dim(), N = E.cap();
  const PeifferCache& c = PeifferCache::get(d);
  std::vector<Eigen::VectorXd> Eb = bars(E);
  std::vector<Eigen::VectorXd> out(N + 1);
  for (int n = 4; n <= N; ++n) out[n] = Eigen::VectorXd::Zero(bar::dim(d, n));
  for (int q = 2; q + 2 <= N; ++q) {
    if (F.level(q).isZero(0.0)) continue;
    Eigen::VectorXd dF = c.level(q).delta * F.level(q);
    for (int p = 2; p + q <= N; ++p) {
      if (!Eb[p].size()) continue;
      out[p + q] += bar::right_mul(d, Eb[p], p, dF, q);
    }
  }
  return Tensor1::from_bar(d, N, out);
}

Tensor1Hat star(const Tensor1Hat& E, const Tensor1Hat& F) {
  Tensor1 b = star(E.body, F.body);
  b += E.unit * F.body;
  b += F.unit * E.body;
  return {E.unit * F.unit, std::move(b)};
}

Tensor1Hat exp_star(const Tensor1& E) {
  const int N = E.cap();
  Tensor1Hat r = Tensor1Hat::one(E.dim(), N);
  Tensor1 term = E;
  for (int k = 1; 2 * k <= N; ++k) {
    if (k > 1) {
      term = star(term, E);
      term *= 1.0 / k;
    }
    r.body += term;
  }
  return r;
}

Tensor1 log_star(const Tensor1Hat& E) {
  if (std::abs(E.unit - 1.0) > 1e-12) throw DomainError("log_star needs unit scalar 1");
  const int N = E.cap();
  Tensor1 r(E.dim(), N);
  Tensor1 pw = E.body;
  for (int k = 1; 2 * k <= N; ++k) {
    if (k > 1) pw = star(pw, E.body);
    r += (((k % 2) ? 1.0 : -1.0) / k) * pw;
  }
  return r;
}

Tensor1Hat star_inverse(const Tensor1Hat& E) {
  if (E.unit == 0.0) throw DomainError("star inverse needs nonzero unit");
  const int N = E.cap();
  Tensor1 e = (1.0 / E.unit) * E.body;
  Tensor1Hat r = Tensor1Hat::one(E.dim(), N);
  Tensor1 pw = e;
  for (int k = 1; 2 * k <= N; ++k) {
    if (k > 1) pw = star(pw, e);
    r.body += ((k % 2) ? -1.0 : 1.0) * pw;
  }
  r.unit = 1.0 / E.unit;
  r.body *= 1.0 / E.unit;
  return r;
}

Tensor1 group_act(const GradedTensor0& g, const Tensor1& E) {
  if (std::abs(g.scalar() - 1.0) > 1e-12) throw DomainError("group action needs unit scalar");
  return sandwich(g, E, t0_inverse(g));
}

Tensor1Hat group_act(const GradedTensor0& g, const Tensor1Hat& E) { return {E.unit, group_act(g, E.body)}; }

double P_lambda(const Tensor1Hat& E, double lambda) {
  double s = std::abs(E.unit), lp = lambda * lambda;
  for (int n = 2; n <= E.cap(); ++n) {
    s += lp * E.body.level(n).norm();
    lp *= lambda;
  }
  return s;
}

double max_level_diff(const Tensor1& a, const Tensor1& b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (int n = 2; n <= a.cap(); ++n) m = std::max(m, (a.level(n) - b.level(n)).norm());
  return m;
}

double max_level_diff(const Tensor1Hat& a, const Tensor1Hat& b) {
  return std::max(std::abs(a.unit - b.unit), max_level_diff(a.body, b.body));
}

G1Basis g1_basis(int d, int N) {
  G1Basis B;
  B.d = d;
  B.N = N;
  B.ortho.resize(N + 1);
  const PeifferCache& c = build_cache(d, N);
  const int P = bar::pairs(d);
  for (int n = 2; n <= N; ++n) {
    const long nw = ipow(d, n - 2);
    Eigen::MatrixXd A(c.level(n).dim, nw * P);
    long col = 0;
    for (long w = 0; w < nw; ++w) {
      std::vector<int> letters = word_letters(d, n - 2, w);
      for (int pr = 0; pr < P; ++pr) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(bar::dim(d, 2));
        v[pr] = 1.0;
        for (int m = 2; m < n; ++m) {
          Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
          e[letters[n - 1 - m]] = 1.0;
          v = bar::left_mul(d, e, 1, v, m) - bar::right_mul(d, v, m, e, 1);
        }
        A.col(col++) = c.project(n, v);
      }
    }
    B.ortho[n] = detail::orthonormal_span(A);
  }
  return B;
}

bool is_grouplike_1(const Tensor1Hat& E, const G1Basis& basis, double tol) {
  if (std::abs(E.unit - 1.0) > tol) return false;
  if (basis.d != E.dim() || basis.N < E.cap()) throw ShapeError("g1 basis does not cover the element");
  Tensor1 l = log_star(E);
  for (int n = 2; n <= E.cap(); ++n) {
    const Eigen::MatrixXd& Q = basis.ortho[n];
    Eigen::VectorXd x = l.level(n);
    Eigen::VectorXd r = x - Q * (Q.transpose() * x);
    if (r.norm() > tol) return false;
  }
  return true;
}

Eigen::MatrixXd kernel_basis(int d, int n) {
  const PeifferLevel& L = PeifferCache::get(d).level(n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(L.delta, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double thr = 1e-10 * (sv.size() ? sv[0] : 0.0);
  long r = 0;
  while (r < sv.size() && sv[r] > thr) ++r;
  return svd.matrixV().rightCols(L.dim - r);
}

long peiffer_dim(int d, int n) { return PeifferCache::get(d).level(n).pf_basis.cols(); }

double delta_block_norm(int d, int n, int k) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(bar::delta_block(d, n, k));
  return svd.singularValues()[0];
}

}  // namespace surfsig
