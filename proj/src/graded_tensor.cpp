#include "surfsig/graded_tensor.hpp"

#include <cmath>

#include "surfsig/free_lie.hpp"

namespace surfsig {

GradedTensor0::GradedTensor0(int d, int N) : d_(d), N_(N) {
  if (d < 1 || N < 0) throw ShapeError("tensor needs d >= 1 and N >= 0");
  lv_.resize(N + 1);
  for (int n = 0; n <= N; ++n) lv_[n] = Eigen::VectorXd::Zero(ipow(d, n));
}

GradedTensor0 GradedTensor0::unit(int d, int N) {
  GradedTensor0 t(d, N);
  t.lv_[0][0] = 1.0;
  return t;
}

GradedTensor0 GradedTensor0::letter(int d, int N, int i, double c) {
  GradedTensor0 t(d, N);
  if (i < 0 || i >= d) throw ShapeError("letter out of range");
  if (N >= 1) t.lv_[1][i] = c;
  return t;
}

GradedTensor0 GradedTensor0::from_vector(const Eigen::VectorXd& v, int N) {
  GradedTensor0 t(static_cast<int>(v.size()), N);
  if (N >= 1) t.lv_[1] = v;
  return t;
}

static long parse_word(int d, const std::string& word) {
  long idx = 0;
  for (char ch : word) {
    int l = ch - '1';
    if (l < 0 || l >= d) throw DomainError("bad letter in word '" + word + "'");
    idx = idx * d + l;
  }
  return idx;
}

double GradedTensor0::coeff(const std::string& word) const {
  if (static_cast<int>(word.size()) > N_) return 0.0;
  return lv_[word.size()][parse_word(d_, word)];
}

double& GradedTensor0::coeff(const std::string& word) {
  if (static_cast<int>(word.size()) > N_) throw ShapeError("word longer than cap");
  return lv_[word.size()][parse_word(d_, word)];
}

void require_same_shape(const GradedTensor0& a, const GradedTensor0& b) {
  if (a.dim() != b.dim() || a.cap() != b.cap())
    throw ShapeError("tensor shapes differ (d=" + std::to_string(a.dim()) + ",N=" + std::to_string(a.cap()) +
                     " vs d=" + std::to_string(b.dim()) + ",N=" + std::to_string(b.cap()) + ")");
}

GradedTensor0& GradedTensor0::operator+=(const GradedTensor0& o) {
  require_same_shape(*this, o);
  for (int n = 0; n <= N_; ++n) lv_[n] += o.lv_[n];
  return *this;
}

GradedTensor0& GradedTensor0::operator-=(const GradedTensor0& o) {
  require_same_shape(*this, o);
  for (int n = 0; n <= N_; ++n) lv_[n] -= o.lv_[n];
  return *this;
}

GradedTensor0& GradedTensor0::operator*=(double c) {
  for (auto& l : lv_) l *= c;
  return *this;
}

GradedTensor0 GradedTensor0::with_cap(int newN) const {
  GradedTensor0 t(d_, newN);
  for (int n = 0; n <= std::min(N_, newN); ++n) t.lv_[n] = lv_[n];
  return t;
}

GradedTensor0 operator+(GradedTensor0 a, const GradedTensor0& b) { return a += b; }
GradedTensor0 operator-(GradedTensor0 a, const GradedTensor0& b) { return a -= b; }
GradedTensor0 operator*(double c, GradedTensor0 a) { return a *= c; }

long word_index(int d, const std::vector<int>& letters) {
  long idx = 0;
  for (int l : letters) idx = idx * d + l;
  return idx;
}

std::vector<int> word_letters(int d, int n, long idx) {
  std::vector<int> w(n);
  for (int i = n - 1; i >= 0; --i) {
    w[i] = static_cast<int>(idx % d);
    idx /= d;
  }
  return w;
}

std::string word_string(int d, int n, long idx) {
  std::string s;
  for (int l : word_letters(d, n, idx)) s.push_back(static_cast<char>('1' + l));
  return s;
}

void kron_add(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double c, double* out) {
  const long nb = b.size();
  for (long i = 0; i < a.size(); ++i) {
    double ai = c * a[i];
    if (ai == 0.0) continue;
    Eigen::Map<Eigen::VectorXd>(out + i * nb, nb) += ai * b;
  }
}

GradedTensor0 t0_mul(const GradedTensor0& a, const GradedTensor0& b) {
  require_same_shape(a, b);
  const int N = a.cap();
  GradedTensor0 r(a.dim(), N);
  for (int n = 0; n <= N; ++n) {
    double* out = r.level(n).data();
    for (int k = 0; k <= n; ++k) kron_add(a.level(k), b.level(n - k), 1.0, out);
  }
  return r;
}

GradedTensor0 operator*(const GradedTensor0& a, const GradedTensor0& b) { return t0_mul(a, b); }

GradedTensor0 t0_exp(const GradedTensor0& x) {
  if (std::abs(x.scalar()) > 0.0) throw DomainError("exp needs zero scalar part");
  const int N = x.cap();
  GradedTensor0 r = GradedTensor0::unit(x.dim(), N);
  GradedTensor0 term = r;
  for (int k = 1; k <= N; ++k) {
    term = t0_mul(term, x);
    term *= 1.0 / k;
    r += term;
  }
  return r;
}

GradedTensor0 t0_log(const GradedTensor0& y) {
  if (std::abs(y.scalar() - 1.0) > 1e-12) throw DomainError("log needs unit scalar part");
  const int N = y.cap();
  GradedTensor0 ybar = y;
  ybar.scalar() = 0.0;
  GradedTensor0 r(y.dim(), N);
  GradedTensor0 pw = GradedTensor0::unit(y.dim(), N);
  for (int k = 1; k <= N; ++k) {
    pw = t0_mul(pw, ybar);
    GradedTensor0 t = pw;
    t *= ((k % 2) ? 1.0 : -1.0) / k;
    r += t;
  }
  return r;
}

GradedTensor0 t0_inverse(const GradedTensor0& g) {
  if (std::abs(g.scalar() - 1.0) > 1e-12) throw DomainError("inverse needs unit scalar part");
  const int N = g.cap();
  GradedTensor0 u = GradedTensor0::unit(g.dim(), N);
  GradedTensor0 m = u - g;
  GradedTensor0 r = u;
  GradedTensor0 pw = u;
  for (int k = 1; k <= N; ++k) {
    pw = t0_mul(pw, m);
    r += pw;
  }
  return r;
}

GradedTensor0 exp_letter_vector(const Eigen::VectorXd& v, int N) {
  const int d = static_cast<int>(v.size());
  GradedTensor0 r = GradedTensor0::unit(d, N);
  for (int k = 1; k <= N; ++k) {
    Eigen::VectorXd& out = r.level(k);
    kron_add(r.level(k - 1), v, 1.0 / k, out.data());
  }
  return r;
}

double p_lambda(const GradedTensor0& a, NormParams p) {
  if (!(p.lambda > 0)) throw DomainError("lambda must be positive");
  double s = 0.0, lp = 1.0;
  for (int n = 0; n <= a.cap(); ++n) {
    s += lp * a.level(n).norm();
    lp *= p.lambda;
  }
  return s;
}

double level_norm(const GradedTensor0& a, int n) { return n <= a.cap() ? a.level(n).norm() : 0.0; }

double max_level_diff(const GradedTensor0& a, const GradedTensor0& b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (int n = 0; n <= a.cap(); ++n) m = std::max(m, (a.level(n) - b.level(n)).norm());
  return m;
}

bool t0_is_grouplike(const GradedTensor0& g, const LieBasis& basis, double tol) {
  if (std::abs(g.scalar() - 1.0) > tol) return false;
  if (basis.d != g.dim() || basis.N < g.cap()) throw ShapeError("Lie basis does not cover the tensor");
  GradedTensor0 l = t0_log(g);
  for (int n = 1; n <= g.cap(); ++n) {
    const Eigen::MatrixXd& Q = basis.ortho[n];
    Eigen::VectorXd x = l.level(n);
    Eigen::VectorXd r = Q.cols() ? Eigen::VectorXd(x - Q * (Q.transpose() * x)) : x;
    if (r.norm() > tol) return false;
  }
  return true;
}

GradedTensor0 bracket(const GradedTensor0& a, const GradedTensor0& b) { return t0_mul(a, b) - t0_mul(b, a); }

}  // namespace surfsig
