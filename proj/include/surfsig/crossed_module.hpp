#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "surfsig/graded_tensor.hpp"

namespace surfsig {

// Bar bimodule coordinates. Level n (n >= 2) has blocks k = 0..n-2; block k
// holds the words e_{q1..qk} . e_{ij} . e_{q(k+1)..q(n-2)} with i < j, indexed
// ((prefix * P + pair) * d^(n-2-k) + suffix), P = C(d,2).
namespace bar {

int pairs(int d);
int pair_index(int d, int i, int j);
std::pair<int, int> pair_of(int d, int idx);
long block_len(int d, int n);
long dim(int d, int n);

// a (level p word table) acting on the left of a level-q bar vector
Eigen::VectorXd left_mul(int d, const Eigen::VectorXd& a, int p, const Eigen::VectorXd& v, int q);
Eigen::VectorXd right_mul(int d, const Eigen::VectorXd& v, int q, const Eigen::VectorXd& b, int r);
// out (level p+q+r) += a . v . b
void sandwich_add(int d, const Eigen::VectorXd& a, int p, const Eigen::VectorXd& v, int q, const Eigen::VectorXd& b,
                  int r, Eigen::VectorXd& out);

Eigen::MatrixXd delta_matrix(int d, int n);
Eigen::MatrixXd delta_block(int d, int n, int k);
std::string label(int d, int n, long idx);

}  // namespace bar

struct PeifferLevel {
  int n = 0;
  long bar_dim = 0;
  long dim = 0;  // dim of the Pf-orthogonal frame
  bool identity = true;
  Eigen::MatrixXd frame;      // bar_dim x dim, orthonormal columns (empty when identity)
  Eigen::MatrixXd pf_basis;   // bar_dim x dim(Pf)
  Eigen::MatrixXd delta_bar;  // d^n x bar_dim
  Eigen::MatrixXd delta;      // d^n x dim
};

// Per-d cache of Peiffer subspaces and quotient frames. Level n data does not
// depend on the truncation cap, so one cache serves every N.
class PeifferCache {
 public:
  explicit PeifferCache(int d) : d_(d) {}
  static const PeifferCache& get(int d);

  int dim() const { return d_; }
  const PeifferLevel& level(int n) const;

  Eigen::VectorXd embed(int n, const Eigen::VectorXd& c) const;
  Eigen::VectorXd project(int n, const Eigen::VectorXd& v) const;

 private:
  int d_;
  mutable std::mutex mu_;
  mutable std::vector<std::unique_ptr<PeifferLevel>> levels_;
};

const PeifferCache& build_cache(int d, int N);

// Element of the truncated quotient space, levels 2..N in frame coordinates.
class Tensor1 {
 public:
  Tensor1() = default;
  Tensor1(int d, int N);

  static Tensor1 wedge(int d, int N, int i, int j, double c = 1.0);
  static Tensor1 from_bar(int d, int N, const std::vector<Eigen::VectorXd>& bar_levels);

  int dim() const { return d_; }
  int cap() const { return N_; }
  Eigen::VectorXd& level(int n) { return lv_[n]; }
  const Eigen::VectorXd& level(int n) const { return lv_[n]; }
  Eigen::VectorXd bar_level(int n) const;

  Tensor1& operator+=(const Tensor1& o);
  Tensor1& operator-=(const Tensor1& o);
  Tensor1& operator*=(double c);

  double norm() const;
  Tensor1 with_cap(int newN) const;

 private:
  int d_ = 0;
  int N_ = -1;
  std::vector<Eigen::VectorXd> lv_;
};

Tensor1 operator+(Tensor1 a, const Tensor1& b);
Tensor1 operator-(Tensor1 a, const Tensor1& b);
Tensor1 operator*(double c, Tensor1 a);

// Tensor1 with an adjoined unit scalar.
struct Tensor1Hat {
  double unit = 1.0;
  Tensor1 body;

  Tensor1Hat() = default;
  Tensor1Hat(double u, Tensor1 b) : unit(u), body(std::move(b)) {}
  static Tensor1Hat one(int d, int N) { return {1.0, Tensor1(d, N)}; }
  int dim() const { return body.dim(); }
  int cap() const { return body.cap(); }
};

void require_same_shape(const Tensor1& a, const Tensor1& b);

GradedTensor0 cm_delta(const Tensor1& E);
GradedTensor0 cm_delta(const Tensor1Hat& E);

// Caps of the acting tensor and E must agree; words past the cap are dropped.
Tensor1 act_left(const GradedTensor0& a, const Tensor1& E);
Tensor1 act_right(const Tensor1& E, const GradedTensor0& a);
Tensor1 sandwich(const GradedTensor0& a, const Tensor1& E, const GradedTensor0& b);

Tensor1 star(const Tensor1& E, const Tensor1& F);
Tensor1Hat star(const Tensor1Hat& E, const Tensor1Hat& F);
// delta(E) . F and E . delta(F) computed separately, for Peiffer checks
Tensor1 star_right_form(const Tensor1& E, const Tensor1& F);

Tensor1Hat exp_star(const Tensor1& E);
Tensor1 log_star(const Tensor1Hat& E);
Tensor1Hat star_inverse(const Tensor1Hat& E);

Tensor1Hat group_act(const GradedTensor0& g, const Tensor1Hat& E);
Tensor1 group_act(const GradedTensor0& g, const Tensor1& E);

double P_lambda(const Tensor1Hat& E, double lambda);
double max_level_diff(const Tensor1& a, const Tensor1& b);
double max_level_diff(const Tensor1Hat& a, const Tensor1Hat& b);

// Orthonormal bases (frame coordinates) of the embedded Lie algebra spanned by
// projected ad-words [x1,[x2,...,[xk, e_ij]]].
struct G1Basis {
  int d = 0;
  int N = 0;
  std::vector<Eigen::MatrixXd> ortho;
};
G1Basis g1_basis(int d, int N);
bool is_grouplike_1(const Tensor1Hat& E, const G1Basis& basis, double tol = 1e-9);

// numerical null space of delta on level n, frame coordinates
Eigen::MatrixXd kernel_basis(int d, int n);

// Peiffer subspace dimension and the delta operator norm of one (n,k) block
long peiffer_dim(int d, int n);
double delta_block_norm(int d, int n, int k);

}  // namespace surfsig
