#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "surfsig/errors.hpp"

namespace surfsig {

struct LieBasis;

// integer power for word-table sizes
inline long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Element of the truncated tensor algebra over R^d, levels 0..N.
// Level n is a dense table of d^n coefficients indexed base-d by word
// (first letter most significant). Letters are 0-based internally.
class GradedTensor0 {
 public:
  GradedTensor0() = default;
  GradedTensor0(int d, int N);

  static GradedTensor0 unit(int d, int N);
  static GradedTensor0 letter(int d, int N, int i, double c = 1.0);
  // level-1 element with the given coordinates
  static GradedTensor0 from_vector(const Eigen::VectorXd& v, int N);

  int dim() const { return d_; }
  int cap() const { return N_; }
  double scalar() const { return lv_[0][0]; }
  double& scalar() { return lv_[0][0]; }

  Eigen::VectorXd& level(int n) { return lv_[n]; }
  const Eigen::VectorXd& level(int n) const { return lv_[n]; }

  // coefficient by digit string over {1..d}, e.g. "12"; "" is the scalar
  double coeff(const std::string& word) const;
  double& coeff(const std::string& word);

  GradedTensor0& operator+=(const GradedTensor0& o);
  GradedTensor0& operator-=(const GradedTensor0& o);
  GradedTensor0& operator*=(double c);

  // same dim, levels copied up to min(cap, newN), zero above
  GradedTensor0 with_cap(int newN) const;

 private:
  int d_ = 0;
  int N_ = -1;
  std::vector<Eigen::VectorXd> lv_;
};

GradedTensor0 operator+(GradedTensor0 a, const GradedTensor0& b);
GradedTensor0 operator-(GradedTensor0 a, const GradedTensor0& b);
GradedTensor0 operator*(double c, GradedTensor0 a);

void require_same_shape(const GradedTensor0& a, const GradedTensor0& b);

// word <-> index helpers
long word_index(int d, const std::vector<int>& letters);
std::vector<int> word_letters(int d, int n, long idx);
std::string word_string(int d, int n, long idx);

// kron of two level tables: out[i*|b|+j] += c*a[i]*b[j]
void kron_add(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double c, double* out);

GradedTensor0 t0_mul(const GradedTensor0& a, const GradedTensor0& b);
GradedTensor0 operator*(const GradedTensor0& a, const GradedTensor0& b);

GradedTensor0 t0_exp(const GradedTensor0& x);
GradedTensor0 t0_log(const GradedTensor0& y);
GradedTensor0 t0_inverse(const GradedTensor0& g);

// exp of a level-1 vector, exact up to cap
GradedTensor0 exp_letter_vector(const Eigen::VectorXd& v, int N);

struct NormParams {
  double lambda = 1.0;
};

double p_lambda(const GradedTensor0& a, NormParams p = {});
double level_norm(const GradedTensor0& a, int n);
// max over levels of the Euclidean level norm of a - b
double max_level_diff(const GradedTensor0& a, const GradedTensor0& b);

// log(g) lies levelwise in the span of the free Lie basis within tol
bool t0_is_grouplike(const GradedTensor0& g, const LieBasis& basis, double tol = 1e-9);

// Lie bracket ab - ba
GradedTensor0 bracket(const GradedTensor0& a, const GradedTensor0& b);

}  // namespace surfsig
