#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "surfsig/crossed_module.hpp"
#include "surfsig/surface_grid.hpp"
#include "surfsig/surface_signature.hpp"

namespace surfsig {

// W1 = R^(n+p) --phi--> W0 = R^(n+m), phi = [[I_n, 0], [0, 0]].
struct TwoVectorSpace {
  int n = 2;
  int m = 1;
  int p = 1;

  int dim0() const { return n + m; }
  int dim1() const { return n + p; }
  Eigen::MatrixXd phi() const;
};

void validate(const TwoVectorSpace& v);

// Chain map: g on W0, f on W1 with phi f = g phi.
struct ChainMap {
  Eigen::MatrixXd g;
  Eigen::MatrixXd f;
};

ChainMap chain_identity(const TwoVectorSpace& v);
ChainMap operator*(const ChainMap& a, const ChainMap& b);
double chain_map_residual(const TwoVectorSpace& v, const ChainMap& a);

// Crossed module of chain maps and homotopies H: W0 -> W1.
ChainMap ch_delta(const TwoVectorSpace& v, const Eigen::MatrixXd& H);  // (phi H, H phi)
Eigen::MatrixXd ch_star(const TwoVectorSpace& v, const Eigen::MatrixXd& H, const Eigen::MatrixXd& K);  // H phi K
Eigen::MatrixXd ch_act_left(const ChainMap& a, const Eigen::MatrixXd& H);                            // f H
Eigen::MatrixXd ch_act_right(const Eigen::MatrixXd& H, const ChainMap& a);                           // H g

// beta[i] on W0 and alpha[i] on W1 per letter, gamma[q] per wedge pair q.
struct ChainConnection {
  TwoVectorSpace tvs;
  int d = 0;
  std::vector<Eigen::MatrixXd> beta;
  std::vector<Eigen::MatrixXd> alpha;
  std::vector<Eigen::MatrixXd> gamma;

  ChainMap letter(int i) const { return {beta[i], alpha[i]}; }
  // A(dx) and gamma(J) for coordinate vectors
  ChainMap one_form(const Eigen::VectorXd& dx) const;
  Eigen::MatrixXd two_form(const Eigen::VectorXd& J) const;
};

double fake_flatness_residual(const ChainConnection& c);
// shapes, chain-map property and fake-flatness
void validate(const ChainConnection& c, double tol = 1e-10);

// Minimal-norm gamma(u^v) with phi gamma = [beta_u, beta_v] and
// gamma phi = [alpha_u, alpha_v]; throws when the system has no solution.
std::vector<Eigen::MatrixXd> solve_gamma(const TwoVectorSpace& v, int d, const std::vector<Eigen::MatrixXd>& beta,
                                         const std::vector<Eigen::MatrixXd>& alpha, double tol = 1e-10);

// Random chain maps with commuting lower-right blocks, gamma solved and a
// random multiple of its free block added.
ChainConnection random_fake_flat(const TwoVectorSpace& v, int d, std::uint64_t seed, double scale = 1.0);

// alpha, beta scaled by eps and gamma by eps^2
ChainConnection scaled(const ChainConnection& c, double eps);

// transport of the piecewise linear path through the given points
ChainMap chain_transport(const std::vector<Eigen::VectorXd>& path, const ChainConnection& c);

struct HolonomyOptions {
  int t_steps = 8;
  int s_nodes = 8;
  SRule rule = SRule::trapezoid;
};

// dh/dt = (I + h phi) int f gamma(J) g^-1 ds over the whole grid
Eigen::MatrixXd matrix_surface_holonomy(const SurfaceGrid& g, const ChainConnection& c,
                                        const HolonomyOptions& opt = {});

// Morphism of crossed modules determined by the connection, on levels <= N.
class UniversalMorphism {
 public:
  UniversalMorphism(const ChainConnection& c, int N);

  int cap() const { return N_; }
  // image of the word with index idx among the d^k words of length k <= N
  const ChainMap& word(int k, long idx) const;
  ChainMap word(const std::vector<int>& letters) const;
  Eigen::MatrixXd on_bar(int n, const Eigen::VectorXd& v) const;
  Eigen::MatrixXd operator()(const Tensor1& E) const;
  // largest image of a Peiffer basis element
  double peiffer_residual() const { return peiffer_; }

 private:
  ChainConnection c_;
  int N_;
  std::vector<std::vector<ChainMap>> words_;
  double peiffer_ = 0.0;
};

// throws when the Peiffer images exceed tol
UniversalMorphism universal_factorization(const ChainConnection& c, int N, double tol = 1e-10);

struct UniversalCheck {
  Eigen::MatrixXd ode;
  Eigen::MatrixXd factored;
  double gap = 0.0;
  double rel_gap = 0.0;
};

// Holonomy of the eps-scaled connection against the morphism applied to the
// level-N surface signature, both with the same quadrature.
UniversalCheck universal_check(const SurfaceGrid& g, const ChainConnection& c, int N, double eps,
                               const HolonomyOptions& opt = {});

}  // namespace surfsig
