#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "surfsig/crossed_module.hpp"
#include "surfsig/graded_tensor.hpp"

namespace surfsig {

// Node of a bracket expression; letter >= 0 for leaves.
struct LieNode {
  int letter = -1;
  int left = -1;
  int right = -1;
  int degree = 1;
};

// Hall basis compatible with the derived series: H_0 = letters and H_{k+1}
// built from H_k by nested brackets [a1,...,[a_{m-1},a_m]] with
// a1 <= ... <= a_{m-1} > a_m. Layers are ordered H_0 > H_1 > ..., within a
// layer by degree then by the index sequence.
struct LieBasis {
  int d = 0;
  int N = 0;
  std::vector<LieNode> nodes;
  std::vector<int> elements;                 // node ids, in basis order
  std::vector<int> layer;                    // derived-series layer per element
  std::vector<std::vector<int>> by_degree;   // element positions per degree
  std::vector<Eigen::MatrixXd> expansions;   // per degree: d^n x count
  std::vector<Eigen::MatrixXd> ortho;        // per degree: orthonormal span

  std::string to_string(int element) const;
  Eigen::VectorXd expand(int node) const;
};

LieBasis hall_basis(int d, int N);
long witt_count(int d, int n);

// Generator ad_{a1} ... ad_{a(m-2)} [e_lo, e_hi], lo < hi, a1 <= ... <= a(m-2) <= hi.
struct CommutantGenerator {
  std::vector<int> prefix;
  int lo = 0;
  int hi = 1;
  int degree() const { return static_cast<int>(prefix.size()) + 2; }
  std::string to_string() const;
};

struct GeneratorWord {
  std::vector<int> gens;  // indices into generators
  int degree = 0;
};

struct CommutantBasis {
  int d = 0;
  int N = 0;
  std::vector<CommutantGenerator> generators;
  std::vector<std::vector<int>> gens_by_degree;
  std::vector<std::vector<GeneratorWord>> words;  // per level
  std::vector<Eigen::MatrixXd> expansions;        // per level: d^n x |words|
  std::vector<Eigen::MatrixXd> pinv;              // per level: |words| x d^n
  std::vector<Eigen::MatrixXd> section;           // per level: dim T1 x |words|

  static const CommutantBasis& get(int d, int N);
};

CommutantBasis commutant_generators(int d, int N);

Eigen::VectorXd generator_expansion(int d, const CommutantGenerator& g);
Tensor1 section_s(const CommutantGenerator& g, int d, int N);

struct Decomposition {
  Eigen::VectorXd coeffs;
  double residual = 0.0;
};

// least squares over the generator-word basis of level n; throws when the
// residual exceeds rel_tol * |b|
Decomposition decompose_in_commutant(const Eigen::VectorXd& b, int n, const CommutantBasis& basis,
                                     double rel_tol = 1e-8);

// level-n slice to Tensor1 (cap basis.N)
Tensor1 algebra_section(const Eigen::VectorXd& b, int n, const CommutantBasis& basis, double rel_tol = 1e-8);
// all levels >= 2 of a tensor
Tensor1 algebra_section(const GradedTensor0& b, const CommutantBasis& basis, double rel_tol = 1e-8);

// minimal-norm preimage under delta on level n
Eigen::VectorXd min_norm_preimage(const Eigen::VectorXd& b, int d, int n);

}  // namespace surfsig
