#pragma once

#include <Eigen/Dense>

namespace surfsig::detail {

// Orthonormal bases of range(A) and its orthogonal complement, rank decided by
// pivoted QR with the given threshold relative to the largest pivot.
struct RangeSplit {
  Eigen::MatrixXd range;
  Eigen::MatrixXd complement;
};

inline RangeSplit range_split(const Eigen::MatrixXd& A, double rel = 1e-10, bool want_complement = true) {
  const long m = A.rows();
  RangeSplit out;
  if (A.cols() == 0 || A.isZero(0.0)) {
    out.range = Eigen::MatrixXd::Zero(m, 0);
    if (want_complement) out.complement = Eigen::MatrixXd::Identity(m, m);
    return out;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(rel);
  const long r = qr.rank();
  if (want_complement) {
    Eigen::MatrixXd Q = qr.householderQ();
    out.range = Q.leftCols(r);
    out.complement = Q.rightCols(m - r);
  } else {
    out.range = qr.householderQ() * Eigen::MatrixXd::Identity(m, r);
  }
  return out;
}

inline Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& A, double rel = 1e-10) {
  return range_split(A, rel, false).range;
}

}  // namespace surfsig::detail
