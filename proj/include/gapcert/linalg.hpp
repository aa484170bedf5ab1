#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "gapcert/common.hpp"

namespace gapcert {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// A Hermitian operator given only through its action on vectors.
using ApplyFn = std::function<Vec(const Vec&)>;

Mat kron(const Mat& a, const Mat& b);

// Full eigensystem of a Hermitian matrix, eigenvalues ascending.
struct EigenSystem {
  RVec values;
  Mat vectors;  // columns
};
EigenSystem eigensystem(const Mat& a);

// Eigenvalues only (ascending).
RVec eigenvalues_only(const Mat& a);
double min_eigenvalue(const Mat& a);

// Largest singular value. Dense route uses the eigendecomposition of the
// Gram matrix; the apply route runs power iteration on A^dag A.
double op_norm(const Mat& a);
double op_norm_apply(const ApplyFn& apply, const ApplyFn& apply_adjoint,
                     Eigen::Index dim, double tol = 1e-10,
                     std::uint64_t seed = 777, int max_iter = 20000);

// Top right-singular vector of A (unit norm) together with the singular value.
std::pair<double, Vec> top_singular_pair(const Mat& a);

// Largest `count` eigenvalues (descending) and eigenvectors of a Hermitian
// operator, by Lanczos with full reorthogonalization and deflation.
struct LanczosResult {
  std::vector<double> values;
  std::vector<Vec> vectors;
  double worst_residual = 0.0;
};
LanczosResult lanczos_largest(const ApplyFn& apply, Eigen::Index dim, int count,
                              double tol = 1e-11, std::uint64_t seed = 12345,
                              int max_iter = 2000);

// Extreme (largest) eigenvalue of a Hermitian operator given by its action.
double lanczos_top_value(const ApplyFn& apply, Eigen::Index dim,
                         double tol = 1e-11, std::uint64_t seed = 12345,
                         int max_iter = 2000);

Vec random_state(Eigen::Index dim, Rng& rng);

}  // namespace gapcert
