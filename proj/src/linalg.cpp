#include "gapcert/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace gapcert {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

static void check_hermitian(const Mat& a) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double dev = (a - a.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-10 * scale)
    throw NumericsError("eigensystem: matrix not Hermitian, deviation " +
                        std::to_string(dev));
}

EigenSystem eigensystem(const Mat& a) {
  check_hermitian(a);
  Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (a + a.adjoint()));
  if (solver.info() != Eigen::Success)
    throw NumericsError("eigensystem: solver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RVec eigenvalues_only(const Mat& a) {
  check_hermitian(a);
  Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (a + a.adjoint()),
                                            Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericsError("eigenvalues_only: solver did not converge");
  return solver.eigenvalues();
}

double min_eigenvalue(const Mat& a) { return eigenvalues_only(a).minCoeff(); }

double op_norm(const Mat& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  // Singular values via the smaller Gram matrix.
  if (a.rows() <= a.cols()) {
    Mat g = a * a.adjoint();
    return std::sqrt(std::max(0.0, eigenvalues_only(g).maxCoeff()));
  }
  Mat g = a.adjoint() * a;
  return std::sqrt(std::max(0.0, eigenvalues_only(g).maxCoeff()));
}

std::pair<double, Vec> top_singular_pair(const Mat& a) {
  Mat g = a.adjoint() * a;
  EigenSystem es = eigensystem(g);
  const Eigen::Index last = g.rows() - 1;
  double sigma = std::sqrt(std::max(0.0, es.values(last)));
  return {sigma, es.vectors.col(last)};
}

Vec random_state(Eigen::Index dim, Rng& rng) {
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = rng.cgaussian();
  return v;
}

double op_norm_apply(const ApplyFn& apply, const ApplyFn& apply_adjoint,
                     Eigen::Index dim, double tol, std::uint64_t seed,
                     int max_iter) {
  Rng rng(seed);
  Vec v = random_state(dim, rng);
  double nv = v.norm();
  if (nv == 0.0) return 0.0;
  v /= nv;
  double prev = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vec w = apply_adjoint(apply(v));
    double lam = std::real(v.dot(w));  // Rayleigh quotient for A^dag A
    double nw = w.norm();
    if (nw < 1e-280) return std::sqrt(std::max(0.0, lam));
    v = w / nw;
    if (it > 4 && std::abs(lam - prev) <= tol * std::max(1.0, std::abs(lam)))
      return std::sqrt(std::max(0.0, lam));
    prev = lam;
  }
  return std::sqrt(std::max(0.0, prev));
}

LanczosResult lanczos_largest(const ApplyFn& apply, Eigen::Index dim, int count,
                              double tol, std::uint64_t seed, int max_iter) {
  LanczosResult out;
  Rng rng(seed);
  std::vector<Vec> deflated;

  auto deflate = [&](Vec v) {
    for (const Vec& u : deflated) v -= u * u.dot(v);
    return v;
  };

  for (int which = 0; which < count; ++which) {
    Vec q = deflate(random_state(dim, rng));
    double nq = q.norm();
    if (nq < 1e-14) break;  // deflated space exhausts the operator
    q /= nq;

    std::vector<Vec> basis;
    std::vector<double> alpha, beta;
    basis.push_back(q);
    double val = 0.0;
    Vec ritz;
    double resid = 1e300;
    const int m_max = std::min<Eigen::Index>(max_iter, dim);
    for (int j = 0; j < m_max; ++j) {
      Vec w = deflate(apply(basis[j]));
      double a = std::real(basis[j].dot(w));
      alpha.push_back(a);
      w -= a * basis[j];
      if (j > 0) w -= beta[j - 1] * basis[j - 1];
      // full reorthogonalization, twice
      for (int pass = 0; pass < 2; ++pass)
        for (const Vec& u : basis) w -= u * u.dot(w);
      double b = w.norm();

      // Ritz extraction every few steps
      if (b < 1e-13 || j + 1 == m_max || (j >= 8 && j % 4 == 0)) {
        const int m = static_cast<int>(alpha.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
          t(i, i) = alpha[i];
          if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tsol(t);
        const int top = m - 1;
        val = tsol.eigenvalues()(top);
        Eigen::VectorXd y = tsol.eigenvectors().col(top);
        ritz = Vec::Zero(dim);
        for (int i = 0; i < m; ++i) ritz += y(i) * basis[i];
        ritz = deflate(ritz);
        double nr = ritz.norm();
        if (nr > 1e-14) ritz /= nr;
        resid = (apply(ritz) - val * ritz).norm();
        if (resid <= tol * std::max(1.0, std::abs(val))) break;
        if (b < 1e-13) {
          // Krylov space exhausted; restart with a fresh vector if the
          // residual is still poor.
          if (resid > tol * std::max(1.0, std::abs(val))) {
            Vec fresh = deflate(random_state(dim, rng));
            double nf = fresh.norm();
            if (nf < 1e-14) break;
            for (const Vec& u : basis) fresh -= u * u.dot(fresh);
            nf = fresh.norm();
            if (nf < 1e-14) break;
            w = fresh;
            b = nf;
          } else {
            break;
          }
        }
      }
      if (j + 1 < m_max) {
        beta.push_back(b);
        basis.push_back(w / b);
      }
    }
    if (ritz.size() == 0) break;
    if (resid > 1e-6)
      throw NumericsError("lanczos: eigenpair " + std::to_string(which) +
                          " did not converge, residual " +
                          std::to_string(resid));
    out.values.push_back(val);
    out.vectors.push_back(ritz);
    out.worst_residual = std::max(out.worst_residual, resid);
    deflated.push_back(ritz);
  }
  return out;
}

double lanczos_top_value(const ApplyFn& apply, Eigen::Index dim, double tol,
                         std::uint64_t seed, int max_iter) {
  LanczosResult r = lanczos_largest(apply, dim, 1, tol, seed, max_iter);
  if (r.values.empty()) throw NumericsError("lanczos: no eigenvalue found");
  return r.values[0];
}

}  // namespace gapcert
