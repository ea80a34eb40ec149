#pragma once

// Positive metrics h and involutions sigma adapted to an indefinite hermitian
// form eta: h(v, w) = eta(v, sigma w). Hermitian forms are matrices A with
// A(v, w) = v^* A w.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace tautsig::clifford {

using CMatrix = Eigen::MatrixXcd;

class CompatiblePairError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kCompatibleTolerance = 1e-12;

struct CompatiblePair {
  CMatrix h;
  CMatrix sigma;
};

struct CompatiblePairReport {
  double involution_residual = 0;  // |sigma^2 - 1|
  double form_residual = 0;        // |h - eta sigma|
  double isometry_residual = 0;    // |sigma^* h sigma - h|
  double hermitian_residual = 0;   // |h - h^*|
  double min_eigenvalue = 0;       // of h
  bool ok(double tol = kCompatibleTolerance) const {
    return involution_residual < tol && form_residual < tol && isometry_residual < tol &&
           hermitian_residual < tol && min_eigenvalue > 0;
  }
};

inline double relative_norm(const CMatrix& a, const CMatrix& scale) {
  return a.norm() / std::max(1.0, scale.norm());
}

/// Polar decomposition route: S = h0^{-1} eta is h0-self-adjoint, |S| is its
/// h0-absolute value, h = h0 |S| and sigma = S |S|^{-1}.
inline CompatiblePair compatible_pair(const CMatrix& eta, const CMatrix& h0) {
  const auto r = eta.rows();
  if (eta.cols() != r || h0.rows() != r || h0.cols() != r) throw CompatiblePairError("shape mismatch");
  if ((eta - eta.adjoint()).norm() > kCompatibleTolerance * std::max(1.0, eta.norm()))
    throw CompatiblePairError("eta is not hermitian");
  if ((h0 - h0.adjoint()).norm() > kCompatibleTolerance * std::max(1.0, h0.norm()))
    throw CompatiblePairError("h0 is not hermitian");
  Eigen::LLT<CMatrix> llt(h0);
  if (llt.info() != Eigen::Success) throw CompatiblePairError("h0 is not positive definite");
  Eigen::SelfAdjointEigenSolver<CMatrix> eta_eig(eta);
  const double eta_scale = eta_eig.eigenvalues().cwiseAbs().maxCoeff();
  if (eta_eig.eigenvalues().cwiseAbs().minCoeff() <= 1e-12 * std::max(1.0, eta_scale))
    throw CompatiblePairError("eta is singular");

  const CMatrix l = llt.matrixL();
  const CMatrix l_inv = l.inverse();
  // S~ = L^{-1} eta L^{-*} is hermitian and S = L^{-*} S~ L^*.
  CMatrix s_tilde = l_inv * eta * l_inv.adjoint();
  s_tilde = 0.5 * (s_tilde + s_tilde.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(s_tilde);
  const auto& vals = eig.eigenvalues();
  const CMatrix& u = eig.eigenvectors();
  const CMatrix abs_tilde = u * vals.cwiseAbs().cast<std::complex<double>>().asDiagonal() * u.adjoint();
  const CMatrix sign_tilde = u * vals.unaryExpr([](double x) { return x > 0 ? 1.0 : -1.0; })
                                   .cast<std::complex<double>>()
                                   .asDiagonal() *
                             u.adjoint();
  const CMatrix l_adj = l.adjoint();
  const CMatrix l_adj_inv = l_inv.adjoint();
  CompatiblePair out;
  // |S| = L^{-*} |S~| L^*, h = h0 |S| = L |S~| L^*; sigma = L^{-*} sign(S~) L^*.
  out.h = l * abs_tilde * l_adj;
  out.h = 0.5 * (out.h + out.h.adjoint()).eval();
  out.sigma = l_adj_inv * sign_tilde * l_adj;
  return out;
}

inline CompatiblePairReport check_compatible_pair(const CMatrix& eta, const CompatiblePair& pair) {
  const auto r = eta.rows();
  const CMatrix id = CMatrix::Identity(r, r);
  CompatiblePairReport rep;
  rep.involution_residual = relative_norm(pair.sigma * pair.sigma - id, id);
  rep.form_residual = relative_norm(pair.h - eta * pair.sigma, pair.h);
  rep.isometry_residual = relative_norm(pair.sigma.adjoint() * pair.h * pair.sigma - pair.h, pair.h);
  rep.hermitian_residual = relative_norm(pair.h - pair.h.adjoint(), pair.h);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(pair.h);
  rep.min_eigenvalue = eig.eigenvalues().minCoeff();
  return rep;
}

/// Largest change of (h, sigma) under perturbations of h0 of size `delta`
/// along the given hermitian directions, divided by delta.
inline double continuity_ratio(const CMatrix& eta, const CMatrix& h0, const std::vector<CMatrix>& directions,
                               double delta) {
  auto base = compatible_pair(eta, h0);
  double worst = 0;
  for (const auto& dir : directions) {
    auto moved = compatible_pair(eta, h0 + delta * dir);
    double change = std::max((moved.h - base.h).norm(), (moved.sigma - base.sigma).norm());
    worst = std::max(worst, change / delta);
  }
  return worst;
}

}  // namespace tautsig::clifford
