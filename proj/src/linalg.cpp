#include "gausstat/linalg.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace gausstat::linalg {

CMat hermitian_function(const CMat& h, const std::function<double(double)>& f) {
  const CMat sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "hermitian eigendecomposition failed");
  }
  CVec fl(sym.rows());
  for (Eigen::Index k = 0; k < sym.rows(); ++k) fl(k) = f(es.eigenvalues()(k));
  return es.eigenvectors() * fl.asDiagonal() * es.eigenvectors().adjoint();
}

CMat expi_hermitian(const CMat& h) {
  const CMat sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::Numerical, "hermitian eigendecomposition failed");
  }
  CVec ph(sym.rows());
  for (Eigen::Index k = 0; k < sym.rows(); ++k) ph(k) = std::polar(1.0, es.eigenvalues()(k));
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

CMat log_unitary(const CMat& u) {
  // Schur form of a normal matrix is diagonal.
  Eigen::ComplexSchur<CMat> schur(u);
  const CMat& t = schur.matrixT();
  const CMat& q = schur.matrixU();
  CVec ph(u.rows());
  for (Eigen::Index k = 0; k < u.rows(); ++k) ph(k) = wrap_angle(std::arg(t(k, k)));
  CMat phi = q * ph.asDiagonal() * q.adjoint();
  return 0.5 * (phi + phi.adjoint());
}

double max_abs(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
double max_abs(const RMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

RMat omega(int modes) {
  RMat w = RMat::Zero(2 * modes, 2 * modes);
  w.topRightCorner(modes, modes) = RMat::Identity(modes, modes);
  w.bottomLeftCorner(modes, modes) = -RMat::Identity(modes, modes);
  return w;
}

double wrap_angle(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double y = std::fmod(x, two_pi);
  if (y <= -std::numbers::pi) y += two_pi;
  if (y > std::numbers::pi) y -= two_pi;
  return y;
}

} // namespace gausstat::linalg
