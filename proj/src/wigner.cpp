// Wigner matrices of SU(2) from the spin-l generators.
//
// D^l(alpha, beta, gamma) = exp(-i alpha Jz) exp(-i beta Jy) exp(-i gamma Jz)
// with Jz = diag(m), m = -l..l. The middle factor is built from a cached
// eigendecomposition Jy = V diag(mu) V^*, so every evaluation is a unitary
// similarity of a diagonal phase matrix.

#include <map>
#include <memory>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "psido/errors.hpp"
#include "psido/group.hpp"

namespace psido {

namespace {

struct SpinFrame {
  Eigen::VectorXd m;   // Jz eigenvalues in basis order
  Eigen::VectorXd mu;  // Jy eigenvalues
  CMatrix vectors;     // Jy eigenvectors
};

std::shared_ptr<const SpinFrame> build_frame(int two_l) {
  const int d = two_l + 1;
  const double l = two_l / 2.0;
  auto frame = std::make_shared<SpinFrame>();
  frame->m.resize(d);
  for (int i = 0; i < d; ++i) frame->m(i) = -l + i;

  // J+ |m> = sqrt(l(l+1) - m(m+1)) |m+1>, Jy = (J+ - J-) / 2i.
  CMatrix jplus = CMatrix::Zero(d, d);
  for (int i = 0; i + 1 < d; ++i) {
    const double mi = frame->m(i);
    jplus(i + 1, i) = std::sqrt(l * (l + 1.0) - mi * (mi + 1.0));
  }
  const CMatrix jy = (jplus - jplus.adjoint()) / cplx(0.0, 2.0);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(jy);
  if (es.info() != Eigen::Success) throw NumericError("spin generator eigendecomposition failed");
  frame->mu = es.eigenvalues();
  frame->vectors = es.eigenvectors();
  return frame;
}

std::shared_ptr<const SpinFrame> frame_for(int two_l) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const SpinFrame>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[two_l];
  if (!slot) slot = build_frame(two_l);
  return slot;
}

}  // namespace

CMatrix wigner_matrix(int two_l, double alpha, double beta, double gamma) {
  if (two_l < 0) throw ParameterError("spin must be non-negative");
  if (two_l == 0) return CMatrix::Identity(1, 1);
  const auto frame = frame_for(two_l);
  const int d = two_l + 1;

  Eigen::VectorXcd phases(d);
  for (int i = 0; i < d; ++i) phases(i) = std::polar(1.0, -beta * frame->mu(i));
  CMatrix out = frame->vectors * phases.asDiagonal() * frame->vectors.adjoint();

  for (int i = 0; i < d; ++i) {
    const cplx left = std::polar(1.0, -alpha * frame->m(i));
    for (int j = 0; j < d; ++j) out(i, j) *= left * std::polar(1.0, -gamma * frame->m(j));
  }
  return out;
}

}  // namespace psido
