#include "opkernel/channel.hpp"

#include <sstream>

#include "opkernel/rng.hpp"

namespace opk {

Effect effect_from_matrix(const Matrix& A, double tol) {
  if (A.rows() != A.cols())
    throw InvalidArgumentError("effect: matrix must be square");
  const double herm = (A - Matrix(A.adjoint())).norm();
  if (herm > kHermitianTol * std::max(1.0, A.norm()))
    throw InvalidEffectError("effect: matrix is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (A + Matrix(A.adjoint())));
  RealVector lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -tol || lam(i) > 1.0 + tol) {
      std::ostringstream os;
      os << "effect: eigenvalue " << lam(i) << " outside [0,1] beyond tol";
      throw InvalidEffectError(os.str());
    }
    lam(i) = std::min(1.0, std::max(0.0, lam(i)));
  }
  Effect effect;
  effect.A =
      es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
  effect.A = 0.5 * (effect.A + Matrix(effect.A.adjoint()));
  effect.sqrtA = es.eigenvectors() *
                 RealVector(lam.array().sqrt()).asDiagonal() *
                 es.eigenvectors().adjoint();
  effect.sqrtA = 0.5 * (effect.sqrtA + Matrix(effect.sqrtA.adjoint()));
  return effect;
}

Effect effect_from_certificate(const DominationCertificate& cert, double tol) {
  return effect_from_matrix(cert.A, tol);
}

Effect scalar_effect(double lambda, Eigen::Index dim) {
  if (lambda < 0.0 || lambda > 1.0)
    throw InvalidArgumentError("scalar effect: lambda must lie in [0,1]");
  return effect_from_matrix(lambda * Matrix::Identity(dim, dim));
}

Matrix apply(const Effect& effect, const Matrix& T) {
  if (T.rows() != effect.dim() || T.cols() != effect.dim())
    throw InvalidArgumentError("apply: dimension mismatch");
  return effect.sqrtA * T * effect.sqrtA;
}

OperatorKernel simulate_kernel(const OperatorKernel& L,
                               const Factorization& fact_L,
                               const Effect& effect) {
  if (fact_L.points != L.points() || fact_L.hdim != L.hdim() ||
      fact_L.algebra->signature() != L.algebra()->signature())
    throw InvalidArgumentError(
        "simulate_kernel: factorization does not belong to this kernel");
  if (effect.dim() != fact_L.r)
    throw InvalidArgumentError(
        "simulate_kernel: effect dimension does not match the feature space");

  const double a_scale = std::max(1.0, effect.A.norm());
  double comm = 0.0;
  for (int alpha = 0; alpha < fact_L.algebra->dim(); ++alpha)
    comm = std::max(comm, (effect.A * fact_L.pi[alpha] -
                           fact_L.pi[alpha] * effect.A)
                              .norm());
  if (comm > kCommutantResidualLimit * a_scale) {
    std::ostringstream os;
    os << "simulate_kernel: effect does not commute with the representation "
          "(residual "
       << comm << ")";
    throw NonCommutingEffectError(os.str());
  }

  std::vector<Matrix> processed(fact_L.pi.size());
  for (std::size_t alpha = 0; alpha < fact_L.pi.size(); ++alpha)
    processed[alpha] = apply(effect, fact_L.pi[alpha]);
  return build_kernel(L.points(), L.hdim(), L.algebra(), fact_L.V, processed);
}

TraceCheckReport trace_nonincreasing_check(const Effect& effect, int samples,
                                           std::uint64_t seed) {
  if (samples < 1)
    throw InvalidArgumentError(
        "trace_nonincreasing_check: samples must be >= 1");
  const Eigen::Index r = effect.dim();
  NormalSource rng(seed);

  TraceCheckReport report;
  report.samples = samples;
  if (r == 0) return report;

  for (int s = 0; s < samples; ++s) {
    Matrix B(r, r);
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < r; ++j) B(i, j) = rng.next_complex();
    const Matrix T = B.adjoint() * B;
    const Matrix out = apply(effect, T);
    report.max_trace_increase = std::max(
        report.max_trace_increase, out.trace().real() - T.trace().real());
    Eigen::SelfAdjointEigenSolver<Matrix> es(out);
    report.min_output_eigenvalue =
        std::min(report.min_output_eigenvalue, es.eigenvalues()(0));
  }
  report.pass = report.max_trace_increase <= 1e-10 &&
                report.min_output_eigenvalue >= -1e-10;
  return report;
}

double amplified_positivity_check(const Effect& effect, int amplification,
                                  int samples, std::uint64_t seed) {
  if (amplification < 1 || samples < 1)
    throw InvalidArgumentError(
        "amplified_positivity_check: amplification and samples must be >= 1");
  const Eigen::Index r = effect.dim();
  if (r == 0) return 0.0;
  const Eigen::Index dim = r * amplification;
  NormalSource rng(seed);

  double most_negative = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vector y(dim);
    for (Eigen::Index i = 0; i < dim; ++i) y(i) = rng.next_complex();
    const Matrix X = y * y.adjoint();
    Matrix out(dim, dim);
    for (int u = 0; u < amplification; ++u)
      for (int v = 0; v < amplification; ++v)
        out.block(u * r, v * r, r, r) =
            apply(effect, X.block(u * r, v * r, r, r));
    Eigen::SelfAdjointEigenSolver<Matrix> es(out);
    most_negative = std::min(most_negative, es.eigenvalues()(0));
  }
  return most_negative;
}

}  // namespace opk
