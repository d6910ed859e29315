#include "opkernel/domination.hpp"

#include <sstream>

#include "opkernel/rng.hpp"

namespace opk {

namespace {

Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

Matrix unvec(const Vector& v, Eigen::Index r) {
  Matrix out(r, r);
  for (Eigen::Index j = 0; j < r; ++j) out.col(j) = v.segment(j * r, r);
  return out;
}

void require_factorization_of(const Factorization& fact,
                              const OperatorKernel& L, const char* op) {
  if (fact.points != L.points() || fact.hdim != L.hdim() ||
      !fact.algebra || fact.algebra->signature() != L.algebra()->signature())
    throw InvalidArgumentError(
        std::string(op) + ": factorization does not belong to this kernel");
}

}  // namespace

DominationDecision dominates(const OperatorKernel& K, const OperatorKernel& L,
                             double tol) {
  const OperatorKernel diff = subtract(L, K);
  const ClassMDecision d = is_in_class_M(diff, tol);
  return DominationDecision{d.in_class, d.lambda_min, d.lambda_max, d.witness};
}

DominationCertificate radon_nikodym(const OperatorKernel& K,
                                    const OperatorKernel& L,
                                    const Factorization& fact_L, double tol,
                                    double psd_tol) {
  require_factorization_of(fact_L, L, "radon_nikodym");
  if (K.points() != L.points() || K.hdim() != L.hdim() ||
      K.algebra()->signature() != L.algebra()->signature())
    throw InvalidArgumentError(
        "radon_nikodym: kernels do not share points/hdim/algebra");

  DominationDecision dom = dominates(K, L, psd_tol);
  if (!dom.dominated) {
    std::ostringstream os;
    os << "radon_nikodym: K is not dominated by L (lambda_min of the "
          "difference Gram "
       << dom.lambda_min << ")";
    throw NotDominatedError(os.str(), dom.witness ? *dom.witness : Witness{});
  }

  const int r = fact_L.r;
  const Matrix G_K = gram(K).matrix();

  // F^+ via SVD; F has full row rank r for a minimal factorization
  Matrix pinv(G_K.rows(), r);
  {
    Eigen::JacobiSVD<Matrix> svd(
        fact_L.features, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector sv = svd.singularValues();
    const double cutoff = sv.size() ? 1e-13 * sv(0) : 0.0;
    Matrix inv_sv = Matrix::Zero(sv.size(), sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > cutoff) inv_sv(i, i) = 1.0 / sv(i);
    pinv = svd.matrixV() * inv_sv * svd.matrixU().adjoint();
  }

  Matrix T = pinv.adjoint() * G_K * pinv;
  T = 0.5 * (T + Matrix(T.adjoint()));

  Eigen::SelfAdjointEigenSolver<Matrix> es(T);
  RealVector lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) < -tol || lam(i) > 1.0 + tol) {
      std::ostringstream os;
      os << "radon_nikodym: eigenvalue " << lam(i)
         << " of T outside [-tol, 1+tol]; inputs are numerically inconsistent";
      throw ContractionViolationError(os.str());
    }
    lam(i) = std::min(1.0, std::max(0.0, lam(i)));
  }

  DominationCertificate cert;
  cert.T = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
  cert.T = 0.5 * (cert.T + Matrix(cert.T.adjoint()));
  cert.A = es.eigenvectors() *
           RealVector(lam.array().square()).asDiagonal() *
           es.eigenvectors().adjoint();
  cert.A = 0.5 * (cert.A + Matrix(cert.A.adjoint()));
  cert.spectrum_T = lam;

  const double a_scale = std::max(1.0, cert.A.norm());
  double comm = 0.0;
  for (int alpha = 0; alpha < fact_L.algebra->dim(); ++alpha)
    comm = std::max(
        comm,
        (cert.A * fact_L.pi[alpha] - fact_L.pi[alpha] * cert.A).norm());
  cert.commutant_residual = comm;
  if (comm > kCommutantResidualLimit * a_scale) {
    std::ostringstream os;
    os << "radon_nikodym: A leaves the commutant (residual " << comm << ")";
    throw CertificateInvalidError(os.str());
  }

  const double k_scale = std::max(1.0, K.tensor_norm());
  double recon = 0.0;
  for (int i = 0; i < K.num_points(); ++i)
    for (int j = 0; j < K.num_points(); ++j)
      for (int alpha = 0; alpha < K.algebra()->dim(); ++alpha) {
        const Matrix rebuilt = fact_L.V[i].adjoint() * fact_L.pi[alpha] *
                               cert.A * fact_L.V[j];
        recon = std::max(recon, (rebuilt - K.block(i, j, alpha)).norm());
      }
  cert.reconstruction_residual = recon / k_scale;
  if (cert.reconstruction_residual > kRnReconstructionLimit) {
    std::ostringstream os;
    os << "radon_nikodym: reconstruction residual "
       << cert.reconstruction_residual << " exceeds "
       << kRnReconstructionLimit;
    throw CertificateInvalidError(os.str());
  }

  if (r > 0) {
    const Complex mean = cert.A.trace() / static_cast<double>(r);
    const double dev =
        (cert.A - mean * Matrix::Identity(r, r)).norm();
    if (dev <= tol * a_scale) cert.lambda = mean;
  }
  return cert;
}

std::vector<Matrix> commutant_basis(const std::vector<Matrix>& rep) {
  if (rep.empty()) return {};
  const Eigen::Index r = rep[0].rows();
  if (r == 0) return {};
  const Eigen::Index D = static_cast<Eigen::Index>(rep.size());
  const Matrix eye = Matrix::Identity(r, r);

  Matrix stacked(D * r * r, r * r);
  for (Eigen::Index alpha = 0; alpha < D; ++alpha)
    stacked.block(alpha * r * r, 0, r * r, r * r) =
        kron(rep[alpha].transpose(), eye) - kron(eye, rep[alpha]);

  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinV);
  const RealVector sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  std::vector<Matrix> basis;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= kCommutantNullspaceTol * smax)
      basis.push_back(unvec(svd.matrixV().col(i), r));
  return basis;
}

std::vector<Matrix> commutant(const Factorization& fact) {
  return commutant_basis(fact.pi);
}

bool is_irreducible(const Factorization& fact) {
  if (fact.r == 0)
    throw InvalidArgumentError("is_irreducible: empty representation");
  return commutant(fact).size() == 1;
}

std::optional<Complex> scalar_ratio(const DominationCertificate& cert,
                                    double tol, const Factorization* fact) {
  const Eigen::Index r = cert.A.rows();
  std::optional<Complex> lambda;
  if (r > 0) {
    const Complex mean = cert.A.trace() / static_cast<double>(r);
    const double dev = (cert.A - mean * Matrix::Identity(r, r)).norm();
    if (dev <= tol * std::max(1.0, cert.A.norm())) lambda = mean;
  }
  if (fact && fact->r > 0 && is_irreducible(*fact) && !lambda)
    throw InconsistencyError(
        "scalar_ratio: representation is irreducible but the derivative is "
        "not scalar; upstream numerics are inconsistent");
  return lambda;
}

Matrix random_psd_commutant_contraction(const std::vector<Matrix>& rep,
                                        std::uint64_t seed) {
  const std::vector<Matrix> basis = commutant_basis(rep);
  if (basis.empty())
    throw InvalidArgumentError(
        "random_psd_commutant_contraction: empty representation");
  const Eigen::Index r = basis[0].rows();
  NormalSource rng(seed);
  Matrix X = Matrix::Zero(r, r);
  for (const Matrix& Z : basis) X += Complex(rng.next_complex()) * Z;
  Matrix P = X.adjoint() * X;  // PSD, still in the commutant
  Eigen::SelfAdjointEigenSolver<Matrix> es(P);
  const double top = es.eigenvalues()(r - 1);
  // top eigenvalue drawn in [0.2, 1.0] keeps instances away from both
  // degenerate extremes
  const double target = 0.2 + 0.8 * rng.uniform01();
  if (top > 0) P *= target / top;
  return 0.5 * (P + Matrix(P.adjoint()));
}

}  // namespace opk
