#include "opkernel/stinespring.hpp"

#include <algorithm>
#include <sstream>

namespace opk {

namespace {

// columns of F recombined by the left-multiplication action of e_alpha on
// the middle grid index: out.col(j,beta,q) = sum_delta L_alpha(delta,beta) *
// F.col(j,delta,q)
Matrix middle_action(const Matrix& F, const Factorization& geom, int alpha) {
  const int m = static_cast<int>(geom.points.size());
  const int D = geom.algebra->dim();
  const int n = geom.hdim;
  const Matrix& L = geom.algebra->left_mult_basis(alpha);
  Matrix out = Matrix::Zero(F.rows(), F.cols());
  for (int j = 0; j < m; ++j)
    for (int beta = 0; beta < D; ++beta) {
      for (int delta = 0; delta < D; ++delta) {
        const Complex c = L(delta, beta);
        if (c == Complex(0.0, 0.0)) continue;
        for (int q = 0; q < n; ++q)
          out.col(geom.grid_index(j, beta, q)) +=
              c * F.col(geom.grid_index(j, delta, q));
      }
    }
  return out;
}

double reconstruction_residual(const std::vector<Matrix>& V,
                               const std::vector<Matrix>& pi,
                               const OperatorKernel& K) {
  const int m = K.num_points();
  const int D = K.algebra()->dim();
  const double scale = std::max(1.0, K.tensor_norm());
  double worst = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int alpha = 0; alpha < D; ++alpha) {
        const Matrix rebuilt = V[i].adjoint() * pi[alpha] * V[j];
        worst = std::max(worst, (rebuilt - K.block(i, j, alpha)).norm());
      }
  return worst / scale;
}

}  // namespace

Factorization factor(const OperatorKernel& K, double rank_tol,
                     double psd_tol) {
  if (rank_tol <= 0)
    throw InvalidArgumentError("factor: rank_tol must be positive");

  const GramGrid grid = gram(K);
  const Matrix& G = grid.matrix();
  const int M = static_cast<int>(G.rows());

  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  if (es.info() != Eigen::Success)
    throw MalformedKernelError("factor: eigendecomposition failed");
  const RealVector lam = es.eigenvalues();  // ascending
  const double lambda_max = lam(M - 1);
  const double scale = std::max(1.0, lambda_max);

  if (lam(0) < -psd_tol * scale) {
    Witness w;
    {
      // reuse the class test's decoding so the witness format matches
      ClassMDecision d = is_in_class_M(K, psd_tol);
      if (d.witness) w = *d.witness;
      w.eigenvalue = lam(0);
    }
    std::ostringstream os;
    os << "factor: kernel is not positive definite (lambda_min " << lam(0)
       << ")";
    throw NotPositiveError(os.str(), std::move(w));
  }

  const double keep_threshold = rank_tol * scale;
  std::vector<int> kept;  // descending eigenvalue order
  for (int i = M - 1; i >= 0; --i)
    if (lam(i) >= keep_threshold) kept.push_back(i);
  const int r = static_cast<int>(kept.size());

  Factorization fact;
  fact.points = K.points();
  fact.hdim = K.hdim();
  fact.algebra = K.algebra();
  fact.r = r;

  Matrix F(r, M);
  Matrix pinv(M, r);  // F^+ = U Lambda^{-1/2} on the kept spectrum
  for (int k = 0; k < r; ++k) {
    const double root = std::sqrt(lam(kept[k]));
    F.row(k) = root * es.eigenvectors().col(kept[k]).adjoint();
    pinv.col(k) = es.eigenvectors().col(kept[k]) / root;
  }
  fact.features = F;
  fact.diagnostics.gram_truncation_error = (F.adjoint() * F - G).norm();

  // V(t) column p is the feature vector of the (t, unit, e_p) section
  const Vector& unit = K.algebra()->unit_coords();
  const int D = K.algebra()->dim();
  const int n = K.hdim();
  fact.V.assign(K.num_points(), Matrix::Zero(r, n));
  for (int t = 0; t < K.num_points(); ++t)
    for (int p = 0; p < n; ++p) {
      for (int alpha = 0; alpha < D; ++alpha) {
        const Complex c = unit(alpha);
        if (c != Complex(0.0, 0.0))
          fact.V[t].col(p) += c * F.col(fact.grid_index(t, alpha, p));
      }
    }

  // pi(e_alpha): least-squares solution of pi * F = F * S_alpha
  fact.pi.assign(D, Matrix::Zero(r, r));
  double pi_res = 0.0;
  const double f_scale = std::max(1.0, F.norm());
  for (int alpha = 0; alpha < D; ++alpha) {
    const Matrix FS = middle_action(F, fact, alpha);
    fact.pi[alpha] = FS * pinv;
    pi_res = std::max(pi_res, (fact.pi[alpha] * F - FS).norm() / f_scale);
  }
  fact.diagnostics.pi_residual = pi_res;
  if (pi_res > kPiResidualLimit) {
    std::ostringstream os;
    os << "factor: representation solve is ill-conditioned (pi_residual "
       << pi_res << " > " << kPiResidualLimit << ")";
    throw IllConditionedError(os.str(), pi_res);
  }

  fact.diagnostics.reconstruction_residual =
      reconstruction_residual(fact.V, fact.pi, K);
  return fact;
}

Matrix rep_matrix(const Factorization& fact, const Element& a) {
  if (!a.algebra || a.algebra->signature() != fact.algebra->signature())
    throw InvalidArgumentError("rep_matrix: element from a different algebra");
  Matrix out = Matrix::Zero(fact.r, fact.r);
  for (int alpha = 0; alpha < fact.algebra->dim(); ++alpha) {
    const Complex c = a.coords(alpha);
    if (c != Complex(0.0, 0.0)) out += c * fact.pi[alpha];
  }
  return out;
}

VerifyReport verify(const Factorization& fact, const OperatorKernel& source,
                    double tol) {
  VerifyReport report;
  const int D = fact.algebra->dim();
  const int r = fact.r;

  double star = 0.0;
  for (int alpha = 0; alpha < D; ++alpha) {
    const Vector& inv = fact.algebra->involution_coords(alpha);
    Matrix starred = Matrix::Zero(r, r);
    for (int beta = 0; beta < D; ++beta) {
      const Complex c = inv(beta);
      if (c != Complex(0.0, 0.0)) starred += c * fact.pi[beta];
    }
    const double denom = std::max(1.0, fact.pi[alpha].norm());
    star = std::max(star,
                    (fact.pi[alpha].adjoint() - starred).norm() / denom);
  }
  report.star_law = {star <= tol, star};

  double hom = 0.0;
  for (int alpha = 0; alpha < D; ++alpha) {
    const Matrix& L = fact.algebra->left_mult_basis(alpha);
    for (int beta = 0; beta < D; ++beta) {
      Matrix prod_rep = Matrix::Zero(r, r);
      for (int gamma = 0; gamma < D; ++gamma) {
        const Complex c = L(gamma, beta);
        if (c != Complex(0.0, 0.0)) prod_rep += c * fact.pi[gamma];
      }
      const double denom =
          std::max(1.0, fact.pi[alpha].norm() * fact.pi[beta].norm());
      hom = std::max(
          hom, (fact.pi[alpha] * fact.pi[beta] - prod_rep).norm() / denom);
    }
  }
  report.homomorphism = {hom <= tol, hom};

  Matrix unit_rep = Matrix::Zero(r, r);
  const Vector& unit = fact.algebra->unit_coords();
  for (int alpha = 0; alpha < D; ++alpha) {
    const Complex c = unit(alpha);
    if (c != Complex(0.0, 0.0)) unit_rep += c * fact.pi[alpha];
  }
  const double unital = (unit_rep - Matrix::Identity(r, r)).norm();
  report.unitality = {unital <= tol, unital};

  const double recon = reconstruction_residual(fact.V, fact.pi, source);
  report.reconstruction = {recon <= tol, recon};

  // span condition: the stacked generators {pi(e_alpha) V(t)} must have
  // rank r; the residual reports the rank deficiency
  if (r == 0) {
    report.minimality = {true, 0.0};
  } else {
    const int m = static_cast<int>(fact.points.size());
    Matrix stacked(r, static_cast<Eigen::Index>(D) * m * fact.hdim);
    Eigen::Index col = 0;
    for (int alpha = 0; alpha < D; ++alpha)
      for (int t = 0; t < m; ++t) {
        stacked.block(0, col, r, fact.hdim) = fact.pi[alpha] * fact.V[t];
        col += fact.hdim;
      }
    Eigen::JacobiSVD<Matrix> svd(stacked);
    const RealVector sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > 1e-10 * smax) ++rank;
    report.minimality = {rank == r, static_cast<double>(r - rank)};
  }
  return report;
}

OperatorKernel reconstruct(const Factorization& fact) {
  return build_kernel(fact.points, fact.hdim, fact.algebra, fact.V, fact.pi);
}

Factorization assemble_factorization(const OperatorKernel& owner,
                                     std::vector<Matrix> V,
                                     std::vector<Matrix> pi,
                                     FactorizationDiagnostics diagnostics) {
  const int m = owner.num_points();
  const int D = owner.algebra()->dim();
  const int n = owner.hdim();
  if (static_cast<int>(V.size()) != m)
    throw InvalidArgumentError("factorization: one V(t) per point required");
  if (static_cast<int>(pi.size()) != D)
    throw InvalidArgumentError(
        "factorization: one pi(e_alpha) per basis element required");
  const int r = V.empty() ? 0 : static_cast<int>(V[0].rows());
  for (const Matrix& vt : V)
    if (vt.rows() != r || vt.cols() != n)
      throw InvalidArgumentError("factorization: V(t) has the wrong shape");
  for (const Matrix& p : pi)
    if (p.rows() != r || p.cols() != r)
      throw InvalidArgumentError(
          "factorization: pi(e_alpha) has the wrong shape");

  Factorization fact;
  fact.points = owner.points();
  fact.hdim = n;
  fact.algebra = owner.algebra();
  fact.r = r;
  fact.V = std::move(V);
  fact.pi = std::move(pi);
  fact.diagnostics = diagnostics;

  fact.features = Matrix(r, fact.grid_size());
  for (int t = 0; t < m; ++t)
    for (int beta = 0; beta < D; ++beta) {
      const Matrix cols = fact.pi[beta] * fact.V[t];  // r x n
      for (int q = 0; q < n; ++q)
        fact.features.col(fact.grid_index(t, beta, q)) = cols.col(q);
    }
  return fact;
}

}  // namespace opk
