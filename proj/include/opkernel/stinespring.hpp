#ifndef OPKERNEL_STINESPRING_HPP
#define OPKERNEL_STINESPRING_HPP

#include <string>
#include <vector>

#include "opkernel/kernel.hpp"

namespace opk {

inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr double kPiResidualLimit = 1e-6;

struct FactorizationDiagnostics {
  double gram_truncation_error = 0.0;
  double pi_residual = 0.0;
  double reconstruction_residual = 0.0;
};

// Minimal dilation data for a kernel: an orthonormal feature realization of
// the scalar-lift RKHS.  `features` column (j,beta,q) holds the coordinates
// of the corresponding kernel section, so features^* features reproduces the
// Gram matrix on the kept spectrum.  V(t) and pi(e_alpha) realize
// K(s,t)(a) = V(s)^* pi(a) V(t).
struct Factorization {
  std::vector<std::string> points;
  int hdim = 0;
  AlgebraPtr algebra;
  int r = 0;
  Matrix features;          // r x M
  std::vector<Matrix> V;    // per point, r x hdim
  std::vector<Matrix> pi;   // per basis index, r x r
  FactorizationDiagnostics diagnostics;

  int grid_size() const {
    return static_cast<int>(points.size()) * algebra->dim() * hdim;
  }
  int grid_index(int t, int alpha, int p) const {
    return (t * algebra->dim() + alpha) * hdim + p;
  }
};

// Eigendecomposes the Gram matrix, keeps eigenvalues above
// rank_tol * max(1, lambda_max), and realizes V from the unit columns and pi
// from the left-multiplication action, solved in least squares against the
// feature matrix.  Throws NotPositiveError (with witness) if the kernel
// fails the class test at psd_tol, and IllConditionedError if the
// representation residual exceeds 1e-6.
Factorization factor(const OperatorKernel& K, double rank_tol = kDefaultRankTol,
                     double psd_tol = kDefaultPsdTol);

// pi(a) by linear extension over the basis images
Matrix rep_matrix(const Factorization& fact, const Element& a);

struct CheckResult {
  bool pass = true;
  double residual = 0.0;
};

struct VerifyReport {
  CheckResult star_law;
  CheckResult homomorphism;
  CheckResult unitality;
  CheckResult reconstruction;
  CheckResult minimality;

  bool all_pass() const {
    return star_law.pass && homomorphism.pass && unitality.pass &&
           reconstruction.pass && minimality.pass;
  }
};

// Re-derives the representation laws, the block reconstruction against the
// source kernel, and the span condition (stacked {pi(e_alpha)V(t)} has rank
// r).  Failures are reported, never thrown.
VerifyReport verify(const Factorization& fact, const OperatorKernel& source,
                    double tol = 1e-8);

// blocks(i,j,alpha) := V(s_i)^* pi(e_alpha) V(s_j)
OperatorKernel reconstruct(const Factorization& fact);

// Rebuilds a Factorization around externally supplied V and pi (e.g. from a
// serialized export): features are reassembled as pi(e_beta) V(t) e_q.
Factorization assemble_factorization(const OperatorKernel& owner,
                                     std::vector<Matrix> V,
                                     std::vector<Matrix> pi,
                                     FactorizationDiagnostics diagnostics);

}  // namespace opk

#endif  // OPKERNEL_STINESPRING_HPP
