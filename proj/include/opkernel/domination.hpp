#ifndef OPKERNEL_DOMINATION_HPP
#define OPKERNEL_DOMINATION_HPP

#include <optional>
#include <vector>

#include "opkernel/stinespring.hpp"

namespace opk {

inline constexpr double kDefaultCertTol = 1e-8;
inline constexpr double kCommutantNullspaceTol = 1e-10;
inline constexpr double kCommutantResidualLimit = 1e-8;
inline constexpr double kRnReconstructionLimit = 1e-7;

class NotDominatedError : public Error {
public:
  NotDominatedError(const std::string& what, Witness witness)
      : Error(ErrorKind::negative, what), witness_(std::move(witness)) {}
  const Witness& witness() const { return witness_; }

private:
  Witness witness_;
};

// The Radon-Nikodym data for a dominated pair: the positive contraction T
// sending L-sections to K-sections in L's feature coordinates, and
// A = T^2 = dK/dL, a member of the commutant of pi_L with
// K(s,t)(a) = V_L(s)^* pi_L(a) A V_L(t).
struct DominationCertificate {
  Matrix T;
  Matrix A;
  RealVector spectrum_T;  // ascending, clipped into [0,1]
  double commutant_residual = 0.0;
  double reconstruction_residual = 0.0;
  std::optional<Complex> lambda;  // present when A is scalar within tolerance
};

struct DominationDecision {
  bool dominated = false;
  double lambda_min = 0.0;  // of gram(L - K)
  double lambda_max = 0.0;
  std::optional<Witness> witness;
};

// K <= L iff L - K stays in the positive definite class.
DominationDecision dominates(const OperatorKernel& K, const OperatorKernel& L,
                             double tol = kDefaultPsdTol);

// Computes T = (F_L^+)^* gram(K) F_L^+ from the reproducing identity,
// clips eigenvalues within the tol band into [0,1] (outside it:
// ContractionViolationError), and validates commutant membership and the
// reconstruction identity (failures: CertificateInvalidError).
DominationCertificate radon_nikodym(const OperatorKernel& K,
                                    const OperatorKernel& L,
                                    const Factorization& fact_L,
                                    double tol = kDefaultCertTol,
                                    double psd_tol = kDefaultPsdTol);

// Orthonormal basis (trace inner product) of {Z : Z pi(e_alpha) =
// pi(e_alpha) Z for all alpha}, via the nullspace of the stacked commutator
// operators.
std::vector<Matrix> commutant_basis(const std::vector<Matrix>& rep);
std::vector<Matrix> commutant(const Factorization& fact);

// true iff the commutant is trivial (dimension 1)
bool is_irreducible(const Factorization& fact);

// trace(A)/r when A is within tol of a scalar matrix, absent otherwise.
// When fact is supplied and irreducible, absence is a numerical
// inconsistency and throws InconsistencyError.
std::optional<Complex> scalar_ratio(const DominationCertificate& cert,
                                    double tol = kDefaultCertTol,
                                    const Factorization* fact = nullptr);

// Seeded PSD contraction in the commutant of `rep`: X^* X for a random
// combination X of the commutant basis, scaled so the top eigenvalue lands
// in (0, 1].  Used to generate dominated companion kernels.
Matrix random_psd_commutant_contraction(const std::vector<Matrix>& rep,
                                        std::uint64_t seed);

}  // namespace opk

#endif  // OPKERNEL_DOMINATION_HPP
