#ifndef OPKERNEL_CHANNEL_HPP
#define OPKERNEL_CHANNEL_HPP

#include "opkernel/domination.hpp"

namespace opk {

// A quantum effect 0 <= A <= I with its Hermitian square root, the data of
// the post-processing map Phi(T) = sqrtA * T * sqrtA.
struct Effect {
  Matrix A;
  Matrix sqrtA;

  Eigen::Index dim() const { return A.rows(); }
};

// Validates the spectrum of A (eigenvalues within tol of [0,1] are clipped,
// anything worse raises InvalidEffectError) and takes the spectral square
// root.
Effect effect_from_matrix(const Matrix& A, double tol = kDefaultCertTol);
Effect effect_from_certificate(const DominationCertificate& cert,
                               double tol = kDefaultCertTol);
Effect scalar_effect(double lambda, Eigen::Index dim);

// Phi(T) = sqrtA * T * sqrtA
Matrix apply(const Effect& effect, const Matrix& T);

// blocks(i,j,alpha) := V_L(s_i)^* Phi(pi_L(e_alpha)) V_L(s_j).  The effect
// must commute with the representation (checked); otherwise the result
// falls outside the simulation identity and NonCommutingEffectError is
// raised.
OperatorKernel simulate_kernel(const OperatorKernel& L,
                               const Factorization& fact_L,
                               const Effect& effect);

struct TraceCheckReport {
  int samples = 0;
  double max_trace_increase = 0.0;    // max of trace(Phi(T)) - trace(T)
  double min_output_eigenvalue = 0.0;
  bool pass = true;
};

// Draws seeded random PSD inputs and verifies trace(Phi(T)) <= trace(T) and
// positivity of the outputs.
TraceCheckReport trace_nonincreasing_check(const Effect& effect, int samples,
                                           std::uint64_t seed);

// Applies Phi (x) id_amplification to random rank-one PSD inputs and returns
// the most negative output eigenvalue seen (complete-positivity witness).
double amplified_positivity_check(const Effect& effect, int amplification,
                                  int samples, std::uint64_t seed);

}  // namespace opk

#endif  // OPKERNEL_CHANNEL_HPP
