#ifndef OPKERNEL_KERNEL_HPP
#define OPKERNEL_KERNEL_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opkernel/algebra.hpp"

namespace opk {

inline constexpr double kDefaultPsdTol = 1e-9;
inline constexpr double kHermitianTol = 1e-10;

// A kernel K: X x X -> L(A, L(H)) at desk scale: point labels (X), the
// dimension of H, the algebra A, and the dense tensor of values
// K(s_i, s_j)(e_alpha) for every basis element of A.  Values on general
// algebra elements follow by linearity.  Construction enforces the Hermitian
// pairing K(s_j, s_i)((e_alpha)^*) = K(s_i, s_j)(e_alpha)^* entrywise to
// 1e-10; anything worse is rejected as malformed rather than symmetrized.
class OperatorKernel {
public:
  static OperatorKernel create(std::vector<std::string> points, int hdim,
                               AlgebraPtr algebra, std::vector<Matrix> blocks);

  int num_points() const { return static_cast<int>(points_.size()); }
  int hdim() const { return hdim_; }
  const std::vector<std::string>& points() const { return points_; }
  const AlgebraPtr& algebra() const { return algebra_; }

  const Matrix& block(int i, int j, int alpha) const {
    return blocks_[block_index(i, j, alpha)];
  }
  const std::vector<Matrix>& blocks() const { return blocks_; }

  std::size_t block_index(int i, int j, int alpha) const {
    const int m = num_points();
    const int D = algebra_->dim();
    return (static_cast<std::size_t>(i) * m + j) * D + alpha;
  }

  // Frobenius norm of the whole block tensor
  double tensor_norm() const;

private:
  OperatorKernel() = default;

  std::vector<std::string> points_;
  int hdim_ = 0;
  AlgebraPtr algebra_;
  std::vector<Matrix> blocks_;
};

// K(s_i, s_j)(a) for a general algebra element, by linear extension.
Matrix evaluate(const OperatorKernel& K, int i, int j, const Element& a);
// same, from raw coordinates (no algebra identity check)
Matrix evaluate_coords(const OperatorKernel& K, int i, int j,
                       const Vector& coords);

struct GridPoint {
  int point;    // index into points()
  int alpha;    // algebra basis index
  int h_index;  // H basis index
};

// scalar lift <e_p, K(s_i,s_j)((e_alpha)^* e_beta) e_q>, inner product
// linear in the second variable
Complex scalar_lift(const OperatorKernel& K, const GridPoint& left,
                    const GridPoint& right);

// Gram matrix of the scalar lift over the canonical grid
// X x basis(A) x basis(H), rows/columns lexicographic in (i, alpha, p).
class GramGrid {
public:
  GramGrid(int m, int D, int n, Matrix gram);

  int grid_size() const { return m_ * D_ * n_; }
  int index(int i, int alpha, int p) const { return (i * D_ + alpha) * n_ + p; }
  GridPoint decode(int row) const {
    return GridPoint{row / (D_ * n_), (row / n_) % D_, row % n_};
  }
  const Matrix& matrix() const { return gram_; }

private:
  int m_, D_, n_;
  Matrix gram_;
};

// Assembles the Gram matrix; symmetrizes rounding-level asymmetry and throws
// MalformedKernelError beyond 1e-10.  Block pairs are assembled in parallel,
// capped by the OPKERNEL_THREADS environment variable (0 or unset = auto).
GramGrid gram(const OperatorKernel& K);

struct WitnessEntry {
  std::string point;
  int alpha;    // 0-based; serialized 1-based
  int h_index;  // 0-based; serialized 1-based
  Complex coeff;
};

// A finite family violating the positivity condition: the eigenvector of the
// most negative Gram eigenvalue decoded into grid triples.  Entries are
// sorted by coefficient magnitude; reports print at most the top 10.
struct Witness {
  double eigenvalue = 0.0;
  std::vector<WitnessEntry> entries;
};

struct ClassMDecision {
  bool in_class = false;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::optional<Witness> witness;
};

// Membership test for the positive definite class: the smallest Gram
// eigenvalue must be >= -tol * max(1, largest eigenvalue).
ClassMDecision is_in_class_M(const OperatorKernel& K,
                             double tol = kDefaultPsdTol);

class NotPositiveError : public Error {
public:
  NotPositiveError(const std::string& what, Witness witness)
      : Error(ErrorKind::negative, what), witness_(std::move(witness)) {}
  const Witness& witness() const { return witness_; }

private:
  Witness witness_;
};

// entrywise block arithmetic (same points, hdim, algebra)
OperatorKernel add(const OperatorKernel& K, const OperatorKernel& L);
OperatorKernel subtract(const OperatorKernel& K, const OperatorKernel& L);
OperatorKernel scale(const OperatorKernel& K, Complex factor);

//---------------------------------------------------------------------------
// seeded random instances with retained ground truth
//---------------------------------------------------------------------------

struct RandomKernelParams {
  int m = 1;
  int hdim = 1;
  std::vector<int> block_dims;
  std::vector<int> feature_multiplicities;
  std::uint64_t seed = 0;
};

// Hidden factorization used by tests as an oracle.  For matrix-block
// instances `multiplicities` records the representation's block structure;
// group-algebra instances leave it empty.
struct KernelGroundTruth {
  int r = 0;
  std::vector<Matrix> V;   // per point, r x hdim
  std::vector<Matrix> pi;  // per basis index, r x r
  std::vector<int> multiplicities;
};

struct GeneratedKernel {
  OperatorKernel kernel;
  KernelGroundTruth truth;
};

// Draws pi as the block representation of the declared block_dims with the
// declared multiplicities and V(t) with independent standard-normal real and
// imaginary parts, then materializes blocks(i,j,alpha) = V(s_i)^* pi(e_alpha)
// V(s_j).  Identical seeds give identical output.
GeneratedKernel random_in_M(const RandomKernelParams& params);

// Same construction over a group algebra, with pi = rep_multiplicity copies
// of the left regular representation.
GeneratedKernel random_group_kernel(AlgebraPtr group_algebra, int m, int hdim,
                                    int rep_multiplicity, std::uint64_t seed);

// blocks(i,j,alpha) = V(s_i)^* pi(e_alpha) W V(s_j); W = nullptr means I.
// W must commute with the representation for the result to stay positive.
OperatorKernel build_kernel(const std::vector<std::string>& points, int hdim,
                            AlgebraPtr algebra, const std::vector<Matrix>& V,
                            const std::vector<Matrix>& pi,
                            const Matrix* weight = nullptr);

std::vector<std::string> default_point_labels(int m);

}  // namespace opk

#endif  // OPKERNEL_KERNEL_HPP
