#include "opkernel/kernel.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>
#include <thread>

#include "opkernel/rng.hpp"

namespace opk {

namespace {

int thread_budget(std::size_t work_items) {
  long cap = 0;
  if (const char* env = std::getenv("OPKERNEL_THREADS")) {
    char* end = nullptr;
    cap = std::strtol(env, &end, 10);
    if (end == env || cap < 0) cap = 0;
  }
  unsigned hw = std::thread::hardware_concurrency();
  long n = cap > 0 ? cap : (hw ? static_cast<long>(hw) : 1);
  return static_cast<int>(std::min<long>(n, static_cast<long>(work_items)));
}

// runs fn(w) for w in [0, work_items), striding work across threads
template <typename Fn>
void parallel_for(std::size_t work_items, Fn&& fn) {
  const int threads = thread_budget(work_items);
  if (threads <= 1 || work_items < 8) {
    for (std::size_t w = 0; w < work_items; ++w) fn(w);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t w = t; w < work_items; w += threads) fn(w);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

OperatorKernel OperatorKernel::create(std::vector<std::string> points,
                                      int hdim, AlgebraPtr algebra,
                                      std::vector<Matrix> blocks) {
  if (points.empty())
    throw InvalidArgumentError("kernel: point set must be nonempty");
  std::set<std::string> distinct(points.begin(), points.end());
  if (distinct.size() != points.size())
    throw InvalidArgumentError("kernel: point labels must be distinct");
  if (hdim < 1) throw InvalidArgumentError("kernel: hdim must be positive");
  if (!algebra) throw InvalidArgumentError("kernel: null algebra");

  const int m = static_cast<int>(points.size());
  const int D = algebra->dim();
  if (blocks.size() != static_cast<std::size_t>(m) * m * D)
    throw InvalidArgumentError("kernel: block tensor has the wrong size");
  for (const Matrix& b : blocks)
    if (b.rows() != hdim || b.cols() != hdim)
      throw InvalidArgumentError("kernel: block has the wrong shape");

  OperatorKernel K;
  K.points_ = std::move(points);
  K.hdim_ = hdim;
  K.algebra_ = std::move(algebra);
  K.blocks_ = std::move(blocks);

  // Hermitian pairing: K(j,i)((e_alpha)^*) == K(i,j)(e_alpha)^*
  double worst = 0.0;
  int wi = 0, wj = 0, wa = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int alpha = 0; alpha < D; ++alpha) {
        const Vector& inv = K.algebra_->involution_coords(alpha);
        Matrix mirrored = Matrix::Zero(hdim, hdim);
        for (int beta = 0; beta < D; ++beta) {
          const Complex c = inv(beta);
          if (c != Complex(0.0, 0.0)) mirrored += c * K.block(j, i, beta);
        }
        const double asym =
            (mirrored - K.block(i, j, alpha).adjoint()).cwiseAbs().maxCoeff();
        if (asym > worst) {
          worst = asym;
          wi = i;
          wj = j;
          wa = alpha;
        }
      }
  if (worst > kHermitianTol) {
    std::ostringstream os;
    os << "kernel: Hermitian symmetry violated at (i,j,alpha)=(" << wi + 1
       << "," << wj + 1 << "," << wa + 1 << "), asymmetry " << worst;
    throw MalformedKernelError(os.str());
  }
  return K;
}

double OperatorKernel::tensor_norm() const {
  double sq = 0.0;
  for (const Matrix& b : blocks_) sq += b.squaredNorm();
  return std::sqrt(sq);
}

Matrix evaluate_coords(const OperatorKernel& K, int i, int j,
                       const Vector& coords) {
  const int m = K.num_points();
  if (i < 0 || i >= m || j < 0 || j >= m)
    throw InvalidArgumentError("evaluate: point index out of range");
  Matrix out = Matrix::Zero(K.hdim(), K.hdim());
  for (int alpha = 0; alpha < K.algebra()->dim(); ++alpha) {
    const Complex c = coords(alpha);
    if (c != Complex(0.0, 0.0)) out += c * K.block(i, j, alpha);
  }
  return out;
}

Matrix evaluate(const OperatorKernel& K, int i, int j, const Element& a) {
  if (!a.algebra || a.algebra->signature() != K.algebra()->signature())
    throw InvalidArgumentError("evaluate: element from a different algebra");
  return evaluate_coords(K, i, j, a.coords);
}

Complex scalar_lift(const OperatorKernel& K, const GridPoint& left,
                    const GridPoint& right) {
  const int D = K.algebra()->dim();
  const int n = K.hdim();
  if (left.alpha < 0 || left.alpha >= D || right.alpha < 0 ||
      right.alpha >= D || left.h_index < 0 || left.h_index >= n ||
      right.h_index < 0 || right.h_index >= n)
    throw InvalidArgumentError("scalar_lift: grid index out of range");
  const Element prod = multiply(adjoint(basis_element(K.algebra(), left.alpha)),
                                basis_element(K.algebra(), right.alpha));
  const Matrix val = evaluate_coords(K, left.point, right.point, prod.coords);
  return val(left.h_index, right.h_index);
}

GramGrid::GramGrid(int m, int D, int n, Matrix gram)
    : m_(m), D_(D), n_(n), gram_(std::move(gram)) {}

GramGrid gram(const OperatorKernel& K) {
  const Algebra& alg = *K.algebra();
  const int m = K.num_points();
  const int D = alg.dim();
  const int n = K.hdim();
  const int M = m * D * n;

  // coords of (e_alpha)^* e_beta, shared across all point pairs
  std::vector<Vector> star_prod(static_cast<std::size_t>(D) * D);
  for (int alpha = 0; alpha < D; ++alpha) {
    const Element star = adjoint(basis_element(K.algebra(), alpha));
    const Matrix mult = left_mult_matrix(star);
    for (int beta = 0; beta < D; ++beta)
      star_prod[static_cast<std::size_t>(alpha) * D + beta] = mult.col(beta);
  }

  Matrix G(M, M);
  auto index = [&](int i, int alpha, int p) { return (i * D + alpha) * n + p; };
  parallel_for(static_cast<std::size_t>(m) * m, [&](std::size_t pair) {
    const int i = static_cast<int>(pair) / m;
    const int j = static_cast<int>(pair) % m;
    for (int alpha = 0; alpha < D; ++alpha)
      for (int beta = 0; beta < D; ++beta) {
        const Matrix val = evaluate_coords(
            K, i, j, star_prod[static_cast<std::size_t>(alpha) * D + beta]);
        G.block(index(i, alpha, 0), index(j, beta, 0), n, n) = val;
      }
  });

  const double asym = (G - Matrix(G.adjoint())).cwiseAbs().maxCoeff();
  if (asym > kHermitianTol) {
    std::ostringstream os;
    os << "gram: matrix is not Hermitian (asymmetry " << asym << ")";
    throw MalformedKernelError(os.str());
  }
  G = 0.5 * (G + Matrix(G.adjoint()));
  return GramGrid(m, D, n, std::move(G));
}

namespace {

Witness decode_witness(const OperatorKernel& K, const GramGrid& grid,
                       double eigenvalue, const Vector& eigvec) {
  Witness w;
  w.eigenvalue = eigenvalue;
  const double cutoff = 1e-12 * std::max(1.0, eigvec.cwiseAbs().maxCoeff());
  for (int row = 0; row < eigvec.size(); ++row) {
    if (std::abs(eigvec(row)) <= cutoff) continue;
    const GridPoint g = grid.decode(row);
    w.entries.push_back(
        WitnessEntry{K.points()[g.point], g.alpha, g.h_index, eigvec(row)});
  }
  std::stable_sort(w.entries.begin(), w.entries.end(),
                   [](const WitnessEntry& a, const WitnessEntry& b) {
                     return std::abs(a.coeff) > std::abs(b.coeff);
                   });
  return w;
}

}  // namespace

ClassMDecision is_in_class_M(const OperatorKernel& K, double tol) {
  if (tol < 0) throw InvalidArgumentError("is_in_class_M: tol must be >= 0");
  const GramGrid grid = gram(K);
  Eigen::SelfAdjointEigenSolver<Matrix> es(grid.matrix());
  if (es.info() != Eigen::Success)
    throw MalformedKernelError("is_in_class_M: eigendecomposition failed");

  ClassMDecision d;
  d.lambda_min = es.eigenvalues()(0);
  d.lambda_max = es.eigenvalues()(es.eigenvalues().size() - 1);
  d.in_class = d.lambda_min >= -tol * std::max(1.0, d.lambda_max);
  if (!d.in_class)
    d.witness = decode_witness(K, grid, d.lambda_min, es.eigenvectors().col(0));
  return d;
}

namespace {

void require_same_shape(const OperatorKernel& K, const OperatorKernel& L,
                        const char* op) {
  if (K.points() != L.points() || K.hdim() != L.hdim() ||
      K.algebra()->signature() != L.algebra()->signature())
    throw InvalidArgumentError(std::string(op) +
                               ": kernels do not share points/hdim/algebra");
}

}  // namespace

OperatorKernel add(const OperatorKernel& K, const OperatorKernel& L) {
  require_same_shape(K, L, "add");
  std::vector<Matrix> blocks = K.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) blocks[b] += L.blocks()[b];
  return OperatorKernel::create(K.points(), K.hdim(), K.algebra(),
                                std::move(blocks));
}

OperatorKernel subtract(const OperatorKernel& K, const OperatorKernel& L) {
  require_same_shape(K, L, "subtract");
  std::vector<Matrix> blocks = K.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) blocks[b] -= L.blocks()[b];
  return OperatorKernel::create(K.points(), K.hdim(), K.algebra(),
                                std::move(blocks));
}

OperatorKernel scale(const OperatorKernel& K, Complex factor) {
  // the factor must be real for the result to stay Hermitian-symmetric
  std::vector<Matrix> blocks = K.blocks();
  for (Matrix& b : blocks) b *= factor;
  return OperatorKernel::create(K.points(), K.hdim(), K.algebra(),
                                std::move(blocks));
}

std::vector<std::string> default_point_labels(int m) {
  std::vector<std::string> labels;
  labels.reserve(m);
  for (int i = 1; i <= m; ++i) labels.push_back("s" + std::to_string(i));
  return labels;
}

OperatorKernel build_kernel(const std::vector<std::string>& points, int hdim,
                            AlgebraPtr algebra, const std::vector<Matrix>& V,
                            const std::vector<Matrix>& pi,
                            const Matrix* weight) {
  const int m = static_cast<int>(points.size());
  const int D = algebra->dim();
  if (static_cast<int>(V.size()) != m)
    throw InvalidArgumentError("build_kernel: one V(t) per point required");
  if (static_cast<int>(pi.size()) != D)
    throw InvalidArgumentError(
        "build_kernel: one pi(e_alpha) per basis element required");

  std::vector<Matrix> blocks(static_cast<std::size_t>(m) * m * D);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      for (int alpha = 0; alpha < D; ++alpha) {
        Matrix mid = pi[alpha];
        if (weight) mid = mid * (*weight);
        blocks[(static_cast<std::size_t>(i) * m + j) * D + alpha] =
            V[i].adjoint() * mid * V[j];
      }
    }
  return OperatorKernel::create(points, hdim, std::move(algebra),
                                std::move(blocks));
}

namespace {

GeneratedKernel random_kernel_with_rep(AlgebraPtr algebra,
                                       std::vector<Matrix> rep, int m,
                                       int hdim, std::uint64_t seed,
                                       std::vector<int> multiplicities) {
  const int r = rep.empty() ? 0 : static_cast<int>(rep[0].rows());
  NormalSource rng(seed);
  std::vector<Matrix> V(m);
  for (int t = 0; t < m; ++t) {
    Matrix vt(r, hdim);
    for (int row = 0; row < r; ++row)
      for (int col = 0; col < hdim; ++col) vt(row, col) = rng.next_complex();
    V[t] = std::move(vt);
  }
  OperatorKernel K =
      build_kernel(default_point_labels(m), hdim, algebra, V, rep);
  KernelGroundTruth truth{r, std::move(V), std::move(rep),
                          std::move(multiplicities)};
  return GeneratedKernel{std::move(K), std::move(truth)};
}

}  // namespace

GeneratedKernel random_in_M(const RandomKernelParams& params) {
  if (params.m < 1 || params.hdim < 1)
    throw InvalidArgumentError("random_in_M: m and hdim must be >= 1");
  if (params.block_dims.size() != params.feature_multiplicities.size())
    throw InvalidArgumentError(
        "random_in_M: one multiplicity per block required");
  for (int mult : params.feature_multiplicities)
    if (mult < 0)
      throw InvalidArgumentError("random_in_M: multiplicities must be >= 0");
  bool any = false;
  for (int mult : params.feature_multiplicities) any = any || mult > 0;
  if (!any)
    throw InvalidArgumentError(
        "random_in_M: at least one block multiplicity must be positive");

  AlgebraPtr algebra = Algebra::from_matrix_blocks(params.block_dims);
  const int D = algebra->dim();
  const auto& dims = params.block_dims;
  const auto& mults = params.feature_multiplicities;

  int r = 0;
  std::vector<int> feature_offset(dims.size(), 0);
  for (std::size_t k = 0; k < dims.size(); ++k) {
    feature_offset[k] = r;
    r += mults[k] * dims[k];
  }

  // pi(e_(k,p,q)) repeats the block-k matrix unit along that block's copies
  std::vector<Matrix> rep(D, Matrix::Zero(r, r));
  int alpha = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const int d = dims[k];
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q, ++alpha) {
        for (int copy = 0; copy < mults[k]; ++copy) {
          const int off = feature_offset[k] + copy * d;
          rep[alpha](off + p, off + q) = 1.0;
        }
      }
  }
  return random_kernel_with_rep(std::move(algebra), std::move(rep), params.m,
                                params.hdim, params.seed, mults);
}

GeneratedKernel random_group_kernel(AlgebraPtr group_algebra, int m, int hdim,
                                    int rep_multiplicity, std::uint64_t seed) {
  if (!group_algebra ||
      group_algebra->origin() != AlgebraOrigin::group_algebra)
    throw InvalidArgumentError("random_group_kernel: group algebra required");
  if (m < 1 || hdim < 1 || rep_multiplicity < 1)
    throw InvalidArgumentError(
        "random_group_kernel: m, hdim, rep_multiplicity must be >= 1");

  const int n = group_algebra->group_order();
  const int r = rep_multiplicity * n;
  std::vector<Matrix> rep(n, Matrix::Zero(r, r));
  for (int g = 0; g < n; ++g)
    for (int copy = 0; copy < rep_multiplicity; ++copy)
      rep[g].block(copy * n, copy * n, n, n) = group_algebra->basis_matrix(g);
  return random_kernel_with_rep(std::move(group_algebra), std::move(rep), m,
                                hdim, seed, {});
}

}  // namespace opk
