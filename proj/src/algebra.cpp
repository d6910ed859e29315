#include "opkernel/algebra.hpp"

#include <numeric>
#include <sstream>

namespace opk {

namespace {

std::string blocks_signature(const std::vector<int>& dims) {
  std::ostringstream os;
  os << "blocks:";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) os << ",";
    os << dims[i];
  }
  return os.str();
}

std::string group_signature(const std::vector<std::vector<int>>& table,
                            int identity) {
  std::ostringstream os;
  os << "group:" << table.size() << ":" << identity << ":";
  for (const auto& row : table)
    for (int v : row) os << v << ",";
  return os.str();
}

}  // namespace

std::shared_ptr<const Algebra> Algebra::from_matrix_blocks(
    const std::vector<int>& dims) {
  if (dims.empty())
    throw InvalidArgumentError("from_matrix_blocks: dims must be nonempty");
  for (int d : dims)
    if (d < 1)
      throw InvalidArgumentError(
          "from_matrix_blocks: block dimensions must be positive");

  auto alg = std::shared_ptr<Algebra>(new Algebra());
  alg->block_dims_ = dims;
  alg->rep_dim_ = std::accumulate(dims.begin(), dims.end(), 0);
  alg->origin_ = AlgebraOrigin::matrix_blocks;
  alg->signature_ = blocks_signature(dims);

  const int N = alg->rep_dim_;
  int D = 0;
  for (int d : dims) D += d * d;

  // basis index (k, p, q) -> block offset + p*d_k + q, row-major in block
  struct Unit {
    int block, row, col;
  };
  std::vector<Unit> units;
  units.reserve(D);
  std::vector<int> block_offset(dims.size(), 0);   // offset in rep space
  std::vector<int> basis_offset(dims.size(), 0);   // offset in basis index
  {
    int off = 0, boff = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      block_offset[k] = off;
      basis_offset[k] = boff;
      off += dims[k];
      boff += dims[k] * dims[k];
    }
  }
  for (std::size_t k = 0; k < dims.size(); ++k)
    for (int p = 0; p < dims[k]; ++p)
      for (int q = 0; q < dims[k]; ++q)
        units.push_back(Unit{static_cast<int>(k), p, q});

  alg->basis_.resize(D);
  alg->invol_.resize(D);
  alg->left_mult_.assign(D, Matrix::Zero(D, D));
  alg->unit_coords_ = Vector::Zero(D);

  auto index_of = [&](int k, int p, int q) {
    return basis_offset[k] + p * dims[k] + q;
  };

  for (int a = 0; a < D; ++a) {
    const Unit& u = units[a];
    Matrix mat = Matrix::Zero(N, N);
    mat(block_offset[u.block] + u.row, block_offset[u.block] + u.col) = 1.0;
    alg->basis_[a] = mat;

    Vector inv = Vector::Zero(D);
    inv(index_of(u.block, u.col, u.row)) = 1.0;  // e_{pq}^* = e_{qp}
    alg->invol_[a] = inv;

    if (u.row == u.col) alg->unit_coords_(a) = 1.0;
  }

  // e_{(k,p,q)} e_{(k,r,s)} = delta(q,r) e_{(k,p,s)}, zero across blocks
  for (int a = 0; a < D; ++a) {
    const Unit& ua = units[a];
    for (int b = 0; b < D; ++b) {
      const Unit& ub = units[b];
      if (ua.block == ub.block && ua.col == ub.row)
        alg->left_mult_[a](index_of(ua.block, ua.row, ub.col), b) = 1.0;
    }
  }
  return alg;
}

std::shared_ptr<const Algebra> Algebra::from_group_table(
    const std::vector<std::vector<int>>& table, int identity_index) {
  const int n = static_cast<int>(table.size());
  if (n == 0) throw InvalidArgumentError("from_group_table: empty table");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n)
      throw InvalidArgumentError("from_group_table: table is not square");
    for (int v : row)
      if (v < 0 || v >= n)
        throw InvalidArgumentError(
            "from_group_table: table entry out of range");
  }
  if (identity_index < 0 || identity_index >= n)
    throw InvalidArgumentError("from_group_table: identity index out of range");

  const int e = identity_index;
  for (int g = 0; g < n; ++g) {
    if (table[e][g] != g || table[g][e] != g) {
      std::ostringstream os;
      os << "from_group_table: identity axiom violated at element " << g;
      throw InvalidArgumentError(os.str());
    }
  }
  for (int g = 0; g < n; ++g) {
    std::vector<bool> seen(n, false);
    for (int h = 0; h < n; ++h) seen[table[g][h]] = true;
    for (int h = 0; h < n; ++h)
      if (!seen[h]) {
        std::ostringstream os;
        os << "from_group_table: row " << g << " is not a permutation";
        throw InvalidArgumentError(os.str());
      }
  }
  for (int h = 0; h < n; ++h) {
    std::vector<bool> seen(n, false);
    for (int g = 0; g < n; ++g) seen[table[g][h]] = true;
    for (int g = 0; g < n; ++g)
      if (!seen[g]) {
        std::ostringstream os;
        os << "from_group_table: column " << h << " is not a permutation";
        throw InvalidArgumentError(os.str());
      }
  }
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h)
      for (int k = 0; k < n; ++k)
        if (table[table[g][h]][k] != table[g][table[h][k]]) {
          std::ostringstream os;
          os << "from_group_table: associativity violated at (" << g << ","
             << h << "," << k << ")";
          throw InvalidArgumentError(os.str());
        }

  auto alg = std::shared_ptr<Algebra>(new Algebra());
  alg->block_dims_ = {n};
  alg->rep_dim_ = n;
  alg->origin_ = AlgebraOrigin::group_algebra;
  alg->group_order_ = n;
  alg->identity_ = e;
  alg->table_ = table;
  alg->signature_ = group_signature(table, e);

  alg->basis_.resize(n);
  alg->invol_.resize(n);
  alg->left_mult_.assign(n, Matrix::Zero(n, n));
  alg->unit_coords_ = Vector::Zero(n);
  alg->unit_coords_(e) = 1.0;

  for (int g = 0; g < n; ++g) {
    // L_g maps delta_x to delta_{gx}
    Matrix L = Matrix::Zero(n, n);
    for (int x = 0; x < n; ++x) L(table[g][x], x) = 1.0;
    alg->basis_[g] = L;
    alg->left_mult_[g] = L;  // delta_g * delta_h = delta_{gh}

    int ginv = -1;
    for (int h = 0; h < n; ++h)
      if (table[g][h] == e) {
        ginv = h;
        break;
      }
    Vector inv = Vector::Zero(n);
    inv(ginv) = 1.0;
    alg->invol_[g] = inv;
  }
  return alg;
}

Element make_element(AlgebraPtr algebra, Vector coords) {
  if (!algebra) throw InvalidArgumentError("make_element: null algebra");
  if (coords.size() != algebra->dim())
    throw InvalidArgumentError(
        "make_element: coordinate length does not match the basis size");
  return Element{std::move(algebra), std::move(coords)};
}

Element basis_element(AlgebraPtr algebra, int alpha) {
  if (!algebra) throw InvalidArgumentError("basis_element: null algebra");
  if (alpha < 0 || alpha >= algebra->dim())
    throw InvalidArgumentError("basis_element: index out of range");
  Vector c = Vector::Zero(algebra->dim());
  c(alpha) = 1.0;
  return Element{std::move(algebra), std::move(c)};
}

Element unit_element(AlgebraPtr algebra) {
  if (!algebra) throw InvalidArgumentError("unit_element: null algebra");
  Vector c = algebra->unit_coords();
  return Element{std::move(algebra), std::move(c)};
}

static void require_same_algebra(const Element& a, const Element& b,
                                 const char* op) {
  if (a.algebra.get() == b.algebra.get()) return;
  if (a.algebra && b.algebra &&
      a.algebra->signature() == b.algebra->signature())
    return;
  throw InvalidArgumentError(std::string(op) +
                             ": elements belong to different algebras");
}

Element multiply(const Element& a, const Element& b) {
  require_same_algebra(a, b, "multiply");
  const Algebra& alg = *a.algebra;
  const int D = alg.dim();
  Vector out = Vector::Zero(D);
  for (int alpha = 0; alpha < D; ++alpha) {
    const Complex c = a.coords(alpha);
    if (c == Complex(0.0, 0.0)) continue;
    out.noalias() += c * (alg.left_mult_basis(alpha) * b.coords);
  }
  return Element{a.algebra, std::move(out)};
}

Element adjoint(const Element& a) {
  const Algebra& alg = *a.algebra;
  const int D = alg.dim();
  Vector out = Vector::Zero(D);
  for (int alpha = 0; alpha < D; ++alpha) {
    const Complex c = a.coords(alpha);
    if (c == Complex(0.0, 0.0)) continue;
    out += std::conj(c) * alg.involution_coords(alpha);
  }
  return Element{a.algebra, std::move(out)};
}

Matrix left_mult_matrix(const Element& a) {
  const Algebra& alg = *a.algebra;
  const int D = alg.dim();
  Matrix out = Matrix::Zero(D, D);
  for (int alpha = 0; alpha < D; ++alpha) {
    const Complex c = a.coords(alpha);
    if (c == Complex(0.0, 0.0)) continue;
    out += c * alg.left_mult_basis(alpha);
  }
  return out;
}

Matrix represent(const Element& a) {
  const Algebra& alg = *a.algebra;
  const int N = alg.rep_dim();
  Matrix out = Matrix::Zero(N, N);
  for (int alpha = 0; alpha < alg.dim(); ++alpha) {
    const Complex c = a.coords(alpha);
    if (c == Complex(0.0, 0.0)) continue;
    out += c * alg.basis_matrix(alpha);
  }
  return out;
}

}  // namespace opk
