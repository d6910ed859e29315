#ifndef OPKERNEL_ALGEBRA_HPP
#define OPKERNEL_ALGEBRA_HPP

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "opkernel/errors.hpp"

namespace opk {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class AlgebraOrigin { matrix_blocks, group_algebra };

// A finite-dimensional C*-algebra carried as a concrete faithful
// *-representation by complex matrices.  Two constructions are supported:
//
//   from_matrix_blocks: the direct sum  M_{d_1} + ... + M_{d_k}  acting on
//     C^{d_1+...+d_k}, with the matrix units as distinguished basis, ordered
//     block-by-block and row-major within a block.
//
//   from_group_table: the group algebra C[G] of a finite group given by its
//     multiplication table, realized by the left-regular permutation
//     matrices {L_g} in table order.
//
// Structure constants (products of basis elements, the involution, the unit)
// are built combinatorially, so basis-level arithmetic is exact.
class Algebra {
public:
  static std::shared_ptr<const Algebra> from_matrix_blocks(
      const std::vector<int>& dims);
  static std::shared_ptr<const Algebra> from_group_table(
      const std::vector<std::vector<int>>& table, int identity_index);

  // number of basis elements D
  int dim() const { return static_cast<int>(basis_.size()); }
  // side length N of the represented matrices
  int rep_dim() const { return rep_dim_; }
  const std::vector<int>& block_dims() const { return block_dims_; }
  AlgebraOrigin origin() const { return origin_; }
  // group order for group algebras, 0 otherwise
  int group_order() const { return group_order_; }
  const std::vector<std::vector<int>>& group_table() const { return table_; }
  int group_identity() const { return identity_; }

  const Matrix& basis_matrix(int alpha) const { return basis_[alpha]; }
  const Vector& unit_coords() const { return unit_coords_; }
  // coordinates of (e_alpha)^* in the basis
  const Vector& involution_coords(int alpha) const { return invol_[alpha]; }
  // D x D matrix with coords(e_alpha * b) = left_mult_basis(alpha) * coords(b)
  const Matrix& left_mult_basis(int alpha) const { return left_mult_[alpha]; }

  // structural identity, used to reject cross-algebra element mixing
  const std::string& signature() const { return signature_; }

private:
  Algebra() = default;

  std::vector<int> block_dims_;
  int rep_dim_ = 0;
  std::vector<Matrix> basis_;
  Vector unit_coords_;
  std::vector<Vector> invol_;
  std::vector<Matrix> left_mult_;
  AlgebraOrigin origin_ = AlgebraOrigin::matrix_blocks;
  int group_order_ = 0;
  int identity_ = 0;
  std::vector<std::vector<int>> table_;
  std::string signature_;
};

using AlgebraPtr = std::shared_ptr<const Algebra>;

// Coefficient vector of an algebra element over the distinguished basis.
struct Element {
  AlgebraPtr algebra;
  Vector coords;
};

Element make_element(AlgebraPtr algebra, Vector coords);
Element basis_element(AlgebraPtr algebra, int alpha);
Element unit_element(AlgebraPtr algebra);

Element multiply(const Element& a, const Element& b);
Element adjoint(const Element& a);

// D x D matrix M_a with coords(a*b) = M_a * coords(b) for every b
Matrix left_mult_matrix(const Element& a);

// image of the element in the faithful representation
Matrix represent(const Element& a);

}  // namespace opk

#endif  // OPKERNEL_ALGEBRA_HPP
