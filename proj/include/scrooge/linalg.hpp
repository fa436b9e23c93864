#pragma once

#include "scrooge/types.hpp"

#include <span>
#include <string>

namespace scrooge {

// Trace out every region except `keep`. The result acts on the kept sites in
// their original order.
Matrix partial_trace(const Matrix& op, const Partition& part, const std::string& keep);

// Transpose the indices belonging to `region`, leaving the rest untouched.
Matrix partial_transpose(const Matrix& op, const Partition& part, const std::string& region);

// lambda^{-1/2} on eigenvalues above rank_tol, 0 elsewhere. rank_tol < 0
// selects the default 1e-10 * max eigenvalue.
Matrix pinv_sqrt(const DensityMatrix& rho, double rank_tol = -1.0);

// PSD square root (negative round-off eigenvalues clamped to zero).
Matrix sqrt_psd(const DensityMatrix& rho);

// <bra_1 x ... x bra_k| rho^(x k) pi |ket_1 x ... x ket_k>, evaluated as the
// cycle product prod_r <bra_r|rho|ket_{pi^{-1}(r)}> without ever forming the
// d^k-dimensional space.
Complex permuted_product_element(const DensityMatrix& rho, std::span<const Vector> bras,
                                 std::span<const Vector> kets, const Permutation& pi);

// Operator norm (largest singular value; max |eigenvalue| for Hermitian input).
double spectral_norm(const Matrix& op);

// Trace-norm distance: sum of singular values of m1 - m2.
double trace_norm_distance(const Matrix& m1, const Matrix& m2);

bool is_hermitian(const Matrix& m, double tol = kHermitianTol);

// Index bookkeeping for interleaved tensor factors: embed[a] is the
// contribution of sub-index a (over `sites`) to the full row/column index.
std::vector<Index> embedding_table(const std::vector<Index>& factor_dims,
                                   const std::vector<int>& sites);

}  // namespace scrooge
