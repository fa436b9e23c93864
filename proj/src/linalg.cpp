#include "scrooge/linalg.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <sstream>

namespace scrooge {

std::vector<Index> embedding_table(const std::vector<Index>& factor_dims,
                                   const std::vector<int>& sites) {
  // Site 0 is the most significant factor (row-major index convention).
  const int n = static_cast<int>(factor_dims.size());
  std::vector<Index> strides(n, 1);
  for (int s = n - 2; s >= 0; --s) strides[s] = strides[s + 1] * factor_dims[s + 1];

  Index sub_dim = 1;
  for (int s : sites) sub_dim *= factor_dims[s];

  std::vector<Index> table(static_cast<size_t>(sub_dim), 0);
  for (Index a = 0; a < sub_dim; ++a) {
    Index rem = a;
    Index full = 0;
    // Decompose `a` over the selected sites, most significant first.
    Index scale = sub_dim;
    for (int s : sites) {
      scale /= factor_dims[s];
      Index digit = rem / scale;
      rem %= scale;
      full += digit * strides[s];
    }
    table[static_cast<size_t>(a)] = full;
  }
  return table;
}

namespace {

std::vector<int> complement_sites(const Partition& part, const std::vector<int>& sites) {
  std::vector<bool> in(part.n_sites(), false);
  for (int s : sites) in[s] = true;
  std::vector<int> out;
  for (int s = 0; s < part.n_sites(); ++s) {
    if (!in[s]) out.push_back(s);
  }
  return out;
}

}  // namespace

Matrix partial_trace(const Matrix& op, const Partition& part, const std::string& keep) {
  part.require_consistent_with(op.rows());
  if (!part.has_region(keep)) {
    throw ValidationError("partial_trace: partition has no region '" + keep + "'");
  }
  const auto keep_sites = part.sites_of(keep);
  const auto trace_sites = complement_sites(part, keep_sites);
  const auto keep_embed = embedding_table(part.factor_dims(), keep_sites);
  const auto trace_embed = embedding_table(part.factor_dims(), trace_sites);

  const Index dk = static_cast<Index>(keep_embed.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Index r = 0; r < dk; ++r) {
    for (Index c = 0; c < dk; ++c) {
      Complex sum = 0.0;
      for (Index t : trace_embed) {
        sum += op(keep_embed[static_cast<size_t>(r)] + t, keep_embed[static_cast<size_t>(c)] + t);
      }
      out(r, c) = sum;
    }
  }
  return out;
}

Matrix partial_transpose(const Matrix& op, const Partition& part, const std::string& region) {
  part.require_consistent_with(op.rows());
  if (!part.has_region(region)) {
    throw ValidationError("partial_transpose: partition has no region '" + region + "'");
  }
  const auto region_sites = part.sites_of(region);
  const auto rest_sites = complement_sites(part, region_sites);
  const auto region_embed = embedding_table(part.factor_dims(), region_sites);
  const auto rest_embed = embedding_table(part.factor_dims(), rest_sites);

  Matrix out(op.rows(), op.cols());
  for (Index ar = 0; ar < static_cast<Index>(region_embed.size()); ++ar) {
    for (Index ac = 0; ac < static_cast<Index>(region_embed.size()); ++ac) {
      for (Index br : rest_embed) {
        for (Index bc : rest_embed) {
          out(region_embed[static_cast<size_t>(ar)] + br, region_embed[static_cast<size_t>(ac)] + bc) =
              op(region_embed[static_cast<size_t>(ac)] + br, region_embed[static_cast<size_t>(ar)] + bc);
        }
      }
    }
  }
  return out;
}

Matrix pinv_sqrt(const DensityMatrix& rho, double rank_tol) {
  const EigResult& decomposition = rho.eig();
  const Index d = rho.dim();
  double cut = rank_tol < 0 ? kEigenvalueTol * std::max(decomposition.values(d - 1), 0.0) : rank_tol;
  RealVector inv_sqrt(d);
  for (Index i = 0; i < d; ++i) {
    double lambda = decomposition.values(i);
    inv_sqrt(i) = lambda > cut ? 1.0 / std::sqrt(lambda) : 0.0;
  }
  return decomposition.vectors * inv_sqrt.asDiagonal() * decomposition.vectors.adjoint();
}

Matrix sqrt_psd(const DensityMatrix& rho) {
  const EigResult& decomposition = rho.eig();
  RealVector root = decomposition.values.cwiseMax(0.0).cwiseSqrt();
  return decomposition.vectors * root.asDiagonal() * decomposition.vectors.adjoint();
}

Complex permuted_product_element(const DensityMatrix& rho, std::span<const Vector> bras,
                                 std::span<const Vector> kets, const Permutation& pi) {
  const int k = pi.k();
  if (static_cast<int>(bras.size()) != k || static_cast<int>(kets.size()) != k) {
    throw DimensionError("permuted_product_element: need k bras and k kets");
  }
  for (int r = 0; r < k; ++r) {
    if (bras[r].size() != rho.dim() || kets[r].size() != rho.dim()) {
      std::ostringstream msg;
      msg << "permuted_product_element: vector " << r << " has wrong dimension";
      throw DimensionError(msg.str());
    }
  }
  Complex prod = 1.0;
  for (int r = 0; r < k; ++r) {
    const Vector& ket = kets[pi.preimage(r)];
    prod *= bras[r].dot(rho.matrix() * ket);  // Eigen dot conjugates the left argument
  }
  return prod;
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double spectral_norm(const Matrix& op) {
  if (op.rows() == op.cols() && is_hermitian(op, 1e-12 * std::max(1.0, op.cwiseAbs().maxCoeff()))) {
    EigResult decomposition = eigs((op + op.adjoint()) / 2.0);
    return decomposition.values.cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Matrix> svd(op);
  return svd.singularValues()(0);
}

double trace_norm_distance(const Matrix& m1, const Matrix& m2) {
  if (m1.rows() != m2.rows() || m1.cols() != m2.cols()) {
    throw DimensionError("trace_norm_distance: shape mismatch");
  }
  Matrix diff = m1 - m2;
  if (diff.rows() == diff.cols() &&
      is_hermitian(diff, 1e-12 * std::max(1.0, diff.cwiseAbs().maxCoeff()))) {
    EigResult decomposition = eigs((diff + diff.adjoint()) / 2.0);
    return decomposition.values.cwiseAbs().sum();
  }
  Eigen::JacobiSVD<Matrix> svd(diff);
  return svd.singularValues().sum();
}

}  // namespace scrooge
