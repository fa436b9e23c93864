#pragma once

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace scrooge {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Desk-scale guards: dense vectors up to 2^14, dense operators up to 2^10.
inline constexpr Index kMaxVectorDim = 1 << 14;
inline constexpr Index kMaxMatrixDim = 1 << 10;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kEigenvalueTol = 1e-10;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EigResult {
  RealVector values;  // ascending
  Matrix vectors;     // columns match values
};

// Hermitian eigendecomposition with ascending eigenvalues.
EigResult eigs(const Matrix& hermitian);

// Background density matrix: Hermitian, PSD and unit trace to fixed
// tolerances, with a record of its tensor-factor dimensions.
class DensityMatrix {
 public:
  DensityMatrix(Matrix entries, std::vector<Index> factor_dims);
  explicit DensityMatrix(Matrix entries);  // single factor of the full dimension

  Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  const std::vector<Index>& factor_dims() const { return factor_dims_; }

  // Cached spectral data (computed once, thread-safe to share afterwards).
  const EigResult& eig() const;
  double max_eigenvalue() const { return eig().values(dim() - 1); }
  Index rank(double tol = -1.0) const;

  // Eigenvalues clamped to [0, inf), ascending.
  std::vector<double> spectrum() const;

  DensityMatrix with_factor_dims(std::vector<Index> dims) const;

 private:
  Matrix matrix_;
  std::vector<Index> factor_dims_;
  mutable std::shared_ptr<EigResult> eig_;
  mutable std::shared_ptr<std::once_flag> eig_once_;
};

// Pure state with an optional importance weight (used by the weighted
// Scrooge sampler; weight 1 means a plain normalized sample).
struct PureState {
  Vector amplitudes;
  double weight = 1.0;

  Index dim() const { return amplitudes.size(); }
};

// Assignment of tensor-factor sites to labeled regions.
class Partition {
 public:
  Partition(std::vector<Index> factor_dims, std::vector<std::string> region_of_site);

  // n qubit sites split into consecutive labeled groups, e.g.
  // Partition::qubit_blocks({{"A", 3}, {"B", 2}, {"C", 3}}).
  static Partition qubit_blocks(const std::vector<std::pair<std::string, int>>& blocks);
  // Bipartition of qubits: first n_a sites are "A", the rest "B".
  static Partition qubit_bipartition(int n_qubits, int n_a);

  Index total_dim() const { return total_dim_; }
  int n_sites() const { return static_cast<int>(factor_dims_.size()); }
  const std::vector<Index>& factor_dims() const { return factor_dims_; }
  const std::string& region_of_site(int s) const { return region_of_site_[s]; }

  std::vector<int> sites_of(const std::string& region) const;
  Index region_dim(const std::string& region) const;
  std::vector<std::string> region_labels() const;  // sorted, unique
  bool has_region(const std::string& region) const;

  void require_consistent_with(Index op_dim) const;

 private:
  std::vector<Index> factor_dims_;
  std::vector<std::string> region_of_site_;
  Index total_dim_;
};

// Permutation of k tensor copies.
class Permutation {
 public:
  explicit Permutation(std::vector<int> images);
  static Permutation identity(int k);
  static Permutation transposition(int k, int a, int b);
  static std::vector<Permutation> all(int k);  // k! elements, k <= 6

  int k() const { return static_cast<int>(images_.size()); }
  int image(int r) const { return images_[r]; }
  int preimage(int r) const { return inverse_[r]; }
  const std::vector<int>& images() const { return images_; }
  std::vector<std::vector<int>> cycles() const;

 private:
  std::vector<int> images_;
  std::vector<int> inverse_;
};

std::int64_t factorial(int k);

}  // namespace scrooge
