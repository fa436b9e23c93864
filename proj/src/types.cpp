#include "scrooge/types.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace scrooge {

EigResult eigs(const Matrix& hermitian) {
  if (hermitian.rows() != hermitian.cols()) {
    throw DimensionError("eigs: matrix is not square");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigs: no convergence within " << 30 * hermitian.rows()
        << " implicit QL iterations (dim " << hermitian.rows() << ")";
    throw std::runtime_error(msg.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

void validate_density(const Matrix& m, const std::vector<Index>& dims) {
  if (m.rows() != m.cols()) throw DimensionError("DensityMatrix: matrix is not square");
  Index prod = 1;
  for (Index d : dims) {
    if (d < 1) throw DimensionError("DensityMatrix: factor dimension must be positive");
    prod *= d;
  }
  if (prod != m.rows()) {
    std::ostringstream msg;
    msg << "DensityMatrix: factor dims multiply to " << prod << " but matrix has dim " << m.rows();
    throw DimensionError(msg.str());
  }
  if (m.rows() > kMaxMatrixDim) {
    throw DimensionError("DensityMatrix: dimension exceeds the dense-operator limit");
  }
  double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    std::ostringstream msg;
    msg << "DensityMatrix: not Hermitian, max |M - M^dag| = " << herm;
    throw ValidationError(msg.str());
  }
  double tr_err = std::abs(m.trace() - Complex(1.0, 0.0));
  if (tr_err > kTraceTol) {
    std::ostringstream msg;
    msg << "DensityMatrix: trace deviates from 1 by " << tr_err;
    throw ValidationError(msg.str());
  }
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix entries, std::vector<Index> factor_dims)
    : matrix_(std::move(entries)),
      factor_dims_(std::move(factor_dims)),
      eig_once_(std::make_shared<std::once_flag>()) {
  if (factor_dims_.empty()) factor_dims_ = {matrix_.rows()};
  validate_density(matrix_, factor_dims_);
  // PSD check needs the spectrum; compute it eagerly and cache.
  double min_eig = eig().values(0);
  if (min_eig < -kEigenvalueTol) {
    std::ostringstream msg;
    msg << "DensityMatrix: smallest eigenvalue " << min_eig << " below -1e-10";
    throw ValidationError(msg.str());
  }
}

DensityMatrix::DensityMatrix(Matrix entries)
    : DensityMatrix(std::move(entries), std::vector<Index>{}) {}

const EigResult& DensityMatrix::eig() const {
  std::call_once(*eig_once_, [this] { eig_ = std::make_shared<EigResult>(eigs(matrix_)); });
  return *eig_;
}

Index DensityMatrix::rank(double tol) const {
  const auto& vals = eig().values;
  double cut = tol < 0 ? kEigenvalueTol * std::max(vals(dim() - 1), 0.0) : tol;
  Index r = 0;
  for (Index i = 0; i < vals.size(); ++i) {
    if (vals(i) > cut) ++r;
  }
  return r;
}

std::vector<double> DensityMatrix::spectrum() const {
  const auto& vals = eig().values;
  std::vector<double> out(vals.size());
  for (Index i = 0; i < vals.size(); ++i) out[i] = std::max(vals(i), 0.0);
  return out;
}

DensityMatrix DensityMatrix::with_factor_dims(std::vector<Index> dims) const {
  return DensityMatrix(matrix_, std::move(dims));
}

Partition::Partition(std::vector<Index> factor_dims, std::vector<std::string> region_of_site)
    : factor_dims_(std::move(factor_dims)), region_of_site_(std::move(region_of_site)) {
  if (factor_dims_.size() != region_of_site_.size()) {
    throw DimensionError("Partition: one region label required per site");
  }
  if (factor_dims_.empty()) throw DimensionError("Partition: no sites");
  total_dim_ = 1;
  for (size_t s = 0; s < factor_dims_.size(); ++s) {
    if (factor_dims_[s] < 1) {
      std::ostringstream msg;
      msg << "Partition: site " << s << " has non-positive dimension";
      throw DimensionError(msg.str());
    }
    if (region_of_site_[s].empty()) {
      std::ostringstream msg;
      msg << "Partition: site " << s << " has an empty region label";
      throw ValidationError(msg.str());
    }
    total_dim_ *= factor_dims_[s];
  }
}

Partition Partition::qubit_blocks(const std::vector<std::pair<std::string, int>>& blocks) {
  std::vector<Index> dims;
  std::vector<std::string> labels;
  for (const auto& [label, count] : blocks) {
    for (int i = 0; i < count; ++i) {
      dims.push_back(2);
      labels.push_back(label);
    }
  }
  return Partition(std::move(dims), std::move(labels));
}

Partition Partition::qubit_bipartition(int n_qubits, int n_a) {
  if (n_a < 0 || n_a > n_qubits) throw DimensionError("qubit_bipartition: bad split");
  return qubit_blocks({{"A", n_a}, {"B", n_qubits - n_a}});
}

std::vector<int> Partition::sites_of(const std::string& region) const {
  std::vector<int> out;
  for (int s = 0; s < n_sites(); ++s) {
    if (region_of_site_[s] == region) out.push_back(s);
  }
  return out;
}

Index Partition::region_dim(const std::string& region) const {
  Index d = 1;
  for (int s : sites_of(region)) d *= factor_dims_[s];
  return d;
}

std::vector<std::string> Partition::region_labels() const {
  std::set<std::string> labels(region_of_site_.begin(), region_of_site_.end());
  return {labels.begin(), labels.end()};
}

bool Partition::has_region(const std::string& region) const {
  return std::find(region_of_site_.begin(), region_of_site_.end(), region) !=
         region_of_site_.end();
}

void Partition::require_consistent_with(Index op_dim) const {
  if (op_dim != total_dim_) {
    std::ostringstream msg;
    msg << "Partition: sites multiply to " << total_dim_ << " but operator has dim " << op_dim;
    throw DimensionError(msg.str());
  }
}

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  const int k = static_cast<int>(images_.size());
  inverse_.assign(k, -1);
  for (int r = 0; r < k; ++r) {
    int im = images_[r];
    if (im < 0 || im >= k || inverse_[im] != -1) {
      throw ValidationError("Permutation: images are not a bijection on {0..k-1}");
    }
    inverse_[im] = r;
  }
}

Permutation Permutation::identity(int k) {
  std::vector<int> im(k);
  std::iota(im.begin(), im.end(), 0);
  return Permutation(std::move(im));
}

Permutation Permutation::transposition(int k, int a, int b) {
  std::vector<int> im(k);
  std::iota(im.begin(), im.end(), 0);
  std::swap(im[a], im[b]);
  return Permutation(std::move(im));
}

std::vector<Permutation> Permutation::all(int k) {
  if (k < 1 || k > 6) {
    throw ValidationError("Permutation::all: k must be in 1..6 (k! blowup beyond)");
  }
  std::vector<int> im(k);
  std::iota(im.begin(), im.end(), 0);
  std::vector<Permutation> out;
  out.reserve(static_cast<size_t>(factorial(k)));
  do {
    out.emplace_back(im);
  } while (std::next_permutation(im.begin(), im.end()));
  return out;
}

std::vector<std::vector<int>> Permutation::cycles() const {
  const int k = this->k();
  std::vector<bool> seen(k, false);
  std::vector<std::vector<int>> cycles;
  for (int start = 0; start < k; ++start) {
    if (seen[start]) continue;
    std::vector<int> cycle;
    int cur = start;
    while (!seen[cur]) {
      seen[cur] = true;
      cycle.push_back(cur);
      cur = images_[cur];
    }
    cycles.push_back(std::move(cycle));
  }
  return cycles;
}

std::int64_t factorial(int k) {
  std::int64_t f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace scrooge
