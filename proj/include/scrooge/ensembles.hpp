#pragma once

#include "scrooge/rng.hpp"
#include "scrooge/types.hpp"

#include <atomic>
#include <memory>
#include <optional>
#include <string>

namespace scrooge {

enum class EnsembleKind { Haar, ScroogeDistortion, ScroogePurification, Temporal, GaussianVector };

struct Hamiltonian {
  Matrix matrix;       // Hermitian, rescaled so its operator norm equals target_norm
  double target_norm;  // normalization record
};

// Seeded state-ensemble sampler. Sample i is a pure function of
// (master_seed, i): drawing in any order or on any thread gives bit-identical
// results. Instances are immutable after construction and freely shareable.
class EnsembleSampler {
 public:
  static EnsembleSampler haar(Index dim, std::uint64_t master_seed);
  static EnsembleSampler scrooge_distortion(DensityMatrix rho, std::uint64_t master_seed);
  static EnsembleSampler scrooge_purification(DensityMatrix rho, std::uint64_t master_seed);
  static EnsembleSampler temporal(Hamiltonian h, Vector psi0, double horizon,
                                  std::uint64_t master_seed);

  PureState sample(std::uint64_t index) const;

  EnsembleKind kind() const { return kind_; }
  Index dim() const { return dim_; }
  std::uint64_t master_seed() const { return master_seed_; }
  // True when samples carry importance weights (averages must self-normalize).
  bool weighted() const { return kind_ == EnsembleKind::ScroogeDistortion; }
  const std::optional<DensityMatrix>& rho() const { return rho_; }

  // The Haar weight r_phi = d <phi|rho|phi> of the distortion draw at `index`
  // (1 for unweighted kinds).
  double weight_at(std::uint64_t index) const;

  // Count of measure-zero near-null draws that forced a redraw.
  std::uint64_t degenerate_draw_count() const { return *degenerate_draws_; }

 private:
  EnsembleSampler() = default;

  EnsembleKind kind_ = EnsembleKind::Haar;
  Index dim_ = 0;
  std::uint64_t master_seed_ = 0;
  std::optional<DensityMatrix> rho_;
  Matrix sqrt_rho_;          // distortion
  bool diagonal_rho_ = false;  // O(d) fast path when rho is diagonal
  RealVector sqrt_diag_;
  // purification: nonzero eigenpairs of rho
  RealVector support_eigenvalues_;
  Matrix support_eigenvectors_;
  // temporal
  RealVector energies_;
  Matrix energy_basis_;
  Vector psi0_in_basis_;
  double horizon_ = 0.0;
  std::shared_ptr<std::atomic<std::uint64_t>> degenerate_draws_;
};

// Haar-random unit vector of the given dimension.
Vector sample_haar_vector(Index dim, std::uint64_t master_seed, std::uint64_t index);

// i.i.d. standard complex normal entries (unit variance per complex entry).
Vector sample_gaussian_vector(Index dim, std::uint64_t master_seed, std::uint64_t index);

// --- Background states and Hamiltonians -----------------------------------

DensityMatrix make_flat_rank(Index d, Index m);
DensityMatrix make_thermal(const Hamiltonian& h, double beta);
DensityMatrix make_random_rank(Index d, Index m, std::uint64_t seed);
DensityMatrix make_product(const std::vector<DensityMatrix>& factors);
DensityMatrix make_pure_basis(Index d, Index x);

// Textual rho spec: "flat:D:M", "random:D:M:SEED", "pure:D:X",
// "product(SPEC,SPEC,...)", "thermal:gue:D:SEED:BETA", "file:PATH".
DensityMatrix parse_rho_spec(const std::string& spec);

Hamiltonian make_gue_hamiltonian(Index d, std::uint64_t seed, double target_norm);
// Sum of Gaussian-coefficient nearest-neighbour two-site terms on n qubits,
// rescaled to the target operator norm.
Hamiltonian make_local_random_hamiltonian(int n_qubits, std::uint64_t seed, double target_norm);

// Eigendecomposition cache keyed by a hash of the matrix bytes (write-once per
// key; safe for concurrent readers). Exposed for tests.
std::shared_ptr<const EigResult> cached_eigs(const Matrix& hermitian);
std::size_t eig_cache_size();

}  // namespace scrooge
