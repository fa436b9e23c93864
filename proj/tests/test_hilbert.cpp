#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scrooge/linalg.hpp"
#include "scrooge/rng.hpp"
#include "scrooge/types.hpp"

#include <Eigen/Eigenvalues>

using namespace scrooge;

namespace {

Matrix random_matrix(std::uint64_t seed, Index rows, Index cols) {
  CounterRng rng(seed, 0x74657374ull, 0);
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) m(r, c) = rng.complex_normal();
  }
  return m;
}

DensityMatrix random_density(std::uint64_t seed, Index d, std::vector<Index> dims = {}) {
  Matrix g = random_matrix(seed, d, d);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix((rho + rho.adjoint()) / 2.0, std::move(dims));
}

Vector basis_vector(Index d, Index x) {
  Vector v = Vector::Zero(d);
  v(x) = 1.0;
  return v;
}

// Dense tensor-power oracle: rho^(x k) * pi as an explicit d^k x d^k matrix.
Matrix dense_tensor_moment(const Matrix& rho, const Permutation& pi) {
  const Index d = rho.rows();
  const int k = pi.k();
  Index dk = 1;
  for (int i = 0; i < k; ++i) dk *= d;
  auto digits = [&](Index idx) {
    std::vector<Index> out(static_cast<size_t>(k));
    for (int r = k - 1; r >= 0; --r) {
      out[static_cast<size_t>(r)] = idx % d;
      idx /= d;
    }
    return out;
  };
  Matrix result(dk, dk);
  for (Index row = 0; row < dk; ++row) {
    auto ri = digits(row);
    for (Index col = 0; col < dk; ++col) {
      auto ci = digits(col);
      Complex prod = 1.0;
      for (int r = 0; r < k; ++r) prod *= rho(ri[static_cast<size_t>(r)], ci[static_cast<size_t>(pi.preimage(r))]);
      result(row, col) = prod;
    }
  }
  return result;
}

}  // namespace

TEST_CASE("partial trace of the Bell state is maximally mixed") {
  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  Matrix rho = bell * bell.adjoint();
  Partition part({2, 2}, {"A", "B"});
  Matrix reduced = partial_trace(rho, part, "A");
  CHECK((reduced - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace of a product keeps the kept factor") {
  DensityMatrix a = random_density(1, 2);
  DensityMatrix b = random_density(2, 3);
  Matrix prod(6, 6);
  for (Index r = 0; r < 2; ++r) {
    for (Index c = 0; c < 2; ++c) {
      prod.block(r * 3, c * 3, 3, 3) = a.matrix()(r, c) * b.matrix();
    }
  }
  Partition part({2, 3}, {"A", "B"});
  CHECK((partial_trace(prod, part, "A") - a.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((partial_trace(prod, part, "B") - b.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace matches the index-summation oracle") {
  DensityMatrix rho = random_density(3, 4, {2, 2});
  Partition part({2, 2}, {"A", "B"});
  Matrix reduced = partial_trace(rho.matrix(), part, "A");
  // naive quadruple loop
  Matrix oracle = Matrix::Zero(2, 2);
  for (Index a1 = 0; a1 < 2; ++a1) {
    for (Index a2 = 0; a2 < 2; ++a2) {
      for (Index b = 0; b < 2; ++b) {
        oracle(a1, a2) += rho.matrix()(a1 * 2 + b, a2 * 2 + b);
      }
    }
  }
  CHECK((reduced - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace preserves the trace and hermiticity, many random inputs") {
  for (int i = 0; i < 1000; ++i) {
    Matrix m = random_matrix(100 + static_cast<std::uint64_t>(i), 8, 8);
    Partition part({2, 2, 2}, {"A", "B", "A"});
    Matrix reduced = partial_trace(m, part, "A");
    CHECK(std::abs(reduced.trace() - m.trace()) < 1e-10);
  }
  DensityMatrix rho = random_density(7, 8, {2, 2, 2});
  Partition part({2, 2, 2}, {"A", "B", "B"});
  Matrix reduced = partial_trace(rho.matrix(), part, "B");
  CHECK(is_hermitian(reduced, 1e-12));
}

TEST_CASE("partial trace rejects a foreign region") {
  Partition part({2, 2}, {"A", "B"});
  Matrix m = Matrix::Identity(4, 4);
  CHECK_THROWS_AS(partial_trace(m, part, "C"), ValidationError);
  CHECK_THROWS_AS(partial_trace(Matrix::Identity(8, 8), part, "A"), DimensionError);
}

TEST_CASE("partial transpose basics") {
  Partition part({2, 2}, {"A", "B"});

  Matrix diag = Eigen::Vector4d(0.1, 0.2, 0.3, 0.4).cast<Complex>().asDiagonal();
  CHECK((partial_transpose(diag, part, "B") - diag).cwiseAbs().maxCoeff() < 1e-15);

  DensityMatrix a = random_density(11, 2);
  DensityMatrix b = random_density(12, 2);
  Matrix prod(4, 4);
  for (Index r = 0; r < 2; ++r) {
    for (Index c = 0; c < 2; ++c) prod.block(r * 2, c * 2, 2, 2) = a.matrix()(r, c) * b.matrix();
  }
  Matrix expected(4, 4);
  Matrix bt = b.matrix().transpose();
  for (Index r = 0; r < 2; ++r) {
    for (Index c = 0; c < 2; ++c) expected.block(r * 2, c * 2, 2, 2) = a.matrix()(r, c) * bt;
  }
  CHECK((partial_transpose(prod, part, "B") - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial transpose of the Bell state has eigenvalue -1/2") {
  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  Matrix rho = bell * bell.adjoint();
  Partition part({2, 2}, {"A", "B"});
  EigResult e = eigs(partial_transpose(rho, part, "B"));
  CHECK(e.values(0) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("partial transpose is an involution") {
  for (int i = 0; i < 50; ++i) {
    Matrix m = random_matrix(300 + static_cast<std::uint64_t>(i), 8, 8);
    Partition part({2, 4}, {"A", "B"});
    Matrix twice = partial_transpose(partial_transpose(m, part, "B"), part, "B");
    CHECK((twice - m).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pinv_sqrt on eigenvalue examples") {
  const Index d = 4;
  DensityMatrix flat(Matrix::Identity(d, d) / static_cast<double>(d));
  CHECK((pinv_sqrt(flat) - 2.0 * Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);

  Matrix proj = Matrix::Zero(2, 2);
  proj(0, 0) = 1.0;
  DensityMatrix pure(proj);
  CHECK((pinv_sqrt(pure) - proj).cwiseAbs().maxCoeff() < 1e-10);

  Matrix diag = Matrix::Zero(3, 3);
  diag(0, 0) = 0.9;
  diag(1, 1) = 0.1;
  DensityMatrix rho(diag);
  Matrix result = pinv_sqrt(rho, 1e-8);
  CHECK(result(0, 0).real() == doctest::Approx(1.0 / std::sqrt(0.9)).epsilon(1e-12));
  CHECK(result(1, 1).real() == doctest::Approx(1.0 / std::sqrt(0.1)).epsilon(1e-12));
  CHECK(std::abs(result(2, 2)) < 1e-14);
}

TEST_CASE("pinv_sqrt sandwich is the support projector") {
  DensityMatrix rho = [] {
    Matrix g = random_matrix(40, 6, 3);  // rank 3
    Matrix m = g * g.adjoint();
    m /= m.trace().real();
    return DensityMatrix((m + m.adjoint()) / 2.0);
  }();
  Matrix p = pinv_sqrt(rho) * rho.matrix() * pinv_sqrt(rho);
  CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(p.trace().real() == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("permuted product element: identity and swap") {
  DensityMatrix rho = random_density(50, 3);
  std::vector<Vector> bras, kets;
  for (int r = 0; r < 2; ++r) {
    bras.push_back(sample_haar_vector(3, 51, static_cast<std::uint64_t>(r)));
    kets.push_back(sample_haar_vector(3, 52, static_cast<std::uint64_t>(r)));
  }
  Complex id_val = permuted_product_element(rho, bras, kets, Permutation::identity(2));
  Complex expected = bras[0].dot(rho.matrix() * kets[0]) * bras[1].dot(rho.matrix() * kets[1]);
  CHECK(std::abs(id_val - expected) < 1e-14);

  // equal bras and kets: identity and swap coincide at <x|rho|x>^2
  Vector x = sample_haar_vector(3, 53, 0);
  std::vector<Vector> same = {x, x};
  Complex diag = x.dot(rho.matrix() * x);
  for (const Permutation& pi : Permutation::all(2)) {
    CHECK(std::abs(permuted_product_element(rho, same, same, pi) - diag * diag) < 1e-14);
  }
}

TEST_CASE("permuted product element matches the dense tensor oracle at k=3") {
  const Index d = 4;
  DensityMatrix rho = random_density(60, d);
  std::vector<Vector> bras, kets;
  for (int r = 0; r < 3; ++r) {
    bras.push_back(sample_haar_vector(d, 61, static_cast<std::uint64_t>(r)));
    kets.push_back(sample_haar_vector(d, 62, static_cast<std::uint64_t>(r)));
  }
  std::vector<int> cycle = {1, 2, 0};
  Permutation pi(cycle);
  Matrix dense = dense_tensor_moment(rho.matrix(), pi);
  Vector bra_tensor(64), ket_tensor(64);
  for (Index i = 0; i < 64; ++i) {
    Index i0 = i / 16, i1 = (i / 4) % 4, i2 = i % 4;
    bra_tensor(i) = bras[0](i0) * bras[1](i1) * bras[2](i2);
    ket_tensor(i) = kets[0](i0) * kets[1](i1) * kets[2](i2);
  }
  Complex oracle = bra_tensor.dot(dense * ket_tensor);
  Complex fast = permuted_product_element(rho, bras, kets, pi);
  CHECK(std::abs(oracle - fast) < 1e-12);
}

TEST_CASE("permutation sum over product vectors is real and nonnegative") {
  DensityMatrix rho = random_density(70, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vector> kets;
    for (int r = 0; r < 3; ++r) {
      kets.push_back(sample_haar_vector(3, 71 + static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(r)));
    }
    Complex total = 0.0;
    for (const Permutation& pi : Permutation::all(3)) {
      total += permuted_product_element(rho, kets, kets, pi);
    }
    CHECK(std::abs(total.imag()) < 1e-12);
    CHECK(total.real() > -1e-12);
  }
}

TEST_CASE("spectral norm examples and characteristic-polynomial oracle") {
  CHECK(spectral_norm(Matrix::Identity(3, 3)) == doctest::Approx(1.0));
  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = -3.0;
  diag(1, 1) = 2.0;
  CHECK(spectral_norm(diag) == doctest::Approx(3.0));

  // 8x8 random Hermitian: roots of the characteristic polynomial via the
  // companion matrix (independent non-selfadjoint eigensolver path).
  Matrix g = random_matrix(80, 8, 8);
  Matrix h = (g + g.adjoint()) / 2.0;
  // Faddeev-LeVerrier coefficients of det(tI - H)
  const int n = 8;
  std::vector<Complex> coeff(static_cast<size_t>(n + 1), Complex(0.0, 0.0));
  coeff[static_cast<size_t>(n)] = 1.0;
  Matrix mk = Matrix::Zero(n, n);
  Complex ck = 1.0;
  Matrix identity = Matrix::Identity(n, n);
  for (int k = 1; k <= n; ++k) {
    mk = h * mk + ck * identity;
    ck = -(h * mk).trace() / static_cast<double>(k);
    coeff[static_cast<size_t>(n - k)] = ck;
  }
  Matrix companion = Matrix::Zero(n, n);
  for (int r = 1; r < n; ++r) companion(r, r - 1) = 1.0;
  for (int r = 0; r < n; ++r) companion(r, n - 1) = -coeff[static_cast<size_t>(r)];
  Eigen::ComplexEigenSolver<Matrix> solver(companion);
  double oracle = solver.eigenvalues().cwiseAbs().maxCoeff();
  CHECK(spectral_norm(h) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("density matrix validation rejects bad inputs") {
  Matrix not_herm = Matrix::Zero(2, 2);
  not_herm(0, 1) = 1.0;
  not_herm(0, 0) = not_herm(1, 1) = 0.5;
  CHECK_THROWS_AS(DensityMatrix(not_herm), ValidationError);

  Matrix wrong_trace = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(DensityMatrix(wrong_trace), ValidationError);

  Matrix negative = Matrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix(negative), ValidationError);

  CHECK_THROWS_AS(DensityMatrix(Matrix::Identity(4, 4) / 4.0, {2, 3}), DimensionError);
}

TEST_CASE("permutation type invariants") {
  CHECK_THROWS_AS(Permutation({0, 0, 1}), ValidationError);
  Permutation pi({1, 2, 0, 3});
  auto cycles = pi.cycles();
  std::size_t total = 0;
  for (const auto& c : cycles) total += c.size();
  CHECK(total == 4);
  CHECK(cycles.size() == 2);
  CHECK(Permutation::all(4).size() == 24);
  CHECK_THROWS_AS(Permutation::all(7), ValidationError);
}
