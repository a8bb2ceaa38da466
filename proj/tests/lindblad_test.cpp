#include "ness/lindblad.hpp"

#include "ness/xxx.hpp"

#include <gtest/gtest.h>

#include <random>

namespace {

using ness::ChainSpec;
using ness::cx;
using ness::Mat;

Mat random_mat(long d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Mat A(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) A(i, j) = cx(g(rng), g(rng));
  return A;
}

Mat random_density(long d, std::uint64_t seed) {
  const Mat R = random_mat(d, seed);
  Mat rho = R * R.adjoint();
  rho /= rho.trace().real();
  return rho;
}

ChainSpec twisted_spec(int N, double gamma = 1.0, double theta = 1.5707963267948966) {
  ness::XxxParams p;
  p.N = N;
  p.gamma = gamma;
  p.theta = theta;
  return ness::xxx_lab_spec(p);
}

TEST(Hamiltonian, DenseMatchesKronSum) {
  const ChainSpec spec = twisted_spec(3);
  const Mat H = ness::hamiltonian(spec).dense();
  Mat expect = Mat::Zero(8, 8);
  const Mat I2 = Mat::Identity(2, 2);
  for (int a = 1; a <= 3; ++a) {
    expect += ness::kron(ness::kron(ness::pauli(a), ness::pauli(a)), I2);
    expect += ness::kron(I2, ness::kron(ness::pauli(a), ness::pauli(a)));
  }
  EXPECT_NEAR((H - expect).cwiseAbs().maxCoeff(), 0.0, 1e-13);
}

TEST(Liouvillian, PreservesTrace) {
  const ChainSpec spec = twisted_spec(3, 0.7, 2.0);
  const Mat rho = random_density(8, 3);
  EXPECT_NEAR(std::abs(ness::liouvillian_apply(spec, rho).trace()), 0.0, 1e-12);
}

TEST(Liouvillian, AdjointDuality) {
  // tr(F^dag L(rho)) = tr((L^dag F)^dag rho) for random F, rho
  const ChainSpec spec = twisted_spec(3, 1.3, 0.9);
  const Mat rho = random_mat(8, 17);
  const Mat F = random_mat(8, 19);
  const cx lhs = (F.adjoint() * ness::liouvillian_apply(spec, rho)).trace();
  const cx rhs = (ness::adjoint_apply(spec, F).adjoint() * rho).trace();
  EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-10 * std::max(1.0, std::abs(lhs)));
}

TEST(Liouvillian, AdjointAnnihilatesIdentity) {
  const ChainSpec spec = twisted_spec(4, 0.5, 2.5);
  const Mat I = Mat::Identity(16, 16);
  EXPECT_NEAR(ness::adjoint_apply(spec, I).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(Liouvillian, ContinuityEquationInBulk) {
  // d<sigma^a_k>/dt = <j^a_{k-1}> - <j^a_k> away from the boundaries, as an
  // operator identity probed on a random (non-stationary) state
  const int N = 4;
  const ChainSpec spec = twisted_spec(N, 1.0, 2.2);
  const Mat rho = random_density(16, 23);
  const Mat Lrho = ness::liouvillian_apply(spec, rho);
  for (int k = 2; k < N; ++k)
    for (int a = 1; a <= 3; ++a) {
      Mat t = Lrho;
      ness::site_mult_left(t, ness::pauli(a), k, 2, N);
      const double lhs = t.trace().real();
      const double rhs =
          ness::local_current(rho, k - 1, a, N) - ness::local_current(rho, k, a, N);
      EXPECT_NEAR(lhs, rhs, 1e-11) << "k=" << k << " a=" << a;
    }
}

TEST(Superoperator, MatchesMatrixFreeApplication) {
  const ChainSpec spec = twisted_spec(2, 0.8, 1.1);
  const Mat L = ness::superoperator(spec);
  const Mat rho = random_mat(4, 29);
  // row-major vectorization
  Eigen::VectorXcd v(16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) v(4 * i + j) = rho(i, j);
  const Eigen::VectorXcd w = L * v;
  const Mat Lrho = ness::liouvillian_apply(spec, rho);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      EXPECT_NEAR(std::abs(w(4 * i + j) - Lrho(i, j)), 0.0, 1e-11);
}

TEST(SteadyState, FrozenAnchorsAtN2) {
  // Gamma=1, theta=pi/2: exact rationals from the closed-form construction
  const ChainSpec spec = twisted_spec(2);
  const auto res = ness::steady_state(spec);
  EXPECT_LE(res.residual, 1e-12);
  EXPECT_FALSE(res.fallback_used);

  Mat t = res.rho;
  ness::site_mult_left(t, ness::pauli(1), 1, 2, 2);
  EXPECT_NEAR(t.trace().real(), 10.0 / 13.0, 1e-12);

  t = res.rho;
  ness::site_mult_left(t, ness::pauli(1), 2, 2, 2);
  ness::site_mult_left(t, ness::pauli(1), 1, 2, 2);
  EXPECT_NEAR(t.trace().real(), 4.0 / 13.0, 1e-12);

  EXPECT_NEAR(ness::local_current(res.rho, 1, 1, 2), 12.0 / 13.0, 1e-12);
}

TEST(SteadyState, MatchesIndependentNullVector) {
  const ChainSpec spec = twisted_spec(2, 1.7, 0.6);
  const auto res = ness::steady_state(spec);
  // independent route: smallest singular vector of the dense superoperator
  const Mat L = ness::superoperator(spec);
  Eigen::BDCSVD<Mat> svd(L, Eigen::ComputeFullV);
  const Eigen::VectorXcd v = svd.matrixV().col(L.cols() - 1);
  Mat rho(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rho(i, j) = v(4 * i + j);
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint().eval());
  EXPECT_NEAR((rho - res.rho).cwiseAbs().maxCoeff(), 0.0, 1e-10);
}

TEST(SteadyState, HermitianPositiveUnitTrace) {
  for (int N : {2, 3}) {
    const auto res = ness::steady_state(twisted_spec(N, 1.2, 2.8));
    EXPECT_NEAR(std::abs(res.rho.trace() - cx(1.0)), 0.0, 1e-12);
    EXPECT_TRUE(ness::is_hermitian(res.rho, 1e-12));
    Eigen::SelfAdjointEigenSolver<Mat> es(res.rho);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(SteadyState, CurrentUniformAcrossBonds) {
  const int N = 4;
  const auto res = ness::steady_state(twisted_spec(N));
  for (int a = 1; a <= 3; ++a) {
    const double j1 = ness::local_current(res.rho, 1, a, N);
    for (int k = 2; k < N; ++k)
      EXPECT_NEAR(ness::local_current(res.rho, k, a, N), j1, 1e-10) << "a=" << a;
  }
}

TEST(SteadyState, DegenerateKernelDetected) {
  // pure dephasing on both ends leaves every diagonal state stationary: the
  // solver must refuse rather than return an arbitrary kernel element
  ChainSpec spec;
  spec.n = 2;
  spec.N = 2;
  spec.h = ness::xxx_h();
  spec.dissL = {ness::pauli(3)};
  spec.dissR = {ness::pauli(3)};
  EXPECT_THROW(ness::steady_state(spec), ness::NumericalError);
}

TEST(GaugeShift, LindbladianInvariant) {
  const ChainSpec spec = twisted_spec(3, 0.9, 1.9);
  const Mat rho = random_density(8, 41);
  std::mt19937_64 rng(43);
  std::normal_distribution<double> g;
  const std::vector<cx> shifts{cx(g(rng), g(rng)), cx(g(rng), g(rng))};
  EXPECT_LE(ness::gauge_shift_check(spec, shifts, rho), 1e-12);
  EXPECT_THROW(ness::gauge_shift_check(spec, {shifts[0]}, rho), std::invalid_argument);
}

TEST(Validation, RejectsNonHermitianHamiltonianDensity) {
  ChainSpec spec;
  spec.n = 2;
  spec.N = 2;
  spec.h = Mat::Zero(4, 4);
  spec.h(0, 1) = 1.0;  // not hermitian
  spec.dissL = {ness::pauli(1)};
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}

}  // namespace
