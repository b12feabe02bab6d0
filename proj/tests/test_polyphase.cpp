#include <gtest/gtest.h>

#include "mrsr/errors.hpp"
#include "mrsr/imaging.hpp"
#include "mrsr/polyphase.hpp"
#include "test_util.hpp"

using namespace mrsr;
using namespace mrsr::testing;

namespace {

const Kernel2D kBlur = uniform_blur_kernel(3);
const Kernel2D kLap = laplacian_kernel();

PolyphaseMatrix zero_matrix(int d) {
  PolyphaseMatrix m(d);
  for (int i = 0; i < m.channels(); ++i) {
    for (int j = 0; j < m.channels(); ++j) m.entry(i, j) = Kernel2D::zero();
  }
  return m;
}

double max_coeff_diff(const PolyphaseMatrix& a, const PolyphaseMatrix& b) {
  double m = 0.0;
  for (int i = 0; i < a.channels(); ++i) {
    for (int j = 0; j < a.channels(); ++j) {
      const Kernel2D& ka = a.entry(i, j);
      const Kernel2D& kb = b.entry(i, j);
      const int r0 = std::min(ka.min_row_offset(), kb.min_row_offset());
      const int r1 = std::max(ka.max_row_offset(), kb.max_row_offset());
      const int c0 = std::min(ka.min_col_offset(), kb.min_col_offset());
      const int c1 = std::max(ka.max_col_offset(), kb.max_col_offset());
      for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) m = std::max(m, std::abs(ka.at(r, c) - kb.at(r, c)));
      }
    }
  }
  return m;
}

}  // namespace

TEST(Lambda1, SentinelAndEncoding) {
  const Lambda1 inf = Lambda1::infinity();
  EXPECT_TRUE(inf.is_infinite());
  EXPECT_TRUE(std::isinf(inf.encoded()));
  EXPECT_EQ(Lambda1::from_encoded(inf.encoded()), inf);
  EXPECT_EQ(Lambda1::from_encoded(2.5), Lambda1(2.5));
  EXPECT_FALSE(Lambda1(1.0) == inf);
  EXPECT_THROW(Lambda1(0.0), InvalidArgument);
  EXPECT_THROW(Lambda1(-1.0), InvalidArgument);
}

TEST(PolyphaseDecompose, SingleComponentForUnitFactor) {
  std::mt19937_64 rng(1);
  const Frame f = random_frame(5, 7, rng);
  const CosetSet cs(DecimationSpec(1));
  const auto s = polyphase_decompose(f, cs);
  ASSERT_EQ(s.components.size(), 1u);
  EXPECT_EQ(s.components[0], f);
}

TEST(PolyphaseDecompose, TwoByTwoExhaustive) {
  // Component i holds x(2n - k_i) read periodically, so on a 2x2 frame the
  // four cosets pick a, b, c, d in coset order.
  const Frame f(2, 2, {1.0, 2.0, 3.0, 4.0});
  const CosetSet cs(DecimationSpec(2));
  const auto s = polyphase_decompose(f, cs);
  ASSERT_EQ(s.components.size(), 4u);
  EXPECT_DOUBLE_EQ(s.components[0](0, 0), 1.0);
  EXPECT_DOUBLE_EQ(s.components[1](0, 0), 2.0);
  EXPECT_DOUBLE_EQ(s.components[2](0, 0), 3.0);
  EXPECT_DOUBLE_EQ(s.components[3](0, 0), 4.0);
}

TEST(PolyphaseDecompose, RoundTrips) {
  std::mt19937_64 rng(2);
  const CosetSet cs(DecimationSpec(2));
  const Frame f = random_frame(16, 16, rng);
  EXPECT_EQ(polyphase_recompose(polyphase_decompose(f, cs), cs), f);

  PolyphaseSignal sig;
  for (int i = 0; i < 4; ++i) sig.components.push_back(random_frame(4, 6, rng));
  const auto back = polyphase_decompose(polyphase_recompose(sig, cs), cs);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(back.components[i], sig.components[i]);

  PolyphaseSignal zeros;
  for (int i = 0; i < 4; ++i) zeros.components.emplace_back(3, 3, 0.0);
  EXPECT_EQ(polyphase_recompose(zeros, cs), Frame(6, 6, 0.0));

  Frame delta(6, 6);
  delta(0, 0) = 1.0;
  EXPECT_EQ(polyphase_recompose(polyphase_decompose(delta, cs), cs), delta);
}

TEST(BuildSystemTransfer, IdentityBlurUnitFactor) {
  const PolyphaseMatrix T = build_system_transfer(Lambda1(1.0), 0.3, Kernel2D::delta(), Kernel2D::zero(),
                                                  DecimationSpec(1));
  ASSERT_EQ(T.channels(), 1);
  PolyphaseMatrix expected = PolyphaseMatrix::identity(1);
  expected.entry(0, 0) = 2.0 * Kernel2D::delta();
  EXPECT_LT(max_coeff_diff(T, expected), 1e-15);
}

TEST(BuildSystemTransfer, CosetProjectorWithoutBlur) {
  const PolyphaseMatrix T = build_system_transfer(Lambda1::infinity(), 0.7, Kernel2D::delta(), Kernel2D::zero(),
                                                  DecimationSpec(2));
  PolyphaseMatrix expected = zero_matrix(2);
  expected.entry(0, 0) = Kernel2D::delta();
  EXPECT_LT(max_coeff_diff(T, expected), 1e-15);
}

TEST(BuildSystemTransfer, IsSymmetric) {
  const PolyphaseMatrix T = build_system_transfer(Lambda1::infinity(), 0.015, kBlur, kLap, DecimationSpec(2));
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Kernel2D& a = T.entry(i, j);
      const Kernel2D& b = T.entry(j, i);
      for (int r = -6; r <= 6; ++r) {
        for (int c = -6; c <= 6; ++c) EXPECT_NEAR(a.at(r, c), b.at(-r, -c), 1e-15);
      }
    }
  }
}

class ProbeExactness : public ::testing::TestWithParam<std::tuple<double, int>> {};

TEST_P(ProbeExactness, PolyphasePathEqualsDirectOperator) {
  const auto [lambda_value, d] = GetParam();
  const Lambda1 lambda = lambda_value > 0 ? Lambda1(lambda_value) : Lambda1::infinity();
  const DecimationSpec spec(d);
  const PolyphaseMatrix T = build_system_transfer(lambda, 0.015, kBlur, kLap, spec, 1e-8);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const Frame x = random_frame(6 * d, 6 * d, rng);
    const Frame direct = apply_system_operator(x, lambda, 0.015, kBlur, kLap, spec, 1e-8);
    EXPECT_LT(max_abs_diff(apply_polyphase(T, x), direct), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Systems, ProbeExactness,
                         ::testing::Values(std::make_tuple(-1.0, 2), std::make_tuple(1.0, 2),
                                           std::make_tuple(0.25, 2), std::make_tuple(-1.0, 3),
                                           std::make_tuple(1.0, 1)));

TEST(ApplySystemOperator, MatchesDenseAssembly) {
  // A = H'D'DH + alphaT S'S assembled from dense matrices of each factor.
  const int n = 8;
  const DecimationSpec spec(2);
  const auto H = assemble([](const Frame& x) { return conv2d(x, kBlur); }, n, n);
  const auto S = assemble([](const Frame& x) { return conv2d(x, kLap); }, n, n);
  const auto D = assemble([&](const Frame& x) { return decimate(x, spec); }, n, n);
  const Eigen::MatrixXd A =
      H.transpose() * D.transpose() * D * H + 0.015 * S.transpose() * S;
  const Eigen::MatrixXd Af = 0.5 * A + Eigen::MatrixXd::Identity(n * n, n * n);
  std::mt19937_64 rng(4);
  const Frame x = random_frame(n, n, rng);
  const Frame inf = apply_system_operator(x, Lambda1::infinity(), 0.015, kBlur, kLap, spec);
  const Frame fin = apply_system_operator(x, Lambda1(0.5), 0.015, kBlur, kLap, spec);
  EXPECT_LT(max_abs_diff(inf, to_frame(A * to_vector(x), n, n)), 1e-12);
  EXPECT_LT(max_abs_diff(fin, to_frame(Af * to_vector(x), n, n)), 1e-12);
}

TEST(ApplyPolyphase, IdentityMatrix) {
  std::mt19937_64 rng(5);
  const Frame x = random_frame(8, 10, rng);
  EXPECT_EQ(apply_polyphase(PolyphaseMatrix::identity(2), x), x);
}

TEST(Compose, IdentityAndZero) {
  const PolyphaseMatrix T = build_system_transfer(Lambda1(1.0), 0.015, kBlur, kLap, DecimationSpec(2));
  EXPECT_EQ(max_coeff_diff(compose(PolyphaseMatrix::identity(2), T), T), 0.0);
  EXPECT_EQ(max_coeff_diff(compose(T, zero_matrix(2)), zero_matrix(2)), 0.0);
}

TEST(Compose, MatchesCascadedApplication) {
  const PolyphaseMatrix T = build_system_transfer(Lambda1(1.0), 0.015, kBlur, kLap, DecimationSpec(2));
  const PolyphaseMatrix U = build_system_transfer(Lambda1::infinity(), 0.02, kBlur, kLap, DecimationSpec(2));
  const PolyphaseMatrix UT = compose(U, T);
  std::mt19937_64 rng(6);
  const Frame x = random_frame(24, 24, rng);
  EXPECT_LT(max_abs_diff(apply_polyphase(UT, x), apply_polyphase(U, apply_polyphase(T, x))), 1e-12);
  Frame delta(24, 24);
  delta(12, 12) = 1.0;
  EXPECT_LT(max_abs_diff(apply_polyphase(UT, delta), apply_polyphase(U, apply_polyphase(T, delta))), 1e-12);
}

TEST(PolyphaseMatrix, DistanceToIdentity) {
  EXPECT_EQ(PolyphaseMatrix::identity(2).distance_to_identity(), 0.0);
  PolyphaseMatrix m = PolyphaseMatrix::identity(2);
  m.entry(0, 0) = 3.0 * Kernel2D::delta();
  m.entry(1, 2) = Kernel2D::shifted_delta(1, 1);
  EXPECT_NEAR(m.distance_to_identity(), std::sqrt(4.0 + 1.0), 1e-15);
}
