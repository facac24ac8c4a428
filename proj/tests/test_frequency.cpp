#include "geopmp/errors.hpp"
#include "geopmp/frequency.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace geopmp;
using geopmp::test_support::mat;
using geopmp::test_support::vec;

namespace {

void expect_spectrum(const Vec& u, std::initializer_list<std::complex<double>> want) {
  const CVec v = dft(u);
  ASSERT_EQ(v.size(), static_cast<Eigen::Index>(want.size()));
  Eigen::Index i = 0;
  for (auto w : want) EXPECT_LT(std::abs(v(i++) - w), 1e-12) << "bin " << i - 1;
}

FrequencySpec single(int T, std::set<int> allowed) {
  FrequencySpec s;
  s.horizon = T;
  s.control_dim = 1;
  s.allowed_support = {std::move(allowed)};
  return s;
}

}  // namespace

TEST(Dft, Examples) {
  expect_spectrum(vec({1, 1, 1, 1}), {4, 0, 0, 0});
  expect_spectrum(vec({1, -1, 1, -1}), {0, 0, 4, 0});
  expect_spectrum(vec({1, 0, 0, 0}), {1, 1, 1, 1});
}

TEST(Dft, MatchesDirectSumAndParseval) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  for (int T = 1; T <= 9; ++T) {
    Vec u = Vec::NullaryExpr(T, [&] { return nd(rng); });
    const CVec v = dft(u);
    for (int xi = 0; xi < T; ++xi) {
      std::complex<double> s = 0;
      for (int t = 0; t < T; ++t) s += u(t) * std::polar(1.0, -2 * M_PI * xi * t / T);
      EXPECT_LT(std::abs(v(xi) - s), 1e-12);
    }
    EXPECT_NEAR(v.squaredNorm(), T * u.squaredNorm(), 1e-10 * T * u.squaredNorm());
  }
}

TEST(Support, Examples) {
  EXPECT_EQ(support(dft(vec({1, 1, 1, 1}))), std::set<int>{0});
  EXPECT_TRUE(support(CVec::Zero(4), 0.0).empty());
  EXPECT_EQ(support(dft(vec({1, -1, 1, -1}))), std::set<int>{2});
}

TEST(FreqMatrices, TwoStepsDcOnly) {
  const auto mats = build_freq_matrices(single(2, {0}));
  ASSERT_EQ(mats.ell, 1);
  // Oracle: the stacked map must annihilate exactly the sequences whose
  // spectrum lives on bin 0, checked on the basis e_0, e_1 and on their sum.
  const Mat S = mats.stacked();
  EXPECT_LT((S - mat({{1, -1}})).norm(), 1e-15);
  EXPECT_LT((S * vec({1, 1})).norm(), 1e-15);
  EXPECT_EQ(support(dft(vec({1, 1}))), std::set<int>{0});
  for (const Vec& e : {vec({1, 0}), vec({0, 1})}) {
    EXPECT_GT((S * e).norm(), 0.5);
    EXPECT_TRUE(support(dft(e)).count(1));
  }
}

TEST(FreqMatrices, NothingForbidden) {
  const auto mats = build_freq_matrices(single(4, {0, 1, 2, 3}));
  EXPECT_EQ(mats.ell, 0);
  EXPECT_EQ(freq_residual(mats, {vec({1}), vec({2}), vec({3}), vec({4})}).size(), 0);
}

TEST(FreqMatrices, ConjugatePairDeduplicated) {
  const auto mats = build_freq_matrices(single(4, {0, 2}));
  ASSERT_EQ(mats.ell, 2);
  const Mat S = mats.stacked();
  // Rows span {cos, sin} of bin 1 up to sign.
  const Mat expected = mat({{1, 0, -1, 0}, {0, -1, 0, 1}});
  Mat stacked(4, 4);
  stacked << S, expected;
  EXPECT_EQ(numerical_rank(stacked), 2);
  // Brute-force kernel: must be span{(1,1,1,1), (1,-1,1,-1)}.
  const Mat K = null_space(S);
  ASSERT_EQ(K.cols(), 2);
  Mat span(4, 2);
  span << vec({1, 1, 1, 1}), vec({1, -1, 1, -1});
  Mat joint(4, 4);
  joint << K, span;
  EXPECT_EQ(numerical_rank(joint), 2);
}

TEST(FreqResidual, Examples) {
  const auto mats = build_freq_matrices(single(2, {0}));
  EXPECT_NEAR(freq_residual(mats, {vec({0.7}), vec({0.7})})(0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(freq_residual(mats, {vec({1}), vec({-1})})(0)), 2.0, 1e-15);
  EXPECT_EQ(support(dft(vec({1, -1}))), std::set<int>{1});
  EXPECT_THROW(freq_residual(mats, {vec({1})}), DimensionError);
}

TEST(FreqMatrices, FullRowRankAndKernelEquivalence) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  std::bernoulli_distribution coin(0.5);
  int specs = 0;
  for (int T = 1; T <= 8; ++T)
    for (int m = 1; m <= 2; ++m)
      for (int rep = 0; rep < 4; ++rep, ++specs) {
        FrequencySpec spec = FrequencySpec::unconstrained(T, m);
        for (auto& W : spec.allowed_support) {
          W.clear();
          for (int xi = 0; xi < T; ++xi)
            if (coin(rng)) W.insert(xi);
        }
        const auto mats = build_freq_matrices(spec);
        const Mat S = mats.stacked();
        EXPECT_EQ(numerical_rank(S), mats.ell);
        // Sequences from the kernel satisfy the support rule.
        const Mat K = null_space(S);
        Vec z = K.cols() ? Vec(K * Vec::NullaryExpr(K.cols(), [&] { return nd(rng); }))
                         : Vec(Vec::Zero(T * m));
        const auto U = unstack_controls(z, T, m);
        for (int k = 0; k < m; ++k)
          for (int b : support(dft(component_sequence(U, k)), 1e-9))
            EXPECT_TRUE(spec.allowed_support[k].count(b)) << "T=" << T << " k=" << k << " bin " << b;
      }
  EXPECT_GT(specs, 0);
}

TEST(FrequencySpec, RejectsOutOfRangeBins) {
  EXPECT_THROW(single(4, {4}).validate(), Error);
  EXPECT_THROW(single(4, {-1}).validate(), Error);
  EXPECT_NO_THROW(single(4, {0, 3}).validate());
}
