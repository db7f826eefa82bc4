#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hdc/kernels.hpp"

using namespace hdc;
using namespace hdc::kernels;

namespace {

PaddedRows random_rows(std::size_t rows, std::size_t width, std::uint64_t seed) {
  PaddedRows out(rows, width);
  CounterRng rng = make_rng(Seed{seed}, 9);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < width; ++c) out.row(r)[c] = static_cast<float>(uniform_draw(rng, -1.0, 1.0));
  }
  return out;
}

}  // namespace

TEST(PaddedRows, StrideIsLaneMultipleAndPaddingIsZero) {
  PaddedRows rows(3, 17);
  EXPECT_EQ(rows.stride(), 32u);
  EXPECT_EQ(rows.logical_row(1).size(), 17u);
  for (std::size_t c = 17; c < 32; ++c) EXPECT_EQ(rows.row(2)[c], 0.0f);
}

TEST(DotLanes, MatchesDoubleOracle) {
  const auto a = random_rows(1, 37, 1);
  const auto b = random_rows(1, 37, 2);
  double oracle = 0.0;
  for (std::size_t i = 0; i < 37; ++i) oracle += double(a.row(0)[i]) * double(b.row(0)[i]);
  EXPECT_NEAR(dot_lanes(a.row(0), b.row(0), a.stride()), oracle, 1e-5);
}

TEST(DotMixed, MatchesDoubleOracle) {
  std::vector<double> c(29);
  std::vector<float> h(29);
  double oracle = 0.0, squares = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = 0.5 * double(i) - 3.0;
    h[i] = static_cast<float>(std::sin(double(i)));
    oracle += c[i] * double(h[i]);
    squares += c[i] * c[i];
  }
  EXPECT_NEAR(dot_mixed(c.data(), h.data(), c.size()), oracle, 1e-12);
  EXPECT_NEAR(sum_squares(c.data(), c.size()), squares, 1e-9);
}

class ProjectParity : public ::testing::TestWithParam<std::tuple<std::size_t, std::size_t, std::size_t, Activation>> {};

TEST_P(ProjectParity, OmpMatchesSerialBitwiseAndCounts) {
  const auto [n, d, j, act] = GetParam();
  const auto basis = random_rows(d, j, 11);
  const auto xs = random_rows(n, j, 12);
  std::vector<double> offsets(d);
  for (std::size_t i = 0; i < d; ++i) offsets[i] = 0.1 * double(i);
  std::vector<float> a(n * d), b(n * d);
  const OpCounter ca = serial::project(basis, offsets, act, xs, a);
  const OpCounter cb = omp::project(basis, offsets, act, xs, b);
  EXPECT_EQ(a, b);
  EXPECT_EQ(ca, cb);
  EXPECT_EQ(ca.mul_add, n * d * j);
  EXPECT_EQ(ca.activation, act == Activation::kCosine ? n * d : 0u);
}

INSTANTIATE_TEST_SUITE_P(Shapes, ProjectParity,
                         ::testing::Values(std::make_tuple(1, 1, 1, Activation::kIdentity),
                                           std::make_tuple(3, 5, 7, Activation::kCosine),
                                           std::make_tuple(70, 130, 33, Activation::kIdentity),
                                           std::make_tuple(129, 517, 100, Activation::kCosine),
                                           std::make_tuple(65, 1030, 16, Activation::kIdentity)));

TEST(Project, MatchesScalarOracle) {
  const auto basis = random_rows(9, 13, 3);
  const auto xs = random_rows(4, 13, 4);
  std::vector<double> offsets(9, 0.25);
  std::vector<float> out(4 * 9);
  omp::project(basis, offsets, Activation::kCosine, xs, out);
  for (std::size_t s = 0; s < 4; ++s) {
    for (std::size_t i = 0; i < 9; ++i) {
      double dot = 0.0;
      for (std::size_t c = 0; c < 13; ++c) dot += double(xs.row(s)[c]) * double(basis.row(i)[c]);
      EXPECT_NEAR(out[s * 9 + i], std::cos(dot + 0.25), 1e-6);
    }
  }
}

TEST(FillGaussian, OmpMatchesSerialAndStreamLayout) {
  PaddedRows a(37, 19), b(37, 19);
  const CounterRng rng(Seed{5}, 0);
  serial::fill_gaussian(rng, 1.5, a);
  omp::fill_gaussian(rng, 1.5, b);
  EXPECT_EQ(a, b);
  // Entry k = i * J + j consumes uniforms 2k and 2k + 1.
  const std::size_t i = 4, j = 7, k = i * 19 + j;
  const float expected = static_cast<float>(1.5 * standard_normal_from(rng.uniform_at(2 * k), rng.uniform_at(2 * k + 1)));
  EXPECT_EQ(a.row(i)[j], expected);
  for (std::size_t c = 19; c < a.stride(); ++c) EXPECT_EQ(a.row(36)[c], 0.0f);
}

TEST(FillUniform, OmpMatchesSerial) {
  std::vector<double> a(1001), b(1001);
  const CounterRng rng(Seed{6}, 1);
  serial::fill_uniform(rng, 0.0, 2.0, a);
  omp::fill_uniform(rng, 0.0, 2.0, b);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[10], 2.0 * rng.uniform_at(10));
}

TEST(Similarities, OmpMatchesSerialAndCounts) {
  const std::size_t classes = 5, dim = 333, queries = 71;
  std::vector<double> protos(classes * dim);
  for (std::size_t i = 0; i < protos.size(); ++i) protos[i] = std::sin(0.37 * double(i));
  const auto q = random_rows(queries, dim, 8);
  std::vector<float> flat(queries * dim);
  for (std::size_t s = 0; s < queries; ++s) std::copy_n(q.row(s), dim, flat.begin() + s * dim);
  std::vector<double> d1(queries * classes), d2(queries * classes), n1(queries), n2(queries);
  const OpCounter c1 = serial::similarities(protos, classes, dim, flat, d1, n1);
  const OpCounter c2 = omp::similarities(protos, classes, dim, flat, d2, n2);
  EXPECT_EQ(d1, d2);
  EXPECT_EQ(n1, n2);
  EXPECT_EQ(c1, c2);
  EXPECT_EQ(c1.mul_add, queries * classes * dim);
  EXPECT_EQ(c1.norm_ops, queries * (dim + 1));
}
