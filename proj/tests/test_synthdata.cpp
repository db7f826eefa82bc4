#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <set>

#include "hdc/synthdata.hpp"

using namespace hdc;

namespace {

// One-vs-rest ridge-regularized least-squares linear probe, trained on
// standardized train features and scored on test.
double linear_probe_accuracy(const Split& s, double ridge) {
  const Dataset train = standardize(s.train, s.train);
  const Dataset test = standardize(s.train, s.test);
  const Eigen::Index n = static_cast<Eigen::Index>(train.size());
  const Eigen::Index j = train.feature_count();
  Eigen::MatrixXd x(n, j + 1);
  Eigen::MatrixXd y = Eigen::MatrixXd::Constant(n, train.classes, -1.0);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < j; ++c) x(r, c) = train.features.row(r)[c];
    x(r, j) = 1.0;
    y(r, train.labels[r]) = 1.0;
  }
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += ridge;
  const Eigen::MatrixXd w = gram.ldlt().solve(x.transpose() * y);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < test.size(); ++r) {
    Eigen::RowVectorXd row(j + 1);
    for (Eigen::Index c = 0; c < j; ++c) row(c) = test.features.row(r)[c];
    row(j) = 1.0;
    Eigen::Index best = 0;
    (row * w).maxCoeff(&best);
    hits += static_cast<std::uint32_t>(best) == test.labels[r];
  }
  return static_cast<double>(hits) / static_cast<double>(test.size());
}

Dataset tiny(std::size_t n, std::uint32_t j, std::uint32_t classes) {
  Dataset ds;
  ds.classes = classes;
  ds.features = FloatMatrix(n, j);
  for (std::size_t i = 0; i < n * j; ++i) ds.features.data()[i] = static_cast<float>(std::sin(0.1 * double(i)));
  for (std::size_t i = 0; i < n; ++i) ds.labels.push_back(static_cast<std::uint32_t>(i % classes));
  return ds;
}

std::optional<ErrorKind> decode_error(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_dataset(bytes);
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace

TEST(SignalTask, ShapeBalanceAndDeterminism) {
  const Dataset a = gen_signal_task(3000, Seed{1});
  EXPECT_EQ(a.feature_count(), 900u);
  EXPECT_EQ(a.classes, 3u);
  EXPECT_EQ(a.class_histogram(), (std::vector<std::uint64_t>{1000, 1000, 1000}));
  EXPECT_NO_THROW(a.validate());
  EXPECT_EQ(a.features, gen_signal_task(3000, Seed{1}).features);
  EXPECT_NE(a.features, gen_signal_task(3000, Seed{2}).features);
  EXPECT_NE(a.provenance.find("seed=1"), std::string::npos);
  EXPECT_THROW(gen_signal_task(29, Seed{1}), Error);
}

TEST(SignalTask, LinearProbeStaysBelowCeiling) {
  const Split s = split(gen_signal_task(3000, Seed{1}), 0.3, Seed{1});
  EXPECT_LE(linear_probe_accuracy(s, 100.0), 0.75);
}

TEST(ImageTask, ShapeBalanceAndDeterminism) {
  const Dataset a = gen_image_task(400, Seed{1});
  EXPECT_EQ(a.feature_count(), 256u);
  EXPECT_EQ(a.classes, 8u);
  EXPECT_EQ(a.class_histogram(), std::vector<std::uint64_t>(8, 50));
  EXPECT_EQ(a.features, gen_image_task(400, Seed{1}).features);
  EXPECT_EQ(gen_image_task(64, Seed{1}, 32).feature_count(), 1024u);
  EXPECT_THROW(gen_image_task(31, Seed{1}), Error);
  EXPECT_THROW(gen_image_task(64, Seed{1}, 3), Error);
}

TEST(ImageTask, LinearProbeSeparates) {
  const Split s = split(gen_image_task(400, Seed{1}), 0.3, Seed{1});
  EXPECT_GE(linear_probe_accuracy(s, 100.0), 0.85);
}

TEST(Standardize, SelfStandardizedMomentsAndConstantFeature) {
  Dataset ds = gen_image_task(64, Seed{3});
  for (std::size_t r = 0; r < ds.size(); ++r) ds.features.row(r)[5] = 7.0f;
  const Dataset z = standardize(ds, ds);
  for (std::size_t c = 0; c < z.feature_count(); ++c) {
    double sum = 0.0, ss = 0.0;
    for (std::size_t r = 0; r < z.size(); ++r) sum += z.features.row(r)[c];
    const double mean = sum / double(z.size());
    for (std::size_t r = 0; r < z.size(); ++r) ss += (z.features.row(r)[c] - mean) * (z.features.row(r)[c] - mean);
    const double std = std::sqrt(ss / double(z.size()));
    EXPECT_NEAR(mean, 0.0, 1e-6);
    if (c == 5) {
      EXPECT_EQ(std, 0.0);
      EXPECT_EQ(z.features.row(0)[c], 0.0f);
    } else {
      EXPECT_NEAR(std, 1.0, 1e-3);
    }
  }
}

TEST(Standardize, UsesTrainStatisticsOnly) {
  const Dataset train = gen_image_task(64, Seed{4});
  Dataset shifted = gen_image_task(64, Seed{5});
  for (float& v : shifted.features.data()) v += 3.0f;
  const Dataset with_train = standardize(train, shifted);
  const Dataset with_self = standardize(shifted, shifted);
  EXPECT_NE(with_train.features, with_self.features);
  const FeatureStats st = feature_stats(train.features);
  EXPECT_NEAR(with_train.features.row(0)[0], (shifted.features.row(0)[0] - st.mean[0]) / st.std[0], 1e-5);
}

TEST(Split, BalancedHalves) {
  const Dataset ds = tiny(100, 3, 2);
  const Split s = split(ds, 0.5, Seed{1});
  EXPECT_EQ(s.train.class_histogram(), (std::vector<std::uint64_t>{25, 25}));
  EXPECT_EQ(s.test.class_histogram(), (std::vector<std::uint64_t>{25, 25}));
}

TEST(Split, DisjointCoverAndDeterministic) {
  const Dataset ds = gen_signal_task(300, Seed{2});
  const Split s = split(ds, 0.3, Seed{9});
  std::set<std::size_t> all(s.train_indices.begin(), s.train_indices.end());
  for (auto i : s.test_indices) EXPECT_TRUE(all.insert(i).second);
  EXPECT_EQ(all.size(), 300u);
  EXPECT_TRUE(std::ranges::is_sorted(s.train_indices));
  EXPECT_EQ(s.test_indices, split(ds, 0.3, Seed{9}).test_indices);
  EXPECT_NE(s.test_indices, split(ds, 0.3, Seed{10}).test_indices);
  EXPECT_EQ(s.test.class_histogram(), (std::vector<std::uint64_t>{30, 30, 30}));
  EXPECT_THROW(split(ds, 0.0, Seed{1}), Error);
  EXPECT_THROW(split(ds, 1.0, Seed{1}), Error);
}

TEST(DatasetFile, RoundTripIsBitwise) {
  const Dataset ds = gen_image_task(40, Seed{6});
  const auto bytes = encode_dataset(ds);
  EXPECT_EQ(bytes.size(), 4 + 16 + 40 * 4 + 40 * 256 * 4u);
  const Dataset back = decode_dataset(bytes);
  EXPECT_EQ(back.features, ds.features);
  EXPECT_EQ(back.labels, ds.labels);
  EXPECT_EQ(back.classes, ds.classes);
  EXPECT_EQ(encode_dataset(back), bytes);

  const auto path = std::filesystem::temp_directory_path() / "hdc_test_roundtrip.hdcd";
  write_dataset(ds, path);
  EXPECT_EQ(read_dataset(path).features, ds.features);
  std::filesystem::remove(path);
}

TEST(DatasetFile, DistinctErrors) {
  const auto good = encode_dataset(tiny(6, 2, 3));
  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_EQ(decode_error(bad_magic), ErrorKind::kBadMagic);
  auto bad_version = good;
  bad_version[4] = 9;
  EXPECT_EQ(decode_error(bad_version), ErrorKind::kBadVersion);
  EXPECT_EQ(decode_error({good.begin(), good.end() - 1}), ErrorKind::kTruncated);
  auto trailing = good;
  trailing.push_back(0);
  EXPECT_EQ(decode_error(trailing), ErrorKind::kFormat);
  auto bad_label = good;
  bad_label[20] = 3;  // first label, L = 3
  EXPECT_EQ(decode_error(bad_label), ErrorKind::kFormat);
  try {
    read_dataset("/nonexistent/dir/x.hdcd");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(DatasetFile, TruncationNamesSection) {
  const auto good = encode_dataset(tiny(6, 2, 3));
  try {
    decode_dataset(std::vector<std::uint8_t>(good.begin(), good.begin() + 30));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTruncated);
    EXPECT_NE(std::string(e.what()).find("labels"), std::string::npos);
  }
}
