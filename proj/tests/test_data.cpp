#include "doctest.h"

#include "conc/data.hpp"
#include "conc/spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

using namespace conc;
using namespace conc::data;

namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "concmeasure_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
}

std::vector<std::uint8_t> idx_header(std::uint32_t count, std::uint32_t rows,
                                     std::uint32_t cols) {
  std::vector<std::uint8_t> b = {0, 0, 8, 3};
  for (std::uint32_t dim : {count, rows, cols}) {
    b.push_back(std::uint8_t(dim >> 24));
    b.push_back(std::uint8_t(dim >> 16));
    b.push_back(std::uint8_t(dim >> 8));
    b.push_back(std::uint8_t(dim));
  }
  return b;
}

}  // namespace

TEST_CASE("idx loader parses pixels into [0, 1]") {
  const auto path = temp_file("ok.idx");
  auto bytes = idx_header(1, 2, 2);
  bytes.insert(bytes.end(), {0, 255, 128, 0});
  write_bytes(path, bytes);

  const Dataset d = load_idx(path);
  CHECK(d.m() == 1);
  CHECK(d.n() == 4);
  CHECK(d.samples()(0, 0) == 0.0);
  CHECK(d.samples()(0, 1) == 1.0);
  CHECK(d.samples()(0, 2) == 128.0 / 255.0);
  CHECK(d.samples()(0, 3) == 0.0);
}

TEST_CASE("idx loader round trip on synthetic bytes") {
  const auto path = temp_file("roundtrip.idx");
  auto bytes = idx_header(3, 2, 2);
  std::vector<std::uint8_t> pixels;
  for (int i = 0; i < 12; ++i) pixels.push_back(std::uint8_t(i * 21));
  bytes.insert(bytes.end(), pixels.begin(), pixels.end());
  write_bytes(path, bytes);

  const Dataset d = load_idx(path);
  CHECK(d.m() == 3);
  CHECK(d.n() == 4);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 4; ++j) {
      CHECK(d.samples()(i, j) == pixels[std::size_t(i * 4 + j)] / 255.0);
    }
  }
}

TEST_CASE("idx loader rejects malformed files") {
  const auto labels = temp_file("labels.idx");
  write_bytes(labels, {0, 0, 8, 1, 0, 0, 0, 2, 7, 9});  // 1-D labels file
  CHECK_THROWS_WITH_AS(load_idx(labels), doctest::Contains("unsupported"), DataError);

  const auto empty = temp_file("empty.idx");
  write_bytes(empty, {});
  CHECK_THROWS_WITH_AS(load_idx(empty), doctest::Contains("truncated"), DataError);

  const auto badmagic = temp_file("badmagic.idx");
  write_bytes(badmagic, {9, 9, 8, 3, 0, 0, 0, 1});
  CHECK_THROWS_WITH_AS(load_idx(badmagic), doctest::Contains("magic"), DataError);

  const auto badtype = temp_file("badtype.idx");
  write_bytes(badtype, {0, 0, 0x0D, 3, 0, 0, 0, 1});
  CHECK_THROWS_WITH_AS(load_idx(badtype), doctest::Contains("element type"), DataError);

  const auto truncated = temp_file("short.idx");
  auto bytes = idx_header(2, 2, 2);
  bytes.insert(bytes.end(), {1, 2, 3});  // 8 pixels expected
  write_bytes(truncated, bytes);
  CHECK_THROWS_WITH_AS(load_idx(truncated), doctest::Contains("truncated"), DataError);

  CHECK_THROWS_AS(load_idx(temp_file("missing.idx")), DataError);
}

TEST_CASE("cifar loader drops labels and concatenates files") {
  const auto one = temp_file("batch1.bin");
  std::vector<std::uint8_t> record(3073, 255);
  record[0] = 7;  // label byte, discarded
  write_bytes(one, record);

  const Dataset d1 = load_cifar10({one});
  CHECK(d1.m() == 1);
  CHECK(d1.n() == 3072);
  CHECK(d1.samples().minCoeff() == 1.0);

  const auto two = temp_file("batch2.bin");
  std::vector<std::uint8_t> records;
  for (int r = 0; r < 3; ++r) {
    records.push_back(std::uint8_t(r));
    for (int j = 0; j < 3072; ++j) records.push_back(std::uint8_t((r * 7 + j) % 256));
  }
  write_bytes(two, records);

  const Dataset d2 = load_cifar10({two, one});
  CHECK(d2.m() == 4);
  CHECK(d2.samples()(0, 0) == ((0 * 7 + 0) % 256) / 255.0);
  CHECK(d2.samples()(2, 5) == ((2 * 7 + 5) % 256) / 255.0);
  CHECK(d2.samples()(3, 0) == 1.0);  // rows from the second file follow

  const auto bad = temp_file("badlen.bin");
  write_bytes(bad, std::vector<std::uint8_t>(3072, 0));  // one byte short of a record
  CHECK_THROWS_WITH_AS(load_cifar10({bad}), doctest::Contains("3073"), DataError);
}

TEST_CASE("csv loader") {
  const auto path = temp_file("ok.csv");
  write_text(path, "1.0,2.0\n3.0,4.0\n");
  const Dataset d = load_csv(path, false);
  CHECK(d.m() == 2);
  CHECK(d.n() == 2);
  CHECK(d.samples()(1, 1) == 4.0);

  const auto with_header = temp_file("header.csv");
  write_text(with_header, "a,b\n1.5,-2.5\n");
  const Dataset dh = load_csv(with_header, true);
  CHECK(dh.m() == 1);
  CHECK(dh.samples()(0, 1) == -2.5);

  const auto bad = temp_file("bad.csv");
  write_text(bad, "1,a\n");
  CHECK_THROWS_WITH_AS(load_csv(bad, false), doctest::Contains("line 1"), DataError);

  const auto ragged = temp_file("ragged.csv");
  write_text(ragged, "1,2\n3\n");
  CHECK_THROWS_WITH_AS(load_csv(ragged, false), doctest::Contains("line 2"), DataError);
}

TEST_CASE("gaussian sampler is deterministic per seed") {
  const auto spec = analytic::GaussianSpec::spherical(Vector::Zero(4), 1.0);
  const Dataset a = sample_gaussian(spec, 50, 9);
  const Dataset b = sample_gaussian(spec, 50, 9);
  const Dataset c = sample_gaussian(spec, 50, 10);
  CHECK(a.samples() == b.samples());
  CHECK(a.samples() != c.samples());

  const Dataset single = sample_gaussian(spec, 1, 0);
  CHECK(single.m() == 1);
  CHECK(single.samples().allFinite());

  CHECK_THROWS_AS(sample_gaussian(spec, 0, 1), std::invalid_argument);
}

TEST_CASE("gaussian sampler matches its spec moments") {
  const Index n = 784, m = 30000;
  const auto spec = analytic::GaussianSpec::spherical(Vector::Zero(n), 1.0);
  const Dataset d = sample_gaussian(spec, m, 7);
  const double tol = 4.0 / std::sqrt(double(m));
  const Eigen::RowVectorXd mean = d.samples().colwise().mean();
  CHECK(mean.cwiseAbs().maxCoeff() <= tol);

  Vector variances(2);
  variances << 4.0, 1.0;
  const auto diag = analytic::GaussianSpec::diagonal(Vector::Zero(2), variances);
  const Dataset dd = sample_gaussian(diag, 20000, 8);
  for (Index j = 0; j < 2; ++j) {
    const auto col = dd.samples().col(j);
    const double var = (col.array() - col.mean()).square().sum() / double(dd.m() - 1);
    CHECK(var == doctest::Approx(variances[j]).epsilon(0.1));
  }
}

TEST_CASE("full-covariance samples whiten back to unit variance") {
  Matrix rot(3, 3);
  rot << 0.36, 0.48, -0.8, -0.8, 0.6, 0.0, 0.48, 0.64, 0.6;  // orthogonal
  Vector lambda(3);
  lambda << 2.0, 1.0, 0.5;
  Matrix sigma = rot * lambda.asDiagonal() * rot.transpose();
  sigma = 0.5 * (sigma + Matrix(sigma.transpose()));
  Vector theta(3);
  theta << 1.0, -2.0, 0.5;
  const auto spec = analytic::GaussianSpec::full(theta, sigma);

  const Index m = 50000;
  const Dataset d = sample_gaussian(spec, m, 123);

  const auto& eigen = spec.full_components();
  const Eigen::MatrixXd inv_sqrt = eigen.vectors *
                                   eigen.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
                                   eigen.vectors.transpose();
  Matrix whitened = (d.samples().rowwise() - theta.transpose()) * inv_sqrt;
  const Matrix q = spectral::sample_covariance(Dataset(std::move(whitened), "whitened"));
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      CHECK(std::abs(q(i, j) - (i == j ? 1.0 : 0.0)) <= 0.05);
    }
  }
}

TEST_CASE("gauss-bin round trip is bitwise exact") {
  const auto spec = analytic::GaussianSpec::spherical(Vector::Zero(6), 2.0);
  const Dataset d = sample_gaussian(spec, 40, 4);
  const auto path = temp_file("sample.gauss");
  save_gauss_bin(d, path);
  const Dataset back = load_gauss_bin(path);
  CHECK(back.m() == d.m());
  CHECK(back.n() == d.n());
  CHECK(back.samples() == d.samples());

  // tampering with the magic is rejected
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(0);
  f.put('X');
  f.close();
  CHECK_THROWS_WITH_AS(load_gauss_bin(path), doctest::Contains("magic"), DataError);

  const auto truncated = temp_file("trunc.gauss");
  write_bytes(truncated, {'G', 'C', 'O', 'N', 'C', '1', 0, 0, 5, 0});
  CHECK_THROWS_WITH_AS(load_gauss_bin(truncated), doctest::Contains("truncated"), DataError);
}
