#include "conc/data.hpp"

#include "conc/rng.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <vector>

namespace conc::data {

static_assert(std::endian::native == std::endian::little,
              "gauss-bin I/O assumes a little-endian host");

namespace {

std::ifstream open_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  return in;
}

void read_exact(std::ifstream& in, char* dst, std::streamsize count,
                const std::filesystem::path& path, const char* what) {
  in.read(dst, count);
  if (in.gcount() != count) {
    throw DataError("truncated " + std::string(what) + " in " + path.string());
  }
}

std::uint32_t read_u32_be(std::ifstream& in, const std::filesystem::path& path,
                          const char* what) {
  unsigned char b[4];
  read_exact(in, reinterpret_cast<char*>(b), 4, path, what);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

Dataset load_idx(const std::filesystem::path& path) {
  auto in = open_binary(path);
  unsigned char magic[4];
  read_exact(in, reinterpret_cast<char*>(magic), 4, path, "IDX header");
  if (magic[0] != 0 || magic[1] != 0) {
    throw DataError("bad IDX magic in " + path.string());
  }
  if (magic[2] != 0x08) {
    throw DataError("unsupported IDX element type in " + path.string() +
                    " (only unsigned bytes are supported)");
  }
  if (magic[3] != 3) {
    throw DataError("unsupported IDX layout in " + path.string() +
                    " (expected 3-D image data, e.g. labels files are not supported)");
  }
  const std::uint32_t count = read_u32_be(in, path, "IDX dimensions");
  const std::uint32_t rows = read_u32_be(in, path, "IDX dimensions");
  const std::uint32_t cols = read_u32_be(in, path, "IDX dimensions");
  if (count == 0 || rows == 0 || cols == 0) {
    throw DataError("empty IDX dimensions in " + path.string());
  }
  const std::size_t pixels = std::size_t(rows) * cols;
  std::vector<unsigned char> buffer(pixels);
  Matrix samples(static_cast<Index>(count), static_cast<Index>(pixels));
  for (std::uint32_t i = 0; i < count; ++i) {
    read_exact(in, reinterpret_cast<char*>(buffer.data()),
               static_cast<std::streamsize>(pixels), path, "IDX pixel data");
    for (std::size_t j = 0; j < pixels; ++j) {
      samples(static_cast<Index>(i), static_cast<Index>(j)) = buffer[j] / 255.0;
    }
  }
  return Dataset(std::move(samples), path.string());
}

Dataset load_cifar10(const std::vector<std::filesystem::path>& paths) {
  constexpr std::size_t kRecord = 3073;  // 1 label byte + 3072 pixels
  constexpr Index kPixels = 3072;
  if (paths.empty()) throw DataError("load_cifar10: no input files");

  std::size_t total_records = 0;
  std::vector<std::size_t> records_per_file;
  for (const auto& path : paths) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(path, ec);
    if (ec) throw DataError("cannot stat file: " + path.string());
    if (size % kRecord != 0) {
      throw DataError("file length is not a multiple of the 3073-byte record size: " +
                      path.string());
    }
    records_per_file.push_back(size / kRecord);
    total_records += size / kRecord;
  }
  if (total_records == 0) throw DataError("load_cifar10: no records in input files");

  Matrix samples(static_cast<Index>(total_records), kPixels);
  Index row = 0;
  std::vector<unsigned char> buffer(kRecord);
  std::string source;
  for (std::size_t f = 0; f < paths.size(); ++f) {
    auto in = open_binary(paths[f]);
    for (std::size_t r = 0; r < records_per_file[f]; ++r, ++row) {
      read_exact(in, reinterpret_cast<char*>(buffer.data()),
                 static_cast<std::streamsize>(kRecord), paths[f], "CIFAR record");
      for (Index j = 0; j < kPixels; ++j) {
        samples(row, j) = buffer[static_cast<std::size_t>(j) + 1] / 255.0;
      }
    }
    if (f > 0) source += ",";
    source += paths[f].string();
  }
  return Dataset(std::move(samples), source);
}

namespace {

double parse_field(std::string_view field, std::size_t line_no,
                   const std::filesystem::path& path) {
  // Trim surrounding whitespace; from_chars is strict about the payload.
  std::size_t begin = 0, end = field.size();
  while (begin < end && (field[begin] == ' ' || field[begin] == '\t')) ++begin;
  while (end > begin && (field[end - 1] == ' ' || field[end - 1] == '\t')) --end;
  double value = 0.0;
  const auto* first = field.data() + begin;
  const auto* last = field.data() + end;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) {
    throw DataError("line " + std::to_string(line_no) + ": non-numeric field '" +
                    std::string(field) + "' in " + path.string());
  }
  return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && has_header) continue;
    if (line.empty()) continue;

    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string_view field =
          std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                          : comma - start);
      row.push_back(parse_field(field, line_no, path));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (width == 0) {
      width = row.size();
    } else if (row.size() != width) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(width) + " fields, got " + std::to_string(row.size()) +
                      " in " + path.string());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("no data rows in " + path.string());

  Matrix samples(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      samples(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return Dataset(std::move(samples), path.string());
}

Dataset sample_gaussian(const analytic::GaussianSpec& spec, Index m, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("sample_gaussian: need m >= 1");
  const Index n = spec.dim();
  Matrix normals(m, n);
  for (Index i = 0; i < m; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));  // one substream per row
    for (Index j = 0; j < n; ++j) normals(i, j) = rng.next_normal();
  }

  const std::string source = "synthetic:gaussian:seed=" + std::to_string(seed);
  switch (spec.structure()) {
    case analytic::GaussianSpec::Structure::Spherical: {
      const double sigma = std::sqrt(spec.spherical_variance());
      normals *= sigma;
      normals.rowwise() += spec.mean().transpose();
      return Dataset(std::move(normals), source);
    }
    case analytic::GaussianSpec::Structure::Diagonal: {
      const Vector scale = spec.diagonal_variances().cwiseSqrt();
      normals.array().rowwise() *= scale.transpose().array();
      normals.rowwise() += spec.mean().transpose();
      return Dataset(std::move(normals), source);
    }
    case analytic::GaussianSpec::Structure::Full: {
      const auto& eigen = spec.full_components();
      const Eigen::MatrixXd sqrt_sigma =
          eigen.vectors * eigen.eigenvalues.cwiseSqrt().asDiagonal() * eigen.vectors.transpose();
      Matrix samples = normals * sqrt_sigma;  // sqrt_sigma is symmetric
      samples.rowwise() += spec.mean().transpose();
      return Dataset(std::move(samples), source);
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

constexpr char kGaussBinMagic[8] = {'G', 'C', 'O', 'N', 'C', '1', '\0', '\0'};

}  // namespace

void save_gauss_bin(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open file for writing: " + path.string());
  out.write(kGaussBinMagic, 8);
  const std::uint32_t m = static_cast<std::uint32_t>(data.m());
  const std::uint32_t n = static_cast<std::uint32_t>(data.n());
  out.write(reinterpret_cast<const char*>(&m), 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(data.samples().data()),
            static_cast<std::streamsize>(sizeof(double)) * data.m() * data.n());
  if (!out) throw DataError("failed writing " + path.string());
}

Dataset load_gauss_bin(const std::filesystem::path& path) {
  auto in = open_binary(path);
  char magic[8];
  read_exact(in, magic, 8, path, "gauss-bin header");
  if (std::memcmp(magic, kGaussBinMagic, 8) != 0) {
    throw DataError("bad gauss-bin magic in " + path.string());
  }
  std::uint32_t m = 0, n = 0;
  read_exact(in, reinterpret_cast<char*>(&m), 4, path, "gauss-bin header");
  read_exact(in, reinterpret_cast<char*>(&n), 4, path, "gauss-bin header");
  if (m == 0 || n == 0) throw DataError("empty gauss-bin dimensions in " + path.string());
  Matrix samples(static_cast<Index>(m), static_cast<Index>(n));
  read_exact(in, reinterpret_cast<char*>(samples.data()),
             static_cast<std::streamsize>(sizeof(double)) * samples.size(), path,
             "gauss-bin payload");
  return Dataset(std::move(samples), path.string());
}

}  // namespace conc::data
