#pragma once

#include "conc/analytic.hpp"
#include "conc/core.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace conc::data {

/// IDX image file (big-endian magic 0x00000803, unsigned-byte pixels):
/// m x (rows*cols) matrix with pixels scaled into [0, 1].
Dataset load_idx(const std::filesystem::path& path);

/// CIFAR-10 binary batches: 3073-byte records (1 label byte, discarded,
/// plus 3072 pixels scaled into [0, 1]); rows concatenated across files.
Dataset load_cifar10(const std::vector<std::filesystem::path>& paths);

/// Rectangular numeric CSV, one sample per line, no rescaling.
Dataset load_csv(const std::filesystem::path& path, bool has_header);

/// m rows of theta + Sigma^{1/2} u with u standard normal; deterministic per
/// seed (each row owns an RNG substream).
Dataset sample_gaussian(const analytic::GaussianSpec& spec, Index m, std::uint64_t seed);

/// gauss-bin container: magic "GCONC1\0\0", u32 LE m, u32 LE n, then m*n
/// little-endian f64 row-major.
void save_gauss_bin(const Dataset& data, const std::filesystem::path& path);
Dataset load_gauss_bin(const std::filesystem::path& path);

}  // namespace conc::data
