#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tenscomp/tensor.hpp"

namespace tenscomp {

/**
 * DTF1 container:
 *
 *   "DTF1" | u32 order | order x u64 extents | doubles, last index fastest
 *
 * All integers and doubles little-endian. Writing is canonical, so equal
 * tensors give equal bytes.
 */
std::vector<std::uint8_t> encode_tensor(const DenseTensor& t);

/// Throws FormatError with the failing byte offset. Non-finite payload
/// values are rejected as bad_value.
DenseTensor decode_tensor(std::span<const std::uint8_t> bytes);

DenseTensor load_tensor(const std::filesystem::path& path);
void save_tensor(const DenseTensor& t, const std::filesystem::path& path);

/// Masks are DTF1 tensors holding only 0.0 and 1.0.
IndexSet load_mask(const std::filesystem::path& path);
void save_mask(const IndexSet& mask, const std::filesystem::path& path);
IndexSet mask_from_tensor(const DenseTensor& t);
DenseTensor mask_to_tensor(const IndexSet& mask);

}  // namespace tenscomp
