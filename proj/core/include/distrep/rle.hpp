#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "distrep/types.hpp"

namespace distrep {

enum class RleOrder { RowMajor, ColumnMajor };

RleOrder rle_order_from_string(std::string_view name);
std::string_view to_string(RleOrder order);

/// Pixels of a run-length encoded binary mask. Counts alternate between
/// background and foreground runs, starting with background (possibly 0),
/// and must sum to width * height. Output follows the scan order.
std::vector<PixelCoord> rle_decode(std::span<const std::int64_t> counts, int width, int height,
                                   RleOrder order = RleOrder::RowMajor);

/// Run-length encoding of a pixel set in the given scan order.
std::vector<std::int64_t> rle_encode(std::span<const PixelCoord> pixels, int width, int height,
                                     RleOrder order = RleOrder::RowMajor);

}  // namespace distrep
