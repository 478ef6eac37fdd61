#include "distrep/rle.hpp"

#include <string>

namespace distrep {

RleOrder rle_order_from_string(std::string_view name) {
  if (name == "row-major") return RleOrder::RowMajor;
  if (name == "column-major") return RleOrder::ColumnMajor;
  throw Error(ErrorCode::ParseError, "unknown RLE order '" + std::string(name) + "'");
}

std::string_view to_string(RleOrder order) {
  return order == RleOrder::RowMajor ? "row-major" : "column-major";
}

std::vector<PixelCoord> rle_decode(std::span<const std::int64_t> counts, int width, int height, RleOrder order) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::ParseError, "RLE mask dimensions must be positive");
  }
  const auto total = static_cast<std::int64_t>(width) * height;
  std::vector<PixelCoord> pixels;
  std::int64_t pos = 0;
  bool foreground = false;
  for (std::int64_t run : counts) {
    if (run < 0) {
      throw Error(ErrorCode::ParseError, "negative RLE run length");
    }
    if (run > total - pos) {
      throw Error(ErrorCode::ParseError, "RLE runs exceed width * height");
    }
    if (foreground) {
      for (std::int64_t i = pos; i < pos + run; ++i) {
        if (order == RleOrder::RowMajor) {
          pixels.push_back(PixelCoord{static_cast<int>(i % width), static_cast<int>(i / width)});
        } else {
          pixels.push_back(PixelCoord{static_cast<int>(i / height), static_cast<int>(i % height)});
        }
      }
    }
    pos += run;
    foreground = !foreground;
  }
  if (pos != total) {
    throw Error(ErrorCode::ParseError, "RLE runs sum to " + std::to_string(pos) + ", expected " +
                                           std::to_string(total));
  }
  return pixels;
}

std::vector<std::int64_t> rle_encode(std::span<const PixelCoord> pixels, int width, int height, RleOrder order) {
  const auto total = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<bool> mask(total, false);
  for (const auto& p : pixels) {
    if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height) {
      throw Error(ErrorCode::InvalidArgument, "pixel outside the RLE mask");
    }
    const std::size_t i = order == RleOrder::RowMajor ? static_cast<std::size_t>(p.y) * width + p.x
                                                      : static_cast<std::size_t>(p.x) * height + p.y;
    mask[i] = true;
  }
  std::vector<std::int64_t> counts;
  bool current = false;
  std::int64_t run = 0;
  for (std::size_t i = 0; i < total; ++i) {
    if (mask[i] != current) {
      counts.push_back(run);
      run = 0;
      current = mask[i];
    }
    ++run;
  }
  counts.push_back(run);
  return counts;
}

}  // namespace distrep
