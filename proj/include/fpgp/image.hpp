#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace fpgp {

// Row-major binary raster; 1 = ridge, 0 = background. (0, 0) is top-left.
class BinaryImage {
public:
    BinaryImage() = default;
    BinaryImage(int width, int height);
    BinaryImage(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
    void set(int x, int y, bool ridge) { pixels_[index(x, y)] = ridge ? 1 : 0; }
    // 0 outside the raster.
    std::uint8_t get_or_zero(int x, int y) const noexcept { return contains(x, y) ? pixels_[index(x, y)] : 0; }

    std::size_t ridge_count() const noexcept;
    const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> pixels_;
};

// A binary image whose ridges are one pixel wide.
class SkeletonImage {
public:
    SkeletonImage() = default;
    // The caller vouches that `thinned` is already a skeleton.
    explicit SkeletonImage(BinaryImage thinned) : image_(std::move(thinned)) {}

    const BinaryImage& image() const noexcept { return image_; }
    int width() const noexcept { return image_.width(); }
    int height() const noexcept { return image_.height(); }
    std::uint8_t at(int x, int y) const { return image_.at(x, y); }

    friend bool operator==(const SkeletonImage&, const SkeletonImage&) = default;

private:
    BinaryImage image_;
};

// Reads PBM (P1/P4) or PGM (P2/P5). PGM samples darker than mid-grey (128 on
// a 0..255 scale) are ridge. Throws FormatError.
BinaryImage load_image(const std::filesystem::path& path);
BinaryImage decode_netpbm(const std::vector<std::uint8_t>& bytes);

// Zhang-Suen thinning to a fixpoint.
SkeletonImage thin(const BinaryImage& image);

} // namespace fpgp
