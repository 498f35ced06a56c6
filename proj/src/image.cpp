#include "fpgp/image.hpp"

#include "fpgp/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fpgp {

BinaryImage::BinaryImage(int width, int height)
    : BinaryImage(width, height,
                  std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                            static_cast<std::size_t>(std::max(height, 0)))) {}

BinaryImage::BinaryImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width < 0 || height < 0) throw std::invalid_argument("image dimensions must be non-negative");
    if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw std::invalid_argument("pixel count does not match image dimensions");
    }
    for (auto& p : pixels_) p = p ? 1 : 0;
}

std::size_t BinaryImage::ridge_count() const noexcept {
    return static_cast<std::size_t>(std::count(pixels_.begin(), pixels_.end(), std::uint8_t{1}));
}

// --- netpbm ----------------------------------------------------------------

namespace {

class HeaderReader {
public:
    explicit HeaderReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const auto c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    unsigned long number(const char* what) {
        skip_space_and_comments();
        if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) {
            throw FormatError(std::string("netpbm: missing or invalid ") + what);
        }
        unsigned long v = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            v = v * 10 + static_cast<unsigned long>(bytes_[pos_] - '0');
            if (v > 1'000'000'000UL) throw FormatError(std::string("netpbm: ") + what + " too large");
            ++pos_;
        }
        return v;
    }

    // A single whitespace byte separates the header from a binary raster.
    void end_of_header() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
            throw FormatError("netpbm: truncated header");
        }
        ++pos_;
    }

    std::size_t pos() const noexcept { return pos_; }
    void set_pos(std::size_t p) noexcept { pos_ = p; }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

} // namespace

BinaryImage decode_netpbm(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P') throw FormatError("not a netpbm file");
    const char kind = static_cast<char>(bytes[1]);
    if (kind != '1' && kind != '2' && kind != '4' && kind != '5') {
        throw FormatError(std::string("unsupported netpbm format P") + kind);
    }
    HeaderReader header(bytes);
    header.set_pos(2);
    const auto width = header.number("width");
    const auto height = header.number("height");
    if (width == 0 || height == 0) throw FormatError("netpbm: zero image dimension");
    if (width * height > 400'000'000UL) throw FormatError("netpbm: image too large");
    unsigned long maxval = 1;
    if (kind == '2' || kind == '5') {
        maxval = header.number("maxval");
        if (maxval == 0 || maxval > 65535) throw FormatError("netpbm: maxval out of range");
    }

    const int w = static_cast<int>(width);
    const int h = static_cast<int>(height);
    BinaryImage image(w, h);
    // Dark samples are ridge: value / maxval below one half.
    const auto dark = [maxval](unsigned long v) { return v * 255 < 128 * maxval; };

    switch (kind) {
    case '1': {
        std::size_t p = header.pos();
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                header.set_pos(p);
                header.skip_space_and_comments();
                p = header.pos();
                if (p >= bytes.size()) throw FormatError("netpbm: truncated P1 raster");
                if (bytes[p] != '0' && bytes[p] != '1') throw FormatError("netpbm: invalid P1 sample");
                image.set(x, y, bytes[p] == '1');
                ++p;
            }
        }
        break;
    }
    case '2': {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const auto v = header.number("P2 sample");
                if (v > maxval) throw FormatError("netpbm: sample exceeds maxval");
                image.set(x, y, dark(v));
            }
        }
        break;
    }
    case '4': {
        header.end_of_header();
        const std::size_t row_bytes = (width + 7) / 8;
        if (bytes.size() - header.pos() < row_bytes * height) throw FormatError("netpbm: truncated P4 raster");
        const auto* raster = bytes.data() + header.pos();
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const auto byte = raster[static_cast<std::size_t>(y) * row_bytes + static_cast<std::size_t>(x) / 8];
                image.set(x, y, (byte >> (7 - x % 8)) & 1);
            }
        }
        break;
    }
    case '5': {
        header.end_of_header();
        const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
        if (bytes.size() - header.pos() < sample_bytes * width * height) {
            throw FormatError("netpbm: truncated P5 raster");
        }
        const auto* raster = bytes.data() + header.pos();
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const auto i = (static_cast<std::size_t>(y) * width + static_cast<std::size_t>(x)) * sample_bytes;
                const unsigned long v = sample_bytes == 2 ? (raster[i] << 8) | raster[i + 1] : raster[i];
                image.set(x, y, dark(v));
            }
        }
        break;
    }
    }
    return image;
}

BinaryImage load_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_netpbm(bytes);
}

// --- thinning --------------------------------------------------------------

SkeletonImage thin(const BinaryImage& input) {
    BinaryImage img = input;
    std::vector<std::pair<int, int>> doomed;

    const auto pass = [&](bool first) {
        doomed.clear();
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                if (!img.at(x, y)) continue;
                // p[0]..p[7] = N, NE, E, SE, S, SW, W, NW
                const int p[8] = {img.get_or_zero(x, y - 1),     img.get_or_zero(x + 1, y - 1),
                                  img.get_or_zero(x + 1, y),     img.get_or_zero(x + 1, y + 1),
                                  img.get_or_zero(x, y + 1),     img.get_or_zero(x - 1, y + 1),
                                  img.get_or_zero(x - 1, y),     img.get_or_zero(x - 1, y - 1)};
                const int b = std::accumulate(std::begin(p), std::end(p), 0);
                if (b < 2 || b > 6) continue;
                int a = 0;
                for (int i = 0; i < 8; ++i) a += p[i] == 0 && p[(i + 1) % 8] == 1;
                if (a != 1) continue;
                const int n = p[0], e = p[2], s = p[4], w = p[6];
                if (first ? (n * e * s != 0 || e * s * w != 0) : (n * e * w != 0 || n * s * w != 0)) continue;
                doomed.emplace_back(x, y);
            }
        }
        for (const auto& [x, y] : doomed) img.set(x, y, false);
        return !doomed.empty();
    };

    for (;;) {
        const bool a = pass(true);
        const bool b = pass(false);
        if (!a && !b) break;
    }
    return SkeletonImage(std::move(img));
}

} // namespace fpgp
