#ifndef BVCSIM_IMAGE_HPP
#define BVCSIM_IMAGE_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bvcsim/metrics.hpp"

namespace bvcsim {

using Rgb = std::array<std::uint8_t, 3>;

/// Minimal RGB raster written as binary PPM (P6).
struct Image {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;

    Image(int w, int h, Rgb fill = {0, 0, 0}) : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

    Rgb& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    const Rgb& at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }

    /// Binary PPM (P6); a nonempty comment is embedded in the header.
    void write_ppm(const std::filesystem::path& path, const std::string& comment = {}) const;
};

/// Perceptual dark-to-bright colormap for t in [0, 1].
Rgb colormap(double t);

/// Rasterizes per-bin values over the hex grid by nearest-center sampling,
/// scale pixels per bin pitch. Values outside [lo, hi] are clamped.
Image render_hex_map(const HexGrid& grid, const std::vector<double>& values,
                     double lo, double hi, int scale = 8);

/// Tiles images into a rows x cols sheet with a padding border.
Image render_sheet(const std::vector<Image>& tiles, int rows, int cols, int pad = 4);

/// Grouped bar chart: one group per entry of `groups`, one bar per series.
/// Values must be >= 0; the y axis runs from 0 to max value.
Image render_bar_chart(const std::vector<std::string>& groups,
                       const std::vector<std::string>& series,
                       const std::vector<std::vector<double>>& values,
                       int width = 640, int height = 360);

}  // namespace bvcsim

#endif
