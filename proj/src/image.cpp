#include "bvcsim/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace bvcsim {

void Image::write_ppm(const std::filesystem::path& path, const std::string& comment) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open image for writing: " + path.string());
    out << "P6\n";
    if (!comment.empty()) out << "# " << comment << '\n';
    out << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size() * 3));
    if (!out) throw std::runtime_error("image write failed: " + path.string());
}

Rgb colormap(double t) {
    t = std::clamp(t, 0.0, 1.0);
    // Piecewise-linear through dark blue, teal, green, yellow.
    static constexpr double stops[5][3] = {
        {0.050, 0.030, 0.330},
        {0.120, 0.280, 0.550},
        {0.130, 0.570, 0.550},
        {0.370, 0.790, 0.380},
        {0.990, 0.910, 0.140},
    };
    const double pos = t * 4.0;
    const int lo = std::min(static_cast<int>(pos), 3);
    const double f = pos - lo;
    Rgb rgb;
    for (int c = 0; c < 3; ++c) {
        const double v = stops[lo][c] + f * (stops[lo + 1][c] - stops[lo][c]);
        rgb[c] = static_cast<std::uint8_t>(std::lround(255.0 * v));
    }
    return rgb;
}

Image render_hex_map(const HexGrid& grid, const std::vector<double>& values,
                     double lo, double hi, int scale) {
    if (static_cast<int>(values.size()) != grid.n_bins()) {
        throw std::invalid_argument("render_hex_map: values size mismatch");
    }
    const int w = grid.nx() * scale;
    const int h = grid.ny() * scale;
    const double span = hi > lo ? hi - lo : 1.0;
    // World extent covered by the raster.
    const auto c00 = grid.center(0);
    const double x_min = c00[0] - grid.pitch() / 2.0 - 0.0;
    const double y_min = c00[1] - grid.row_pitch() / 2.0;
    const double px = grid.pitch() / scale;
    const double py = grid.row_pitch() / scale;

    Image img(w, h);
    for (int yi = 0; yi < h; ++yi) {
        // Image rows run top-down; world y runs bottom-up.
        const double wy = y_min + (h - 1 - yi + 0.5) * py;
        for (int xi = 0; xi < w; ++xi) {
            const double wx = x_min + (xi + 0.5) * px;
            const int bin = grid.bin_index(wx, wy);
            const double t = (values[bin] - lo) / span;
            img.at(xi, yi) = colormap(t);
        }
    }
    return img;
}

Image render_sheet(const std::vector<Image>& tiles, int rows, int cols, int pad) {
    if (tiles.empty() || rows * cols < static_cast<int>(tiles.size())) {
        throw std::invalid_argument("render_sheet: bad tiling");
    }
    const int tw = tiles[0].width;
    const int th = tiles[0].height;
    Image sheet(cols * (tw + pad) + pad, rows * (th + pad) + pad, {30, 30, 30});
    for (size_t k = 0; k < tiles.size(); ++k) {
        const Image& tile = tiles[k];
        if (tile.width != tw || tile.height != th) {
            throw std::invalid_argument("render_sheet: tile sizes differ");
        }
        const int r = static_cast<int>(k) / cols;
        const int c = static_cast<int>(k) % cols;
        const int x0 = pad + c * (tw + pad);
        const int y0 = pad + r * (th + pad);
        for (int y = 0; y < th; ++y) {
            for (int x = 0; x < tw; ++x) {
                sheet.at(x0 + x, y0 + y) = tile.at(x, y);
            }
        }
    }
    return sheet;
}

Image render_bar_chart(const std::vector<std::string>& groups,
                       const std::vector<std::string>& series,
                       const std::vector<std::vector<double>>& values,
                       int width, int height) {
    if (values.size() != groups.size()) {
        throw std::invalid_argument("render_bar_chart: group count mismatch");
    }
    double max_v = 0.0;
    for (const auto& g : values) {
        if (g.size() != series.size()) {
            throw std::invalid_argument("render_bar_chart: series count mismatch");
        }
        for (double v : g) max_v = std::max(max_v, v);
    }
    if (max_v <= 0.0) max_v = 1.0;

    static constexpr Rgb kSeriesColors[] = {
        {66, 135, 245}, {240, 160, 50}, {80, 190, 120}, {220, 90, 90},
        {160, 110, 220}, {120, 120, 120}};
    const int margin = 24;
    const int plot_w = width - 2 * margin;
    const int plot_h = height - 2 * margin;
    const int n_groups = static_cast<int>(groups.size());
    const int n_series = static_cast<int>(series.size());
    const int group_w = plot_w / n_groups;
    const int bar_w = std::max(1, (group_w - 8) / n_series);

    Image img(width, height, {250, 250, 250});
    // Axes.
    for (int x = margin; x < width - margin; ++x) img.at(x, height - margin) = {0, 0, 0};
    for (int y = margin; y <= height - margin; ++y) img.at(margin, y) = {0, 0, 0};
    // Gridlines at quarters.
    for (int q = 1; q <= 4; ++q) {
        const int y = height - margin - q * plot_h / 4;
        for (int x = margin; x < width - margin; x += 3) img.at(x, y) = {200, 200, 200};
    }
    for (int g = 0; g < n_groups; ++g) {
        for (int s = 0; s < n_series; ++s) {
            const double v = values[g][s];
            const int bh = static_cast<int>(std::lround(plot_h * (v / max_v)));
            const int x0 = margin + g * group_w + 4 + s * bar_w;
            const Rgb color = kSeriesColors[s % 6];
            for (int y = 0; y < bh; ++y) {
                for (int x = 0; x < bar_w - 1; ++x) {
                    img.at(x0 + x, height - margin - 1 - y) = color;
                }
            }
        }
    }
    return img;
}

}  // namespace bvcsim
