#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fracsol/io.hpp"

namespace fracsol {

namespace {

struct Rgb {
    unsigned char r, g, b;
};

unsigned char to_byte(double v) { return static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L)); }

Rgb hsv(double hue, double value) {
    // hue in [0, 1), full saturation
    const double h = 6.0 * (hue - std::floor(hue));
    const int sector = static_cast<int>(h) % 6;
    const double f = h - std::floor(h);
    const double v = 255.0 * value;
    const double p = 0.0;
    const double q = v * (1.0 - f);
    const double t = v * f;
    double r = 0, g = 0, b = 0;
    switch (sector) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
    return {to_byte(r), to_byte(g), to_byte(b)};
}

// Image rows run along axis 1 from high to low index, columns along axis 0.
std::vector<Rgb> pixels(const Field& u) {
    const Grid& g = u.grid();
    const double m = max_abs(u);
    std::vector<Rgb> px(u.size());
    for (int row = 0; row < g.dims[1]; ++row) {
        for (int col = 0; col < g.dims[0]; ++col) {
            const std::size_t n = g.index(col, g.dims[1] - 1 - row);
            Rgb c{0, 0, 0};
            if (u.is_complex()) {
                const auto z = u.at(n);
                const double hue = (std::arg(z) + std::numbers::pi) / (2.0 * std::numbers::pi);
                c = hsv(hue, m > 0.0 ? std::abs(z) / m : 0.0);
            } else {
                const unsigned char v = to_byte(127.5 + 127.5 * (m > 0.0 ? u.re()[n] / m : 0.0));
                c = {v, v, v};
            }
            px[static_cast<std::size_t>(row) * g.dims[0] + col] = c;
        }
    }
    return px;
}

std::vector<unsigned char> header(const char* magic, int w, int h) {
    const std::string s = std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    return {s.begin(), s.end()};
}

std::vector<unsigned char> ppm(const std::vector<Rgb>& px, int w, int h) {
    auto out = header("P6", w, h);
    for (const auto& c : px) {
        out.push_back(c.r);
        out.push_back(c.g);
        out.push_back(c.b);
    }
    return out;
}

}  // namespace

std::vector<unsigned char> render_image(const Field& u) {
    const Grid& g = u.grid();
    const auto px = pixels(u);
    if (u.is_complex()) return ppm(px, g.dims[0], g.dims[1]);
    auto out = header("P5", g.dims[0], g.dims[1]);
    for (const auto& c : px) out.push_back(c.r);
    return out;
}

std::vector<unsigned char> render_overlay(const Field& u, const std::vector<StructurePoint>& points) {
    const Grid& g = u.grid();
    auto px = pixels(u);
    const Vec2 l0 = g.lattice0();
    const Vec2 l1 = g.lattice1();
    const double det = cross(l0, l1);
    for (const auto& p : points) {
        const Vec2 d = p.position - g.origin;
        const double f0 = cross(d, l1) / det;
        const double f1 = cross(l0, d) / det;
        const int ci = static_cast<int>(std::lround(f0 * g.dims[0] - g.offset));
        const int cj = static_cast<int>(std::lround(f1 * g.dims[1] - g.offset));
        const Rgb mark = p.sign > 0 ? Rgb{255, 0, 0} : Rgb{0, 0, 255};
        for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                const int i = ((ci + di) % g.dims[0] + g.dims[0]) % g.dims[0];
                const int j = ((cj + dj) % g.dims[1] + g.dims[1]) % g.dims[1];
                const int row = g.dims[1] - 1 - j;
                px[static_cast<std::size_t>(row) * g.dims[0] + i] = mark;
            }
        }
    }
    return ppm(px, g.dims[0], g.dims[1]);
}

}  // namespace fracsol
