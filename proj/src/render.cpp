#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "okpf/error.hpp"
#include "okpf/io.hpp"

namespace okpf {

namespace {

std::uint8_t channel(double white, double pink, double yellow, double u, double v) {
  const double c = white + u * (pink - white) + v * (yellow - white);
  if (!(c > 0.0)) return 0;
  if (c >= 255.0) return 255;
  return static_cast<std::uint8_t>(c);
}

}  // namespace

Rgb phase_color(double u, double v) {
  return {channel(255, 211, 220, u, v), channel(255, 95, 220, u, v), channel(255, 183, 98, u, v)};
}

std::vector<Rgb> cross_section_pixels(const Field& u, const Field& v, const Plane& plane, int* width,
                                      int* height) {
  require_same_grid(u, v);
  const auto& g = u.grid;
  int ax0 = 0, ax1 = 1, axn = 2;
  if (g.dim == 3) {
    if (plane.axis < 0 || plane.axis > 2) throw Error(Errc::out_of_range, "plane axis must be 0, 1 or 2");
    axn = plane.axis;
    ax0 = axn == 0 ? 1 : 0;
    ax1 = axn == 2 ? 1 : 2;
    if (plane.index < 0 || plane.index >= g.points[axn])
      throw Error(Errc::out_of_range, "plane index " + std::to_string(plane.index) + " outside the box");
  }
  const int w = g.points[ax0], h = g.points[ax1];
  std::vector<Rgb> px;
  px.reserve(static_cast<std::size_t>(w) * h);
  // first image row is the top, i.e. the largest second coordinate
  for (int r = h - 1; r >= 0; --r)
    for (int c = 0; c < w; ++c) {
      int idx[3] = {0, 0, 0};
      idx[ax0] = c;
      idx[ax1] = r;
      if (g.dim == 3) idx[axn] = plane.index;
      const std::size_t n = u.index(idx[0], idx[1], idx[2]);
      px.push_back(phase_color(u[n], v[n]));
    }
  if (width) *width = w;
  if (height) *height = h;
  return px;
}

void render_cross_section(const Field& u, const Field& v, const Plane& plane, const std::filesystem::path& path) {
  int w = 0, h = 0;
  const auto px = cross_section_pixels(u, v, plane, &w, &h);

  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(Errc::io, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(Errc::io, "PNG encoding failed for " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(w) * 3);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const Rgb& p = px[static_cast<std::size_t>(r) * w + c];
      row[3 * c] = p.r;
      row[3 * c + 1] = p.g;
      row[3 * c + 2] = p.b;
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace okpf
