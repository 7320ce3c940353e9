#include "sflow/rasterio.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <vector>

#include "sflow/errors.hpp"

namespace sflow {

namespace {

struct RawPng {
  int width = 0;
  int height = 0;
  int channels = 0;   // 1 or 3
  int bit_depth = 0;  // 8 or 16
  std::vector<uint16_t> data;  // row-major, interleaved channels

  uint16_t at(int x, int y, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  uint16_t& at(int x, int y, int c) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
};

struct FileCloser {
  void operator()(FILE* f) const {
    if (f) fclose(f);
  }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

RawPng readPng(const std::string& path) {
  FilePtr fp(fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path);

  png_byte header[8];
  if (fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8))
    throw FormatError("not a PNG file: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("malformed PNG: " + path);
  }

  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  int bit_depth = png_get_bit_depth(png, info);
  int color_type = png_get_color_type(png, info);

  // Normalize exotic inputs; 16-bit stays 16-bit, byte order becomes native.
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  if (bit_depth == 16) png_set_swap(png);
  png_read_update_info(png, info);

  RawPng out;
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = png_get_bit_depth(png, info);
  out.channels = png_get_channels(png, info);
  if (out.width <= 0 || out.height <= 0 || (out.channels != 1 && out.channels != 3)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("unsupported PNG layout: " + path);
  }

  out.data.resize(static_cast<size_t>(out.width) * out.height * out.channels);
  std::vector<png_bytep> rows(out.height);
  std::vector<uint8_t> buf;
  if (out.bit_depth == 16) {
    for (int y = 0; y < out.height; ++y)
      rows[y] = reinterpret_cast<png_bytep>(&out.data[static_cast<size_t>(y) * out.width * out.channels]);
    png_read_image(png, rows.data());
  } else {
    buf.resize(out.data.size());
    for (int y = 0; y < out.height; ++y)
      rows[y] = &buf[static_cast<size_t>(y) * out.width * out.channels];
    png_read_image(png, rows.data());
    for (size_t i = 0; i < buf.size(); ++i) out.data[i] = buf[i];
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

void writePng(const RawPng& img, const std::string& path) {
  // Write to a temp file and rename so failed runs leave no partial output.
  const std::string tmp = path + ".tmp";
  {
    FilePtr fp(fopen(tmp.c_str(), "wb"));
    if (!fp) throw IoError("cannot open for writing: " + tmp);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
      png_destroy_write_struct(&png, &info);
      throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      throw IoError("PNG write failed: " + path);
    }

    png_init_io(png, fp.get());
    int color = img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, img.width, img.height, img.bit_depth, color,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (img.bit_depth == 16) png_set_swap(png);

    std::vector<png_bytep> rows(img.height);
    std::vector<uint8_t> buf;
    if (img.bit_depth == 16) {
      for (int y = 0; y < img.height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(
            const_cast<uint16_t*>(&img.data[static_cast<size_t>(y) * img.width * img.channels]));
    } else {
      buf.resize(img.data.size());
      for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<uint8_t>(img.data[i]);
      for (int y = 0; y < img.height; ++y)
        rows[y] = &buf[static_cast<size_t>(y) * img.width * img.channels];
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " to " + path);
}

}  // namespace

DisparityMap readDisparity(const std::string& path) {
  RawPng raw = readPng(path);
  if (raw.bit_depth != 16) throw FormatError("disparity PNG must be 16-bit: " + path);
  if (raw.channels != 1) throw FormatError("disparity PNG must be single-channel: " + path);

  DisparityMap map(raw.width, raw.height);
  for (int y = 0; y < raw.height; ++y)
    for (int x = 0; x < raw.width; ++x) {
      uint16_t s = raw.at(x, y, 0);
      if (s == 0)
        map.setInvalid(x, y);
      else
        map.set(x, y, static_cast<double>(s) / 256.0);
    }
  return map;
}

void writeDisparity(const DisparityMap& map, const std::string& path) {
  RawPng raw;
  raw.width = map.width();
  raw.height = map.height();
  raw.channels = 1;
  raw.bit_depth = 16;
  raw.data.assign(static_cast<size_t>(raw.width) * raw.height, 0);
  for (int y = 0; y < raw.height; ++y)
    for (int x = 0; x < raw.width; ++x) {
      if (!map.isValid(x, y)) continue;
      double d = map.get(x, y);
      if (!(d < 256.0)) throw DomainError("disparity out of encodable range (d >= 256)");
      long s = std::lround(d * 256.0);
      if (s < 1) s = 1;  // keep validity; 0 is the reserved invalid code
      if (s > 65535) s = 65535;
      raw.at(x, y, 0) = static_cast<uint16_t>(s);
    }
  writePng(raw, path);
}

FlowMap readFlow(const std::string& path) {
  RawPng raw = readPng(path);
  if (raw.bit_depth != 16) throw FormatError("flow PNG must be 16-bit: " + path);
  if (raw.channels != 3) throw FormatError("flow PNG must be three-channel: " + path);

  FlowMap map(raw.width, raw.height);
  for (int y = 0; y < raw.height; ++y)
    for (int x = 0; x < raw.width; ++x) {
      if (raw.at(x, y, 2) == 0) {
        map.setInvalid(x, y);
        continue;
      }
      double u = (static_cast<double>(raw.at(x, y, 0)) - 32768.0) / 64.0;
      double v = (static_cast<double>(raw.at(x, y, 1)) - 32768.0) / 64.0;
      map.set(x, y, u, v);
    }
  return map;
}

void writeFlow(const FlowMap& map, const std::string& path) {
  RawPng raw;
  raw.width = map.width();
  raw.height = map.height();
  raw.channels = 3;
  raw.bit_depth = 16;
  raw.data.assign(static_cast<size_t>(raw.width) * raw.height * 3, 0);
  for (int y = 0; y < raw.height; ++y)
    for (int x = 0; x < raw.width; ++x) {
      if (!map.isValid(x, y)) continue;
      long su = std::lround(map.u(x, y) * 64.0 + 32768.0);
      long sv = std::lround(map.v(x, y) * 64.0 + 32768.0);
      if (su < 0 || su > 65535 || sv < 0 || sv > 65535)
        throw DomainError("flow out of encodable range");
      raw.at(x, y, 0) = static_cast<uint16_t>(su);
      raw.at(x, y, 1) = static_cast<uint16_t>(sv);
      raw.at(x, y, 2) = 1;
    }
  writePng(raw, path);
}

GrayImage readGray(const std::string& path) {
  RawPng raw = readPng(path);
  if (raw.bit_depth != 8) throw FormatError("grayscale input must be 8-bit: " + path);
  GrayImage img(raw.width, raw.height);
  for (int y = 0; y < raw.height; ++y)
    for (int x = 0; x < raw.width; ++x) {
      double v;
      if (raw.channels == 1)
        v = raw.at(x, y, 0) / 255.0;
      else
        v = (0.299 * raw.at(x, y, 0) + 0.587 * raw.at(x, y, 1) + 0.114 * raw.at(x, y, 2)) / 255.0;
      img.set(x, y, v);
    }
  return img;
}

GrayImage readGrayStrict(const std::string& path) {
  RawPng raw = readPng(path);
  if (raw.bit_depth != 8) throw FormatError("expected 8-bit PNG: " + path);
  if (raw.channels != 1) throw FormatError("expected single-channel PNG: " + path);
  GrayImage img(raw.width, raw.height);
  for (int y = 0; y < raw.height; ++y)
    for (int x = 0; x < raw.width; ++x) img.set(x, y, raw.at(x, y, 0) / 255.0);
  return img;
}

void writeGray(const GrayImage& img, const std::string& path) {
  RawPng raw;
  raw.width = img.width();
  raw.height = img.height();
  raw.channels = 1;
  raw.bit_depth = 8;
  raw.data.assign(static_cast<size_t>(raw.width) * raw.height, 0);
  for (int y = 0; y < raw.height; ++y)
    for (int x = 0; x < raw.width; ++x) {
      double v = img.get(x, y);
      if (v < 0.0) v = 0.0;
      if (v > 1.0) v = 1.0;
      raw.at(x, y, 0) = static_cast<uint16_t>(std::lround(v * 255.0));
    }
  writePng(raw, path);
}

void writeColor(const ColorRaster& img, const std::string& path) {
  RawPng raw;
  raw.width = img.width();
  raw.height = img.height();
  raw.channels = 3;
  raw.bit_depth = 8;
  raw.data.assign(static_cast<size_t>(raw.width) * raw.height * 3, 0);
  for (int y = 0; y < raw.height; ++y)
    for (int x = 0; x < raw.width; ++x) {
      const uint8_t* p = img.pixel(x, y);
      raw.at(x, y, 0) = p[0];
      raw.at(x, y, 1) = p[1];
      raw.at(x, y, 2) = p[2];
    }
  writePng(raw, path);
}

ScalarMap readMask(const std::string& path) {
  GrayImage g = readGrayStrict(path);
  ScalarMap mask(g.width(), g.height());
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) mask.set(x, y, g.get(x, y) > 0.0 ? 1.0 : 0.0);
  return mask;
}

void writeMask(const ScalarMap& mask, const std::string& path) {
  GrayImage g(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y)
    for (int x = 0; x < mask.width(); ++x)
      g.set(x, y, (mask.isValid(x, y) && mask.get(x, y) > 0.0) ? 1.0 : 0.0);
  writeGray(g, path);
}

}  // namespace sflow
