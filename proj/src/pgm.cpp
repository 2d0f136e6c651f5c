// SPDX-FileCopyrightText: © 2026 The ELMA Authors
//
// SPDX-License-Identifier: Apache-2.0

// Netpbm graymap (PGM) reading and writing, 8-bit only.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "elma/image.hpp"

namespace elma {

namespace {

// Skips whitespace and '#' comments between header tokens.
void skip_separators(std::istream& in) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

long read_header_int(std::istream& in, const char* what) {
  skip_separators(in);
  long v = -1;
  if (!(in >> v)) throw FormatError(std::string("pgm: bad ") + what);
  return v;
}

}  // namespace

GrayImage read_pgm(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '5' && magic[1] != '2')) {
    throw FormatError("pgm: expected P5 or P2 magic number");
  }
  const bool binary = magic[1] == '5';
  const long width = read_header_int(in, "width");
  const long height = read_header_int(in, "height");
  const long maxval = read_header_int(in, "maxval");
  if (width < 1 || height < 1) throw FormatError("pgm: bad dimensions");
  if (maxval != 255) {
    throw FormatError("pgm: unsupported maxval " + std::to_string(maxval) +
                      " (only 255 is supported)");
  }

  Matrix px(height, width);
  if (binary) {
    // Exactly one whitespace byte separates the header from the raster.
    if (!std::isspace(in.get())) throw FormatError("pgm: malformed header");
    std::vector<unsigned char> raw(static_cast<std::size_t>(width * height));
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
      throw FormatError("pgm: truncated pixel data");
    }
    for (Index i = 0; i < height; ++i) {
      for (Index j = 0; j < width; ++j) px(i, j) = raw[i * width + j];
    }
  } else {
    for (Index i = 0; i < height; ++i) {
      for (Index j = 0; j < width; ++j) {
        skip_separators(in);
        long v = -1;
        if (!(in >> v)) throw FormatError("pgm: truncated pixel data");
        if (v < 0 || v > maxval) throw FormatError("pgm: pixel out of range");
        px(i, j) = static_cast<double>(v);
      }
    }
  }
  return GrayImage(std::move(px));
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const GrayImage& img) {
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<unsigned char> raw(static_cast<std::size_t>(img.pixels.size()));
  for (Index i = 0; i < img.height(); ++i) {
    for (Index j = 0; j < img.width(); ++j) {
      const double v = std::clamp(img.pixels(i, j), 0.0, 255.0);
      raw[i * img.width() + j] = static_cast<unsigned char>(std::round(v));
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
}

void write_pgm(const std::string& path, const GrayImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  write_pgm(out, img);
  if (!out) throw FormatError("write failed: " + path);
}

}  // namespace elma
