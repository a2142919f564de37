// Copyright 2026 The ropdl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ropdl/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "ropdl/error.hpp"

namespace ropdl {
namespace {

constexpr std::uint32_t kIdxImageMagic = 0x00000803;

std::uint32_t read_be32(std::istream& in, std::size_t offset) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw ParseError("idx: truncated header at byte " + std::to_string(offset), offset);
  }
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(b, 4);
}

unsigned char to_byte(double v) {
  if (!std::isfinite(v)) v = 0.0;
  return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

}  // namespace

std::vector<GrayImage> read_idx_images(std::istream& in) {
  const std::uint32_t magic = read_be32(in, 0);
  if (magic != kIdxImageMagic) {
    char hex[11];
    std::snprintf(hex, sizeof hex, "0x%08x", magic);
    throw ParseError(std::string("idx: bad magic ") + hex + " at byte 0 (want 0x00000803)",
                     0);
  }
  const std::uint32_t count = read_be32(in, 4);
  const std::uint32_t rows = read_be32(in, 8);
  const std::uint32_t cols = read_be32(in, 12);
  std::vector<GrayImage> images;
  images.reserve(count);
  std::vector<unsigned char> buf(static_cast<std::size_t>(rows) * cols);
  std::size_t offset = 16;
  for (std::uint32_t i = 0; i < count; ++i) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
      const std::size_t at = offset + static_cast<std::size_t>(in.gcount());
      throw ParseError("idx: truncated pixel data at byte " + std::to_string(at), at);
    }
    GrayImage img(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
      for (std::uint32_t c = 0; c < cols; ++c) {
        img.pixels(r, c) = buf[static_cast<std::size_t>(r) * cols + c] / 255.0;
      }
    }
    images.push_back(std::move(img));
    offset += buf.size();
  }
  return images;
}

std::vector<GrayImage> read_idx_images(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_idx_images(in);
}

void write_idx_images(std::ostream& out, const std::vector<GrayImage>& images) {
  const Eigen::Index rows = images.empty() ? 0 : images.front().height();
  const Eigen::Index cols = images.empty() ? 0 : images.front().width();
  for (const auto& img : images) {
    if (img.height() != rows || img.width() != cols) {
      throw InvalidArgument("write_idx_images: images differ in size");
    }
  }
  write_be32(out, kIdxImageMagic);
  write_be32(out, static_cast<std::uint32_t>(images.size()));
  write_be32(out, static_cast<std::uint32_t>(rows));
  write_be32(out, static_cast<std::uint32_t>(cols));
  for (const auto& img : images) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) out.put(static_cast<char>(to_byte(img.pixels(r, c))));
    }
  }
  if (!out) throw IoError("write_idx_images: write failed");
}

void write_idx_images(const std::filesystem::path& path,
                      const std::vector<GrayImage>& images) {
  auto out = open_out(path);
  write_idx_images(out, images);
}

GrayImage read_pgm(std::istream& in) {
  if (pgm_token(in) != "P5") throw ParseError("pgm: expected P5 magic", 0);
  long dims[3];
  for (long& d : dims) {
    const std::string tok = pgm_token(in);
    const auto at = static_cast<std::size_t>(std::max<std::streamoff>(in.tellg(), 0));
    char* end = nullptr;
    d = std::strtol(tok.c_str(), &end, 10);
    if (tok.empty() || *end != '\0' || d <= 0) {
      throw ParseError("pgm: bad header field '" + tok + "' near byte " + std::to_string(at),
                       at);
    }
  }
  if (dims[2] != 255) throw ParseError("pgm: only maxval 255 is supported", 0);
  const long width = dims[0];
  const long height = dims[1];
  const auto header = static_cast<std::size_t>(in.tellg());
  std::vector<unsigned char> buf(static_cast<std::size_t>(width * height));
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
    const std::size_t at = header + static_cast<std::size_t>(in.gcount());
    throw ParseError("pgm: truncated pixel data at byte " + std::to_string(at), at);
  }
  GrayImage img(height, width);
  for (long r = 0; r < height; ++r) {
    for (long c = 0; c < width; ++c) {
      img.pixels(r, c) = buf[static_cast<std::size_t>(r * width + c)] / 255.0;
    }
  }
  return img;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const GrayImage& img) {
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  for (Eigen::Index r = 0; r < img.height(); ++r) {
    for (Eigen::Index c = 0; c < img.width(); ++c) out.put(static_cast<char>(to_byte(img.pixels(r, c))));
  }
  if (!out) throw IoError("write_pgm: write failed");
}

void write_pgm(const std::filesystem::path& path, const GrayImage& img) {
  auto out = open_out(path);
  write_pgm(out, img);
}

}  // namespace ropdl
