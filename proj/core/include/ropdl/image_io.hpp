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

// Binary image formats: IDX (the MNIST container) and PGM (P5).

#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "ropdl/superres.hpp"

namespace ropdl {

/// IDX image file: big-endian magic 0x00000803, then count, rows and cols as
/// big-endian uint32, then count*rows*cols unsigned bytes stored row by row.
/// Pixels are scaled to [0, 1] by 1/255. A wrong magic or a short file
/// throws ParseError with the byte offset of the problem.
std::vector<GrayImage> read_idx_images(std::istream& in);
std::vector<GrayImage> read_idx_images(const std::filesystem::path& path);

/// Writes images of identical size; pixels are clamped to [0, 1] and rounded.
void write_idx_images(std::ostream& out, const std::vector<GrayImage>& images);
void write_idx_images(const std::filesystem::path& path,
                      const std::vector<GrayImage>& images);

/// Binary PGM (P5) with maxval 255. Comments in the header are skipped.
GrayImage read_pgm(std::istream& in);
GrayImage read_pgm(const std::filesystem::path& path);

/// Clamps to [0, 1] and rounds to the nearest of 256 levels.
void write_pgm(std::ostream& out, const GrayImage& img);
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

}  // namespace ropdl
