// Copyright 2026 The stainaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stainaug/png_io.hpp"

#include <png.h>
#include <zlib.h>

#include <cstdio>
#include <cstring>
#include <string>

#include "stainaug/error.hpp"

namespace stainaug {

RgbImage read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&image, path.c_str()) == 0) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::IoError, path.string() + ": " + msg);
  }
  image.format = PNG_FORMAT_RGB;
  RgbImage out(static_cast<int>(image.width), static_cast<int>(image.height));
  if (png_image_finish_read(&image, nullptr, out.samples().data(), 0, nullptr) == 0) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::IoError, path.string() + ": " + msg);
  }
  return out;
}

namespace {

struct PngWriteState {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* file = nullptr;
  std::string error;

  ~PngWriteState() {
    if (png != nullptr) png_destroy_write_struct(&png, info != nullptr ? &info : nullptr);
    if (file != nullptr) std::fclose(file);
  }
};

void on_png_error(png_structp png, png_const_charp message) {
  static_cast<PngWriteState*>(png_get_error_ptr(png))->error = message;
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

}  // namespace

// Fixed encoder settings: zlib level 1, no row filter, run-length strategy.
// About 2.5x faster than the default settings on tissue patches for ~15% larger
// files; identical pixels always give identical bytes.
void write_png(const std::filesystem::path& path, const RgbImage& image) {
  PngWriteState state;
  state.file = std::fopen(path.c_str(), "wb");
  if (state.file == nullptr) throw Error(Errc::IoError, "cannot create " + path.string());
  state.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &state, on_png_error, on_png_warning);
  if (state.png == nullptr) throw Error(Errc::IoError, path.string() + ": png_create_write_struct failed");
  state.info = png_create_info_struct(state.png);
  if (state.info == nullptr) throw Error(Errc::IoError, path.string() + ": png_create_info_struct failed");

  if (setjmp(png_jmpbuf(state.png)) != 0) {
    throw Error(Errc::IoError, path.string() + ": " + state.error);
  }
  png_init_io(state.png, state.file);
  png_set_IHDR(state.png, state.info, static_cast<png_uint_32>(image.width()),
               static_cast<png_uint_32>(image.height()), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(state.png, 1);
  png_set_compression_strategy(state.png, Z_RLE);
  png_set_filter(state.png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_write_info(state.png, state.info);
  for (int y = 0; y < image.height(); ++y) {
    png_write_row(state.png, image.pixel(0, y));
  }
  png_write_end(state.png, nullptr);
  if (std::fflush(state.file) != 0 || std::ferror(state.file) != 0) {
    throw Error(Errc::IoError, "write failed for " + path.string());
  }
}

}  // namespace stainaug
