/*
 * Copyright 2026 The docenh Authors
 */
// SPDX-License-Identifier: Apache-2.0

#include "docenh/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

namespace docenh {

namespace {

struct FileCloser
{
	void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode)
{
	FilePtr f(std::fopen(path.c_str(), mode));
	if (!f)
		throw std::runtime_error("cannot open " + path.string());
	return f;
}

[[noreturn]] void on_png_error(png_structp, png_const_charp msg)
{
	throw std::runtime_error(std::string("libpng: ") + msg);
}

void on_png_warning(png_structp, png_const_charp) {}

void write_gray8(const std::filesystem::path& path, int height, int width, const std::vector<std::uint8_t>& bytes)
{
	auto file = open_file(path, "wb");
	png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
	if (!png)
		throw std::runtime_error("png_create_write_struct failed");
	png_infop info = png_create_info_struct(png);
	struct Guard
	{
		png_structp* p;
		png_infop* i;
		~Guard() { png_destroy_write_struct(p, i); }
	} guard{&png, &info};

	png_init_io(png, file.get());
	png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, PNG_COLOR_TYPE_GRAY,
				 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
	png_write_info(png, info);
	for (int r = 0; r < height; ++r)
		png_write_row(png, bytes.data() + static_cast<std::size_t>(r) * width);
	png_write_end(png, nullptr);
}

} // namespace

LineImage read_png(const std::filesystem::path& path)
{
	auto file = open_file(path, "rb");
	png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
	if (!png)
		throw std::runtime_error("png_create_read_struct failed");
	png_infop info = png_create_info_struct(png);
	struct Guard
	{
		png_structp* p;
		png_infop* i;
		~Guard() { png_destroy_read_struct(p, i, nullptr); }
	} guard{&png, &info};

	png_init_io(png, file.get());
	png_read_info(png, info);

	const auto color = png_get_color_type(png, info);
	const auto depth = png_get_bit_depth(png, info);
	if (color == PNG_COLOR_TYPE_PALETTE)
		png_set_palette_to_rgb(png);
	if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
		png_set_expand_gray_1_2_4_to_8(png);
	if (depth == 16)
		png_set_strip_16(png);
	if (color & PNG_COLOR_MASK_ALPHA)
		png_set_strip_alpha(png);
	if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA || color == PNG_COLOR_TYPE_PALETTE)
		png_set_rgb_to_gray_fixed(png, 1, -1, -1);
	png_read_update_info(png, info);

	const int width = static_cast<int>(png_get_image_width(png, info));
	const int height = static_cast<int>(png_get_image_height(png, info));
	if (png_get_rowbytes(png, info) != static_cast<std::size_t>(width))
		throw std::runtime_error("unexpected PNG layout in " + path.string());

	std::vector<std::uint8_t> bytes(static_cast<std::size_t>(height) * width);
	std::vector<png_bytep> rows(height);
	for (int r = 0; r < height; ++r)
		rows[r] = bytes.data() + static_cast<std::size_t>(r) * width;
	png_read_image(png, rows.data());
	png_read_end(png, nullptr);

	std::vector<float> values(bytes.size());
	for (std::size_t i = 0; i < bytes.size(); ++i)
		values[i] = static_cast<float>(bytes[i]) / 255.0f;
	return LineImage(height, width, std::move(values));
}

void write_png(const std::filesystem::path& path, const LineImage& img)
{
	std::vector<std::uint8_t> bytes(img.size());
	const auto v = img.values();
	for (std::size_t i = 0; i < v.size(); ++i)
		bytes[i] = to_byte(v[i]);
	write_gray8(path, img.height(), img.width(), bytes);
}

void write_png(const std::filesystem::path& path, const BinaryImage& img)
{
	std::vector<std::uint8_t> bytes(img.size());
	const auto v = img.values();
	for (std::size_t i = 0; i < v.size(); ++i)
		bytes[i] = v[i] ? 255 : 0;
	write_gray8(path, img.height(), img.width(), bytes);
}

} // namespace docenh
