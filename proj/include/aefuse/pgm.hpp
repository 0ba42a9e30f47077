#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "aefuse/image.hpp"

namespace aefuse {

// Binary PGM (P5), maxval 255 only. Intensities map as byte/255 on load and
// round(i*255) on save, so a save/load round trip moves a pixel by at most
// 1/510.
GrayImage load_pgm(const std::filesystem::path& file);
void save_pgm(const GrayImage& img, const std::filesystem::path& file);

// Parse from an in-memory buffer; origin names the source in diagnostics.
GrayImage parse_pgm(std::string_view bytes, const std::string& origin);

// Serialized P5 bytes exactly as save_pgm would write them.
std::string pgm_bytes(const GrayImage& img);

}  // namespace aefuse
