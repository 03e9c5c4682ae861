#pragma once

// Text model format, bit-exact for every double:
//
//   PWVLSTM 1
//   layers=<h1,h2,...> window=<n> norm=<none|mean_hex,stddev_hex>
//   <name> <rows> <cols>
//   <rows x cols values, row-major, each a 16-char lowercase hex IEEE-754 bit pattern>
//   ...
//
// Tensor order per layer is W_i W_f W_g W_o U_i U_f U_g U_o b_i b_f b_g b_o,
// followed by the dense head's w (1 x hidden) and b (1 x 1).

#include <filesystem>
#include <optional>
#include <string_view>
#include <iosfwd>
#include <string>

#include "pwvcast/lstm.hpp"

namespace pwvcast {

inline constexpr const char* kModelMagic = "PWVLSTM";
inline constexpr int kModelFormatVersion = 1;

void write_model(const LstmModel& model, std::ostream& out);
// Throws FormatError on a bad header, version mismatch, truncation, shape
// inconsistency, malformed or non-finite values, or trailing data.
LstmModel read_model(std::istream& in);

// Writes via a temporary file and rename, so a failed save leaves no partial file.
void save_model(const LstmModel& model, const std::filesystem::path& path);
LstmModel load_model(const std::filesystem::path& path);

std::string double_to_hex(double value);
// nullopt unless text is exactly 16 lowercase hex digits.
std::optional<double> hex_to_double(std::string_view text);

}  // namespace pwvcast
