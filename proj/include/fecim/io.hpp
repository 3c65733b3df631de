#pragma once

// Plain-text and binary file formats.
//
// Bit grids: one row per line, bits separated by commas or whitespace (or
// written contiguously, e.g. "0110"). Blank lines and '#' comments are ignored.
//
// Codebook binary: little-endian u64 dim, u64 count, then `count` rows of
// ceil(dim / 8) bytes, bit i of a row in byte i / 8 at position i % 8.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fecim/array_core.hpp"
#include "fecim/hdc.hpp"
#include "fecim/sensing.hpp"

namespace fecim::io {

BitGrid parse_bit_grid(std::string_view text);
BitGrid load_bit_grid(const std::filesystem::path& path);
std::string format_bit_grid(const BitGrid& grid);

/// Single-row (or single-column) bit grid flattened to a vector.
BitVector parse_bit_vector(std::string_view text);

/// Header: column,v_bl,charged_cells
std::string readout_csv(const AnalogReadout& readout);
std::string readout_json(const AnalogReadout& readout);

/// Header: code_pair,gap,sigma_low,sigma_high,margin. code_pair is "k-(k+1)".
std::string margin_csv(const MarginReport& report);

void write_codebook_binary(std::ostream& out, const std::vector<hdc::Hypervector>& vectors);
std::vector<hdc::Hypervector> read_codebook_binary(std::istream& in);
/// Header: label,bits (bits as a 0/1 string).
std::string codebook_csv(const std::vector<hdc::CodebookEntry>& codebook);

/// Shortest round-trip representation; stable across runs.
std::string num(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace fecim::io
