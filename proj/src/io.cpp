#include "fecim/io.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "fecim/error.hpp"

namespace fecim::io {

std::string num(double v) { return fmt::format("{}", v); }

BitGrid parse_bit_grid(std::string_view text) {
  std::vector<BitVector> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    BitVector row;
    for (char ch : line) {
      if (ch == '0' || ch == '1') row.push_back(static_cast<std::uint8_t>(ch - '0'));
      else if (ch != ',' && ch != ' ' && ch != '\t' && ch != '\r' && ch != ';')
        throw FormatError(fmt::format("line {}: unexpected character '{}' in bit grid", line_no, ch));
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw FormatError(fmt::format("line {}: row has {} bits, expected {}", line_no, row.size(),
                                    rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return {};
  BitGrid grid(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) grid.set(r, c, rows[r][c]);
  return grid;
}

BitGrid load_bit_grid(const std::filesystem::path& path) { return parse_bit_grid(read_file(path)); }

std::string format_bit_grid(const BitGrid& grid) {
  std::string out;
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      if (c) out += ',';
      out += static_cast<char>('0' + grid(r, c));
    }
    out += '\n';
  }
  return out;
}

BitVector parse_bit_vector(std::string_view text) {
  const BitGrid grid = parse_bit_grid(text);
  if (grid.rows() > 1 && grid.cols() > 1)
    throw FormatError(fmt::format("expected a single row or column, got {}x{}", grid.rows(), grid.cols()));
  BitVector out;
  for (std::size_t r = 0; r < grid.rows(); ++r)
    for (std::size_t c = 0; c < grid.cols(); ++c) out.push_back(grid(r, c));
  return out;
}

std::string readout_csv(const AnalogReadout& readout) {
  std::string out = "column,v_bl,charged_cells\n";
  for (std::size_t c = 0; c < readout.v_bl.size(); ++c)
    out += fmt::format("{},{},{}\n", c, num(readout.v_bl[c]), readout.charged_cells[c]);
  return out;
}

std::string readout_json(const AnalogReadout& readout) {
  nlohmann::ordered_json doc;
  doc["step_count"] = readout.step_count;
  doc["rows"] = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < readout.v_bl.size(); ++c)
    doc["rows"].push_back({{"column", c}, {"v_bl", readout.v_bl[c]}, {"charged_cells", readout.charged_cells[c]}});
  return doc.dump(2) + "\n";
}

std::string margin_csv(const MarginReport& report) {
  std::string out = "code_pair,gap,sigma_low,sigma_high,margin\n";
  for (const auto& r : report.rows)
    out += fmt::format("{}-{},{},{},{},{}\n", r.code_low, r.code_low + 1, num(r.gap), num(r.sigma_low),
                       num(r.sigma_high), num(r.margin));
  return out;
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size()))
    throw FormatError("codebook: truncated header");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_codebook_binary(std::ostream& out, const std::vector<hdc::Hypervector>& vectors) {
  const std::uint64_t dim = vectors.empty() ? 0 : vectors.front().dim();
  put_u64(out, dim);
  put_u64(out, vectors.size());
  std::vector<char> row((dim + 7) / 8);
  for (const auto& v : vectors) {
    if (v.dim() != dim) throw DimensionError("codebook: vectors must share one dimension");
    std::fill(row.begin(), row.end(), 0);
    for (std::size_t i = 0; i < dim; ++i)
      if (v.bit(i)) row[i / 8] = static_cast<char>(row[i / 8] | (1 << (i % 8)));
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

std::vector<hdc::Hypervector> read_codebook_binary(std::istream& in) {
  const std::uint64_t dim = get_u64(in);
  const std::uint64_t count = get_u64(in);
  std::vector<hdc::Hypervector> out;
  std::vector<unsigned char> row((dim + 7) / 8);
  for (std::uint64_t k = 0; k < count; ++k) {
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size())))
      throw FormatError(fmt::format("codebook: truncated at row {}", k));
    hdc::Hypervector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v.set(i, (row[i / 8] >> (i % 8)) & 1u);
    out.push_back(std::move(v));
  }
  return out;
}

std::string codebook_csv(const std::vector<hdc::CodebookEntry>& codebook) {
  std::string out = "label,bits\n";
  for (const auto& e : codebook) {
    out += e.label;
    out += ',';
    for (std::size_t i = 0; i < e.vector.dim(); ++i) out += static_cast<char>('0' + e.vector.bit(i));
    out += '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(fmt::format("cannot open {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(fmt::format("cannot write {}", path.string()));
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

}  // namespace fecim::io
