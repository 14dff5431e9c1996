#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace gridwatch::cli {

// Provenance stamp written into every result file so any output can be traced
// back to the exact manifest bytes and master seed that produced it.
struct OutputContext {
  std::filesystem::path dir;
  std::uint32_t manifest_crc = 0;
  std::uint64_t seed = 0;

  std::string stamp() const;  // "manifest deadbeef seed 1"
  // "# <stamp>\n<columns>\n"
  std::string csv_header(const std::string& columns) const;
  void write_file(const std::string& name, const std::string& body) const;
};

std::string crc_hex(std::uint32_t crc);
std::string format_value(double v);  // shortest faithful form for CSV cells
std::string format_rate(double v);   // fixed four decimals
std::string format_exact(double v);  // round-trip exact, for sample dumps

}  // namespace gridwatch::cli
