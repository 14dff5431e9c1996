#include "output.hpp"

#include <cstdio>
#include <fstream>

#include "gridwatch/common.hpp"

namespace gridwatch::cli {

std::string crc_hex(std::uint32_t crc) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08x", crc);
  return buf;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string format_rate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string format_exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string OutputContext::stamp() const {
  return "manifest " + crc_hex(manifest_crc) + " seed " + std::to_string(seed);
}

std::string OutputContext::csv_header(const std::string& columns) const {
  return "# " + stamp() + "\n" + columns + "\n";
}

void OutputContext::write_file(const std::string& name,
                               const std::string& body) const {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << body;
  if (!out) throw Error("short write to " + path.string());
}

}  // namespace gridwatch::cli
