#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "recagt/common.hpp"

namespace recagt {

/// Small CSV assembler with '#'-prefixed comment headers. Content is built in
/// memory and written on flush so output files are always complete, and two
/// identical runs produce byte-identical files.
class CsvWriter {
public:
  void comment(const std::string& key, const std::string& value);
  void columns(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& cells);

  const std::string& content() const { return buf_; }
  void write_file(const std::string& path) const;

  static std::string num(double v);         // shortest round-trip-ish (%.12g)
  static std::string num(std::uint64_t v);
  static std::string num(std::int64_t v);
  static std::string blank();               // empty cell

private:
  std::string buf_;
};

}  // namespace recagt
