#include "recagt/csv.hpp"

#include <cstdio>
#include <fstream>

namespace recagt {

namespace {

std::string join_cells(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) line.push_back(',');
    line += cells[i];
  }
  line.push_back('\n');
  return line;
}

}  // namespace

void CsvWriter::comment(const std::string& key, const std::string& value) {
  buf_ += "# " + key + "=" + value + "\n";
}

void CsvWriter::columns(const std::vector<std::string>& names) {
  buf_ += join_cells(names);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  buf_ += join_cells(cells);
}

void CsvWriter::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path);
  out << buf_;
  if (!out) throw Error("failed to write output file: " + path);
}

std::string CsvWriter::num(double v) {
  char tmp[64];
  std::snprintf(tmp, sizeof(tmp), "%.12g", v);
  return tmp;
}

std::string CsvWriter::num(std::uint64_t v) { return std::to_string(v); }

std::string CsvWriter::num(std::int64_t v) { return std::to_string(v); }

std::string CsvWriter::blank() { return {}; }

}  // namespace recagt
