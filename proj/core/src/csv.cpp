#include "dpaudit/csv.hpp"

#include <fstream>
#include <stdexcept>

namespace dpaudit {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

void append_rows(CsvTable& table, std::istream& in, const std::string& path) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t[0] == '|') continue;
    auto fields = split_record(line);
    if (fields.size() != table.header.size()) {
      throw std::runtime_error("malformed row in " + path + ": expected " +
                               std::to_string(table.header.size()) +
                               " fields, got " + std::to_string(fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  CsvTable table;
  table.header = split_record(line);
  append_rows(table, in, path);
  return table;
}

CsvTable read_csv_with_header(const std::vector<std::string>& paths,
                              const std::vector<std::string>& header) {
  CsvTable table;
  table.header = header;
  for (const auto& path : paths) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    append_rows(table, in, path);
  }
  return table;
}

}  // namespace dpaudit
