#pragma once

#include <string>
#include <vector>

namespace dpaudit {

// Comma-separated table with a header row. Fields may be double-quoted with
// embedded commas and doubled quotes. Cell values are stored trimmed of
// surrounding whitespace.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of the first column with this name; -1 if absent.
  int column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

// Parse a headerless or irregular file by supplying the header explicitly.
// Lines that are empty or start with '|' are skipped.
CsvTable read_csv_with_header(const std::vector<std::string>& paths,
                              const std::vector<std::string>& header);

}  // namespace dpaudit
