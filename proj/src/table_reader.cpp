#include "table_reader.hpp"

#include <fstream>

#include "rarephen/error.hpp"

namespace rarephen::detail {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

std::vector<TableRow> read_tsv(const std::filesystem::path& path, std::size_t columns,
                               std::size_t min_columns) {
  if (min_columns == 0) min_columns = columns;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());

  std::vector<TableRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      std::size_t tab = line.find('\t', pos);
      fields.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (fields.size() < min_columns || fields.size() > columns) {
      throw Error(ErrorKind::kParse, where(path, line_no) + ": expected " +
                                         std::to_string(columns) + " tab-separated columns, got " +
                                         std::to_string(fields.size()));
    }
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back({line_no, std::move(fields)});
  }
  return rows;
}

}  // namespace rarephen::detail
