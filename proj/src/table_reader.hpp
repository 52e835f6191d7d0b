#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace rarephen::detail {

struct TableRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// Tab-separated file with a required header row. Blank lines are skipped and
// every data row must have exactly `columns` fields (or at least
// `min_columns` when that is smaller).
std::vector<TableRow> read_tsv(const std::filesystem::path& path, std::size_t columns,
                               std::size_t min_columns = 0);

std::string where(const std::filesystem::path& path, std::size_t line);

}  // namespace rarephen::detail
