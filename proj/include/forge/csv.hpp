#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "forge/table.hpp"

namespace forge {

struct CsvOptions {
  char delimiter = ',';
  bool header = true;
  MissingTokens missing;
};

// RFC-4180 reader. Throws IngestError on unreadable or empty input, ragged
// rows (the message names the 1-based physical line) and unsupported
// formats (.parquet, .hdf, .h5).
Table ingest_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Table parse_csv(std::string_view text, const CsvOptions& options = {});

// Missing cells become empty fields; fields are quoted when they contain the
// delimiter, a quote or a line break.
std::string to_csv(const Table& table, char delimiter = ',');
void write_csv(const Table& table, const std::filesystem::path& path, char delimiter = ',');

}  // namespace forge
