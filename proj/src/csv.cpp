#include "forge/csv.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "forge/errors.hpp"

namespace forge {

namespace {

struct Record {
  std::size_t line = 0;  // 1-based physical line where the record starts
  std::vector<std::string> fields;
  bool blank = false;  // a single empty, unquoted field
};

std::vector<Record> split_records(std::string_view text, char delim) {
  std::vector<Record> records;
  std::size_t line = 1;
  std::size_t i = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;

  while (i < text.size()) {
    Record rec;
    rec.line = line;
    std::string field;
    bool quoted_any = false;
    bool done = false;
    while (!done) {
      if (i >= text.size()) {
        rec.fields.push_back(std::move(field));
        break;
      }
      char c = text[i];
      if (c == '"' && field.empty()) {
        quoted_any = true;
        ++i;
        while (true) {
          if (i >= text.size())
            throw IngestError("unterminated quoted field starting on line " + std::to_string(rec.line));
          c = text[i];
          if (c == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field.push_back('"');
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (c == '\n') ++line;
          field.push_back(c);
          ++i;
        }
        continue;
      }
      if (c == delim) {
        rec.fields.push_back(std::move(field));
        field.clear();
        ++i;
      } else if (c == '\r' || c == '\n') {
        rec.fields.push_back(std::move(field));
        if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
        ++i;
        ++line;
        done = true;
      } else {
        field.push_back(c);
        ++i;
      }
    }
    rec.blank = rec.fields.size() == 1 && rec.fields[0].empty() && !quoted_any;
    records.push_back(std::move(rec));
  }
  while (!records.empty() && records.back().blank) records.pop_back();
  return records;
}

std::string lowercase_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return ext;
}

std::string quote_field(const std::string& field, char delim) {
  const bool needs = field.find_first_of(std::string{delim, '"', '\r', '\n'}) != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Table parse_csv(std::string_view text, const CsvOptions& options) {
  auto records = split_records(text, options.delimiter);
  if (records.empty()) throw IngestError("empty file");

  std::vector<std::string> names;
  std::size_t first_data = 0;
  const std::size_t width = records.front().fields.size();
  if (options.header) {
    names = records.front().fields;
    first_data = 1;
  }
  for (std::size_t c = 0; c < width; ++c) {
    if (names.size() <= c) names.emplace_back();
    names[c] = std::string(trim(names[c]));
    if (names[c].empty()) names[c] = "col" + std::to_string(c + 1);
  }
  std::unordered_set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second) throw IngestError("duplicate column name '" + n + "' in header");

  if (records.size() <= first_data) throw IngestError("no data rows");

  std::vector<std::vector<std::string>> cells(width);
  for (auto& c : cells) c.reserve(records.size() - first_data);
  for (std::size_t r = first_data; r < records.size(); ++r) {
    auto& rec = records[r];
    if (rec.fields.size() != width)
      throw IngestError("line " + std::to_string(rec.line) + ": expected " + std::to_string(width) +
                        " fields, found " + std::to_string(rec.fields.size()));
    for (std::size_t c = 0; c < width; ++c) cells[c].push_back(std::move(rec.fields[c]));
  }

  std::vector<Column> columns;
  columns.reserve(width);
  for (std::size_t c = 0; c < width; ++c)
    columns.push_back(build_column(names[c], cells[c], options.missing));
  return Table(std::move(columns), std::nullopt, {"ingest_csv"});
}

Table ingest_csv(const std::filesystem::path& path, const CsvOptions& options) {
  const auto ext = lowercase_extension(path);
  if (ext == ".parquet" || ext == ".hdf" || ext == ".h5" || ext == ".hdf5")
    throw IngestError("unsupported input format '" + ext + "': only CSV is supported");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IngestError("read error on '" + path.string() + "'");
  auto table = parse_csv(buf.str(), options);
  return table;
}

std::string to_csv(const Table& table, char delimiter) {
  std::string out;
  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    if (c) out.push_back(delimiter);
    out += quote_field(table.column(c).name, delimiter);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    for (std::size_t c = 0; c < table.n_cols(); ++c) {
      if (c) out.push_back(delimiter);
      out += quote_field(table.column(c).cell_text(r), delimiter);
    }
    out.push_back('\n');
  }
  return out;
}

void write_csv(const Table& table, const std::filesystem::path& path, char delimiter) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << to_csv(table, delimiter);
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace forge
