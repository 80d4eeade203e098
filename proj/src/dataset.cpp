#include "mccqr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mccqr/common.hpp"

namespace mccqr {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

Dataset Dataset::read_text(const std::string& text, const std::string& source_name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError(source_name + ": empty file");
  strip_cr(line);

  const std::vector<std::string> header = split_fields(line);
  Dataset ds;
  std::size_t id_field = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) {
      throw DataError(source_name + ": header column " + std::to_string(c + 1) +
                      " has an empty name");
    }
    if (header[c] == "id") {
      if (id_field != header.size()) {
        throw DataError(source_name + ": duplicate 'id' column");
      }
      id_field = c;
      ds.has_ids = true;
      continue;
    }
    if (std::find(ds.columns.begin(), ds.columns.end(), header[c]) != ds.columns.end()) {
      throw DataError(source_name + ": duplicate column name '" + header[c] + "'");
    }
    ds.columns.push_back(header[c]);
  }
  if (ds.columns.empty()) throw DataError(source_name + ": no numeric columns in header");
  ds.values.assign(ds.columns.size(), {});

  std::size_t file_line = 1;
  while (std::getline(in, line)) {
    ++file_line;
    strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError(source_name + ": line " + std::to_string(file_line) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    std::size_t numeric = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == id_field) {
        ds.ids.push_back(fields[c]);
        continue;
      }
      const std::string& cell = fields[c];
      if (cell.empty()) {
        throw DataError(source_name + ": line " + std::to_string(file_line) + ", column '" +
                        header[c] + "': missing value");
      }
      double parsed = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), parsed);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw DataError(source_name + ": line " + std::to_string(file_line) + ", column '" +
                        header[c] + "': cannot parse '" + cell + "' as a number");
      }
      ds.values[numeric++].push_back(parsed);
    }
    ++ds.rows;
  }
  if (ds.rows == 0) throw DataError(source_name + ": no data rows");
  if (!ds.has_ids) {
    ds.ids.resize(ds.rows);
    for (std::size_t i = 0; i < ds.rows; ++i) ds.ids[i] = std::to_string(i);
  }
  return ds;
}

Dataset Dataset::read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open data file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_text(text, path);
}

bool Dataset::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

const Vector& Dataset::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw DataError("no column named '" + name + "'");
  return values[static_cast<std::size_t>(it - columns.begin())];
}

std::vector<std::string> Dataset::feature_names(
    const std::vector<std::string>& exclude) const {
  std::vector<std::string> names;
  for (const auto& name : columns) {
    if (std::find(exclude.begin(), exclude.end(), name) == exclude.end()) {
      names.push_back(name);
    }
  }
  return names;
}

Matrix Dataset::features(const std::vector<std::string>& exclude) const {
  const std::vector<std::string> names = feature_names(exclude);
  if (names.empty()) throw DataError("no feature columns left after exclusions");
  Matrix m(rows, names.size());
  for (std::size_t j = 0; j < names.size(); ++j) {
    const Vector& col = column(names[j]);
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = col[i];
  }
  return m;
}

}  // namespace mccqr
