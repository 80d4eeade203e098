#pragma once

#include <string>
#include <vector>

#include "mccqr/linalg.hpp"

namespace mccqr {

// Rectangular CSV with a header row. A column literally named "id" is kept as
// strings; every other column must parse as a 64-bit float. Malformed cells
// raise DataError with the file line and column name.
struct Dataset {
  std::vector<std::string> columns;  // numeric columns in header order
  std::vector<Vector> values;        // aligned with columns
  std::vector<std::string> ids;      // row ids, "0".."n-1" when no id column
  bool has_ids = false;
  std::size_t rows = 0;

  static Dataset read_text(const std::string& text, const std::string& source_name = "csv");
  static Dataset read_file(const std::string& path);

  bool has_column(const std::string& name) const;
  const Vector& column(const std::string& name) const;

  std::vector<std::string> feature_names(const std::vector<std::string>& exclude) const;
  Matrix features(const std::vector<std::string>& exclude) const;
};

}  // namespace mccqr
