#pragma once

#include "mvfs/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mvfs {

/// Numeric CSV, one instance per row. Throws ParseError with 1-based
/// row/column for a bad cell or ragged row, LoadError if unreadable.
Matrix read_csv_matrix(const std::string& path, bool header = false);

/// First column of each row as a class identifier string.
std::vector<std::string> read_label_column(const std::string& path, bool header = false);

/// Loads every view and the optional labels. Views must agree on N; the
/// offending file is named otherwise. Class ids are indexed in order of
/// first appearance.
MultiViewDataset load_dataset(const std::vector<std::string>& view_paths,
                              const std::optional<std::string>& label_path, bool header = false);

/// Shortest text that parses back to the same double.
std::string format_double(double value);

void write_csv_matrix(const std::string& path, const Matrix& m);
void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace mvfs
