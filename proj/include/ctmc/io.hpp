#pragma once

#include <map>
#include <string>
#include <vector>

#include "ctmc/matrix.hpp"

namespace ctmc {

/// A rate matrix as read from disk, before intensity validation. Labels,
/// when present, name the states in row order and must be unique.
struct MatrixDocument {
  Matrix rates;
  std::vector<std::string> states;                 // empty or one per state
  std::map<std::string, std::string> metadata;     // free-form, JSON only

  std::size_t size() const { return rates.rows(); }
};

enum class MatrixFormat { json, csv };

/// Picks a format from the file content: documents starting with '{' are
/// JSON, everything else is CSV.
MatrixFormat detect_format(const std::string& text);

/// JSON: object with required "rates" (n rows of n numbers), optional
/// "states" (n unique strings) and optional "metadata" (string map).
/// CSV: n lines of n comma-separated numbers, optionally preceded by a label
/// header line starting with '#'. Scientific notation is accepted.
/// Throws ParseError (with line/column for CSV) or ShapeError.
MatrixDocument parse_matrix_text(const std::string& text, MatrixFormat format);

MatrixDocument parse_matrix(const std::string& path, MatrixFormat format);
MatrixDocument parse_matrix(const std::string& path);  // detects the format

/// Inverse of parse_matrix_text up to floating-point text representation;
/// numbers are written with 17 significant digits so values round-trip
/// exactly. CSV output drops metadata (the format has no place for it).
std::string emit_matrix(const MatrixDocument& doc, MatrixFormat format);

}  // namespace ctmc
