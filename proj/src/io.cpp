#include "ctmc/io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ctmc/errors.hpp"

namespace ctmc {

namespace {

using nlohmann::json;

void check_labels(const std::vector<std::string>& labels, std::size_t n) {
  if (labels.empty()) return;
  if (labels.size() != n) {
    throw ParseError("expected " + std::to_string(n) + " state labels, got " +
                     std::to_string(labels.size()));
  }
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size()) {
    throw ParseError("state labels must be unique");
  }
}

Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ShapeError("rate matrix has no rows");
  const std::size_t n = rows.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw ShapeError("rate matrix is not square: row " + std::to_string(i) + " has " +
                       std::to_string(rows[i].size()) + " entries, expected " +
                       std::to_string(n));
    }
  }
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  return m;
}

MatrixDocument parse_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("rates")) {
    throw ParseError("JSON document must be an object with a \"rates\" array");
  }

  const json& rates = doc["rates"];
  if (!rates.is_array() || rates.empty()) {
    throw ParseError("\"rates\" must be a non-empty array of rows");
  }
  std::vector<std::vector<double>> rows;
  for (const json& row : rates) {
    if (!row.is_array()) throw ParseError("\"rates\" rows must be arrays of numbers");
    std::vector<double> values;
    for (const json& v : row) {
      if (!v.is_number()) throw ParseError("\"rates\" entries must be numbers");
      values.push_back(v.get<double>());
    }
    rows.push_back(std::move(values));
  }

  MatrixDocument result{rows_to_matrix(rows), {}, {}};
  if (doc.contains("states")) {
    const json& states = doc["states"];
    if (!states.is_array()) throw ParseError("\"states\" must be an array of strings");
    for (const json& s : states) {
      if (!s.is_string()) throw ParseError("\"states\" entries must be strings");
      result.states.push_back(s.get<std::string>());
    }
    check_labels(result.states, result.size());
  }
  if (doc.contains("metadata")) {
    const json& meta = doc["metadata"];
    if (!meta.is_object()) throw ParseError("\"metadata\" must be an object of strings");
    for (const auto& [key, value] : meta.items()) {
      if (!value.is_string()) throw ParseError("\"metadata\" values must be strings");
      result.metadata[key] = value.get<std::string>();
    }
  }
  return result;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

MatrixDocument parse_csv(const std::string& text) {
  MatrixDocument result{Matrix(1, 1), {}, {}};
  std::vector<std::vector<double>> rows;

  std::istringstream stream(text);
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    if (line[0] == '#') {
      if (saw_header || !rows.empty()) {
        throw ParseError("unexpected label line", line_no, 1);
      }
      saw_header = true;
      for (const std::string& cell : split_csv_line(line.substr(1)))
        result.states.push_back(trim(cell));
      continue;
    }

    std::vector<double> values;
    std::size_t column = 1;
    for (const std::string& raw_cell : split_csv_line(line)) {
      const std::string cell = trim(raw_cell);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
        throw ParseError("not a number: \"" + cell + "\"", line_no, column);
      }
      values.push_back(value);
      column += raw_cell.size() + 1;
    }
    rows.push_back(std::move(values));
  }

  result.rates = rows_to_matrix(rows);
  check_labels(result.states, result.size());
  return result;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

MatrixFormat detect_format(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' ? MatrixFormat::json : MatrixFormat::csv;
  }
  return MatrixFormat::csv;
}

MatrixDocument parse_matrix_text(const std::string& text, MatrixFormat format) {
  return format == MatrixFormat::json ? parse_json(text) : parse_csv(text);
}

namespace {
std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}
}  // namespace

MatrixDocument parse_matrix(const std::string& path, MatrixFormat format) {
  return parse_matrix_text(read_file(path), format);
}

MatrixDocument parse_matrix(const std::string& path) {
  const std::string text = read_file(path);
  return parse_matrix_text(text, detect_format(text));
}

std::string emit_matrix(const MatrixDocument& doc, MatrixFormat format) {
  const std::size_t n = doc.size();
  if (format == MatrixFormat::csv) {
    std::string out;
    if (!doc.states.empty()) {
      out += '#';
      for (std::size_t j = 0; j < n; ++j) {
        if (j) out += ',';
        out += doc.states[j];
      }
      out += '\n';
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j) out += ',';
        out += format_double(doc.rates(i, j));
      }
      out += '\n';
    }
    return out;
  }

  json out;
  if (!doc.states.empty()) out["states"] = doc.states;
  json rows = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(doc.rates(i, j));
    rows.push_back(std::move(row));
  }
  out["rates"] = std::move(rows);
  if (!doc.metadata.empty()) out["metadata"] = doc.metadata;
  return out.dump(2) + "\n";
}

}  // namespace ctmc
