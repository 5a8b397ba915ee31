#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace bivmap {

// Header-addressed CSV table. Fields may be double-quoted to carry commas.
class CsvTable {
 public:
  struct Row {
    std::size_t line = 0;  // 1-based line in the source text
    std::vector<std::string> fields;
  };

  static CsvTable parse(std::string_view text, std::string_view what);

  // Throws ParseError naming `what` when a required column is absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::string& what() const { return what_; }

  double number(const Row& row, std::size_t col) const;
  long integer(const Row& row, std::size_t col) const;
  const std::string& text(const Row& row, std::size_t col) const;

 private:
  std::string what_;
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

// Shortest round-trip representation, deterministic across runs.
std::string format_number(double v);

}  // namespace bivmap
