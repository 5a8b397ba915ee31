#include "bivmap/csv.hpp"

#include <boost/tokenizer.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "bivmap/error.hpp"

namespace bivmap {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(std::string_view line) {
  using Separator = boost::escaped_list_separator<char>;
  const std::string owned(line);
  boost::tokenizer<Separator> tok(owned, Separator("", ",", "\""));
  std::vector<std::string> fields;
  for (const auto& f : tok) fields.emplace_back(trim(f));
  return fields;
}

}  // namespace

CsvTable CsvTable::parse(std::string_view text, std::string_view what) {
  CsvTable table;
  table.what_ = std::string(what);
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::size_t line_no = 0;
  bool have_header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (trim(line).empty()) continue;

    std::vector<std::string> fields;
    try {
      fields = split_fields(line);
    } catch (const boost::escaped_list_error& e) {
      throw ParseError(table.what_ + " line " + std::to_string(line_no) +
                       ": " + e.what());
    }
    if (!have_header) {
      table.header_ = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header_.size()) {
      throw ParseError(table.what_ + " line " + std::to_string(line_no) +
                       ": expected " + std::to_string(table.header_.size()) +
                       " fields, found " + std::to_string(fields.size()));
    }
    table.rows_.push_back({line_no, std::move(fields)});
  }
  if (!have_header) throw ParseError(table.what_ + ": empty document");
  return table;
}

bool CsvTable::has_column(std::string_view name) const {
  for (const auto& h : header_)
    if (h == name) return true;
  return false;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header_.size(); ++i)
    if (header_[i] == name) return i;
  throw ParseError(what_ + ": missing column '" + std::string(name) + "'");
}

const std::string& CsvTable::text(const Row& row, std::size_t col) const {
  return row.fields.at(col);
}

double CsvTable::number(const Row& row, std::size_t col) const {
  const std::string& f = row.fields.at(col);
  double v = 0.0;
  const auto* end = f.data() + f.size();
  const auto [ptr, ec] = std::from_chars(f.data(), end, v);
  if (f.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ParseError(what_ + " line " + std::to_string(row.line) + ": column '" +
                     header_[col] + "' is not a number: '" + f + "'");
  }
  return v;
}

long CsvTable::integer(const Row& row, std::size_t col) const {
  const std::string& f = row.fields.at(col);
  long v = 0;
  const auto* end = f.data() + f.size();
  const auto [ptr, ec] = std::from_chars(f.data(), end, v);
  if (f.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(what_ + " line " + std::to_string(row.line) + ": column '" +
                     header_[col] + "' is not an integer: '" + f + "'");
  }
  return v;
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

}  // namespace bivmap
