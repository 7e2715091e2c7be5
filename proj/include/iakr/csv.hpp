#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "iakr/core.hpp"
#include "iakr/relation.hpp"

namespace iakr {

namespace detail {

// RFC-4180 flavour: ',' separates fields, '"' quotes a field, doubled quotes
// escape a quote, quoted fields may contain separators and line breaks, and
// both LF and CRLF line endings are accepted.
inline std::vector<std::vector<std::string>> csv_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  int line = 1;
  std::size_t i = 0;
  bool in_field = false;  // a separator or character has committed this record

  auto end_field = [&] {
    record.push_back(field);
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    in_field = false;
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == '"') {
      if (!field.empty()) throw ParseError("quote inside unquoted field", line, 0);
      ++i;
      bool closed = false;
      while (i < text.size()) {
        if (text[i] == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field += '"';
            i += 2;
          } else {
            ++i;
            closed = true;
            break;
          }
        } else {
          if (text[i] == '\n') ++line;
          field += text[i++];
        }
      }
      if (!closed) throw ParseError("unterminated quoted field", line, 0);
      if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
        throw ParseError("data after closing quote", line, 0);
      in_field = true;
    } else if (c == ',') {
      end_field();
      in_field = true;
      ++i;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      ++i;
      if (in_field || !field.empty()) end_record();
      ++line;
    } else {
      field += c;
      in_field = true;
      ++i;
    }
  }
  if (in_field || !field.empty()) end_record();
  return records;
}

inline std::string csv_escape(const std::string& s) {
  bool quote = s.find_first_of(",\"\n\r") != std::string::npos;
  if (!quote) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// Loads a relation from CSV text. The header row names the attributes;
/// values are opaque strings (equal spelling = equal value); duplicate rows
/// collapse. When `expected` is given, the header must name exactly its
/// attributes (any order) and columns are mapped to the schema's order.
inline Relation load_relation(std::string_view text,
                              const std::optional<Schema>& expected = std::nullopt) {
  auto records = detail::csv_records(text);
  if (records.empty()) throw ParseError("missing header row", 1, 0);
  const auto& header = records[0];

  Schema schema = expected ? *expected : Schema("R", header);
  std::vector<int> col_of(schema.width(), -1);  // schema position -> CSV column
  if (expected) {
    if (header.size() != static_cast<std::size_t>(schema.width()))
      throw ParseError("header names " + std::to_string(header.size()) +
                           " attributes, expected " + std::to_string(schema.width()),
                       1, 0);
    for (std::size_t c = 0; c < header.size(); ++c) {
      int pos = schema.find(header[c]);
      if (pos < 0) throw ParseError("unexpected column '" + header[c] + "'", 1, 0);
      if (col_of[pos] >= 0) throw ParseError("duplicate column '" + header[c] + "'", 1, 0);
      col_of[pos] = static_cast<int>(c);
    }
  } else {
    for (int p = 0; p < schema.width(); ++p) col_of[p] = p;
  }

  Relation r(schema);
  std::set<std::vector<Value>> seen;
  std::vector<Value> row(schema.width());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != header.size())
      throw ParseError("row has " + std::to_string(records[i].size()) +
                           " fields, header has " + std::to_string(header.size()),
                       static_cast<int>(i + 1), 0);
    for (int p = 0; p < schema.width(); ++p) row[p] = r.intern(records[i][col_of[p]]);
    if (seen.insert(row).second) r.append_row(row);
  }
  return r;
}

/// Writes a relation as CSV (header row, then tuples in stored order).
inline std::string write_csv(const Relation& r) {
  std::string out;
  for (int c = 0; c < r.schema().width(); ++c) {
    if (c) out += ',';
    out += detail::csv_escape(r.schema().attr_name(c));
  }
  out += '\n';
  for (std::size_t t = 0; t < r.size(); ++t) {
    for (int c = 0; c < r.schema().width(); ++c) {
      if (c) out += ',';
      out += detail::csv_escape(r.display(r.value(t, c)));
    }
    out += '\n';
  }
  return out;
}

}  // namespace iakr
