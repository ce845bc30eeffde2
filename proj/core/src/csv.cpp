#include "probe/csv.hpp"

#include <iterator>

#include "probe/error.hpp"

namespace probe {

std::vector<CsvRecord> read_csv(std::istream& in) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::size_t pos = 0;
  if (text.starts_with("\xEF\xBB\xBF")) pos = 3;

  std::vector<CsvRecord> records;
  std::size_t line = 1;
  CsvRecord current{line, {}};
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // anything seen on this record yet

  auto finish_record = [&] {
    if (field_started || !current.fields.empty()) {
      current.fields.push_back(std::move(field));
      records.push_back(std::move(current));
    }
    field.clear();
    field_started = false;
    current = CsvRecord{line, {}};
  };

  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          ++pos;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          throw DataError("CSV line " + std::to_string(line) + ": stray quote inside field");
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        current.fields.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        if (pos + 1 < text.size() && text[pos + 1] == '\n') break;
        field.push_back(c);
        field_started = true;
        break;
      case '\n':
        ++line;
        finish_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw DataError("CSV line " + std::to_string(current.line) + ": unterminated quote");
  finish_record();
  return records;
}

}  // namespace probe
