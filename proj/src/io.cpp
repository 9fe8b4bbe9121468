#include "riskcut/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

namespace riskcut {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string line_error(std::size_t line, const char* field) {
  return "line " + std::to_string(line) + ": invalid " + field;
}

bool parse_label(const std::string& token, int& label) {
  if (token == "1" || token == "+1") {
    label = kPositive;
  } else if (token == "-1" || token == "0") {
    label = kNegative;
  } else {
    return false;
  }
  return true;
}

bool parse_score(const std::string& token, double& score) {
  if (token.empty()) return false;
  const char* begin = token.data();
  if (*begin == '+') ++begin;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, score);
  return ec == std::errc() && ptr == end && std::isfinite(score);
}

}  // namespace

Dataset parse_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  Dataset data;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (!header_seen) {
      if (row.empty()) continue;
      if (row != "label,score") {
        throw DataError("line " + std::to_string(line_no) + ": expected header 'label,score'");
      }
      header_seen = true;
      continue;
    }
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
      throw DataError("line " + std::to_string(line_no) + ": expected 2 fields");
    }
    int label = 0;
    double score = 0.0;
    if (!parse_label(trim(std::string_view(row).substr(0, comma)), label)) {
      throw DataError(line_error(line_no, "label"));
    }
    if (!parse_score(trim(std::string_view(row).substr(comma + 1)), score)) {
      throw DataError(line_error(line_no, "score"));
    }
    data.add(label, score);
  }
  if (!header_seen) throw DataError("empty file");
  if (data.empty()) throw DataError("no data rows");
  return data;
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return parse_dataset_csv(in);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << "label,score\n";
  char buf[64];
  for (const auto& [label, score] : data) {
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", label, score);
    out << buf;
  }
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

}  // namespace riskcut
