#include "atc/io.hpp"

#include "atc/errors.hpp"

#include "json.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace atc::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line_no) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty()) {
    throw ParseError("cannot parse '" + std::string(field) + "' as a number", line_no);
  }
  return value;
}

std::string format_g(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double tolerance_for(bool renormalize) { return renormalize ? kIngestTolerance : kStrictSumTolerance; }

// Validates one row, tagging failures with the line they came from.
Eigen::VectorXd checked_row(const Eigen::VectorXd& raw, bool renormalize, std::size_t line_no) {
  try {
    return ProbabilityVector::validate(raw, tolerance_for(renormalize)).values();
  } catch (const NotOnSimplex& e) {
    throw NotOnSimplex(e.what(), line_no);
  } catch (const DimensionError& e) {
    throw ParseError(e.what(), line_no);
  }
}

}  // namespace

DumpFormat parse_format(std::string_view name) {
  if (name == "csv") return DumpFormat::csv;
  if (name == "json") return DumpFormat::json;
  throw InvalidArgument("unknown dump format '" + std::string(name) + "' (expected csv or json)");
}

PredictionSet read_dump_csv(std::istream& in, bool renormalize) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> header;
  std::string header_text;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header_text = line;
      header = split(header_text);
      break;
    }
  }
  if (header.empty()) throw ParseError("missing header row");

  const bool has_label = header.back() == "label";
  const auto k = static_cast<Eigen::Index>(header.size() - (has_label ? 1 : 0));
  if (k < 2) throw ParseError("header declares fewer than 2 probability columns", line_no);
  for (Eigen::Index c = 0; c < k; ++c) {
    if (header[static_cast<std::size_t>(c)] != "p" + std::to_string(c)) {
      throw ParseError("header column " + std::to_string(c) + " should be p" + std::to_string(c) + ", got '" +
                           std::string(header[static_cast<std::size_t>(c)]) + "'",
                       line_no);
    }
  }

  std::vector<Eigen::VectorXd> rows;
  std::vector<int> labels;
  Eigen::VectorXd raw(k);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    for (Eigen::Index c = 0; c < k; ++c) raw(c) = parse_number<double>(fields[static_cast<std::size_t>(c)], line_no);
    rows.push_back(checked_row(raw, renormalize, line_no));
    if (has_label) {
      const int label = parse_number<int>(fields.back(), line_no);
      if (label < 0 || label >= k) {
        throw ParseError("label " + std::to_string(label) + " outside [0, " + std::to_string(k) + ")", line_no);
      }
      labels.push_back(label);
    }
  }
  if (rows.empty()) throw EmptyInput("prediction dump has no data rows");

  ProbabilityMatrix matrix(static_cast<Eigen::Index>(rows.size()), k);
  for (std::size_t r = 0; r < rows.size(); ++r) matrix.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  return PredictionSet(matrix, has_label ? std::optional(std::move(labels)) : std::nullopt);
}

PredictionSet read_dump_json(std::istream& in, bool renormalize) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    const auto& probs = doc.at("probabilities");
    if (!probs.is_array() || probs.empty()) throw EmptyInput("prediction dump has no data rows");
    const auto k = doc.contains("k") ? doc.at("k").get<Eigen::Index>()
                                     : static_cast<Eigen::Index>(probs.front().size());
    if (k < 2) throw ParseError("k must be at least 2");
    ProbabilityMatrix matrix(static_cast<Eigen::Index>(probs.size()), k);
    Eigen::VectorXd raw(k);
    for (std::size_t r = 0; r < probs.size(); ++r) {
      const auto& row = probs[r];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != k) {
        throw ParseError("row " + std::to_string(r) + " does not have " + std::to_string(k) + " entries");
      }
      for (Eigen::Index c = 0; c < k; ++c) raw(c) = row[static_cast<std::size_t>(c)].get<double>();
      matrix.row(static_cast<Eigen::Index>(r)) = checked_row(raw, renormalize, r + 1).transpose();
    }
    std::optional<std::vector<int>> labels;
    if (doc.contains("labels") && !doc.at("labels").is_null()) labels = doc.at("labels").get<std::vector<int>>();
    return PredictionSet(matrix, std::move(labels));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed prediction dump: ") + e.what());
  }
}

PredictionSet load_dump(const std::filesystem::path& path, bool renormalize, DumpFormat format) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return format == DumpFormat::csv ? read_dump_csv(in, renormalize) : read_dump_json(in, renormalize);
}

void write_dump_csv(std::ostream& out, const PredictionSet& data) {
  for (Eigen::Index c = 0; c < data.dimension(); ++c) out << (c > 0 ? "," : "") << 'p' << c;
  if (data.has_labels()) out << ",label";
  out << '\n';
  for (Eigen::Index r = 0; r < data.size(); ++r) {
    for (Eigen::Index c = 0; c < data.dimension(); ++c) {
      out << (c > 0 ? "," : "") << format_g(data.probabilities()(r, c), kDumpDigits);
    }
    if (data.has_labels()) out << ',' << data.labels()[static_cast<std::size_t>(r)];
    out << '\n';
  }
}

void write_dump_json(std::ostream& out, const PredictionSet& data) {
  // Rounded through the same 12-digit text as CSV so both formats carry identical values.
  nlohmann::json doc;
  doc["k"] = data.dimension();
  auto& probs = doc["probabilities"] = nlohmann::json::array();
  for (Eigen::Index r = 0; r < data.size(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < data.dimension(); ++c) {
      row.push_back(std::stod(format_g(data.probabilities()(r, c), kDumpDigits)));
    }
    probs.push_back(std::move(row));
  }
  if (data.has_labels()) doc["labels"] = data.labels();
  out << doc.dump() << '\n';
}

void save_dump(const std::filesystem::path& path, const PredictionSet& data, DumpFormat format) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  if (format == DumpFormat::csv) {
    write_dump_csv(out, data);
  } else {
    write_dump_json(out, data);
  }
}

void write_runs_csv(std::ostream& out, std::span<const RunRecord> records) {
  out << "dimension,method,run,abs_error\n";
  for (const auto& r : records) {
    out << r.dimension << ',' << r.method.name() << ',' << r.run << ',' << format_g(r.abs_error, 17) << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows) {
  out << "dimension,method,mean,ci_low,ci_high\n";
  for (const auto& r : rows) {
    out << r.dimension << ',' << r.method.name() << ',' << format_g(r.mean_abs_error, 17) << ','
        << format_g(r.ci_low, 17) << ',' << format_g(r.ci_high, 17) << '\n';
  }
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
  return buf;
}

std::string percent_with_interval(double value, double low, double high) {
  return percent(value) + " [" + percent(low) + ", " + percent(high) + "]";
}

}  // namespace atc::io
