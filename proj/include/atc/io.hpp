#pragma once

#include "atc/bootstrap.hpp"
#include "atc/simplex.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

namespace atc::io {

enum class DumpFormat { csv, json };

DumpFormat parse_format(std::string_view name);

/// Tolerance for rows when renormalization is switched off.
inline constexpr double kStrictSumTolerance = 1e-9;
/// Significant digits written for probabilities.
inline constexpr int kDumpDigits = 12;

// Prediction dumps. CSV: header p0,...,p{k-1}[,label], one example per row.
// JSON: {"k": k, "probabilities": [[...], ...], "labels": [...]} with labels optional.

PredictionSet read_dump_csv(std::istream& in, bool renormalize = true);
PredictionSet read_dump_json(std::istream& in, bool renormalize = true);
PredictionSet load_dump(const std::filesystem::path& path, bool renormalize = true,
                        DumpFormat format = DumpFormat::csv);

void write_dump_csv(std::ostream& out, const PredictionSet& data);
void write_dump_json(std::ostream& out, const PredictionSet& data);
void save_dump(const std::filesystem::path& path, const PredictionSet& data, DumpFormat format = DumpFormat::csv);

/// dimension,method,run,abs_error
void write_runs_csv(std::ostream& out, std::span<const RunRecord> records);
/// dimension,method,mean,ci_low,ci_high
void write_aggregate_csv(std::ostream& out, std::span<const AggregateRow> rows);

/// 0.4912 -> "49.12"
std::string percent(double fraction);
/// "12.50 [3.00, 20.25]"
std::string percent_with_interval(double value, double low, double high);

}  // namespace atc::io
