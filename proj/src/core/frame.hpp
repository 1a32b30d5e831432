#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "matrix.hpp"

namespace tsforge {

// Timestamped 2D numeric table. Columns are individual series, rows are
// samples. Immutable after construction; every accessor returns by value or
// const reference, so frames can be shared across workers without locking.
class TimeSeriesFrame {
 public:
  TimeSeriesFrame(std::vector<std::vector<double>> columns,
                  std::vector<std::string> column_names,
                  std::optional<std::vector<std::int64_t>> timestamps);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return columns_.size(); }

  double value(std::size_t row, std::size_t col) const { return columns_[col][row]; }
  const std::vector<double>& column(std::size_t col) const { return columns_[col]; }
  const std::vector<std::string>& column_names() const { return names_; }
  bool has_timestamps() const { return timestamps_.has_value(); }
  const std::vector<std::int64_t>& timestamps() const;

  // Timestamp of a row: the real clock when present, the row index otherwise.
  std::int64_t time_at(std::size_t row) const;

  // Last k rows, timestamps included.
  TimeSeriesFrame suffix(std::size_t k) const;
  // First k rows.
  TimeSeriesFrame head(std::size_t k) const;

  Matrix to_matrix() const;
  std::string to_csv() const;

 private:
  std::vector<std::vector<double>> columns_;
  std::vector<std::string> names_;
  std::optional<std::vector<std::int64_t>> timestamps_;
  std::size_t rows_ = 0;
};

struct RepairRecord {
  std::size_t row = 0;
  std::size_t col = 0;
  std::string method;  // "interpolate" or "boundary"
};

struct QualityReport {
  std::vector<std::size_t> missing_count;  // per column
  std::vector<bool> has_negative;          // per column
  std::vector<bool> has_nonnumeric;        // per column
  std::optional<std::int64_t> inferred_frequency_seconds;
  std::vector<RepairRecord> repairs_applied;

  bool any_negative() const;
};

struct TemporalSplit {
  TimeSeriesFrame train;
  TimeSeriesFrame holdout;
  double fraction = 0.0;
};

// CSV ingestion. Header row required; '.' decimal separator. When
// timestamp_column is given that column is parsed as either an integer or an
// ISO-8601 date/datetime; otherwise rows get index timestamps 0,1,2,...
// Non-numeric value cells become NaN (repaired later by quality_check); a
// column with no numeric cell at all is rejected.
TimeSeriesFrame load_csv(const std::string& path,
                         const std::optional<std::string>& timestamp_column);
TimeSeriesFrame parse_csv(const std::string& text,
                          const std::optional<std::string>& timestamp_column);

// Fills NaN cells by linear interpolation between the nearest valid
// neighbours (nearest valid value at the boundaries) and reports every
// repair plus the per-column negative/non-numeric flags.
std::pair<TimeSeriesFrame, QualityReport> quality_check(const TimeSeriesFrame& frame);

// First ⌈fraction·n⌉ rows become train, the remainder holdout. No shuffling.
TemporalSplit temporal_split(const TimeSeriesFrame& frame, double fraction);

}  // namespace tsforge
