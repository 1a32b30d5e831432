#include "frame.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace tsforge {

TimeSeriesFrame::TimeSeriesFrame(std::vector<std::vector<double>> columns,
                                 std::vector<std::string> column_names,
                                 std::optional<std::vector<std::int64_t>> timestamps)
    : columns_(std::move(columns)),
      names_(std::move(column_names)),
      timestamps_(std::move(timestamps)) {
  if (columns_.empty()) throw TsError("frame: no columns");
  rows_ = columns_[0].size();
  if (rows_ == 0) throw TsError("frame: zero rows");
  for (const auto& c : columns_) {
    if (c.size() != rows_) throw TsError("frame: unequal column lengths");
  }
  if (names_.size() != columns_.size()) throw TsError("frame: name/column count mismatch");
  if (timestamps_) {
    if (timestamps_->size() != rows_) throw TsError("frame: timestamp count mismatch");
    for (std::size_t i = 1; i < rows_; ++i) {
      if ((*timestamps_)[i] <= (*timestamps_)[i - 1]) {
        throw TsError("frame: timestamps not strictly increasing at row " + std::to_string(i));
      }
    }
  }
}

const std::vector<std::int64_t>& TimeSeriesFrame::timestamps() const {
  if (!timestamps_) throw TsError("frame: no timestamps");
  return *timestamps_;
}

std::int64_t TimeSeriesFrame::time_at(std::size_t row) const {
  return timestamps_ ? (*timestamps_)[row] : static_cast<std::int64_t>(row);
}

TimeSeriesFrame TimeSeriesFrame::suffix(std::size_t k) const {
  if (k < 1 || k > rows_) throw TsError("suffix: k out of range");
  const std::size_t start = rows_ - k;
  std::vector<std::vector<double>> cols(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    cols[c].assign(columns_[c].begin() + static_cast<std::ptrdiff_t>(start), columns_[c].end());
  }
  std::optional<std::vector<std::int64_t>> ts;
  if (timestamps_) {
    ts.emplace(timestamps_->begin() + static_cast<std::ptrdiff_t>(start), timestamps_->end());
  }
  return TimeSeriesFrame(std::move(cols), names_, std::move(ts));
}

TimeSeriesFrame TimeSeriesFrame::head(std::size_t k) const {
  if (k < 1 || k > rows_) throw TsError("head: k out of range");
  std::vector<std::vector<double>> cols(columns_.size());
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    cols[c].assign(columns_[c].begin(), columns_[c].begin() + static_cast<std::ptrdiff_t>(k));
  }
  std::optional<std::vector<std::int64_t>> ts;
  if (timestamps_) {
    ts.emplace(timestamps_->begin(), timestamps_->begin() + static_cast<std::ptrdiff_t>(k));
  }
  return TimeSeriesFrame(std::move(cols), names_, std::move(ts));
}

Matrix TimeSeriesFrame::to_matrix() const {
  Matrix m(rows_, cols());
  for (std::size_t c = 0; c < cols(); ++c) {
    for (std::size_t r = 0; r < rows_; ++r) m(r, c) = columns_[c][r];
  }
  return m;
}

std::string TimeSeriesFrame::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  if (timestamps_) out << "timestamp,";
  for (std::size_t c = 0; c < names_.size(); ++c) {
    if (c) out << ',';
    out << names_[c];
  }
  out << '\n';
  for (std::size_t r = 0; r < rows_; ++r) {
    if (timestamps_) out << (*timestamps_)[r] << ',';
    for (std::size_t c = 0; c < cols(); ++c) {
      if (c) out << ',';
      out << columns_[c][r];
    }
    out << '\n';
  }
  return out.str();
}

bool QualityReport::any_negative() const {
  return std::any_of(has_negative.begin(), has_negative.end(), [](bool b) { return b; });
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

// days since 1970-01-01 (Howard Hinnant's civil-days algorithm)
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool parse_timestamp(const std::string& raw, std::int64_t& out) {
  double num;
  if (parse_double(raw, num)) {
    out = static_cast<std::int64_t>(std::llround(num));
    return true;
  }
  // ISO-8601: YYYY-MM-DD or YYYY-MM-DD[T ]HH:MM[:SS]
  int y, mo, d, h = 0, mi = 0, se = 0;
  char sep;
  if (std::sscanf(raw.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &se) >= 3) {
    if (mo < 1 || mo > 12 || d < 1 || d > 31) return false;
    out = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d)) * 86400 +
          h * 3600 + mi * 60 + se;
    return true;
  }
  return false;
}

}  // namespace

TimeSeriesFrame parse_csv(const std::string& text,
                          const std::optional<std::string>& timestamp_column) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw TsError("csv: empty input");
  const std::vector<std::string> header = split_csv_line(line);

  std::ptrdiff_t ts_index = -1;
  if (timestamp_column) {
    const auto it = std::find(header.begin(), header.end(), *timestamp_column);
    if (it == header.end()) throw TsError("csv: timestamp column '" + *timestamp_column + "' not found");
    ts_index = it - header.begin();
  }

  std::vector<std::string> names;
  std::vector<std::size_t> value_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (static_cast<std::ptrdiff_t>(c) == ts_index) continue;
    names.push_back(header[c]);
    value_cols.push_back(c);
  }
  if (names.empty()) throw TsError("csv: no value columns");

  std::vector<std::vector<double>> columns(names.size());
  std::vector<std::int64_t> timestamps;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw TsError("csv: row " + std::to_string(row + 2) + " has " +
                    std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(header.size()));
    }
    if (ts_index >= 0) {
      std::int64_t t;
      if (!parse_timestamp(fields[static_cast<std::size_t>(ts_index)], t)) {
        throw TsError("csv: unparseable timestamp '" + fields[static_cast<std::size_t>(ts_index)] +
                      "' at row " + std::to_string(row + 2));
      }
      timestamps.push_back(t);
    }
    for (std::size_t c = 0; c < value_cols.size(); ++c) {
      double v;
      columns[c].push_back(parse_double(fields[value_cols[c]], v)
                               ? v
                               : std::numeric_limits<double>::quiet_NaN());
    }
    ++row;
  }
  if (row == 0) throw TsError("csv: no data rows");

  // Reject columns with no numeric content at all.
  std::size_t numeric_cols = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const bool any = std::any_of(columns[c].begin(), columns[c].end(),
                                 [](double v) { return !std::isnan(v); });
    if (!any) throw TsError("csv: column '" + names[c] + "' has no numeric values");
    ++numeric_cols;
  }
  if (numeric_cols == 0) throw TsError("csv: zero numeric columns");

  std::optional<std::vector<std::int64_t>> ts;
  if (ts_index >= 0) {
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
      if (timestamps[i] <= timestamps[i - 1]) {
        throw TsError("csv: timestamps not strictly increasing at row " + std::to_string(i + 2));
      }
    }
    ts = std::move(timestamps);
  }
  return TimeSeriesFrame(std::move(columns), std::move(names), std::move(ts));
}

TimeSeriesFrame load_csv(const std::string& path,
                         const std::optional<std::string>& timestamp_column) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw TsError("cannot open file: " + path);
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_csv(buf.str(), timestamp_column);
}

std::pair<TimeSeriesFrame, QualityReport> quality_check(const TimeSeriesFrame& frame) {
  const std::size_t n = frame.rows();
  const std::size_t d = frame.cols();
  QualityReport report;
  report.missing_count.assign(d, 0);
  report.has_negative.assign(d, false);
  report.has_nonnumeric.assign(d, false);
  if (frame.has_timestamps() && n >= 3) {
    const auto& ts = frame.timestamps();
    std::vector<std::int64_t> deltas;
    deltas.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i) deltas.push_back(ts[i] - ts[i - 1]);
    std::nth_element(deltas.begin(), deltas.begin() + static_cast<std::ptrdiff_t>(deltas.size() / 2),
                     deltas.end());
    report.inferred_frequency_seconds = deltas[deltas.size() / 2];
  }

  std::vector<std::vector<double>> cols(d);
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<double> v = frame.column(c);
    const bool all_nan = std::all_of(v.begin(), v.end(), [](double x) { return std::isnan(x); });
    if (all_nan) {
      throw TsError("quality_check: column '" + frame.column_names()[c] + "' is entirely non-numeric");
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (!std::isnan(v[r]) && std::isfinite(v[r])) continue;
      ++report.missing_count[c];
      report.has_nonnumeric[c] = true;
      // nearest valid neighbours
      std::ptrdiff_t lo = static_cast<std::ptrdiff_t>(r) - 1;
      while (lo >= 0 && !std::isfinite(v[static_cast<std::size_t>(lo)])) --lo;
      std::size_t hi = r + 1;
      while (hi < n && !std::isfinite(v[hi])) ++hi;
      if (lo >= 0 && hi < n) {
        const double a = v[static_cast<std::size_t>(lo)];
        const double b = v[hi];
        const double t = static_cast<double>(r - static_cast<std::size_t>(lo)) /
                         static_cast<double>(hi - static_cast<std::size_t>(lo));
        v[r] = a + t * (b - a);
        report.repairs_applied.push_back({r, c, "interpolate"});
      } else {
        v[r] = lo >= 0 ? v[static_cast<std::size_t>(lo)] : v[hi];
        report.repairs_applied.push_back({r, c, "boundary"});
      }
    }
    report.has_negative[c] =
        std::any_of(v.begin(), v.end(), [](double x) { return x < 0.0; });
    cols[c] = std::move(v);
  }

  std::optional<std::vector<std::int64_t>> ts;
  if (frame.has_timestamps()) ts = frame.timestamps();
  TimeSeriesFrame repaired(std::move(cols), frame.column_names(), std::move(ts));
  return {std::move(repaired), std::move(report)};
}

TemporalSplit temporal_split(const TimeSeriesFrame& frame, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw TsError("temporal_split: fraction out of (0,1)");
  const std::size_t n = frame.rows();
  const auto train_rows =
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  if (train_rows < 2) throw TsError("temporal_split: train split smaller than 2 rows");
  if (train_rows >= n) throw TsError("temporal_split: empty holdout");
  return TemporalSplit{frame.head(train_rows), frame.suffix(n - train_rows), fraction};
}

}  // namespace tsforge
