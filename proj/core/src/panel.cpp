#include "adaptens/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace adaptens {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // trim surrounding whitespace
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string{}
                                           : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& cell, std::size_t row, const std::string& col) {
  if (cell.empty())
    throw DataError("row " + std::to_string(row) + ": missing value in column '" + col + "'");
  char* end = nullptr;
  double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0' || !std::isfinite(v))
    throw DataError("row " + std::to_string(row) + ": cell '" + cell +
                    "' in column '" + col + "' is not a finite number");
  return v;
}

std::int64_t parse_timestamp(const std::string& cell, std::size_t row) {
  if (cell.empty())
    throw DataError("row " + std::to_string(row) + ": missing timestamp");
  char* end = nullptr;
  long long v = std::strtoll(cell.c_str(), &end, 10);
  if (end == cell.c_str() || *end != '\0')
    throw DataError("row " + std::to_string(row) + ": timestamp '" + cell +
                    "' is not an integer step index");
  return v;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<ForecastPanel::Segment> ForecastPanel::segments() const {
  std::vector<Segment> out;
  const Index n = rows();
  if (n == 0) return out;
  if (series.empty()) {
    out.push_back({0, n});
    return out;
  }
  Index begin = 0;
  for (Index t = 1; t <= n; ++t) {
    if (t == n || series[static_cast<std::size_t>(t)] !=
                      series[static_cast<std::size_t>(begin)]) {
      out.push_back({begin, t});
      begin = t;
    }
  }
  return out;
}

Index ForecastPanel::segment_begin(Index row) const {
  if (series.empty()) return 0;
  Index b = row;
  const auto& label = series[static_cast<std::size_t>(row)];
  while (b > 0 && series[static_cast<std::size_t>(b - 1)] == label) --b;
  return b;
}

ForecastPanel ForecastPanel::slice(Index begin, Index end) const {
  if (begin < 0 || end > rows() || begin > end)
    throw std::invalid_argument("panel slice out of range");
  ForecastPanel out;
  out.timestamps.assign(timestamps.begin() + begin, timestamps.begin() + end);
  out.members = members.middleRows(begin, end - begin);
  out.targets = targets.segment(begin, end - begin);
  out.member_names = member_names;
  if (!series.empty())
    out.series.assign(series.begin() + begin, series.begin() + end);
  out.lead_time = lead_time;
  return out;
}

void ForecastPanel::check() const {
  const Index n = rows();
  if (n < 1 || member_count() < 1)
    throw DataError("panel must have at least one row and one member");
  if (targets.size() != n)
    throw DataError("member matrix and target vector row counts differ");
  if (static_cast<Index>(timestamps.size()) != n)
    throw DataError("timestamp count differs from row count");
  if (!series.empty() && static_cast<Index>(series.size()) != n)
    throw DataError("series label count differs from row count");
  if (lead_time < 1) throw DataError("lead time must be >= 1");
  if (!members.allFinite() || !targets.allFinite())
    throw DataError("panel contains non-finite values");

  // Strictly increasing timestamps within each series; series contiguous.
  std::unordered_set<std::string> seen_labels;
  for (const auto& seg : segments()) {
    if (!series.empty()) {
      const auto& label = series[static_cast<std::size_t>(seg.begin)];
      if (!seen_labels.insert(label).second)
        throw DataError("series '" + label + "' reappears after another series; series rows must be contiguous");
    }
    for (Index t = seg.begin + 1; t < seg.end; ++t) {
      if (timestamps[static_cast<std::size_t>(t)] <=
          timestamps[static_cast<std::size_t>(t - 1)])
        throw DataError("row " + std::to_string(t + 1) +
                        ": timestamp not strictly increasing within its series");
    }
  }
}

ForecastPanel load_panel(const std::filesystem::path& path,
                         const CsvSchema& schema, int lead_time) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line))
    throw DataError("'" + path.string() + "': empty file, header row required");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);

  auto col_index = [&](const std::string& name) -> Index {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
      throw DataError("column '" + name + "' not found in header of '" + path.string() + "'");
    return static_cast<Index>(it - header.begin());
  };

  const Index ts_col = col_index(schema.timestamp_col);
  const Index y_col = col_index(schema.target_col);
  Index series_col = -1;
  if (!schema.series_col.empty()) series_col = col_index(schema.series_col);

  std::vector<Index> member_cols;
  std::vector<std::string> member_names;
  if (schema.member_cols.empty()) {
    for (Index c = 0; c < static_cast<Index>(header.size()); ++c) {
      if (c == ts_col || c == y_col || c == series_col) continue;
      member_cols.push_back(c);
      member_names.push_back(header[static_cast<std::size_t>(c)]);
    }
  } else {
    for (const auto& name : schema.member_cols) {
      member_cols.push_back(col_index(name));
      member_names.push_back(name);
    }
  }
  if (member_cols.empty())
    throw DataError("'" + path.string() + "': no member forecast columns");

  std::vector<std::int64_t> timestamps;
  std::vector<std::string> series;
  std::vector<double> y_values;
  std::vector<double> x_values;  // row major

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw DataError("row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " cells, got " +
                      std::to_string(cells.size()));
    timestamps.push_back(parse_timestamp(cells[static_cast<std::size_t>(ts_col)], row));
    y_values.push_back(parse_double(cells[static_cast<std::size_t>(y_col)], row,
                                    schema.target_col));
    for (std::size_t i = 0; i < member_cols.size(); ++i)
      x_values.push_back(parse_double(
          cells[static_cast<std::size_t>(member_cols[i])], row, member_names[i]));
    if (series_col >= 0)
      series.push_back(cells[static_cast<std::size_t>(series_col)]);
  }
  if (row == 0) throw DataError("'" + path.string() + "': no data rows");

  ForecastPanel panel;
  const Index n = static_cast<Index>(row);
  const Index m = static_cast<Index>(member_cols.size());
  panel.timestamps = std::move(timestamps);
  panel.members = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                           Eigen::RowMajor>>(x_values.data(), n, m);
  panel.targets = Eigen::Map<Vector>(y_values.data(), n);
  panel.member_names = std::move(member_names);
  panel.series = std::move(series);
  panel.lead_time = lead_time;
  panel.check();
  return panel;
}

void save_panel(const ForecastPanel& panel, const std::filesystem::path& path,
                const CsvSchema& schema) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");

  out << schema.timestamp_col;
  for (const auto& name : panel.member_names) out << ',' << name;
  out << ',' << schema.target_col;
  const bool with_series = panel.multi_series();
  if (with_series)
    out << ',' << (schema.series_col.empty() ? "series" : schema.series_col);
  out << '\n';

  for (Index t = 0; t < panel.rows(); ++t) {
    out << panel.timestamps[static_cast<std::size_t>(t)];
    for (Index j = 0; j < panel.member_count(); ++j)
      out << ',' << fmt_double(panel.members(t, j));
    out << ',' << fmt_double(panel.targets(t));
    if (with_series) out << ',' << panel.series[static_cast<std::size_t>(t)];
    out << '\n';
  }
}

PanelSplits split_chronological(const ForecastPanel& panel,
                                const SplitSpec& spec) {
  if (!(spec.train_frac > 0.0 && spec.train_frac < 1.0) ||
      !(spec.val_frac > 0.0 && spec.val_frac < 1.0) ||
      spec.train_frac + spec.val_frac >= 1.0)
    throw std::invalid_argument("split fractions must lie in (0,1) and sum below 1");

  const Index n = panel.rows();
  const Index n_train = static_cast<Index>(std::llround(spec.train_frac * static_cast<double>(n)));
  const Index n_val = static_cast<Index>(std::llround(spec.val_frac * static_cast<double>(n)));
  const Index n_test = n - n_train - n_val;
  if (n_train < 1 || n_val < 1 || n_test < 1)
    throw DataError("split produces an empty part: train=" + std::to_string(n_train) +
                    " val=" + std::to_string(n_val) + " test=" + std::to_string(n_test));

  PanelSplits out;
  out.train = panel.slice(0, n_train);
  out.val = panel.slice(n_train, n_train + n_val);
  out.test = panel.slice(n_train + n_val, n);
  out.val_begin = n_train;
  out.test_begin = n_train + n_val;
  return out;
}

Standardizer fit_standardizer(const ForecastPanel& train) {
  const Index n = train.rows();
  if (n < 2) throw std::invalid_argument("standardizer needs at least 2 rows");
  const double mu = train.targets.mean();
  const double ss = (train.targets.array() - mu).square().sum();
  const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sigma > 0.0))
    throw NumericalError("training targets are constant, standard deviation is zero");
  return Standardizer{mu, sigma};
}

ForecastPanel Standardizer::apply(const ForecastPanel& panel) const {
  ForecastPanel out = panel;
  out.targets = (panel.targets.array() - mu) / sigma;
  out.members = (panel.members.array() - mu) / sigma;
  return out;
}

ForecastPanel Standardizer::invert(const ForecastPanel& panel) const {
  ForecastPanel out = panel;
  out.targets = panel.targets.array() * sigma + mu;
  out.members = panel.members.array() * sigma + mu;
  return out;
}

Vector Standardizer::invert(const Vector& standardized_predictions) const {
  return standardized_predictions.array() * sigma + mu;
}

}  // namespace adaptens
