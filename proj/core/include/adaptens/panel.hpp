#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "adaptens/errors.hpp"

namespace adaptens {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Aligned panel of member forecasts and realized targets.
///
/// Row t holds the m forecasts issued for step t (made `lead_time` steps
/// earlier) together with the realized target. Rows are chronological. A
/// panel may hold several independent event series (storm-style data),
/// marked by a per-row label; rows of one series are contiguous. Panels are
/// treated as immutable once built and are safe to share across threads.
struct ForecastPanel {
  std::vector<std::int64_t> timestamps;  // integer step index, regular spacing
  Matrix members;                        // T x m, file column order preserved
  Vector targets;                        // length T
  std::vector<std::string> member_names;
  std::vector<std::string> series;  // per-row label; empty => single series
  int lead_time = 1;                // k: steps between issuance and realization

  Index rows() const { return members.rows(); }
  Index member_count() const { return members.cols(); }
  bool multi_series() const { return !series.empty(); }

  struct Segment {
    Index begin;
    Index end;  // exclusive
  };
  // Maximal runs of rows sharing a series label (one segment when unlabeled).
  std::vector<Segment> segments() const;
  // Start row of the series segment containing `row`.
  Index segment_begin(Index row) const;

  // Copy of the row range [begin, end).
  ForecastPanel slice(Index begin, Index end) const;

  // Throws DataError if any structural invariant is broken.
  void check() const;
};

/// Column mapping for CSV ingestion. An empty member list selects every
/// column that is not the timestamp, target, or series column, in file order.
struct CsvSchema {
  std::string timestamp_col = "timestamp";
  std::string target_col = "target";
  std::vector<std::string> member_cols;
  std::string series_col;  // empty => no series column
};

// Reads a forecast panel from CSV. Header row required; decimal point '.';
// rows with missing or non-numeric cells are rejected with their row number
// (data rows counted from 1). Deterministic: same bytes, same panel.
ForecastPanel load_panel(const std::filesystem::path& path,
                         const CsvSchema& schema = {}, int lead_time = 1);

// Writes a panel in the same CSV schema load_panel accepts.
void save_panel(const ForecastPanel& panel, const std::filesystem::path& path,
                const CsvSchema& schema = {});

/// Chronological split fractions. Fractions refer to the full panel length;
/// boundaries are resolved by rounding to the nearest row. Test is the rest.
struct SplitSpec {
  double train_frac = 0.5;
  double val_frac = 0.25;
};

struct PanelSplits {
  ForecastPanel train;
  ForecastPanel val;
  ForecastPanel test;
  Index val_begin = 0;   // row index of the first validation row
  Index test_begin = 0;  // row index of the first test row
};

// Contiguous chronological split; no shuffling; any empty part is an error.
PanelSplits split_chronological(const ForecastPanel& panel,
                                const SplitSpec& spec);

/// Affine transform fit on training targets and applied uniformly to the
/// target column and to every member column. Sample standard deviation
/// (T-1 denominator).
struct Standardizer {
  double mu = 0.0;
  double sigma = 1.0;

  double to_std(double v) const { return (v - mu) / sigma; }
  double to_raw(double v) const { return v * sigma + mu; }

  ForecastPanel apply(const ForecastPanel& panel) const;
  ForecastPanel invert(const ForecastPanel& panel) const;
  Vector invert(const Vector& standardized_predictions) const;
};

// Requires at least 2 rows and non-constant targets (sigma > 0).
Standardizer fit_standardizer(const ForecastPanel& train);

}  // namespace adaptens
