#pragma once

#include "karst/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <utility>

namespace karst {

inline constexpr int kStations = 9;

/// Monthly records: 9 precipitation stations plus one spring discharge
/// column, contiguous months at a fixed one-month step.
struct TimeSeriesTable {
  YearMonth start;
  Matrix precipitation;  // T x 9, mm
  Vector discharge;      // T, m^3/s

  Index rows() const { return discharge.size(); }
  YearMonth month_at(Index row) const {
    return start.plus_months(static_cast<int>(row));
  }

  /// Checks the type invariants: matching lengths, T >= 2,
  /// precipitation >= 0, discharge > 0. Throws ValidationError.
  void validate() const;
};

/// Per-column min/max fitted on a training block. Column layout is
/// P1..P9 then Q (index 9).
struct NormalizationParams {
  Vector col_min;
  Vector col_max;

  Index cols() const { return col_min.size(); }
  static constexpr Index kDischargeCol = kStations;
};

/// S_norm = (S - S_min) / (S_max - S_min). Values outside the fitted
/// range map outside [0, 1]; no clipping.
inline double normalize(double value, double col_min, double col_max) {
  return (value - col_min) / (col_max - col_min);
}

inline double denormalize(double value, double col_min, double col_max) {
  return value * (col_max - col_min) + col_min;
}

inline double normalize(double value, const NormalizationParams& p, Index col) {
  return normalize(value, p.col_min[col], p.col_max[col]);
}

inline double denormalize(double value, const NormalizationParams& p,
                          Index col) {
  return denormalize(value, p.col_min[col], p.col_max[col]);
}

/// Lag-windowed supervised pairs on the normalized scale.
/// Row k of inputs is [P1(t-1)..P9(t-1), ..., P1(t-n)..P9(t-n),
/// Q(t-1)..Q(t-m)] and targets[k] is Q(t), where t is the month
/// first_target + k. Feature width is 9n + m (10 for n = m = 1).
struct SupervisedDataset {
  Matrix inputs;
  Vector targets;
  int lag_n = 1;
  int lag_m = 1;
  NormalizationParams norm;
  YearMonth first_target;

  Index rows() const { return targets.size(); }
  Index feature_width() const { return inputs.cols(); }
};

/// Parameters of the synthetic monthly generator. Defaults follow the
/// published record statistics: nine station annual means, discharge
/// range 2.54..6.89 m^3/s over 1987-2018.
struct SyntheticSpec {
  int months = 384;
  std::array<double, kStations> station_annual_means = {
      504.67, 564.08, 494.54, 542.93, 563.89,
      537.41, 558.42, 556.00, 590.23};  // mm/yr
  double discharge_min = 2.54;  // m^3/s
  double discharge_max = 6.89;
  double seasonal_amplitude = 0.5;  // fraction of the monthly mean
  double autocorrelation = 0.9;     // lag-1 coefficient of the latent state
  double noise_level = 0.05;        // 0 disables all stochastic terms
  std::uint64_t seed = 7;
  YearMonth start{1987, 1};

  void validate() const;
};

/// Reads the canonical CSV schema `date,P1,...,P9,Q` (ISO "YYYY-MM"
/// dates, '.' decimal separator). Errors name the offending line.
TimeSeriesTable load_csv(const std::filesystem::path& path);

/// Writes the same schema; lossless round trip with load_csv.
void save_csv(const TimeSeriesTable& table, const std::filesystem::path& path);

/// Seed-reproducible synthetic table. Station precipitation is seasonal
/// with multiplicative log-normal noise; discharge follows a latent
/// AR(1) state driven by a saturating response to the previous month's
/// basin rainfall, mapped into (discharge_min, discharge_max).
TimeSeriesTable generate_synthetic(const SyntheticSpec& spec);

/// Per-column min/max over table rows [row_begin, row_end).
/// A constant column in the range is an error.
NormalizationParams fit_normalizer(const TimeSeriesTable& table,
                                   Index row_begin, Index row_end);

/// Windows the table into supervised pairs, normalized with `norm`.
/// N = T - max(n, m).
SupervisedDataset make_supervised(const TimeSeriesTable& table, int lag_n,
                                  int lag_m, const NormalizationParams& norm);

/// First train_len rows / remaining rows, order preserved, no shuffling.
std::pair<SupervisedDataset, SupervisedDataset> split_contiguous(
    const SupervisedDataset& dataset, Index train_len);

}  // namespace karst
