#include "karst/data.hpp"

#include "karst/rng.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace karst {

std::string YearMonth::str() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

YearMonth YearMonth::parse(const std::string& text) {
  if (text.size() != 7 || text[4] != '-') {
    throw ValidationError("bad date '" + text + "', expected YYYY-MM");
  }
  for (size_t i : {0u, 1u, 2u, 3u, 5u, 6u}) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      throw ValidationError("bad date '" + text + "', expected YYYY-MM");
    }
  }
  YearMonth ym;
  ym.year = std::stoi(text.substr(0, 4));
  ym.month = std::stoi(text.substr(5, 2));
  if (ym.month < 1 || ym.month > 12) {
    throw ValidationError("bad date '" + text + "': month out of range");
  }
  return ym;
}

void TimeSeriesTable::validate() const {
  if (precipitation.rows() != discharge.size()) {
    throw ValidationError("table columns have mismatched lengths");
  }
  if (precipitation.cols() != kStations) {
    throw ValidationError("table must have exactly 9 precipitation columns");
  }
  if (rows() < 2) {
    throw ValidationError("table needs at least 2 rows");
  }
  for (Index t = 0; t < rows(); ++t) {
    for (Index s = 0; s < kStations; ++s) {
      if (!std::isfinite(precipitation(t, s)) || precipitation(t, s) < 0.0) {
        throw ValidationError("negative or non-finite precipitation at row " +
                              std::to_string(t + 1) + " (" +
                              month_at(t).str() + ")");
      }
    }
    if (!std::isfinite(discharge[t]) || discharge[t] <= 0.0) {
      throw ValidationError("non-positive or non-finite discharge at row " +
                            std::to_string(t + 1) + " (" + month_at(t).str() +
                            ")");
    }
  }
}

void SyntheticSpec::validate() const {
  if (months < 24) throw ValidationError("synthetic spec: months must be >= 24");
  if (discharge_min <= 0.0) {
    throw ValidationError("synthetic spec: discharge_min must be positive");
  }
  if (discharge_max <= discharge_min) {
    throw ValidationError("synthetic spec: discharge_max must exceed discharge_min");
  }
  if (seasonal_amplitude < 0.0 || seasonal_amplitude > 1.0) {
    throw ValidationError("synthetic spec: seasonal_amplitude must be in [0, 1]");
  }
  if (autocorrelation < 0.0 || autocorrelation >= 1.0) {
    throw ValidationError("synthetic spec: autocorrelation must be in [0, 1)");
  }
  if (noise_level < 0.0) {
    throw ValidationError("synthetic spec: noise_level must be >= 0");
  }
  for (double m : station_annual_means) {
    if (!(m >= 0.0)) {
      throw ValidationError("synthetic spec: station means must be >= 0");
    }
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    size_t b = field.find_first_not_of(" \t\r");
    size_t e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_number(const std::string& text, int line_no,
                    const std::string& column) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("line " + std::to_string(line_no) +
                          ": cannot parse " + column + " value '" + text + "'");
  }
  return value;
}

}  // namespace

TimeSeriesTable load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("'" + path.string() + "' is empty");
  }
  auto header = split_csv_line(line);
  std::vector<std::string> expected = {"date", "P1", "P2", "P3", "P4", "P5",
                                       "P6",   "P7", "P8", "P9", "Q"};
  if (header != expected) {
    throw ValidationError("'" + path.string() +
                          "': header must be date,P1,...,P9,Q");
  }

  std::vector<std::array<double, kStations>> precip;
  std::vector<double> discharge;
  YearMonth start{};
  YearMonth expected_month{};
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 11) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            "11 fields, got " + std::to_string(fields.size()));
    }
    YearMonth ym;
    try {
      ym = YearMonth::parse(fields[0]);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " +
                            e.what());
    }
    if (discharge.empty()) {
      start = ym;
    } else if (!(ym == expected_month)) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": non-contiguous month " + ym.str() +
                            ", expected " + expected_month.str());
    }
    expected_month = ym.next();

    std::array<double, kStations> row{};
    for (int s = 0; s < kStations; ++s) {
      row[s] = parse_number(fields[1 + s], line_no, "P" + std::to_string(s + 1));
    }
    precip.push_back(row);
    discharge.push_back(parse_number(fields[10], line_no, "Q"));
  }

  TimeSeriesTable table;
  table.start = start;
  Index t_rows = static_cast<Index>(discharge.size());
  table.precipitation.resize(t_rows, kStations);
  table.discharge.resize(t_rows);
  for (Index t = 0; t < t_rows; ++t) {
    for (Index s = 0; s < kStations; ++s) {
      table.precipitation(t, s) = precip[t][s];
    }
    table.discharge[t] = discharge[t];
  }
  table.validate();
  return table;
}

void save_csv(const TimeSeriesTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "date,P1,P2,P3,P4,P5,P6,P7,P8,P9,Q\n";
  char buf[32];
  for (Index t = 0; t < table.rows(); ++t) {
    out << table.month_at(t).str();
    for (Index s = 0; s < kStations; ++s) {
      std::snprintf(buf, sizeof(buf), "%.6f", table.precipitation(t, s));
      out << ',' << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.6f", table.discharge[t]);
    out << ',' << buf << '\n';
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

TimeSeriesTable generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  RngStream rng(spec.seed);

  TimeSeriesTable table;
  table.start = spec.start;
  table.precipitation.resize(spec.months, kStations);
  table.discharge.resize(spec.months);

  double mean_monthly_total = 0.0;
  for (double m : spec.station_annual_means) mean_monthly_total += m / 12.0;

  // Latent discharge state, squashed through a sigmoid so Q stays
  // strictly inside the configured range. The recession term drains the
  // state faster at high stage, as large karst conduits do; it and the
  // saturating recharge response keep the one-step map nonlinear in the
  // observed features.
  const double a = spec.autocorrelation;
  const double kRainGain = 12.0;      // latent units per unit recharge response
  const double kRainSharpness = 2.0;  // curvature of the recharge response
  const double kRecession = 0.35;     // extra drainage rate at high stage
  double state = 0.0;
  double prev_rain_index = 1.0;

  for (int t = 0; t < spec.months; ++t) {
    int month_of_year = (spec.start.month - 1 + t) % 12;  // 0 = January
    // wet-season peak in July
    double season =
        1.0 + spec.seasonal_amplitude *
                  std::sin(2.0 * std::numbers::pi * (month_of_year - 3) / 12.0);

    double month_total = 0.0;
    for (int s = 0; s < kStations; ++s) {
      double base = spec.station_annual_means[s] / 12.0;
      double noise = 1.0;
      if (spec.noise_level > 0.0) {
        double sigma = spec.noise_level;
        // log-normal with unit mean; precipitation stays >= 0
        noise = std::exp(sigma * rng.normal() - 0.5 * sigma * sigma);
      }
      double p = base * season * noise;
      table.precipitation(t, s) = p;
      month_total += p;
    }
    double rain_index =
        mean_monthly_total > 0.0 ? month_total / mean_monthly_total : 1.0;

    double response = std::tanh(kRainSharpness * (prev_rain_index - 1.0));
    double innovation =
        spec.noise_level > 0.0 ? spec.noise_level * rng.normal() : 0.0;
    double a_eff = a - kRecession / (1.0 + std::exp(-state));
    state = a_eff * state + (1.0 - a) * kRainGain * response + innovation;
    prev_rain_index = rain_index;

    double unit = 1.0 / (1.0 + std::exp(-state));
    table.discharge[t] =
        spec.discharge_min + (spec.discharge_max - spec.discharge_min) * unit;
  }
  table.validate();
  return table;
}

NormalizationParams fit_normalizer(const TimeSeriesTable& table,
                                   Index row_begin, Index row_end) {
  if (row_begin < 0 || row_end > table.rows() || row_begin >= row_end) {
    throw ValidationError("fit_normalizer: empty or out-of-range row span");
  }
  const Index n_cols = kStations + 1;
  NormalizationParams params;
  params.col_min.resize(n_cols);
  params.col_max.resize(n_cols);
  auto block_rows = row_end - row_begin;
  for (Index c = 0; c < kStations; ++c) {
    params.col_min[c] = table.precipitation.col(c).segment(row_begin, block_rows).minCoeff();
    params.col_max[c] = table.precipitation.col(c).segment(row_begin, block_rows).maxCoeff();
  }
  params.col_min[kStations] = table.discharge.segment(row_begin, block_rows).minCoeff();
  params.col_max[kStations] = table.discharge.segment(row_begin, block_rows).maxCoeff();
  for (Index c = 0; c < n_cols; ++c) {
    if (!(params.col_max[c] > params.col_min[c])) {
      std::string name = c < kStations ? "P" + std::to_string(c + 1) : "Q";
      throw ValidationError("fit_normalizer: column " + name +
                            " is constant over the given rows");
    }
  }
  return params;
}

SupervisedDataset make_supervised(const TimeSeriesTable& table, int lag_n,
                                  int lag_m, const NormalizationParams& norm) {
  table.validate();
  if (lag_n < 1 || lag_m < 1) {
    throw ValidationError("make_supervised: lags must be >= 1");
  }
  if (norm.cols() != kStations + 1) {
    throw ValidationError("make_supervised: normalizer has wrong column count");
  }
  const int max_lag = std::max(lag_n, lag_m);
  const Index t_rows = table.rows();
  if (t_rows <= max_lag) {
    throw ValidationError("make_supervised: need more than max(n, m) = " +
                          std::to_string(max_lag) + " rows, have " +
                          std::to_string(t_rows));
  }

  // normalize whole columns once so shared entries are bitwise identical
  Matrix precip_n(t_rows, kStations);
  for (Index c = 0; c < kStations; ++c) {
    for (Index t = 0; t < t_rows; ++t) {
      precip_n(t, c) = normalize(table.precipitation(t, c), norm, c);
    }
  }
  Vector q_n(t_rows);
  for (Index t = 0; t < t_rows; ++t) {
    q_n[t] = normalize(table.discharge[t], norm, NormalizationParams::kDischargeCol);
  }

  SupervisedDataset ds;
  ds.lag_n = lag_n;
  ds.lag_m = lag_m;
  ds.norm = norm;
  ds.first_target = table.start.plus_months(max_lag);
  const Index n_rows = t_rows - max_lag;
  const Index width = static_cast<Index>(kStations) * lag_n + lag_m;
  ds.inputs.resize(n_rows, width);
  ds.targets.resize(n_rows);
  for (Index k = 0; k < n_rows; ++k) {
    const Index t = k + max_lag;  // target month index
    Index col = 0;
    for (int lag = 1; lag <= lag_n; ++lag) {
      for (Index s = 0; s < kStations; ++s) {
        ds.inputs(k, col++) = precip_n(t - lag, s);
      }
    }
    for (int lag = 1; lag <= lag_m; ++lag) {
      ds.inputs(k, col++) = q_n[t - lag];
    }
    ds.targets[k] = q_n[t];
  }
  return ds;
}

std::pair<SupervisedDataset, SupervisedDataset> split_contiguous(
    const SupervisedDataset& dataset, Index train_len) {
  const Index n = dataset.rows();
  if (train_len <= 0 || train_len >= n) {
    throw ValidationError("split_contiguous: train_len must be in (0, N); N = " +
                          std::to_string(n));
  }
  SupervisedDataset train = dataset;
  train.inputs = dataset.inputs.topRows(train_len);
  train.targets = dataset.targets.head(train_len);

  SupervisedDataset test = dataset;
  test.inputs = dataset.inputs.bottomRows(n - train_len);
  test.targets = dataset.targets.tail(n - train_len);
  test.first_target = dataset.first_target.plus_months(static_cast<int>(train_len));
  return {std::move(train), std::move(test)};
}

}  // namespace karst
