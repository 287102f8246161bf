#pragma once

#include <filesystem>
#include <istream>
#include <string>

#include "freightcast/timeseries.hpp"

namespace freightcast {

struct DatasetConfig {
  std::string name;
  std::string path;  ///< local CSV; leave empty when `url` is used
  std::string url;   ///< remote CSV, fetched through the on-disk cache
  std::string date_column = "date";
  std::string value_column = "value";
  Frequency frequency = Frequency::Monthly;
  bool resample_to_monthly = false;  ///< weekly input only
  Transform transform_on_load{};     ///< applied to values while loading
};

/// Parses and validates a CSV time series: header required, dates must be
/// contiguous (GapError names the first missing period), values must be
/// finite and inside the configured transform's domain.
TimeSeries load_series_csv(const DatasetConfig& config);
TimeSeries parse_series_csv(std::istream& input, const DatasetConfig& config,
                            const std::string& source_label);

struct FetchOptions {
  std::filesystem::path cache_dir = ".freightcast-cache";
  bool allow_network = false;
  std::string as_of = "latest";  ///< part of the cache key
};

/// Cache-first download: a cached body is reused byte-for-byte without
/// touching the network; a fresh body is only cached after it parses.
TimeSeries fetch_indicator_csv(const std::string& url, const DatasetConfig& config,
                               const FetchOptions& options);

std::filesystem::path fetch_cache_path(const std::string& url, const FetchOptions& options);

}  // namespace freightcast
