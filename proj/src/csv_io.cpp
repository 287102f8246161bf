#include "freightcast/csv_io.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "freightcast/format.hpp"

namespace freightcast {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
  }
  return fields;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace

TimeSeries parse_series_csv(std::istream& input, const DatasetConfig& config,
                            const std::string& source_label) {
  std::string line;
  if (!std::getline(input, line)) {
    throw ParseError(source_label + ": empty input, expected a CSV header");
  }
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
    line.erase(0, 3);  // UTF-8 BOM
  }
  const auto header = split_csv_line(line);
  std::ptrdiff_t date_idx = -1, value_idx = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == config.date_column) date_idx = static_cast<std::ptrdiff_t>(i);
    if (header[i] == config.value_column) value_idx = static_cast<std::ptrdiff_t>(i);
  }
  if (date_idx < 0) {
    throw ParseError(source_label + ": date column '" + config.date_column +
                     "' not found in header");
  }
  if (value_idx < 0) {
    throw ParseError(source_label + ": value column '" + config.value_column +
                     "' not found in header");
  }

  std::vector<double> values;
  std::optional<Period> start;
  Period prev = Period::monthly(0, 1);
  int row = 1;
  while (std::getline(input, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() <= static_cast<std::size_t>(std::max(date_idx, value_idx))) {
      throw ParseError(source_label + ": row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " fields, expected at least " +
                       std::to_string(std::max(date_idx, value_idx) + 1));
    }

    Period period = Period::monthly(0, 1);
    try {
      period = Period::parse(fields[static_cast<std::size_t>(date_idx)], config.frequency);
    } catch (const ParseError& e) {
      throw ParseError(source_label + ": row " + std::to_string(row) + ", column '" +
                       config.date_column + "': " + e.what());
    }

    const std::string& raw = fields[static_cast<std::size_t>(value_idx)];
    double value = 0.0;
    const auto conv = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (conv.ec != std::errc{} || conv.ptr != raw.data() + raw.size()) {
      throw ParseError(source_label + ": row " + std::to_string(row) + ", column '" +
                       config.value_column + "': cannot parse number from '" + raw + "'");
    }

    if (start) {
      const auto step = prev.steps_until(period);
      if (step != 1) {
        if (step <= 0) {
          throw GapError(source_label + ": row " + std::to_string(row) + ": period " +
                         period.to_string() + " is not after " + prev.to_string());
        }
        throw GapError(source_label + ": missing period " + prev.next().to_string() +
                       " before row " + std::to_string(row));
      }
    } else {
      start = period;
    }
    prev = period;

    if (config.transform_on_load.kind == TransformKind::Log && value <= 0.0) {
      throw NegativeValueError(source_label + ": row " + std::to_string(row) + ": value " +
                               format_double(value) + " is outside the log transform domain");
    }
    if (config.transform_on_load.kind == TransformKind::Sqrt && value < 0.0) {
      throw NegativeValueError(source_label + ": row " + std::to_string(row) + ": value " +
                               format_double(value) + " is outside the sqrt transform domain");
    }
    values.push_back(config.transform_on_load.apply(value));
  }

  if (!start) {
    throw ParseError(source_label + ": no data rows");
  }
  TimeSeries series(*start, std::move(values));
  if (config.resample_to_monthly) {
    if (config.frequency != Frequency::Weekly) {
      throw ConfigError(source_label + ": resample_to_monthly applies to weekly datasets only");
    }
    return resample_weekly_to_monthly(series);
  }
  return series;
}

TimeSeries load_series_csv(const DatasetConfig& config) {
  std::ifstream input(config.path);
  if (!input) {
    throw IoError("cannot open dataset file '" + config.path + "'");
  }
  return parse_series_csv(input, config, config.path);
}

std::filesystem::path fetch_cache_path(const std::string& url, const FetchOptions& options) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(url)));
  return options.cache_dir / (std::string(buf) + "-" + options.as_of + ".csv");
}

TimeSeries fetch_indicator_csv(const std::string& url, const DatasetConfig& config,
                               const FetchOptions& options) {
  const auto cache_file = fetch_cache_path(url, options);
  if (std::filesystem::exists(cache_file)) {
    std::ifstream input(cache_file);
    if (!input) {
      throw IoError("cannot open cached file '" + cache_file.string() + "'");
    }
    return parse_series_csv(input, config, url + " (cached)");
  }

  if (!options.allow_network) {
    throw NetworkError("network access is disabled and no cached copy exists for " + url +
                       "; rerun with --allow-network or place the file at " +
                       cache_file.string());
  }

  // split scheme://host[:port]/path
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw NetworkError("malformed URL '" + url + "'");
  }
  const std::string scheme = url.substr(0, scheme_end);
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string host = url.substr(scheme_end + 3, path_start == std::string::npos
                                                          ? std::string::npos
                                                          : path_start - scheme_end - 3);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (scheme != "http" && scheme != "https") {
    throw NetworkError("unsupported URL scheme '" + scheme + "'");
  }

  httplib::Client client((scheme + "://" + host).c_str());
  client.set_follow_location(true);
  const auto response = client.Get(path.c_str());
  if (!response) {
    throw NetworkError("request to " + url + " failed: " + httplib::to_string(response.error()));
  }
  if (response->status != 200) {
    throw NetworkError("request to " + url + " returned status " +
                       std::to_string(response->status));
  }

  // parse before caching so a malformed body never poisons the cache
  std::istringstream body(response->body);
  TimeSeries series = parse_series_csv(body, config, url);

  std::filesystem::create_directories(options.cache_dir);
  std::ofstream out(cache_file, std::ios::binary);
  if (!out) {
    throw IoError("cannot write cache file '" + cache_file.string() + "'");
  }
  out.write(response->body.data(), static_cast<std::streamsize>(response->body.size()));
  return series;
}

}  // namespace freightcast
