#include "fal/metrics_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fal::harness {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error("metrics csv: bad number '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error("metrics csv: bad integer '" + s + "'");
  return v;
}

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

double number_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

MetricsFormat parse_format(const std::string& name) {
  if (name == "csv") return MetricsFormat::Csv;
  if (name == "json") return MetricsFormat::Json;
  throw std::invalid_argument("unknown metrics format '" + name + "'");
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json record_to_json(const MetricsRecord& r) {
  return {{"split_id", r.split_id},       {"iteration", r.iteration},
          {"strategy", r.strategy},       {"alpha", r.alpha},
          {"accuracy", r.accuracy},       {"precision", r.precision},
          {"recall", r.recall},           {"disparity", number_or_null(r.disparity)},
          {"measure", r.measure},         {"wall_time_s", r.wall_time_s},
          {"selected_id", r.selected_id}, {"train_size", r.train_size}};
}

MetricsRecord record_from_json(const nlohmann::json& j) {
  MetricsRecord r;
  r.split_id = j.at("split_id").get<std::size_t>();
  r.iteration = j.at("iteration").get<std::size_t>();
  r.strategy = j.at("strategy").get<std::string>();
  r.alpha = j.at("alpha").get<double>();
  r.accuracy = j.at("accuracy").get<double>();
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.disparity = number_from(j.at("disparity"));
  r.measure = j.at("measure").get<std::string>();
  r.wall_time_s = j.at("wall_time_s").get<double>();
  r.selected_id = j.value("selected_id", std::size_t{0});
  r.train_size = j.value("train_size", std::size_t{0});
  return r;
}

void emit_metrics(const std::vector<MetricsRecord>& records, MetricsFormat format, const std::filesystem::path& path,
                  const nlohmann::json& config, const std::vector<std::uint64_t>& seeds) {
  if (records.empty()) throw std::invalid_argument("emit_metrics: no records");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write metrics to " + path.string());
  if (format == MetricsFormat::Csv) {
    out << kMetricsCsvHeader << '\n';
    for (const auto& r : records) {
      out << r.split_id << ',' << r.iteration << ',' << r.strategy << ',' << format_double(r.alpha) << ','
          << format_double(r.accuracy) << ',' << format_double(r.precision) << ',' << format_double(r.recall) << ','
          << format_double(r.disparity) << ',' << r.measure << ',' << format_double(r.wall_time_s) << '\n';
    }
  } else {
    nlohmann::json j;
    j["config"] = config;
    j["seeds"] = seeds;
    j["records"] = nlohmann::json::array();
    for (const auto& r : records) j["records"].push_back(record_to_json(r));
    out << j.dump(2) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMetricsCsvHeader)
    throw std::runtime_error(path.string() + ": not a metrics CSV (unexpected header)");
  std::vector<MetricsRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 10) throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
    MetricsRecord r;
    r.split_id = parse_count(f[0]);
    r.iteration = parse_count(f[1]);
    r.strategy = f[2];
    r.alpha = parse_number(f[3]);
    r.accuracy = parse_number(f[4]);
    r.precision = parse_number(f[5]);
    r.recall = parse_number(f[6]);
    r.disparity = parse_number(f[7]);
    r.measure = f[8];
    r.wall_time_s = parse_number(f[9]);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MetricsRecord> read_metrics_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file " + path.string());
  nlohmann::json j;
  in >> j;
  std::vector<MetricsRecord> out;
  for (const auto& r : j.at("records")) out.push_back(record_from_json(r));
  return out;
}

std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path) {
  if (!std::filesystem::is_directory(path)) {
    if (path.extension() == ".json") return read_metrics_json(path);
    return read_metrics_csv(path);
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(path)) {
    const auto name = e.path().filename().string();
    if (name.starts_with("raw_split") && e.path().extension() == ".csv") files.push_back(e.path());
  }
  if (files.empty()) throw std::runtime_error(path.string() + ": no raw_split*.csv files");
  std::sort(files.begin(), files.end());
  std::vector<MetricsRecord> out;
  for (const auto& f : files) {
    auto part = read_metrics_csv(f);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<CompareRow> compare(const std::vector<MetricsRecord>& a, const std::vector<MetricsRecord>& b) {
  auto by_iteration = [](const std::vector<MetricsRecord>& recs) {
    std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> m;
    for (const auto& r : recs) {
      m[r.iteration].first.push_back(r.accuracy);
      m[r.iteration].second.push_back(r.disparity);
    }
    return m;
  };
  const auto ma = by_iteration(a);
  const auto mb = by_iteration(b);
  std::vector<CompareRow> rows;
  for (const auto& [t, va] : ma) {
    auto it = mb.find(t);
    if (it == mb.end()) continue;
    CompareRow row;
    row.iteration = t;
    row.accuracy_a = mean_of(va.first);
    row.accuracy_b = mean_of(it->second.first);
    row.disparity_a = mean_of(va.second);
    row.disparity_b = mean_of(it->second.second);
    row.accuracy_delta = row.accuracy_a - row.accuracy_b;
    row.disparity_delta = row.disparity_a - row.disparity_b;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fal::harness
