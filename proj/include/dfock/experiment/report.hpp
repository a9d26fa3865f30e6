#pragma once

// Scenario reports: scalars, ratio tables with (min, median, max), flags
// with the threshold they were judged against, and provenance. Serialised
// with sorted keys so identical inputs give identical bytes.

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "dfock/experiment/config.hpp"

namespace dfock::experiment {

inline constexpr const char* kVersion = "1.0.0";

struct RatioStat {
  std::vector<double> samples;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
  /// max / min (infinite when min <= 0)
  double spread() const;
  static RatioStat of(std::vector<double> samples);
  nlohmann::json to_json() const;
};

enum class Relation { AtMost, AtLeast };

class Report {
 public:
  Report(std::string scenario, const Config& config);

  void scalar(const std::string& name, double value);
  void ratio(const std::string& name, std::vector<double> samples);
  /// Flags value against config.threshold(key) under the given relation.
  bool flag(const std::string& name, double value, const std::string& key,
            Relation rel = Relation::AtMost);
  /// Flags a condition; the threshold is recorded for reference only.
  bool flag_condition(const std::string& name, bool pass, const std::string& key);
  void note(const std::string& text);
  nlohmann::json& section(const std::string& name) { return sections_[name]; }

  const std::string& scenario() const { return scenario_; }
  bool passed() const;
  std::size_t failures() const;
  nlohmann::json to_json() const;
  /// Writes <dir>/<scenario>.json.
  void write(const std::filesystem::path& dir) const;

 private:
  const Config* config_;
  std::string scenario_;
  nlohmann::json scalars_ = nlohmann::json::object();
  nlohmann::json ratios_ = nlohmann::json::object();
  nlohmann::json flags_ = nlohmann::json::object();
  nlohmann::json sections_ = nlohmann::json::object();
  std::vector<std::string> notes_;
};

}  // namespace dfock::experiment
