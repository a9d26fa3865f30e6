#include "dfock/experiment/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dfock/io.hpp"

namespace dfock::experiment {

using nlohmann::json;

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

double RatioStat::spread() const {
  return min > 0.0 ? max / min : std::numeric_limits<double>::infinity();
}

RatioStat RatioStat::of(std::vector<double> samples) {
  RatioStat s;
  s.samples = std::move(samples);
  if (s.samples.empty()) return s;
  std::vector<double> v = s.samples;
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.max = v.back();
  const std::size_t n = v.size();
  s.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  return s;
}

json RatioStat::to_json() const {
  json samples_json = json::array();
  for (double x : samples) samples_json.push_back(number(x));
  return {{"samples", samples_json},
          {"min", number(min)},
          {"median", number(median)},
          {"max", number(max)},
          {"max_over_min", number(spread())}};
}

Report::Report(std::string scenario, const Config& config)
    : config_(&config), scenario_(std::move(scenario)) {}

void Report::scalar(const std::string& name, double value) { scalars_[name] = number(value); }

void Report::ratio(const std::string& name, std::vector<double> samples) {
  ratios_[name] = RatioStat::of(std::move(samples)).to_json();
}

bool Report::flag(const std::string& name, double value, const std::string& key, Relation rel) {
  const double t = config_->threshold(key);
  const bool pass = rel == Relation::AtMost ? value <= t : value >= t;
  flags_[name] = {{"pass", pass},
                  {"value", number(value)},
                  {"threshold", key},
                  {"threshold_value", t},
                  {"relation", rel == Relation::AtMost ? "<=" : ">="}};
  return pass;
}

bool Report::flag_condition(const std::string& name, bool pass, const std::string& key) {
  flags_[name] = {{"pass", pass}, {"threshold", key}, {"threshold_value", config_->threshold(key)}};
  return pass;
}

void Report::note(const std::string& text) { notes_.push_back(text); }

bool Report::passed() const { return failures() == 0; }

std::size_t Report::failures() const {
  std::size_t n = 0;
  for (const auto& f : flags_) n += f.at("pass").get<bool>() ? 0 : 1;
  return n;
}

json Report::to_json() const {
  return {{"scenario", scenario_},
          {"scalars", scalars_},
          {"ratios", ratios_},
          {"flags", flags_},
          {"sections", sections_},
          {"notes", notes_},
          {"passed", passed()},
          {"provenance",
           {{"config_sha256", config_hash(*config_)},
            {"seed", config_->seed},
            {"version", kVersion},
            {"config_version", kConfigVersion}}}};
}

void Report::write(const std::filesystem::path& dir) const {
  io::write_json(dir / (scenario_ + ".json"), to_json());
}

}  // namespace dfock::experiment
