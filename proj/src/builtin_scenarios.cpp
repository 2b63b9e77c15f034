//===-- builtin_scenarios.cpp - Scenarios shipped with the tool ------------===//

#include "partsan/builtin_scenarios.hpp"

#include <algorithm>
#include <future>
#include <thread>

namespace partsan {

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> names;
  for (const auto& s : embedded_scenarios()) names.emplace_back(s.name);
  return names;
}

std::optional<std::string_view> builtin_scenario_text(std::string_view name) {
  for (const auto& s : embedded_scenarios())
    if (name == s.name) return std::string_view(s.json);
  return std::nullopt;
}

Scenario builtin_scenario(std::string_view name) {
  const auto text = builtin_scenario_text(name);
  if (!text) throw ConfigError("no builtin scenario named '" + std::string(name) + "'");
  try {
    return parse_scenario_text(*text);
  } catch (const ConfigError& e) {
    throw ConfigError("builtin " + std::string(name) + ": " + e.what());
  }
}

std::vector<BatchEntry> run_all_builtins(const RunOptions& options, ReportFormat format,
                                         unsigned jobs) {
  const auto names = builtin_scenario_names();
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());

  auto run_one = [&](const std::string& name) {
    BatchEntry entry;
    entry.name = name;
    entry.report = run_scenario(builtin_scenario(name), options);
    entry.rendered = emit_report(entry.report, format);
    return entry;
  };

  std::vector<BatchEntry> out;
  out.reserve(names.size());
  for (std::size_t first = 0; first < names.size(); first += jobs) {
    const std::size_t last = std::min(names.size(), first + jobs);
    std::vector<std::future<BatchEntry>> batch;
    for (std::size_t i = first; i < last; ++i)
      batch.push_back(std::async(std::launch::async, run_one, names[i]));
    for (auto& f : batch) out.push_back(f.get());
  }
  return out;
}

}  // namespace partsan
