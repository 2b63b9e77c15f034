//===-- report.cpp - Run reports and their text/JSON forms -----------------===//

#include "partsan/report.hpp"

#include <cstdio>

#include "partsan/asan_shadow.hpp"
#include "partsan/msan_shadow.hpp"
#include "partsan/ub_checks.hpp"

namespace partsan {

using nlohmann::json;

const char* to_string(Verdict verdict) {
  return verdict == Verdict::Match ? "MATCH" : "MISMATCH";
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "text") return ReportFormat::Text;
  if (text == "json") return ReportFormat::Json;
  throw ConfigError("unknown report format '" + std::string(text) + "'");
}

namespace {

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string hex(std::uint64_t value) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(value));
  return buf;
}

template <typename T>
json optional_json(const std::optional<T>& value) {
  return value ? json(*value) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& value) {
  if (value.is_null()) return std::nullopt;
  return value.get<T>();
}

std::string emit_text(const RunReport& r) {
  std::string out = "REPORT scenario=" + r.scenario + " seed=" + std::to_string(r.seed) +
                    " slowdown=" + r.slowdown_factor + " raw_ticks=" + std::to_string(r.raw_ticks) +
                    " virtual_ticks=" + std::to_string(r.virtual_ticks) + "\n";
  for (const auto& e : r.events) {
    out += "EVENT kind=" + e.kind + " t=" + std::to_string(e.time) +
           " part=" + std::to_string(e.partition) +
           " process=" + (e.process ? std::to_string(*e.process) : "-") +
           " detail=" + quote(e.detail) + "\n";
  }
  for (const auto& v : r.violations) {
    out += "VIOLATION kind=" + v.kind + " part=" + std::to_string(v.partition) +
           " addr=" + hex(v.addr) + " size=" + std::to_string(v.size) + " access=" + v.access +
           " step=" + (v.step ? std::to_string(*v.step) : "-") + " detail=" + quote(v.detail) +
           "\n";
  }
  out += "VERDICT ";
  out += to_string(r.verdict);
  if (r.verdict == Verdict::Mismatch)
    out += " missing=" + std::to_string(r.missing) + " unexpected=" + std::to_string(r.unexpected);
  out += "\n";
  return out;
}

}  // namespace

json report_to_json(const RunReport& r) {
  json events = json::array();
  for (const auto& e : r.events) {
    events.push_back({{"kind", e.kind},
                      {"t", e.time},
                      {"partition", e.partition},
                      {"process", optional_json(e.process)},
                      {"detail", e.detail}});
  }
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back({{"kind", v.kind},
                          {"partition", v.partition},
                          {"addr", v.addr},
                          {"size", v.size},
                          {"access", v.access},
                          {"step", optional_json(v.step)},
                          {"detail", v.detail}});
  }
  return json{{"scenario", r.scenario},
              {"seed", r.seed},
              {"slowdown_factor", r.slowdown_factor},
              {"raw_ticks", r.raw_ticks},
              {"virtual_ticks", r.virtual_ticks},
              {"events", events},
              {"violations", violations},
              {"verdict", to_string(r.verdict)},
              {"missing", r.missing},
              {"unexpected", r.unexpected}};
}

RunReport report_from_json(const json& doc) {
  try {
    RunReport r;
    r.scenario = doc.at("scenario").get<std::string>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.slowdown_factor = doc.at("slowdown_factor").get<std::string>();
    r.raw_ticks = doc.at("raw_ticks").get<Tick>();
    r.virtual_ticks = doc.at("virtual_ticks").get<Tick>();
    for (const auto& e : doc.at("events")) {
      r.events.push_back(EventRecord{e.at("kind").get<std::string>(), e.at("t").get<Tick>(),
                                     e.at("partition").get<PartitionId>(),
                                     optional_from<ProcessId>(e.at("process")),
                                     e.at("detail").get<std::string>()});
    }
    for (const auto& v : doc.at("violations")) {
      r.violations.push_back(ViolationRecord{
          v.at("kind").get<std::string>(), v.at("partition").get<PartitionId>(),
          v.at("addr").get<std::uint64_t>(), v.at("size").get<std::uint64_t>(),
          v.at("access").get<std::string>(), optional_from<std::size_t>(v.at("step")),
          v.at("detail").get<std::string>()});
    }
    const auto verdict = doc.at("verdict").get<std::string>();
    if (verdict != "MATCH" && verdict != "MISMATCH") throw ConfigError("bad verdict '" + verdict + "'");
    r.verdict = verdict == "MATCH" ? Verdict::Match : Verdict::Mismatch;
    r.missing = doc.at("missing").get<std::size_t>();
    r.unexpected = doc.at("unexpected").get<std::size_t>();
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

RunReport parse_report(std::string_view json_text) {
  try {
    return report_from_json(json::parse(json_text));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
}

std::string emit_report(const RunReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) return report_to_json(report).dump(2) + "\n";
  return emit_text(report);
}

const std::vector<std::string>& known_violation_kinds() {
  static const std::vector<std::string> kinds = [] {
    std::vector<std::string> k;
    for (auto a : {AsanErrorKind::LeftRedzone, AsanErrorKind::RightRedzone,
                   AsanErrorKind::PartitionReset, AsanErrorKind::ManualBlacklist,
                   AsanErrorKind::WildAddress})
      k.emplace_back(to_string(a));
    for (auto u : {UseSite::SyscallPre, UseSite::Branch, UseSite::Arith, UseSite::PortSend})
      k.push_back(std::string("UNINIT_") + to_string(u));
    for (int i = 0; i <= static_cast<int>(UbKind::Truncation); ++i)
      k.emplace_back(to_string(static_cast<UbKind>(i)));
    for (const char* extra :
         {"DEADLINE_MISS", "MESSAGE_TOO_LONG", "QUEUE_FULL", "PORT_EMPTY", "PORT_DIRECTION",
          "API_MISMATCH", "DATA_MISMATCH", "VALIDITY_MISMATCH", "PHASE_ERROR", "OUT_OF_MEMORY"})
      k.emplace_back(extra);
    return k;
  }();
  return kinds;
}

}  // namespace partsan
