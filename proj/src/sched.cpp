//===-- sched.cpp - Cyclic partition schedule and time model ---------------===//

#include "partsan/sched.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <stdexcept>

namespace partsan {
namespace {

std::uint64_t parse_u64(std::string_view text, std::string_view whole) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError("malformed ratio '" + std::string(whole) + "'");
  return value;
}

}  // namespace

Ratio Ratio::parse(std::string_view text) {
  Ratio r;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    r.num = parse_u64(text.substr(0, slash), text);
    r.den = parse_u64(text.substr(slash + 1), text);
  } else {
    r.num = parse_u64(text, text);
  }
  if (r.num == 0 || r.den == 0) throw ConfigError("ratio '" + std::string(text) + "' must be positive");
  const auto g = std::gcd(r.num, r.den);
  r.num /= g;
  r.den /= g;
  return r;
}

std::string Ratio::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::uint64_t Ratio::scale_floor(std::uint64_t value) const {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(value) * num / den);
}

TimeModel::TimeModel(Ratio slowdown, CheckCosts costs) : slowdown_(slowdown), costs_(costs) {
  if (slowdown.num == 0 || slowdown.den == 0) throw ConfigError("slowdown factor must be positive");
}

Tick TimeModel::virtual_now() const {
  // virtual = floor(raw / f) with f = num / den
  return static_cast<Tick>(static_cast<unsigned __int128>(raw_) * slowdown_.den / slowdown_.num);
}

void TimeModel::advance(std::uint64_t step_base_cost, const CheckCounts& counts) {
  raw_ += step_base_cost + counts.asan * costs_.asan + counts.msan * costs_.msan +
          counts.ub * costs_.ub;
}

void TimeModel::advance_virtual_to(Tick target) {
  if (virtual_now() >= target) return;
  // Smallest raw with floor(raw * den / num) >= target is ceil(target * num / den).
  const auto scaled = static_cast<unsigned __int128>(target) * slowdown_.num;
  raw_ = static_cast<Tick>((scaled + slowdown_.den - 1) / slowdown_.den);
}

std::optional<FrameDefect> MajorFrame::find_defect(Tick frame_len,
                                                   const std::vector<Window>& windows) {
  if (frame_len == 0) return FrameDefect{windows.size(), "frame length must be positive"};
  if (windows.empty()) return FrameDefect{0, "major frame needs at least one window"};
  Tick expected = 0;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    if (w.len == 0) return FrameDefect{i, "window has zero length"};
    if (w.start < expected)
      return FrameDefect{i, "window starting at " + std::to_string(w.start) +
                                " overlaps the previous window or is out of order"};
    if (w.start > expected)
      return FrameDefect{i, "gap before window starting at " + std::to_string(w.start)};
    if (w.end() > frame_len) return FrameDefect{i, "window extends past the major frame"};
    expected = w.end();
  }
  if (expected != frame_len)
    return FrameDefect{windows.size(), "windows do not cover the whole major frame"};
  return std::nullopt;
}

MajorFrame::MajorFrame(Tick frame_len, std::vector<Window> windows)
    : frame_len_(frame_len), windows_(std::move(windows)) {
  if (auto defect = find_defect(frame_len_, windows_))
    throw ConfigError("window " + std::to_string(defect->window_index) + ": " + defect->message);
}

WindowPosition MajorFrame::current_window(Tick virtual_now) const {
  const Tick pos = virtual_now % frame_len_;
  // Windows are sorted and contiguous: the last one starting at or before pos.
  auto it = std::upper_bound(windows_.begin(), windows_.end(), pos,
                             [](Tick t, const Window& w) { return t < w.start; });
  const auto index = static_cast<std::size_t>(std::prev(it) - windows_.begin());
  const auto& w = windows_[index];
  return WindowPosition{w.partition, w.end() - pos, index};
}

std::optional<Tick> MajorFrame::next_window_start(PartitionId partition, Tick virtual_now) const {
  const Tick frame_base = virtual_now - virtual_now % frame_len_;
  const Tick pos = virtual_now % frame_len_;
  std::optional<Tick> best;
  for (const auto& w : windows_) {
    if (w.partition != partition) continue;
    Tick candidate;
    if (pos < w.end())
      candidate = frame_base + std::max(w.start, pos);
    else
      candidate = frame_base + frame_len_ + w.start;
    if (!best || candidate < *best) best = candidate;
  }
  return best;
}

const char* to_string(ProcessState state) {
  switch (state) {
    case ProcessState::Dormant: return "DORMANT";
    case ProcessState::Ready: return "READY";
    case ProcessState::Running: return "RUNNING";
    case ProcessState::Waiting: return "WAITING";
  }
  return "UNKNOWN";
}

Tick effective_budget(const Process& process) {
  return process.budget_multiplier.scale_floor(process.config.time_capacity);
}

std::optional<DeadlineMiss> check_deadline(const Process& process, Tick virtual_now) {
  const Tick elapsed = virtual_now - std::min(virtual_now, process.activation);
  const Tick budget = effective_budget(process);
  if (elapsed > budget) return DeadlineMiss{process.id(), process.activation, elapsed, budget};
  return std::nullopt;
}

void ProcessTable::add(ProcessConfig config) {
  if (config.period && config.time_capacity > *config.period)
    throw ConfigError("process " + std::to_string(config.id) +
                      " has time capacity larger than its period");
  for (const auto& p : processes_) {
    if (p.id() == config.id)
      throw ConfigError("duplicate process id " + std::to_string(config.id));
  }
  Process process;
  process.config = config;
  processes_.push_back(process);
  std::sort(processes_.begin(), processes_.end(),
            [](const Process& a, const Process& b) { return a.id() < b.id(); });
}

Process& ProcessTable::at(ProcessId id) {
  for (auto& p : processes_) {
    if (p.id() == id) return p;
  }
  throw std::out_of_range("no process " + std::to_string(id) + " in partition " +
                          std::to_string(partition_));
}

const Process& ProcessTable::at(ProcessId id) const {
  return const_cast<ProcessTable*>(this)->at(id);
}

std::optional<ProcessId> ProcessTable::running() const {
  for (const auto& p : processes_) {
    if (p.state == ProcessState::Running) return p.id();
  }
  return std::nullopt;
}

std::optional<ProcessId> ProcessTable::dispatch() {
  Process* best = nullptr;
  for (auto& p : processes_) {
    if (p.state != ProcessState::Ready && p.state != ProcessState::Running) continue;
    // processes_ is sorted by id, so strict > keeps the lowest id on ties.
    if (!best || p.config.priority > best->config.priority) best = &p;
  }
  if (!best) return std::nullopt;
  for (auto& p : processes_) {
    if (p.state == ProcessState::Running && &p != best) p.state = ProcessState::Ready;
  }
  best->state = ProcessState::Running;
  return best->id();
}

void ProcessTable::release(ProcessId id, Tick now) {
  auto& p = at(id);
  p.state = ProcessState::Ready;
  p.activation = now;
  p.miss_reported = false;
  ++p.releases;
  if (p.config.period) p.next_release = now + *p.config.period;
}

const char* to_string(ReturnCode code) {
  switch (code) {
    case ReturnCode::NoError: return "NO_ERROR";
    case ReturnCode::InvalidMode: return "INVALID_MODE";
  }
  return "UNKNOWN";
}

GetMyIdResult get_my_id(std::optional<ProcessId> caller, bool legacy_mode) {
  if (caller) return GetMyIdResult{ReturnCode::NoError, *caller};
  if (legacy_mode) return GetMyIdResult{ReturnCode::InvalidMode, kMainProcessId};
  return GetMyIdResult{ReturnCode::NoError, kMainProcessId};
}

}  // namespace partsan
