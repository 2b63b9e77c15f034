//===-- runner.cpp - Workload interpreter ----------------------------------===//

#include "partsan/runner.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <random>

#include "partsan/guest_memory.hpp"
#include "partsan/workload_gen.hpp"

namespace partsan {
namespace {

struct ExecStep {
  Step step;
  std::size_t index = 0;  // position in the scenario workload
};

struct PartState {
  PartState(const PartitionConfig& config, MemoryOptions options)
      : cfg(&config), mem(config.id, config.memory_size, options), table(config.id) {}

  const PartitionConfig* cfg;
  PartitionMemory mem;
  ProcessTable table;
  std::deque<ExecStep> main;
  std::map<ProcessId, std::vector<ExecStep>> bodies;
  std::map<ProcessId, std::size_t> cursor;
  std::map<ProcessId, std::optional<std::size_t>> last_step;
  std::map<std::string, Region> known;  // last base of every label, kept across resets
  std::optional<ProcessId> last_running;
  bool started = false;
  bool legacy = false;
};

std::string signed_offset(std::int64_t delta) {
  return delta < 0 ? std::to_string(delta) : "+" + std::to_string(delta);
}

wide_int load_le(std::span<const std::uint8_t> bytes, IntSpec spec) {
  unsigned __int128 value = 0;
  for (std::size_t i = bytes.size(); i-- > 0;) value = (value << 8) | bytes[i];
  if (spec.is_signed && spec.width < 128) {
    const unsigned __int128 sign = static_cast<unsigned __int128>(1) << (spec.width - 1);
    if (value & sign) return static_cast<wide_int>(value) - (static_cast<wide_int>(1) << spec.width);
  }
  return static_cast<wide_int>(value);
}

// Kuhn's augmenting-path matching between applicable patterns and records.
template <typename Pred>
std::size_t max_matching(std::size_t patterns, std::size_t records, Pred matches) {
  std::vector<std::optional<std::size_t>> owner(records);
  std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t p,
                                                                      std::vector<bool>& seen) {
    for (std::size_t r = 0; r < records; ++r) {
      if (seen[r] || !matches(p, r)) continue;
      seen[r] = true;
      if (!owner[r] || augment(*owner[r], seen)) {
        owner[r] = p;
        return true;
      }
    }
    return false;
  };
  std::size_t matched = 0;
  for (std::size_t p = 0; p < patterns; ++p) {
    std::vector<bool> seen(records, false);
    if (augment(p, seen)) ++matched;
  }
  return matched;
}

class Simulation {
 public:
  Simulation(const Scenario& sc, const RunOptions& opt)
      : sc_(sc),
        opt_(opt),
        slowdown_(opt.slowdown.value_or(sc.time.slowdown)),
        step_cost_(opt.step_cost.value_or(sc.time.step_cost)),
        time_(slowdown_, opt.check_costs.value_or(sc.time.costs)),
        frame_(sc.time.frame_len, sc.time.windows) {}

  RunReport run() {
    setup();
    loop();
    report_.scenario = sc_.name;
    report_.seed = opt_.seed;
    report_.slowdown_factor = slowdown_.str();
    report_.raw_ticks = time_.raw_ticks();
    report_.virtual_ticks = time_.virtual_now();
    judge();
    return std::move(report_);
  }

 private:
  // ---- setup ------------------------------------------------------------

  void setup() {
    MemoryOptions mem_opts;
    mem_opts.granularity = opt_.granularity.value_or(8);
    mem_opts.redzone = opt_.redzone.value_or(kDefaultRedzone);
    mem_opts.reserved_init = sc_.reserved_init;

    for (std::size_t i = 0; i < sc_.partitions.size(); ++i) {
      const auto& cfg = sc_.partitions[i];
      const std::string ptr = "/partitions/" + std::to_string(i);
      std::unique_ptr<PartState> ps;
      try {
        ps = std::make_unique<PartState>(cfg, mem_opts);
      } catch (const ConfigError& e) {
        throw ConfigError(e.what(), ptr + "/memory_size");
      }
      ps->legacy = opt_.legacy_get_my_id.value_or(cfg.legacy_get_my_id);
      for (std::size_t r = 0; r < cfg.regions.size(); ++r) {
        const auto& decl = cfg.regions[r];
        const std::uint64_t size = decl.type.empty() ? decl.size : type_size(decl.type);
        try {
          const Region region =
              ps->mem.alloc_region(size, decl.label, origins_.add(OriginKind::Declaration, r));
          ps->known[decl.label] = region;
          apply_padding(*ps, decl.type, region.base.offset, r);
        } catch (const OutOfMemory& e) {
          throw ConfigError(e.what(), ptr + "/regions/" + std::to_string(r));
        }
      }
      for (const auto& p : cfg.processes) {
        ps->table.add(p);
        ps->bodies[p.id];
        ps->cursor[p.id] = 0;
      }
      for (const auto& ov : sc_.time.timeout_overrides) {
        for (auto& p : ps->table.processes())
          if (p.id() == ov.process) p.budget_multiplier = ov.multiplier;
      }
      parts_[cfg.id] = std::move(ps);
    }
    build_ports();

    std::mt19937_64 rng(opt_.seed);
    for (std::size_t i = 0; i < sc_.workload.size(); ++i) {
      const Step& s = sc_.workload[i];
      PartState& ps = *parts_.at(s.partition);
      std::vector<ExecStep> expanded;
      if (s.op == StepOp::Generate) {
        CleanStepContext ctx{s.partition, s.process, s.addr.region, region_size_hint(s, i),
                             sc_.reserved_init, true};
        for (auto& g : generate_clean_steps(rng, ctx, s.count)) expanded.push_back({std::move(g), i});
      } else {
        expanded.push_back({s, i});
      }
      for (auto& e : expanded) {
        if (e.step.process)
          ps.bodies[*e.step.process].push_back(std::move(e));
        else
          ps.main.push_back(std::move(e));
      }
    }

    for (auto& [id, ps] : parts_)
      if (ps->main.empty()) start_partition(*ps, 0);
  }

  void build_ports() {
    for (const auto& p : sc_.ports) {
      if (p.kind == PortKind::Sampling)
        sampling_[p.name] = std::make_unique<SamplingPort>(
            SamplingPortConfig{p.name, p.source, p.destination, p.max_message_size, p.refresh_period});
      else
        queueing_[p.name] = std::make_unique<QueueingPort>(
            QueueingPortConfig{p.name, p.source, p.destination, p.max_message_size, p.capacity});
    }
  }

  std::uint64_t type_size(const std::string& type) const {
    if (sc_.padding.contains(type)) return sc_.padding.type_size(type);
    return sc_.types.at(type);
  }

  void apply_padding(PartState& ps, const std::string& type, std::uint64_t base, std::size_t step) {
    if (type.empty() || opt_.drop_padding || !sc_.padding.contains(type)) return;
    unpoison_padding(ps.mem.init_shadow(), sc_.padding, type, base,
                     origins_.add(OriginKind::Padding, step));
  }

  std::uint64_t region_size_hint(const Step& gen, std::size_t index) const {
    const auto* cfg = sc_.find_partition(gen.partition);
    for (const auto& r : cfg->regions)
      if (r.label == gen.addr.region) return r.type.empty() ? r.size : type_size(r.type);
    for (std::size_t i = 0; i < index; ++i) {
      const Step& s = sc_.workload[i];
      if (s.op == StepOp::Alloc && s.partition == gen.partition && s.label == gen.addr.region)
        return s.type.empty() ? s.size : type_size(s.type);
    }
    throw ConfigError("GENERATE names a region that is never allocated",
                      "/workload/" + std::to_string(index));
  }

  void start_partition(PartState& ps, Tick now) {
    ps.started = true;
    ps.mem.start();
    for (auto& p : ps.table.processes()) {
      p.next_release = now;
      if (!p.config.period) release(ps, p.id(), now);
    }
  }

  void release(PartState& ps, ProcessId id, Tick activation) {
    ps.table.release(id, activation);
    ps.cursor[id] = 0;
  }

  // ---- scheduling -------------------------------------------------------

  void loop() {
    for (;;) {
      const Tick now = time_.virtual_now();
      release_due(now);
      check_deadlines(now);
      if (all_done()) return;

      const WindowPosition pos = frame_.current_window(now);
      const Tick window_end = now + pos.remaining;
      auto it = parts_.find(pos.partition);
      if (it == parts_.end()) {
        time_.advance_virtual_to(window_end);
        continue;
      }
      PartState& ps = *it->second;

      if (!ps.main.empty()) {
        ExecStep e = std::move(ps.main.front());
        ps.main.pop_front();
        execute(ps, e, std::nullopt);
        if (ps.main.empty()) start_partition(ps, time_.virtual_now());
        continue;
      }

      const auto running = ps.table.dispatch();
      if (running != ps.last_running) {
        if (running) {
          event("DISPATCH", now, ps.cfg->id, running,
                "priority=" + std::to_string(ps.table.at(*running).config.priority));
        }
        ps.last_running = running;
      }
      if (!running) {
        Tick until = window_end;
        for (const auto& p : ps.table.processes()) {
          if (pending_release(p)) until = std::min(until, std::max(p.next_release, now + 1));
        }
        time_.advance_virtual_to(until);
        continue;
      }

      Process& proc = ps.table.at(*running);
      auto& body = ps.bodies[*running];
      auto& cursor = ps.cursor[*running];
      if (cursor < body.size()) {
        ExecStep& e = body[cursor++];
        execute(ps, e, *running);
        ps.last_step[*running] = e.index;
      }
      if (cursor >= body.size()) complete(ps, proc);
    }
  }

  static bool pending_release(const Process& p) {
    return p.config.period && p.state == ProcessState::Dormant && p.releases < p.config.activations;
  }

  void release_due(Tick now) {
    for (auto& [id, ps] : parts_) {
      if (!ps->started) continue;
      for (auto& p : ps->table.processes()) {
        if (pending_release(p) && p.next_release <= now) release(*ps, p.id(), p.next_release);
      }
    }
  }

  void check_deadlines(Tick now) {
    for (auto& [id, ps] : parts_) {
      for (auto& p : ps->table.processes()) {
        if (p.state != ProcessState::Ready && p.state != ProcessState::Running) continue;
        report_miss(*ps, p, now);
      }
    }
  }

  void report_miss(PartState& ps, Process& p, Tick now) {
    if (p.miss_reported) return;
    const auto miss = check_deadline(p, now);
    if (!miss) return;
    p.miss_reported = true;
    const std::string detail = "activation=" + std::to_string(p.releases) +
                               " elapsed=" + std::to_string(miss->elapsed) +
                               " budget=" + std::to_string(miss->budget);
    event("DEADLINE_MISS", now, ps.cfg->id, p.id(), detail);
    ViolationRecord v;
    v.kind = "DEADLINE_MISS";
    v.partition = ps.cfg->id;
    v.step = ps.last_step[p.id()];
    v.detail = "process " + std::to_string(p.id()) + " " + detail;
    report_.violations.push_back(std::move(v));
  }

  void complete(PartState& ps, Process& p) {
    const Tick now = time_.virtual_now();
    report_miss(ps, p, now);
    event("COMPLETE", now, ps.cfg->id, p.id(),
          "activation=" + std::to_string(p.releases) +
              " elapsed=" + std::to_string(now - p.activation) +
              " budget=" + std::to_string(effective_budget(p)));
    p.state = ProcessState::Dormant;
    if (ps.last_running == p.id()) ps.last_running.reset();
  }

  bool all_done() const {
    for (const auto& [id, ps] : parts_) {
      if (!ps->main.empty() || !ps->started) return false;
      for (const auto& p : ps->table.processes()) {
        if (p.state != ProcessState::Dormant) return false;
        if (pending_release(p)) return false;
      }
    }
    return true;
  }

  void event(const char* kind, Tick t, PartitionId part, std::optional<ProcessId> process,
             std::string detail) {
    report_.events.push_back(EventRecord{kind, t, part, process, std::move(detail)});
  }

  // ---- step execution ---------------------------------------------------

  std::optional<std::uint64_t> resolve(PartState& ps, const AddrRef& ref, std::size_t index) {
    if (ref.region.empty()) return static_cast<std::uint64_t>(ref.offset);
    auto it = ps.known.find(ref.region);
    if (it == ps.known.end()) {
      ViolationRecord v;
      v.kind = "WILD_ADDRESS";
      v.partition = ps.cfg->id;
      v.step = index;
      v.detail = "region '" + ref.region + "' was never allocated";
      report_.violations.push_back(std::move(v));
      return std::nullopt;
    }
    return it->second.base.offset + static_cast<std::uint64_t>(ref.offset);
  }

  std::string describe_addr(const PartState& ps, std::uint64_t addr, const std::string& label) const {
    const Region* best = nullptr;
    if (!label.empty()) {
      if (auto it = ps.known.find(label); it != ps.known.end()) best = &it->second;
    }
    if (!best) {
      for (const auto& [name, region] : ps.known) {
        if (addr >= region.span_begin() && addr < region.span_end()) best = &region;
      }
    }
    if (!best) return "0x" + [&] {
      char buf[24];
      std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(addr));
      return std::string(buf);
    }();
    const auto delta = static_cast<std::int64_t>(addr - best->base.offset);
    return best->label + signed_offset(delta);
  }

  void record(const PartState& ps, const AsanViolation& v, std::size_t index) {
    ViolationRecord r;
    r.kind = to_string(v.kind);
    r.partition = ps.cfg->id;
    r.addr = v.addr.offset;
    r.size = v.requested_len;
    r.access = access_letter(v.access);
    r.step = index;
    r.detail = std::string(v.access == AccessKind::Read ? "read" : "write") + " of " +
               std::to_string(v.requested_len) + " byte(s) hits " +
               describe_addr(ps, v.addr.offset, v.region_label);
    report_.violations.push_back(std::move(r));
  }

  void record(const PartState& ps, const MsanViolation& v, std::size_t index) {
    ViolationRecord r;
    r.kind = std::string("UNINIT_") + to_string(v.context);
    r.partition = ps.cfg->id;
    r.addr = v.addr.offset;
    r.size = v.requested_len;
    r.access = "R";
    r.step = index;
    r.detail = "uninitialized byte at " + describe_addr(ps, v.addr.offset, {}) +
               ", origin " + origins_.describe(v.origin);
    report_.violations.push_back(std::move(r));
  }

  void record(const PartState& ps, const UbViolation& v, std::size_t index, std::uint64_t addr,
              std::string detail) {
    ViolationRecord r;
    r.kind = to_string(v.kind);
    r.partition = ps.cfg->id;
    r.addr = addr;
    r.step = index;
    r.detail = std::move(detail);
    report_.violations.push_back(std::move(r));
  }

  void record_plain(const PartState& ps, std::string kind, std::size_t index, std::string detail) {
    ViolationRecord r;
    r.kind = std::move(kind);
    r.partition = ps.cfg->id;
    r.step = index;
    r.detail = std::move(detail);
    report_.violations.push_back(std::move(r));
  }

  void record(const PartState& ps, const PortFault& fault, std::size_t index) {
    if (const auto* a = std::get_if<AsanViolation>(&fault)) return record(ps, *a, index);
    if (const auto* m = std::get_if<MsanViolation>(&fault)) return record(ps, *m, index);
    const auto& e = std::get<PortError>(fault);
    record_plain(ps, to_string(e.kind), index,
                 "port '" + e.port + "'" + (e.len ? " len " + std::to_string(e.len) : ""));
  }

  // Loads a UB operand; memory operands cost one asan and one msan check.
  std::optional<wide_int> operand(PartState& ps, const Operand& op, IntSpec spec, std::size_t index,
                                  CheckCounts& counts) {
    if (op.literal) return op.literal;
    const auto addr = resolve(ps, op.mem, index);
    if (!addr) return std::nullopt;
    std::vector<std::uint8_t> bytes(spec.width / 8);
    ++counts.asan;
    if (auto v = ps.mem.checked_read(*addr, bytes)) {
      record(ps, *v, index);
      return std::nullopt;
    }
    ++counts.msan;
    if (auto v = msan_check(ps.mem.init_shadow(), *addr, bytes.size(), UseSite::Arith)) {
      record(ps, *v, index);
      return std::nullopt;
    }
    return load_le(bytes, spec);
  }

  void execute(PartState& ps, ExecStep& e, std::optional<ProcessId> caller) {
    const Step& s = e.step;
    const std::size_t idx = e.index;
    const Tick now = time_.virtual_now();
    CheckCounts counts;

    auto ub_result = [&](const UbResult& result, const std::string& detail) {
      ++counts.ub;
      if (const auto* v = std::get_if<UbViolation>(&result)) record(ps, *v, idx, 0, detail);
    };

    switch (s.op) {
      case StepOp::Alloc: {
        const std::uint64_t size = s.type.empty() ? s.size : type_size(s.type);
        try {
          const Region region = ps.mem.alloc_region(size, s.label, origins_.add(OriginKind::Allocation, idx));
          ps.known[s.label] = region;
          apply_padding(ps, s.type, region.base.offset, idx);
        } catch (const PhaseError& err) {
          record_plain(ps, "PHASE_ERROR", idx, err.what());
        } catch (const OutOfMemory& err) {
          record_plain(ps, "OUT_OF_MEMORY", idx, err.what());
        }
        break;
      }
      case StepOp::Write: {
        const auto addr = resolve(ps, s.addr, idx);
        if (!addr) break;
        ++counts.asan;
        if (auto v = ps.mem.checked_write(*addr, s.data, origins_.add(OriginKind::Write, idx)))
          record(ps, *v, idx);
        break;
      }
      case StepOp::Read: {
        const auto addr = resolve(ps, s.addr, idx);
        if (!addr) break;
        std::vector<std::uint8_t> buf(s.len);
        ++counts.asan;
        if (auto v = ps.mem.checked_read(*addr, buf)) record(ps, *v, idx);
        break;
      }
      case StepOp::Copy: {
        const auto src = resolve(ps, s.addr, idx);
        const auto dst = src ? resolve(ps, s.dst, idx) : std::nullopt;
        if (!src || !dst) break;
        std::vector<std::uint8_t> buf(s.len);
        ++counts.asan;
        if (auto v = ps.mem.checked_read(*src, buf)) {
          record(ps, *v, idx);
          break;
        }
        ++counts.asan;
        if (auto v = ps.mem.shadow().check_access(*dst, s.len, AccessKind::Write)) {
          if (const Region* r = ps.mem.nearest_region(v->addr.offset)) v->region_label = r->label;
          record(ps, *v, idx);
          break;
        }
        ps.mem.raw_store(*dst, buf);
        copy_propagate(ps.mem.init_shadow(), *src, ps.mem.init_shadow(), *dst, s.len);
        break;
      }
      case StepOp::BranchOn: {
        const auto addr = resolve(ps, s.addr, idx);
        if (!addr) break;
        std::vector<std::uint8_t> buf(s.len);
        ++counts.asan;
        if (auto v = ps.mem.checked_read(*addr, buf)) {
          record(ps, *v, idx);
          break;
        }
        ++counts.msan;
        if (auto v = msan_check(ps.mem.init_shadow(), *addr, s.len, UseSite::Branch)) record(ps, *v, idx);
        break;
      }
      case StepOp::Arith:
      case StepOp::Div:
      case StepOp::Shift: {
        const auto a = operand(ps, s.a, s.int_spec, idx, counts);
        if (!a) break;
        const auto b = s.op == StepOp::Shift ? s.b.literal : operand(ps, s.b, s.int_spec, idx, counts);
        if (!b) break;
        const std::string spec = s.int_spec.name();
        if (s.op == StepOp::Arith)
          ub_result(checked_arith(s.arith, *a, *b, s.int_spec),
                    spec + " " + to_string(*a) + " " + to_string(s.arith) + " " + to_string(*b));
        else if (s.op == StepOp::Div)
          ub_result(checked_div(*a, *b, s.int_spec), spec + " " + to_string(*a) + " DIV " + to_string(*b));
        else
          ub_result(checked_shift(*a, *b, s.int_spec), spec + " " + to_string(*a) + " SHL " + to_string(*b));
        break;
      }
      case StepOp::Trunc: {
        const auto a = operand(ps, s.a, s.int_spec, idx, counts);
        if (!a) break;
        ub_result(checked_trunc(*a, s.int_spec, s.to_spec),
                  s.int_spec.name() + " " + to_string(*a) + " to " + s.to_spec.name());
        break;
      }
      case StepOp::FloatCast: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", s.float_value);
        ub_result(checked_float_to_int(s.float_value, s.to_spec), std::string(buf) + " to " + s.to_spec.name());
        break;
      }
      case StepOp::AlignCheck: {
        const auto addr = resolve(ps, s.addr, idx);
        if (!addr) break;
        ++counts.ub;
        if (auto v = check_align(*addr, s.align))
          record(ps, *v, idx, *addr, "address not aligned to " + std::to_string(s.align));
        break;
      }
      case StepOp::NullCheck: {
        const auto addr = resolve(ps, s.addr, idx);
        if (!addr) break;
        ++counts.ub;
        if (auto v = check_nonnull(*addr)) record(ps, *v, idx, *addr, "dereference of guest null");
        break;
      }
      case StepOp::BoolCheck: {
        const auto a = operand(ps, s.a, s.int_spec, idx, counts);
        if (!a) break;
        ++counts.ub;
        if (auto v = check_bool(*a)) record(ps, *v, idx, 0, "bool holds " + to_string(*a));
        break;
      }
      case StepOp::EnumCheck: {
        const auto a = operand(ps, s.a, s.int_spec, idx, counts);
        if (!a) break;
        ++counts.ub;
        if (auto v = check_enum(*a, s.enum_spec))
          record(ps, *v, idx, 0, s.enum_spec.name + " holds " + to_string(*a));
        break;
      }
      case StepOp::Syscall:
        syscall(ps, s, idx, counts);
        break;
      case StepOp::Send:
      case StepOp::SamplingWrite: {
        const auto addr = resolve(ps, s.addr, idx);
        if (!addr) break;
        PortCheckCounts pc;
        std::optional<PortFault> fault = s.op == StepOp::Send
                                             ? queueing_.at(s.port)->send(ps.mem, *addr, s.len, now, &pc)
                                             : sampling_.at(s.port)->write(ps.mem, *addr, s.len, now, &pc);
        counts.asan += pc.asan;
        counts.msan += pc.msan;
        if (fault) record(ps, *fault, idx);
        break;
      }
      case StepOp::Receive:
      case StepOp::SamplingRead: {
        const auto addr = resolve(ps, s.addr, idx);
        if (!addr) break;
        PortCheckCounts pc;
        std::vector<std::uint8_t> got;
        std::optional<Validity> validity;
        if (s.op == StepOp::Receive) {
          auto result = queueing_.at(s.port)->receive(ps.mem, *addr, &pc);
          if (auto* f = std::get_if<PortFault>(&result))
            record(ps, *f, idx);
          else
            got = std::get<ReceivedMessage>(result).bytes;
        } else {
          auto result = sampling_.at(s.port)->read(ps.mem, *addr, now, &pc);
          if (auto* f = std::get_if<PortFault>(&result)) {
            record(ps, *f, idx);
          } else {
            auto& sampled = std::get<SampledMessage>(result);
            got = sampled.bytes;
            validity = sampled.validity;
          }
        }
        counts.asan += pc.asan;
        counts.msan += pc.msan;
        if (got.empty()) break;
        if (s.expect_data && got != *s.expect_data)
          record_plain(ps, "DATA_MISMATCH", idx, "port '" + s.port + "' delivered unexpected bytes");
        if (s.expect_validity && validity != s.expect_validity)
          record_plain(ps, "VALIDITY_MISMATCH", idx,
                       "port '" + s.port + "' read " + to_string(*validity) + ", expected " +
                           to_string(*s.expect_validity));
        break;
      }
      case StepOp::ResetPartition:
        ps.mem.reset();
        event("RESET", now, ps.cfg->id, caller, "memory poisoned");
        break;
      case StepOp::GetMyId: {
        const auto result = get_my_id(caller, ps.legacy);
        if (s.expect_id && (result.code != ReturnCode::NoError || result.id != *s.expect_id)) {
          const std::string want =
              *s.expect_id == kMainProcessId ? "MAIN_PROCESS_ID" : std::to_string(*s.expect_id);
          const std::string got = result.code != ReturnCode::NoError ? to_string(result.code)
                                  : result.id == kMainProcessId      ? "MAIN_PROCESS_ID"
                                                                     : std::to_string(result.id);
          record_plain(ps, "API_MISMATCH", idx, "GET_MY_ID returned " + got + ", expected " + want);
        }
        break;
      }
      case StepOp::Idle:
        time_.advance_virtual_to(now + s.ticks);
        return;
      case StepOp::Generate:
        break;  // expanded during setup
    }
    time_.advance(step_cost_, counts);
  }

  void syscall(PartState& ps, const Step& s, std::size_t idx, CheckCounts& counts) {
    const SyscallSpec& spec = *sc_.find_syscall(s.syscall);
    ParamBindings bindings;
    for (const auto& [param, b] : s.bindings) {
      const auto addr = resolve(ps, b.addr, idx);
      if (!addr) return;
      bindings[param] = ParamBinding{*addr, b.len};
    }
    const ResolvedSpec resolved = resolve_sizes(spec, sc_.types, bindings);
    for (const auto* list : {&resolved.pre, &resolved.post}) {
      for (const auto& d : *list) {
        if (d.offset > ps.mem.size() || d.len > ps.mem.size() - d.offset) {
          ViolationRecord r;
          r.kind = "WILD_ADDRESS";
          r.partition = ps.cfg->id;
          r.addr = d.offset;
          r.size = d.len;
          r.access = "R";
          r.step = idx;
          r.detail = spec.syscall_name + " parameter '" + d.param + "' lies outside the partition";
          report_.violations.push_back(std::move(r));
          return;
        }
      }
    }
    std::uint64_t checks = 0;
    const auto violation = enforce_pre(resolved, ps.mem.init_shadow(), &checks);
    counts.msan += checks;
    if (violation) {
      record(ps, *violation, idx);
      return;
    }
    enforce_post(resolved, ps.mem.init_shadow(), s.succeeds, origins_.add(OriginKind::Annotation, idx));
  }

  // ---- verdict ----------------------------------------------------------

  bool pattern_matches(const ExpectPattern& p, const ViolationRecord& r) const {
    if (p.kind != r.kind) return false;
    if (p.partition && *p.partition != r.partition) return false;
    if (p.step && r.step != p.step) return false;
    if (p.region) {
      const auto it = parts_.find(r.partition);
      if (it == parts_.end()) return false;
      const auto known = it->second->known.find(*p.region);
      if (known == it->second->known.end()) return false;
      const std::uint64_t want = known->second.base.offset + static_cast<std::uint64_t>(p.offset.value_or(0));
      if (r.addr != want) return false;
    } else if (p.offset && r.addr != static_cast<std::uint64_t>(*p.offset)) {
      return false;
    }
    return true;
  }

  void judge() {
    std::vector<const ExpectPattern*> active;
    for (const auto& p : sc_.expect)
      if (!p.when_slowdown || *p.when_slowdown == slowdown_) active.push_back(&p);
    const auto& records = report_.violations;
    const std::size_t matched = max_matching(active.size(), records.size(), [&](std::size_t p, std::size_t r) {
      return pattern_matches(*active[p], records[r]);
    });
    report_.missing = active.size() - matched;
    report_.unexpected = records.size() - matched;
    report_.verdict = report_.missing == 0 && report_.unexpected == 0 ? Verdict::Match : Verdict::Mismatch;
  }

 private:
  const Scenario& sc_;
  RunOptions opt_;
  Ratio slowdown_;
  std::uint64_t step_cost_;
  TimeModel time_;
  MajorFrame frame_;
  OriginTable origins_;
  RunReport report_;
  std::map<PartitionId, std::unique_ptr<PartState>> parts_;
  std::map<std::string, std::unique_ptr<SamplingPort>> sampling_;
  std::map<std::string, std::unique_ptr<QueueingPort>> queueing_;
};

}  // namespace

RunReport run_scenario(const Scenario& scenario, const RunOptions& options) {
  return Simulation(scenario, options).run();
}

}  // namespace partsan
