// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every tolerance is exact: zero divergences, exact tick
// counts, exact violation sets.

#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "partsan/builtin_scenarios.hpp"
#include "partsan/ports.hpp"
#include "partsan/runner.hpp"
#include "sweeps.hpp"

using namespace partsan;

namespace {

// Collects failed expectations for one criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.empty()) first_ = what;
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& text) { notes_ += (notes_.empty() ? "" : "; ") + text; }
  bool passed() const { return failures_.empty(); }
  std::string summary() const { return passed() ? notes_ : first_; }

 private:
  std::vector<std::string> failures_;
  std::string first_;
  std::string notes_;
};

std::size_t count_kind(const RunReport& r, const std::string& kind) {
  std::size_t n = 0;
  for (const auto& v : r.violations) n += v.kind == kind;
  return n;
}

const EventRecord* first_event(const RunReport& r, const std::string& kind) {
  for (const auto& e : r.events)
    if (e.kind == kind) return &e;
  return nullptr;
}

RunReport run_builtin(const std::string& name, const RunOptions& opts = {}) {
  return run_scenario(builtin_scenario(name), opts);
}

void listing1(Checker& c) {
  const auto r = run_builtin("listing1_overflow");
  PartitionMemory layout(1, 4096);
  const auto base = layout.alloc_region(16, "buffer").base.offset;
  c.expect(r.violations.size() == 2, "expected exactly two findings");
  if (r.violations.size() == 2) {
    c.expect(r.violations[0].kind == "LEFT_REDZONE" && r.violations[0].addr == base - 1,
             "first finding is not LEFT_REDZONE at base-1");
    c.expect(r.violations[1].kind == "RIGHT_REDZONE" && r.violations[1].addr == base + 16,
             "second finding is not RIGHT_REDZONE at base+16");
  }
  c.expect(r.verdict == Verdict::Match, "verdict is not MATCH");

  auto sweep = builtin_scenario("listing1_overflow");
  sweep.workload.clear();
  sweep.expect.clear();
  for (std::int64_t off = 0; off < 16; ++off) {
    Step w;
    w.op = StepOp::Write;
    w.partition = 1;
    w.addr = AddrRef{"buffer", off};
    w.len = 1;
    w.data = {1};
    sweep.workload.push_back(w);
    Step rd = w;
    rd.op = StepOp::Read;
    rd.data.clear();
    sweep.workload.push_back(rd);
  }
  const auto clean = run_scenario(sweep);
  c.expect(clean.violations.empty(), "in-bounds sweep produced findings");
  c.note("2 findings at 0x" + [&] { std::ostringstream s; s << std::hex << base - 1; return s.str(); }() +
         "/+16, in-bounds sweep of 16 offsets clean");
}

void shadow_oracle(Checker& c) {
  std::size_t total = 0;
  for (std::uint32_t g : {1u, 2u, 4u, 8u, 16u}) {
    const auto r = oracle::shadow_sweep(g, 10'000, 0xacce55 + g);
    total += r.divergences;
    c.expect(r.divergences == 0, "g=" + std::to_string(g) + ": " + r.first);
  }
  c.note("5 granularities x 10000 ops, " + std::to_string(total) + " divergences");
}

void init_oracle(Checker& c) {
  const auto r = oracle::init_sweep(10'000, 0xacce55);
  c.expect(r.divergences == 0, r.first);
  c.expect(r.interesting > 0, "no origin was attributed through a copy hop");
  c.note("10000 ops, " + std::to_string(r.divergences) + " divergences, " +
         std::to_string(r.interesting) + " cross-copy origin checks");
}

void listing2(Checker& c) {
  const auto spec = parse_template(fixtures::read("listing2.tmpl"));
  c.expect(spec == fixtures::listing2_spec(), "parsed template differs from the expected spec");
  const auto uninit = run_builtin("uninit_syscall_param");
  c.expect(uninit.violations.size() == 1 && count_kind(uninit, "UNINIT_SYSCALL_PRE") == 1,
           "uninit_syscall_param did not fire exactly one SYSCALL_PRE finding");
  const auto ok = run_builtin("syscall_success_path");
  c.expect(ok.violations.empty() && ok.verdict == Verdict::Match,
           "success path fired or outputs stayed uninitialized");
  c.note("spec equal, 1 SYSCALL_PRE finding, success path clean");
}

void ub(Checker& c) {
  const auto r = run_builtin("ub_catalogue");
  const std::size_t n = static_cast<std::size_t>(UbKind::Truncation) + 1;
  c.expect(r.violations.size() == n, "catalogue fired " + std::to_string(r.violations.size()) + " findings");
  for (std::size_t i = 0; i < std::min(n, r.violations.size()); ++i) {
    const auto& v = r.violations[i];
    c.expect(v.kind == to_string(static_cast<UbKind>(i)) && v.step == i,
             "step " + std::to_string(i) + " fired " + v.kind);
  }
  std::size_t disagreements = 0;
  for (const IntSpec spec : {IntSpec{8, true}, IntSpec{16, true}, IntSpec{32, true}, IntSpec{64, true},
                             IntSpec{8, false}, IntSpec{16, false}, IntSpec{32, false}, IntSpec{64, false}}) {
    const auto s = oracle::ub_sweep(spec, 100'000, 0xacce55 + spec.width);
    disagreements += s.divergences;
    c.expect(s.divergences == 0, spec.name() + ": " + s.first);
  }
  c.note("11 kinds one per step, 8 specs x 100000 samples, " + std::to_string(disagreements) +
         " disagreements");
}

void compensation(Checker& c) {
  const auto sc = builtin_scenario("off_schedule_with_and_without_slowdown");
  RunOptions f1;
  f1.slowdown = Ratio{1, 1};
  RunOptions f2;
  f2.slowdown = Ratio{2, 1};
  const auto slow = run_scenario(sc, f1);
  const auto fast = run_scenario(sc, f2);
  const auto* done1 = first_event(slow, "COMPLETE");
  const auto* done2 = first_event(fast, "COMPLETE");
  c.expect(done1 && done1->detail.find("elapsed=80 ") != std::string::npos, "f=1 did not take 80 ticks");
  c.expect(done2 && done2->detail.find("elapsed=40 ") != std::string::npos, "f=2 did not take 40 ticks");
  c.expect(count_kind(slow, "DEADLINE_MISS") == 1, "f=1 did not miss its capacity");
  c.expect(count_kind(fast, "DEADLINE_MISS") == 0, "f=2 missed its capacity");
  const auto sweep = oracle::compensation_sweep(100, 0xacce55, Ratio{3, 1});
  c.expect(sweep.divergences == 0, sweep.first);
  c.note("f=1 virtual 80 miss, f=2 virtual 40 met; 100 workloads at f=3, " +
         std::to_string(sweep.divergences) + " counterexamples (" + std::to_string(sweep.interesting) +
         " with uninstrumented misses)");
}

void padding_reserved(Checker& c) {
  RunOptions no_padding;
  no_padding.drop_padding = true;
  const auto empty = run_builtin("padding_false_positive", no_padding);
  const auto declared = run_builtin("padding_false_positive");
  c.expect(count_kind(empty, "UNINIT_PORT_SEND") >= 1, "empty registry did not fire");
  c.expect(declared.violations.empty(), "declared padding still fired");
  const auto reserved = run_builtin("reserved_init_still_poisoned");
  c.expect(reserved.violations.size() == 1 && reserved.violations[0].kind == "UNINIT_BRANCH" &&
               reserved.violations[0].step == std::size_t{1},
           "reserved fill did not fire exactly once at the first use");
  c.note("padding fires only with empty registry, reserved fill fires once, genuine write silent");
}

void ports(Checker& c) {
  const auto send = run_builtin("port_uninit_send");
  c.expect(count_kind(send, "UNINIT_PORT_SEND") == 1, "partial payload was not blocked");
  c.expect(count_kind(send, "PORT_EMPTY") == 1, "blocked payload reached the receiver");
  const auto fifo = run_builtin("queueing_fifo");
  std::size_t receives = 0;
  for (const auto& s : builtin_scenario("queueing_fifo").workload) receives += s.op == StepOp::Receive;
  c.expect(receives == 100, "queueing_fifo does not receive 100 messages");
  c.expect(fifo.violations.empty() && fifo.verdict == Verdict::Match,
           "queueing_fifo delivered out of order or lost messages");
  const auto fresh = run_builtin("sampling_freshness");
  c.expect(fresh.violations.empty(), "sampling_freshness validity flags differ");

  PartitionMemory src(1, 1024), dst(2, 1024);
  const auto out = src.alloc_region(4, "out");
  const auto in = dst.alloc_region(4, "in");
  const std::vector<std::uint8_t> bytes{1, 2, 3, 4};
  src.checked_write(out.base.offset, bytes, 1);
  SamplingPort port({"s", 1, 2, 4, 10});
  port.write(src, out.base.offset, 4, 100);
  const auto at10 = port.read(dst, in.base.offset, 110);
  const auto at11 = port.read(dst, in.base.offset, 111);
  c.expect(std::get<SampledMessage>(at10).validity == Validity::Valid, "age 10 is not VALID");
  c.expect(std::get<SampledMessage>(at11).validity == Validity::Stale, "age 11 is not STALE");
  c.note("partial payload blocked, 100 messages in order, VALID at age 10, STALE at 11");
}

void get_my_id(Checker& c) {
  const auto current = run_builtin("get_my_id_regression");
  c.expect(current.violations.empty() && current.verdict == Verdict::Match,
           "current mode did not return MAIN_PROCESS_ID");
  RunOptions legacy;
  legacy.legacy_get_my_id = true;
  const auto old = run_builtin("get_my_id_regression", legacy);
  c.expect(old.verdict == Verdict::Mismatch && count_kind(old, "API_MISMATCH") == 1,
           "legacy mode was not flagged");
  c.note("current MATCH, legacy MISMATCH with 1 API_MISMATCH");
}

void determinism(Checker& c) {
  RunOptions opts;
  opts.seed = 12345;
  for (ReportFormat fmt : {ReportFormat::Text, ReportFormat::Json}) {
    const auto a = run_all_builtins(opts, fmt);
    const auto b = run_all_builtins(opts, fmt);
    std::string joined_a, joined_b;
    for (const auto& e : a) joined_a += e.rendered;
    for (const auto& e : b) joined_b += e.rendered;
    c.expect(a.size() == b.size() && joined_a == joined_b, "two runs differ");
    if (fmt == ReportFormat::Text) c.note(std::to_string(a.size()) + " scenarios, " +
                                          std::to_string(joined_a.size()) + " bytes identical in text and json");
  }
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    void (*run)(Checker&);
  };
  const std::vector<Criterion> criteria = {
      {"Listing-1 reproduction", listing1},
      {"Shadow oracle equivalence", shadow_oracle},
      {"Init-shadow oracle equivalence", init_oracle},
      {"Listing-2 conformance", listing2},
      {"UB catalogue", ub},
      {"Slowdown compensation", compensation},
      {"Padding and reserved-init semantics", padding_reserved},
      {"Ports", ports},
      {"Regression scenario", get_my_id},
      {"Determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checker c;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s (%lld ms): %s\n", c.passed() ? "PASS" : "FAIL", i + 1,
                criteria[i].name, static_cast<long long>(ms), c.summary().c_str());
    failed += !c.passed();
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
