//===-- workload_gen.cpp - Seeded clean workloads --------------------------===//

#include "partsan/workload_gen.hpp"

#include <algorithm>
#include <numeric>

namespace partsan {
namespace {

std::uint64_t uniform(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

std::int64_t uniform_signed(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

IntSpec random_spec(std::mt19937_64& rng) {
  static constexpr std::uint8_t widths[] = {8, 16, 32, 64};
  return IntSpec{widths[uniform(rng, 0, 3)], uniform(rng, 0, 1) == 1};
}

class CleanGen {
 public:
  CleanGen(std::mt19937_64& rng, const CleanStepContext& ctx)
      : rng_(rng), ctx_(ctx), init_(ctx.region_size, false) {}

  std::vector<Step> run(std::uint32_t count) {
    std::vector<Step> out;
    for (std::uint32_t i = 0; i < count; ++i) out.push_back(next());
    return out;
  }

 private:
  Step base(StepOp op) const {
    Step s;
    s.op = op;
    s.partition = ctx_.partition;
    s.process = ctx_.process;
    return s;
  }

  AddrRef at(std::uint64_t offset) const { return AddrRef{ctx_.region, static_cast<std::int64_t>(offset)}; }

  std::uint64_t span(std::uint64_t offset) {
    return uniform(rng_, 1, std::min<std::uint64_t>(8, ctx_.region_size - offset));
  }

  Step write() {
    Step s = base(StepOp::Write);
    const auto off = uniform(rng_, 0, ctx_.region_size - 1);
    s.len = span(off);
    s.addr = at(off);
    for (std::uint64_t i = 0; i < s.len; ++i) s.data.push_back(static_cast<std::uint8_t>(rng_()));
    const auto& reserved = ctx_.reserved_init;
    if (reserved.enabled &&
        std::all_of(s.data.begin(), s.data.end(), [&](std::uint8_t b) { return b == reserved.pattern; }))
      s.data[0] = static_cast<std::uint8_t>(reserved.pattern ^ 1);
    std::fill_n(init_.begin() + static_cast<std::ptrdiff_t>(off), s.len, true);
    return s;
  }

  Step read() {
    Step s = base(StepOp::Read);
    const auto off = uniform(rng_, 0, ctx_.region_size - 1);
    s.len = span(off);
    s.addr = at(off);
    return s;
  }

  Step copy() {
    Step s = base(StepOp::Copy);
    const auto src = uniform(rng_, 0, ctx_.region_size - 1);
    const auto dst = uniform(rng_, 0, ctx_.region_size - 1);
    s.len = span(std::max(src, dst));
    s.addr = at(src);
    s.dst = at(dst);
    std::vector<bool> moved(init_.begin() + static_cast<std::ptrdiff_t>(src),
                            init_.begin() + static_cast<std::ptrdiff_t>(src + s.len));
    std::copy(moved.begin(), moved.end(), init_.begin() + static_cast<std::ptrdiff_t>(dst));
    return s;
  }

  std::optional<Step> branch() {
    std::vector<std::uint64_t> starts;
    for (std::uint64_t i = 0; i < init_.size(); ++i)
      if (init_[i]) starts.push_back(i);
    if (starts.empty()) return std::nullopt;
    const auto off = starts[uniform(rng_, 0, starts.size() - 1)];
    std::uint64_t len = 1;
    while (len < 8 && off + len < init_.size() && init_[off + len]) ++len;
    Step s = base(StepOp::BranchOn);
    s.addr = at(off);
    s.len = uniform(rng_, 1, len);
    return s;
  }

  Step arith() {
    const IntSpec spec = random_spec(rng_);
    const std::int64_t lo = spec.is_signed ? -10 : 0;
    std::int64_t a = uniform_signed(rng_, lo, 10);
    std::int64_t b = uniform_signed(rng_, lo, 10);
    if (uniform(rng_, 0, 3) == 0) {
      Step s = base(StepOp::Div);
      s.int_spec = spec;
      if (b == 0) b = 1;
      s.a.literal = a;
      s.b.literal = b;
      return s;
    }
    Step s = base(StepOp::Arith);
    s.int_spec = spec;
    s.arith = static_cast<ArithOp>(uniform(rng_, 0, 2));
    if (s.arith == ArithOp::Sub && !spec.is_signed && a < b) std::swap(a, b);
    s.a.literal = a;
    s.b.literal = b;
    return s;
  }

  Step range_check() {
    if (uniform(rng_, 0, 1) == 0) {
      Step s = base(StepOp::BoolCheck);
      s.int_spec = IntSpec{8, false};
      s.a.literal = static_cast<wide_int>(uniform(rng_, 0, 1));
      return s;
    }
    Step s = base(StepOp::EnumCheck);
    s.int_spec = IntSpec{32, true};
    s.enum_spec.name = "mode_t";
    s.enum_spec.allowed = {0, 1, 2, 7};
    static constexpr std::int64_t values[] = {0, 1, 2, 7};
    s.a.literal = values[uniform(rng_, 0, 3)];
    return s;
  }

  Step who_am_i() {
    Step s = base(StepOp::GetMyId);
    s.expect_id = ctx_.process.value_or(kMainProcessId);
    return s;
  }

  Step next() {
    const auto roll = uniform(rng_, 0, 99);
    if (roll < 30) return write();
    if (roll < 42) return read();
    if (roll < 52) return copy();
    if (roll < 68) {
      if (auto s = branch()) return *s;
      return write();
    }
    if (roll < 84) return arith();
    if (roll < 90) return range_check();
    if (roll < 95) return who_am_i();
    if (!ctx_.allow_idle) return read();
    Step s = base(StepOp::Idle);
    s.ticks = uniform(rng_, 1, 5);
    return s;
  }

  std::mt19937_64& rng_;
  const CleanStepContext& ctx_;
  std::vector<bool> init_;
};

}  // namespace

std::vector<Step> generate_clean_steps(std::mt19937_64& rng, const CleanStepContext& context,
                                       std::uint32_t count) {
  if (context.region_size == 0) throw ConfigError("cannot generate steps for an empty region");
  return CleanGen(rng, context).run(count);
}

Scenario generate_clean_scenario(std::uint64_t seed, const GenOptions& options) {
  std::mt19937_64 rng(seed);
  Scenario sc;
  sc.name = "generated_" + std::to_string(seed);
  sc.time.slowdown = Ratio{1, 1};
  sc.time.step_cost = 1;

  const auto parts = static_cast<std::uint32_t>(uniform(rng, 1, std::max<std::uint32_t>(1, options.max_partitions)));
  for (std::uint32_t i = 1; i <= parts; ++i) {
    PartitionConfig p;
    p.id = i;
    p.memory_size = 4096;
    p.regions.push_back(RegionDecl{"main", uniform(rng, 1, 64), {}});
    sc.partitions.push_back(std::move(p));
  }

  // Random contiguous windows; every partition gets at least one.
  const Tick frame_len = uniform(rng, std::max<Tick>(parts * 10, 20), std::max<Tick>(options.max_frame_len, parts * 10));
  const auto nwindows = uniform(rng, parts, 2 * parts);
  std::vector<Tick> cuts;
  while (cuts.size() + 1 < nwindows) {
    const Tick c = uniform(rng, 1, frame_len - 1);
    if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.insert(cuts.begin(), 0);
  cuts.push_back(frame_len);
  std::vector<PartitionId> owners(parts);
  std::iota(owners.begin(), owners.end(), 1);
  std::shuffle(owners.begin(), owners.end(), rng);
  while (owners.size() < nwindows) owners.push_back(static_cast<PartitionId>(uniform(rng, 1, parts)));
  for (std::size_t w = 0; w + 1 < cuts.size(); ++w)
    sc.time.windows.push_back(Window{owners[w], cuts[w], cuts[w + 1] - cuts[w]});
  sc.time.frame_len = frame_len;

  const auto nproc = static_cast<std::uint32_t>(uniform(rng, 1, std::max<std::uint32_t>(1, options.max_processes)));
  for (std::uint32_t id = 1; id <= nproc; ++id) {
    auto& part = sc.partitions[uniform(rng, 0, parts - 1)];
    ProcessConfig pc;
    pc.id = id;
    pc.partition = part.id;
    pc.priority = static_cast<int>(uniform(rng, 0, 9));
    if (options.periodic && uniform(rng, 0, 2) == 0) {
      pc.period = uniform(rng, frame_len, 3 * frame_len);
      pc.time_capacity = uniform(rng, std::max<Tick>(1, *pc.period / 4), *pc.period);
      pc.activations = static_cast<std::uint32_t>(uniform(rng, 1, 3));
    } else {
      pc.time_capacity = options.periodic ? uniform(rng, frame_len / 2 + 1, 4 * frame_len) : 1'000'000'000;
    }
    part.processes.push_back(pc);
    part.regions.push_back(RegionDecl{"p" + std::to_string(id), uniform(rng, 1, 64), {}});
  }

  for (const auto& part : sc.partitions) {
    const auto main_size = part.regions.front().size;
    CleanStepContext main_ctx{part.id, std::nullopt, "main", main_size, sc.reserved_init, false};
    for (auto& s : generate_clean_steps(rng, main_ctx, static_cast<std::uint32_t>(uniform(rng, 0, 5))))
      sc.workload.push_back(std::move(s));
    for (std::size_t k = 1; k < part.regions.size(); ++k) {
      const auto& proc = part.processes[k - 1];
      CleanStepContext ctx{part.id, proc.id, part.regions[k].label, part.regions[k].size,
                           sc.reserved_init, true};
      const auto steps = static_cast<std::uint32_t>(uniform(rng, 1, std::max<std::uint32_t>(1, options.max_steps_per_body)));
      for (auto& s : generate_clean_steps(rng, ctx, steps)) sc.workload.push_back(std::move(s));
    }
  }
  validate_scenario(sc);
  return sc;
}

}  // namespace partsan
