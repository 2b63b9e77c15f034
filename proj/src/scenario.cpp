//===-- scenario.cpp - Scenario files and workload steps -------------------===//

#include "partsan/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "partsan/report.hpp"

namespace partsan {

using nlohmann::json;

namespace {

struct OpName {
  StepOp op;
  const char* name;
};

constexpr OpName kOpNames[] = {
    {StepOp::Alloc, "ALLOC"},
    {StepOp::Write, "WRITE"},
    {StepOp::Read, "READ"},
    {StepOp::Copy, "COPY"},
    {StepOp::Arith, "ARITH"},
    {StepOp::Div, "DIV"},
    {StepOp::Shift, "SHIFT"},
    {StepOp::Trunc, "TRUNC"},
    {StepOp::FloatCast, "FLOAT_CAST"},
    {StepOp::AlignCheck, "ALIGN_CHECK"},
    {StepOp::NullCheck, "NULL_CHECK"},
    {StepOp::BoolCheck, "BOOL_CHECK"},
    {StepOp::EnumCheck, "ENUM_CHECK"},
    {StepOp::Syscall, "SYSCALL"},
    {StepOp::Send, "SEND"},
    {StepOp::Receive, "RECEIVE"},
    {StepOp::SamplingWrite, "SAMPLING_WRITE"},
    {StepOp::SamplingRead, "SAMPLING_READ"},
    {StepOp::BranchOn, "BRANCH_ON"},
    {StepOp::ResetPartition, "RESET_PARTITION"},
    {StepOp::GetMyId, "GET_MY_ID"},
    {StepOp::Idle, "IDLE"},
    {StepOp::Generate, "GENERATE"},
};

std::string escape_token(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out.push_back(c);
  }
  return out;
}

// A JSON value together with its pointer, so every error can say where.
class Node {
 public:
  Node(const json& value, std::string pointer) : value_(value), pointer_(std::move(pointer)) {}

  const json& value() const { return value_; }
  const std::string& pointer() const { return pointer_; }

  [[noreturn]] void fail(const std::string& message) const { throw ConfigError(message, pointer_); }

  bool has(const char* key) const { return value_.contains(key); }

  Node at(const std::string& key) const {
    if (!value_.contains(key)) fail("missing required key '" + key + "'");
    return Node(value_.at(key), pointer_ + "/" + escape_token(key));
  }

  Node at(std::size_t index) const {
    return Node(value_.at(index), pointer_ + "/" + std::to_string(index));
  }

  const Node& object(std::initializer_list<const char*> allowed) const {
    if (!value_.is_object()) fail("expected an object");
    for (const auto& [key, _] : value_.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) Node(value_, pointer_ + "/" + escape_token(key)).fail("unknown key '" + key + "'");
    }
    return *this;
  }

  std::vector<Node> array() const {
    if (!value_.is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < value_.size(); ++i) out.push_back(at(i));
    return out;
  }

  std::uint64_t u64() const {
    if (value_.is_number_unsigned()) return value_.get<std::uint64_t>();
    if (value_.is_number_integer() && value_.get<std::int64_t>() >= 0)
      return static_cast<std::uint64_t>(value_.get<std::int64_t>());
    fail("expected a non-negative integer");
  }

  std::uint64_t positive() const {
    const auto v = u64();
    if (v == 0) fail("must be positive");
    return v;
  }

  std::int64_t i64() const {
    if (value_.is_number_integer() && !value_.is_number_unsigned()) return value_.get<std::int64_t>();
    if (value_.is_number_unsigned() &&
        value_.get<std::uint64_t>() <= static_cast<std::uint64_t>(INT64_MAX))
      return static_cast<std::int64_t>(value_.get<std::uint64_t>());
    fail("expected an integer");
  }

  wide_int wide() const {
    if (value_.is_number_unsigned()) return static_cast<wide_int>(value_.get<std::uint64_t>());
    if (value_.is_number_integer()) return static_cast<wide_int>(value_.get<std::int64_t>());
    fail("expected an integer");
  }

  std::string str() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  bool boolean() const {
    if (!value_.is_boolean()) fail("expected true or false");
    return value_.get<bool>();
  }

  double number() const {
    if (!value_.is_number()) fail("expected a number");
    return value_.get<double>();
  }

  std::uint8_t byte() const {
    const auto v = u64();
    if (v > 0xFF) fail("expected a byte value 0..255");
    return static_cast<std::uint8_t>(v);
  }

  Ratio ratio() const {
    try {
      if (value_.is_string()) return Ratio::parse(value_.get<std::string>());
      return Ratio{positive(), 1};
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }

  IntSpec int_spec() const {
    try {
      return IntSpec::parse(str());
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }

 private:
  const json& value_;
  std::string pointer_;
};

RegionDecl parse_region_decl(const Node& n) {
  n.object({"label", "size", "type"});
  RegionDecl r;
  r.label = n.at("label").str();
  if (n.has("size")) r.size = n.at("size").positive();
  if (n.has("type")) r.type = n.at("type").str();
  if (!n.has("size") && r.type.empty()) n.fail("region needs a size or a type");
  return r;
}

ProcessConfig parse_process(const Node& n, PartitionId partition) {
  n.object({"id", "priority", "time_capacity", "period", "activations"});
  ProcessConfig p;
  p.id = static_cast<ProcessId>(n.at("id").positive());
  p.partition = partition;
  p.priority = n.has("priority") ? static_cast<int>(n.at("priority").i64()) : 0;
  p.time_capacity = n.at("time_capacity").positive();
  if (n.has("period")) p.period = n.at("period").positive();
  if (n.has("activations")) {
    p.activations = static_cast<std::uint32_t>(n.at("activations").positive());
    if (p.activations > 1 && !p.period) n.at("activations").fail("only periodic processes repeat");
  }
  if (p.period && p.time_capacity > *p.period) n.at("time_capacity").fail("exceeds the period");
  return p;
}

PartitionConfig parse_partition(const Node& n) {
  n.object({"id", "memory_size", "regions", "processes", "legacy_get_my_id"});
  PartitionConfig p;
  p.id = static_cast<PartitionId>(n.at("id").u64());
  p.memory_size = n.at("memory_size").positive();
  if (n.has("regions"))
    for (const auto& r : n.at("regions").array()) p.regions.push_back(parse_region_decl(r));
  if (n.has("processes"))
    for (const auto& pr : n.at("processes").array()) p.processes.push_back(parse_process(pr, p.id));
  if (n.has("legacy_get_my_id")) p.legacy_get_my_id = n.at("legacy_get_my_id").boolean();
  return p;
}

TimeConfig parse_time(const Node& n) {
  n.object({"slowdown_factor", "step_cost", "check_costs", "major_frame", "timeout_overrides"});
  TimeConfig t;
  if (n.has("slowdown_factor")) t.slowdown = n.at("slowdown_factor").ratio();
  if (n.has("step_cost")) t.step_cost = n.at("step_cost").u64();
  if (n.has("check_costs")) {
    const Node c = n.at("check_costs");
    c.object({"asan", "msan", "ub"});
    if (c.has("asan")) t.costs.asan = c.at("asan").u64();
    if (c.has("msan")) t.costs.msan = c.at("msan").u64();
    if (c.has("ub")) t.costs.ub = c.at("ub").u64();
  }
  const Node frame = n.at("major_frame");
  frame.object({"frame_len", "windows"});
  t.frame_len = frame.at("frame_len").positive();
  const Node windows = frame.at("windows");
  const auto list = windows.array();
  for (const auto& w : list) {
    w.object({"partition", "start", "len"});
    t.windows.push_back(Window{static_cast<PartitionId>(w.at("partition").u64()), w.at("start").u64(),
                               w.at("len").positive()});
  }
  if (auto defect = MajorFrame::find_defect(t.frame_len, t.windows)) {
    if (defect->window_index < list.size()) list[defect->window_index].fail(defect->message);
    windows.fail(defect->message);
  }
  if (n.has("timeout_overrides")) {
    for (const auto& o : n.at("timeout_overrides").array()) {
      o.object({"process", "multiplier"});
      TimeoutOverride ov{static_cast<ProcessId>(o.at("process").positive()), o.at("multiplier").ratio()};
      if (!ov.multiplier.at_least_one()) o.at("multiplier").fail("multiplier must be at least 1");
      t.timeout_overrides.push_back(ov);
    }
  }
  return t;
}

std::vector<PortDecl> parse_ports(const Node& n) {
  struct End {
    PortKind kind;
    PartitionId partition;
    std::uint64_t max_size;
    Tick refresh;
    std::size_t capacity;
    Node node;
  };
  std::map<std::string, std::pair<std::optional<End>, std::optional<End>>> ends;
  std::vector<std::string> order;
  for (const auto& p : n.array()) {
    p.object({"name", "kind", "direction", "partition", "max_message_size", "refresh_period",
              "capacity"});
    const std::string name = p.at("name").str();
    const std::string kind = p.at("kind").str();
    End end{PortKind::Queueing, static_cast<PartitionId>(p.at("partition").u64()),
            p.at("max_message_size").positive(), 0, 0, p};
    if (kind == "sampling") {
      end.kind = PortKind::Sampling;
      end.refresh = p.at("refresh_period").u64();
    } else if (kind == "queueing") {
      end.capacity = p.at("capacity").positive();
    } else {
      p.at("kind").fail("expected 'sampling' or 'queueing'");
    }
    const std::string direction = p.at("direction").str();
    if (!ends.count(name)) order.push_back(name);
    auto& slot = ends[name];
    if (direction != "source" && direction != "destination")
      p.at("direction").fail("expected 'source' or 'destination'");
    auto& target = direction == "source" ? slot.first : slot.second;
    if (target) p.fail("port '" + name + "' declares its " + direction + " twice");
    target.emplace(end);
  }
  std::vector<PortDecl> out;
  for (const auto& name : order) {
    const auto& [src, dst] = ends.at(name);
    const End& any = src ? *src : *dst;
    if (!src || !dst) any.node.fail("port '" + name + "' needs both a source and a destination");
    if (src->kind != dst->kind || src->max_size != dst->max_size || src->refresh != dst->refresh ||
        src->capacity != dst->capacity)
      dst->node.fail("port '" + name + "' ends disagree on kind or limits");
    out.push_back(PortDecl{name, src->kind, src->partition, dst->partition, src->max_size,
                           src->refresh, src->capacity});
  }
  return out;
}

void parse_addr(const Node& n, AddrRef& out) {
  if (n.has("addr")) {
    if (n.has("region")) n.fail("give either 'region' or 'addr', not both");
    out.region.clear();
    out.offset = static_cast<std::int64_t>(n.at("addr").u64());
    return;
  }
  out.region = n.at("region").str();
  out.offset = n.has("offset") ? n.at("offset").i64() : 0;
}

std::vector<std::uint8_t> parse_bytes(const Node& n) {
  std::vector<std::uint8_t> out;
  for (const auto& b : n.array()) out.push_back(b.byte());
  if (out.empty()) n.fail("expected at least one byte");
  return out;
}

Operand parse_operand(const Node& n, IntSpec spec) {
  Operand o;
  if (n.value().is_object()) {
    n.object({"region", "offset", "addr"});
    parse_addr(n, o.mem);
    return o;
  }
  o.literal = n.wide();
  if (!spec.contains(*o.literal)) n.fail("literal does not fit " + spec.name());
  return o;
}

Step parse_step(const Node& n) {
  if (!n.value().is_object()) n.fail("expected an object");
  Step s;
  const Node op_node = n.at("op");
  const auto op = parse_step_op(op_node.str());
  if (!op) op_node.fail("unknown op '" + op_node.str() + "'");
  s.op = *op;
  s.partition = static_cast<PartitionId>(n.at("partition").u64());
  if (n.has("process")) s.process = static_cast<ProcessId>(n.at("process").positive());

  auto keys = [&](std::initializer_list<const char*> extra) {
    std::vector<const char*> all{"op", "partition", "process"};
    all.insert(all.end(), extra.begin(), extra.end());
    if (!n.value().is_object()) n.fail("expected an object");
    for (const auto& [key, _] : n.value().items()) {
      if (std::find_if(all.begin(), all.end(), [&](const char* a) { return key == a; }) == all.end())
        n.at(key).fail("unknown key '" + key + "' for " + std::string(to_string(s.op)));
    }
  };

  switch (s.op) {
    case StepOp::Alloc:
      keys({"label", "size", "type"});
      s.label = n.at("label").str();
      if (n.has("size")) s.size = n.at("size").positive();
      if (n.has("type")) s.type = n.at("type").str();
      if (!n.has("size") && s.type.empty()) n.fail("ALLOC needs a size or a type");
      break;
    case StepOp::Write:
      keys({"region", "offset", "addr", "data", "fill", "len"});
      parse_addr(n, s.addr);
      if (n.has("data")) {
        if (n.has("fill")) n.fail("give either 'data' or 'fill'");
        s.data = parse_bytes(n.at("data"));
        s.len = s.data.size();
      } else {
        s.len = n.at("len").positive();
        s.data.assign(s.len, n.at("fill").byte());
      }
      break;
    case StepOp::Read:
    case StepOp::BranchOn:
      keys({"region", "offset", "addr", "len"});
      parse_addr(n, s.addr);
      s.len = n.at("len").positive();
      break;
    case StepOp::Copy: {
      keys({"src", "dst", "len"});
      const Node src = n.at("src");
      src.object({"region", "offset", "addr"});
      parse_addr(src, s.addr);
      const Node dst = n.at("dst");
      dst.object({"region", "offset", "addr"});
      parse_addr(dst, s.dst);
      s.len = n.at("len").positive();
      break;
    }
    case StepOp::Arith:
      keys({"arith", "type", "a", "b"});
      try {
        s.arith = parse_arith_op(n.at("arith").str());
      } catch (const ConfigError& e) {
        n.at("arith").fail(e.what());
      }
      [[fallthrough]];
    case StepOp::Div:
    case StepOp::Shift:
      if (s.op != StepOp::Arith) keys({"type", "a", "b"});
      s.int_spec = n.at("type").int_spec();
      s.a = parse_operand(n.at("a"), s.int_spec);
      if (s.op == StepOp::Shift) {
        if (!n.at("b").value().is_number_integer()) n.at("b").fail("shift count must be a literal");
        s.b.literal = n.at("b").wide();
      } else {
        s.b = parse_operand(n.at("b"), s.int_spec);
      }
      break;
    case StepOp::Trunc:
      keys({"type", "to", "a"});
      s.int_spec = n.at("type").int_spec();
      s.to_spec = n.at("to").int_spec();
      s.a = parse_operand(n.at("a"), s.int_spec);
      break;
    case StepOp::FloatCast:
      keys({"value", "to"});
      s.float_value = n.at("value").number();
      s.to_spec = n.at("to").int_spec();
      break;
    case StepOp::AlignCheck: {
      keys({"region", "offset", "addr", "align"});
      parse_addr(n, s.addr);
      s.align = n.at("align").positive();
      if ((s.align & (s.align - 1)) != 0) n.at("align").fail("alignment must be a power of two");
      break;
    }
    case StepOp::NullCheck:
      keys({"region", "offset", "addr"});
      parse_addr(n, s.addr);
      break;
    case StepOp::BoolCheck:
      keys({"a", "type"});
      s.int_spec = n.has("type") ? n.at("type").int_spec() : IntSpec{8, false};
      s.a = parse_operand(n.at("a"), s.int_spec);
      break;
    case StepOp::EnumCheck: {
      keys({"a", "type", "enum", "allowed"});
      s.int_spec = n.has("type") ? n.at("type").int_spec() : IntSpec{32, true};
      s.a = parse_operand(n.at("a"), s.int_spec);
      s.enum_spec.name = n.has("enum") ? n.at("enum").str() : "enum";
      for (const auto& v : n.at("allowed").array()) s.enum_spec.allowed.insert(v.i64());
      if (s.enum_spec.allowed.empty()) n.at("allowed").fail("enum needs at least one value");
      break;
    }
    case StepOp::Syscall: {
      keys({"name", "bindings", "succeeds"});
      s.syscall = n.at("name").str();
      const Node bindings = n.at("bindings");
      if (!bindings.value().is_object()) bindings.fail("expected an object");
      for (const auto& [param, _] : bindings.value().items()) {
        const Node b = bindings.at(param);
        b.object({"region", "offset", "addr", "len"});
        SyscallBinding binding;
        parse_addr(b, binding.addr);
        if (b.has("len")) binding.len = b.at("len").positive();
        s.bindings[param] = binding;
      }
      s.succeeds = n.has("succeeds") ? n.at("succeeds").boolean() : true;
      break;
    }
    case StepOp::Send:
    case StepOp::SamplingWrite:
      keys({"port", "region", "offset", "addr", "len"});
      s.port = n.at("port").str();
      parse_addr(n, s.addr);
      s.len = n.at("len").positive();
      break;
    case StepOp::Receive:
    case StepOp::SamplingRead:
      keys({"port", "region", "offset", "addr", "expect_data", "expect_validity"});
      s.port = n.at("port").str();
      parse_addr(n, s.addr);
      if (n.has("expect_data")) s.expect_data = parse_bytes(n.at("expect_data"));
      if (n.has("expect_validity")) {
        if (s.op != StepOp::SamplingRead) n.at("expect_validity").fail("only sampling reads have validity");
        const auto v = n.at("expect_validity").str();
        if (v == "VALID")
          s.expect_validity = Validity::Valid;
        else if (v == "STALE")
          s.expect_validity = Validity::Stale;
        else
          n.at("expect_validity").fail("expected 'VALID' or 'STALE'");
      }
      break;
    case StepOp::ResetPartition:
      keys({});
      break;
    case StepOp::GetMyId:
      keys({"expect"});
      if (n.has("expect")) {
        const Node e = n.at("expect");
        if (e.value().is_string()) {
          if (e.str() != "MAIN_PROCESS_ID") e.fail("expected 'MAIN_PROCESS_ID' or a process id");
          s.expect_id = kMainProcessId;
        } else {
          s.expect_id = static_cast<ProcessId>(e.u64());
        }
      }
      break;
    case StepOp::Idle:
      keys({"ticks"});
      s.ticks = n.at("ticks").u64();
      break;
    case StepOp::Generate:
      keys({"region", "offset", "addr", "count"});
      parse_addr(n, s.addr);
      if (s.addr.region.empty()) n.fail("GENERATE needs a region");
      s.count = static_cast<std::uint32_t>(n.at("count").positive());
      break;
  }
  return s;
}

ExpectPattern parse_expect(const Node& n) {
  n.object({"kind", "partition", "region", "offset", "step", "when"});
  ExpectPattern e;
  e.kind = n.at("kind").str();
  const auto& known = known_violation_kinds();
  if (std::find(known.begin(), known.end(), e.kind) == known.end())
    n.at("kind").fail("unknown violation kind '" + e.kind + "'");
  if (n.has("partition")) e.partition = static_cast<PartitionId>(n.at("partition").u64());
  if (n.has("region")) e.region = n.at("region").str();
  if (n.has("offset")) e.offset = n.at("offset").i64();
  if (n.has("step")) e.step = n.at("step").u64();
  if (n.has("when")) {
    const Node w = n.at("when");
    w.object({"slowdown_factor"});
    e.when_slowdown = w.at("slowdown_factor").ratio();
  }
  return e;
}

std::uint64_t type_size_of(const Scenario& sc, const std::string& type, const std::string& pointer) {
  if (sc.padding.contains(type)) return sc.padding.type_size(type);
  if (auto it = sc.types.find(type); it != sc.types.end()) return it->second;
  throw ConfigError("unknown type '" + type + "'", pointer);
}

}  // namespace

const char* to_string(StepOp op) {
  for (const auto& entry : kOpNames)
    if (entry.op == op) return entry.name;
  return "UNKNOWN";
}

std::optional<StepOp> parse_step_op(std::string_view text) {
  for (const auto& entry : kOpNames)
    if (text == entry.name) return entry.op;
  return std::nullopt;
}

const PartitionConfig* Scenario::find_partition(PartitionId id) const {
  for (const auto& p : partitions)
    if (p.id == id) return &p;
  return nullptr;
}

const SyscallSpec* Scenario::find_syscall(std::string_view name) const {
  for (const auto& s : syscalls)
    if (s.syscall_name == name || (!s.user_name.empty() && s.user_name == name)) return &s;
  return nullptr;
}

const PortDecl* Scenario::find_port(std::string_view name) const {
  for (const auto& p : ports)
    if (p.name == name) return &p;
  return nullptr;
}

Scenario parse_scenario(const json& doc) {
  const Node root(doc, "");
  root.object({"name", "partitions", "time", "ports", "types", "padding", "reserved_init",
               "syscalls", "workload", "expect"});
  Scenario sc;
  sc.name = root.at("name").str();
  if (sc.name.empty()) root.at("name").fail("scenario name must not be empty");
  for (const auto& p : root.at("partitions").array()) sc.partitions.push_back(parse_partition(p));
  sc.time = parse_time(root.at("time"));
  if (root.has("ports")) sc.ports = parse_ports(root.at("ports"));
  if (root.has("types")) {
    const Node types = root.at("types");
    if (!types.value().is_object()) types.fail("expected an object");
    for (const auto& [name, _] : types.value().items()) sc.types[name] = types.at(name).positive();
  }
  if (root.has("padding")) {
    const Node padding = root.at("padding");
    if (!padding.value().is_object()) padding.fail("expected an object");
    for (const auto& [name, _] : padding.value().items()) {
      const Node t = padding.at(name);
      t.object({"size", "ranges"});
      std::vector<PaddingRange> ranges;
      for (const auto& r : t.at("ranges").array()) {
        if (!r.value().is_array() || r.value().size() != 2) r.fail("expected [offset, len]");
        ranges.push_back(PaddingRange{r.at(0).u64(), r.at(1).positive()});
      }
      try {
        sc.padding.declare(name, t.at("size").positive(), std::move(ranges));
      } catch (const ConfigError& e) {
        t.fail(e.what());
      }
    }
  }
  if (root.has("reserved_init")) {
    const Node r = root.at("reserved_init");
    r.object({"enabled", "pattern"});
    sc.reserved_init.enabled = r.at("enabled").boolean();
    if (r.has("pattern")) sc.reserved_init.pattern = r.at("pattern").byte();
  }
  if (root.has("syscalls")) {
    for (const auto& t : root.at("syscalls").array()) {
      try {
        sc.syscalls.push_back(parse_template(t.str()));
      } catch (const ParseError& e) {
        t.fail(std::string("template: ") + e.what());
      }
    }
  }
  if (root.has("workload"))
    for (const auto& s : root.at("workload").array()) sc.workload.push_back(parse_step(s));
  if (root.has("expect"))
    for (const auto& e : root.at("expect").array()) sc.expect.push_back(parse_expect(e));
  validate_scenario(sc);
  return sc;
}

Scenario parse_scenario_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

void validate_scenario(const Scenario& sc) {
  std::set<PartitionId> partition_ids;
  std::set<ProcessId> process_ids;
  for (std::size_t i = 0; i < sc.partitions.size(); ++i) {
    const auto& p = sc.partitions[i];
    const std::string ptr = "/partitions/" + std::to_string(i);
    if (!partition_ids.insert(p.id).second) throw ConfigError("duplicate partition id", ptr + "/id");
    std::set<std::string> labels;
    for (std::size_t r = 0; r < p.regions.size(); ++r) {
      const auto& region = p.regions[r];
      const std::string rptr = ptr + "/regions/" + std::to_string(r);
      if (!labels.insert(region.label).second) throw ConfigError("duplicate region label", rptr);
      if (!region.type.empty()) {
        const auto size = type_size_of(sc, region.type, rptr + "/type");
        if (region.size != 0 && region.size != size)
          throw ConfigError("size disagrees with type '" + region.type + "'", rptr + "/size");
      }
    }
    for (std::size_t k = 0; k < p.processes.size(); ++k) {
      if (!process_ids.insert(p.processes[k].id).second)
        throw ConfigError("duplicate process id", ptr + "/processes/" + std::to_string(k) + "/id");
    }
  }
  if (sc.partitions.empty()) throw ConfigError("at least one partition is required", "/partitions");

  for (std::size_t i = 0; i < sc.time.windows.size(); ++i) {
    if (!partition_ids.count(sc.time.windows[i].partition))
      throw ConfigError("window names an unknown partition",
                        "/time/major_frame/windows/" + std::to_string(i) + "/partition");
  }
  if (auto defect = MajorFrame::find_defect(sc.time.frame_len, sc.time.windows)) {
    const std::string ptr = defect->window_index < sc.time.windows.size()
                                ? "/time/major_frame/windows/" + std::to_string(defect->window_index)
                                : "/time/major_frame";
    throw ConfigError(defect->message, ptr);
  }
  for (std::size_t i = 0; i < sc.time.timeout_overrides.size(); ++i) {
    if (!process_ids.count(sc.time.timeout_overrides[i].process))
      throw ConfigError("override names an unknown process",
                        "/time/timeout_overrides/" + std::to_string(i) + "/process");
  }
  for (std::size_t i = 0; i < sc.ports.size(); ++i) {
    const auto& port = sc.ports[i];
    if (!partition_ids.count(port.source) || !partition_ids.count(port.destination))
      throw ConfigError("port '" + port.name + "' names an unknown partition", "/ports");
  }

  auto windowed = [&](PartitionId id) {
    return std::any_of(sc.time.windows.begin(), sc.time.windows.end(),
                       [&](const Window& w) { return w.partition == id; });
  };
  for (std::size_t i = 0; i < sc.partitions.size(); ++i) {
    if (!sc.partitions[i].processes.empty() && !windowed(sc.partitions[i].id))
      throw ConfigError("partition has processes but no window", "/partitions/" + std::to_string(i));
  }

  for (std::size_t i = 0; i < sc.workload.size(); ++i) {
    const auto& s = sc.workload[i];
    const std::string ptr = "/workload/" + std::to_string(i);
    const PartitionConfig* part = sc.find_partition(s.partition);
    if (!part) throw ConfigError("unknown partition", ptr + "/partition");
    if (!windowed(s.partition)) throw ConfigError("partition has steps but no window", ptr + "/partition");
    if (s.process) {
      const bool owned = std::any_of(part->processes.begin(), part->processes.end(),
                                     [&](const ProcessConfig& p) { return p.id == *s.process; });
      if (!owned) throw ConfigError("process does not belong to the partition", ptr + "/process");
    }
    switch (s.op) {
      case StepOp::Alloc:
        if (!s.type.empty()) {
          const auto size = type_size_of(sc, s.type, ptr + "/type");
          if (s.size != 0 && s.size != size)
            throw ConfigError("size disagrees with type '" + s.type + "'", ptr + "/size");
        }
        break;
      case StepOp::Syscall: {
        const SyscallSpec* spec = sc.find_syscall(s.syscall);
        if (!spec) throw ConfigError("unknown syscall '" + s.syscall + "'", ptr + "/name");
        ParamBindings probe;
        for (const auto& [param, binding] : s.bindings) {
          if (!spec->find_param(param))
            throw ConfigError("syscall has no parameter '" + param + "'", ptr + "/bindings/" + escape_token(param));
          probe[param] = ParamBinding{0, binding.len};
        }
        try {
          resolve_sizes(*spec, sc.types, probe);
        } catch (const BindError& e) {
          throw ConfigError(e.what(), ptr + "/bindings");
        } catch (const UnknownType& e) {
          throw ConfigError(e.what(), ptr + "/name");
        }
        break;
      }
      case StepOp::Send:
      case StepOp::Receive:
      case StepOp::SamplingWrite:
      case StepOp::SamplingRead: {
        const PortDecl* port = sc.find_port(s.port);
        if (!port) throw ConfigError("unknown port '" + s.port + "'", ptr + "/port");
        const bool sampling = s.op == StepOp::SamplingWrite || s.op == StepOp::SamplingRead;
        if (sampling != (port->kind == PortKind::Sampling))
          throw ConfigError("port '" + s.port + "' has the wrong kind for " + to_string(s.op), ptr + "/port");
        break;
      }
      default:
        break;
    }
  }
  for (std::size_t i = 0; i < sc.expect.size(); ++i) {
    const auto& e = sc.expect[i];
    const std::string ptr = "/expect/" + std::to_string(i);
    if (e.partition && !partition_ids.count(*e.partition))
      throw ConfigError("unknown partition", ptr + "/partition");
    if (e.step && *e.step >= sc.workload.size()) throw ConfigError("step out of range", ptr + "/step");
  }
}

}  // namespace partsan
