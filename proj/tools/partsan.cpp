//===-- partsan.cpp - Command-line entry point -----------------------------===//

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include "CLI11.hpp"
#include "partsan/builtin_scenarios.hpp"
#include "partsan/report.hpp"
#include "partsan/runner.hpp"
#include "partsan/scenario.hpp"
#include "partsan/syscall_annotations.hpp"

namespace {

using namespace partsan;

constexpr int kExitMismatch = 1;
constexpr int kExitError = 2;

void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << content;
    if (!out.flush()) throw Error("cannot write '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

Scenario load_any(const std::string& ref) {
  if (std::filesystem::exists(ref)) return load_scenario(ref);
  if (builtin_scenario_text(ref)) return builtin_scenario(ref);
  throw ConfigError("'" + ref + "' is neither a scenario file nor a builtin scenario");
}

struct CommonFlags {
  std::string slowdown;
  std::uint32_t granularity = 0;
  std::uint64_t seed = 0;
  std::string format = "text";
  bool legacy = false;

  RunOptions options() const {
    RunOptions opt;
    opt.seed = seed;
    if (!slowdown.empty()) opt.slowdown = Ratio::parse(slowdown);
    if (granularity != 0) opt.granularity = granularity;
    if (legacy) opt.legacy_get_my_id = true;
    return opt;
  }
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--slowdown-factor", flags.slowdown, "Timer slowdown factor, e.g. 2 or 3/2");
  cmd->add_option("--granularity", flags.granularity, "Shadow granularity in bytes")
      ->check(CLI::IsMember({1, 2, 4, 8, 16}));
  cmd->add_option("--seed", flags.seed, "Seed for generated workload steps");
  cmd->add_option("--report", flags.format, "Report format")->check(CLI::IsMember({"text", "json"}));
  cmd->add_flag("--legacy-get-my-id", flags.legacy, "Emulate the old GET_MY_ID behavior");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partition sanitizer simulator"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string scenario_ref;
  std::string out_path;
  auto* run = app.add_subcommand("run", "Run one scenario file or builtin");
  run->add_option("scenario", scenario_ref, "Scenario JSON file or builtin name")->required();
  add_common(run, run_flags);
  run->add_option("--out", out_path, "Write the report to this file");

  app.add_subcommand("list-scenarios", "List builtin scenarios");

  CommonFlags all_flags;
  unsigned jobs = 0;
  auto* run_all = app.add_subcommand("run-all", "Run every builtin scenario");
  add_common(run_all, all_flags);
  run_all->add_option("--jobs", jobs, "Scenarios to run concurrently (0: one per core)");

  std::string template_path;
  auto* parse = app.add_subcommand("parse-template", "Parse a syscall template file");
  parse->add_option("file", template_path, "Template file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const Scenario sc = load_any(scenario_ref);
      const RunReport report = run_scenario(sc, run_flags.options());
      const std::string text = emit_report(report, parse_report_format(run_flags.format));
      if (out_path.empty())
        std::cout << text;
      else
        write_atomically(out_path, text);
      return report.verdict == Verdict::Match ? 0 : kExitMismatch;
    }
    if (app.got_subcommand("list-scenarios")) {
      for (const auto& name : builtin_scenario_names()) std::cout << name << "\n";
      return 0;
    }
    if (run_all->parsed()) {
      const auto entries =
          run_all_builtins(all_flags.options(), parse_report_format(all_flags.format), jobs);
      bool all_match = true;
      for (const auto& e : entries) {
        std::cout << e.rendered;
        std::cerr << e.name << ": " << to_string(e.report.verdict) << "\n";
        all_match = all_match && e.report.verdict == Verdict::Match;
      }
      return all_match ? 0 : kExitMismatch;
    }
    if (parse->parsed()) {
      std::ifstream in(template_path, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      try {
        const auto specs = parse_templates(buf.str());
        nlohmann::json out;
        if (specs.size() == 1) {
          out = to_json(specs.front());
        } else {
          out = nlohmann::json::array();
          for (const auto& s : specs) out.push_back(to_json(s));
        }
        std::cout << out.dump(2) << "\n";
      } catch (const ParseError& e) {
        std::cerr << template_path << ":" << e.what() << "\n";
        return kExitError;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
