// Test fixtures shared by the unit tests and the acceptance binary.
#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "partsan/syscall_annotations.hpp"

namespace fixtures {

inline std::string read(const std::string& name) {
  std::ifstream in(std::string(PARTSAN_FIXTURE_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// The jet_thread_status template, written out by hand.
inline partsan::SyscallSpec listing2_spec() {
  using namespace partsan;
  SyscallSpec s;
  s.user_name = "jet_thread_status";
  s.return_type = "jet_syscall_thread_status_t";
  s.syscall_name = "jet_thread_get_status";
  s.params = {{"jet_thread_id_t", "thread_id"},
              {"max_name_t", "name"},
              {"void**", "entry"},
              {"jet_thread_status_t*", "status"}};
  s.pre_checks = {{DirectivePhase::Pre, DirectiveKind::MsanCheck,
                   {TargetExpr::Form::AddrOf, "thread_id"},
                   {SizeExpr::Form::SizeofParam, "thread_id", 0}}};
  s.post_checks = {
      {DirectivePhase::Post, DirectiveKind::MsanUnpoison, {TargetExpr::Form::Param, "name"},
       {SizeExpr::Form::SizeofType, "max_name_t", 0}},
      {DirectivePhase::Post, DirectiveKind::MsanUnpoison, {TargetExpr::Form::Param, "entry"},
       {SizeExpr::Form::SizeofDeref, "entry", 0}},
      {DirectivePhase::Post, DirectiveKind::MsanUnpoison, {TargetExpr::Form::Param, "status"},
       {SizeExpr::Form::SizeofDeref, "status", 0}}};
  return s;
}

}  // namespace fixtures
