// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace frontgeo {

// Machine-readable failure categories. The CLI maps these onto exit codes:
// unsupported geometry -> 2, nothing found -> 3, everything else numeric -> 1.
enum class Errc {
  jet_mismatch,
  non_unit_divisor,
  not_divisible_by_v,
  compose_base_mismatch,
  normal_unavailable,
  not_singular,
  corank_two,
  degenerate_seed,
  trace_failure,
  straighten_failed,
  not_frontal,
  frame_collapse,
  wrong_kind,
  branch_ambiguity,
  no_bounded_branch,
  no_focal_offset,
  wrong_parallel_type,
  cpc_critical_seed,
  eta_fit_failure,
  degenerate_point,
  unknown_model,
  invalid_spec,
  nothing_found,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace frontgeo
