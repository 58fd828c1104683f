#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "htr/instance.hpp"

namespace htr {

// ---------------------------------------------------------------------------
// Reference execution: parse blocks in order, validate, transition, accept
// or reject. One predicate evaluation per step, stopping at the first
// failure. This is the ground truth everything else is compared against.
// ---------------------------------------------------------------------------

inline bool digit_parity(std::uint32_t digit) {
  return std::popcount(digit) & 1u;
}

// f_i(s, a_i) for step i in [1, N]. Out-of-range blocks fail every step; the
// final step additionally applies the family's target check. Pure function.
inline bool eval_predicate(Family family, std::uint32_t step,
                           std::uint32_t hops, std::uint32_t state,
                           std::uint32_t digit, std::uint32_t d,
                           std::uint32_t target) {
  if (digit >= d) return false;
  if (step < hops) return true;
  switch (family) {
    case Family::Checksum:
      return (state + digit) % d == target;
    case Family::Parity:
      return (static_cast<bool>(state & 1u) != digit_parity(digit)
                  ? 1u
                  : 0u) == target;
  }
  return false;
}

// Token-state update applied after a successful validation. Pure function.
inline std::uint32_t transition(Family family, std::uint32_t /*step*/,
                                std::uint32_t state, std::uint32_t digit,
                                std::uint32_t d) {
  switch (family) {
    case Family::Checksum:
      return (state + digit) % d;
    case Family::Parity:
      return (state ^ (digit_parity(digit) ? 1u : 0u)) & 1u;
  }
  return state;
}

struct TraceStep {
  std::uint32_t index;         // 1-based step number
  std::uint32_t state_before;
  std::uint32_t digit;
  bool predicate_ok;
  std::optional<std::uint32_t> state_after;  // absent on the failing step
};

enum class SeqOutcome : std::uint8_t { Accept, Reject };

struct ExecutionTrace {
  std::vector<TraceStep> steps;
  SeqOutcome outcome = SeqOutcome::Reject;
  std::uint32_t reject_step = 0;    // failing step index, 0 on accept
  std::uint32_t handoff_count = 0;  // successful validations

  // One evaluation per recorded step; strict laziness means this equals the
  // index of the first failure, or N.
  std::uint32_t predicate_evals() const {
    return static_cast<std::uint32_t>(steps.size());
  }
};

// Core runner over raw block values. Blocks may hold any w-bit value;
// out-of-range ones reject at their step, which is how crafted payloads and
// circuit inputs are handled.
inline ExecutionTrace run_blocks(std::uint32_t d, std::uint32_t hops,
                                 Family family, std::uint32_t target,
                                 std::span<const std::uint32_t> blocks) {
  ExecutionTrace trace;
  trace.steps.reserve(hops);
  std::uint32_t state = 0;  // s_1
  for (std::uint32_t i = 1; i <= hops; ++i) {
    const std::uint32_t digit = blocks[i - 1];
    const bool ok = eval_predicate(family, i, hops, state, digit, d, target);
    TraceStep step{i, state, digit, ok, std::nullopt};
    if (!ok) {
      trace.steps.push_back(step);
      trace.outcome = SeqOutcome::Reject;
      trace.reject_step = i;
      return trace;
    }
    state = transition(family, i, state, digit, d);
    step.state_after = state;
    trace.steps.push_back(step);
    ++trace.handoff_count;
  }
  trace.outcome = SeqOutcome::Accept;
  return trace;
}

inline ExecutionTrace run_sequential(const HtrInstance& inst) {
  return run_blocks(inst.d, inst.hops, inst.family, inst.target,
                    inst.address);
}

// Accept/reject of a raw payload under the instance parameters. The header
// bit is a codec artifact; the execution consumes only the N blocks.
inline bool payload_accepts(std::uint32_t d, std::uint32_t hops,
                            Family family, std::uint32_t target,
                            const Bits& payload) {
  const std::uint32_t w = block_width(d);
  std::vector<std::uint32_t> blocks(hops);
  for (std::uint32_t i = 0; i < hops; ++i)
    blocks[i] = payload.read_block(1 + static_cast<std::size_t>(i) * w, w);
  return run_blocks(d, hops, family, target, blocks).outcome ==
         SeqOutcome::Accept;
}

inline nlohmann::json trace_to_json(const ExecutionTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : trace.steps) {
    nlohmann::json row{{"i", s.index},
                       {"state_before", s.state_before},
                       {"digit", s.digit},
                       {"predicate", s.predicate_ok ? 1 : 0}};
    if (s.state_after) row["state_after"] = *s.state_after;
    steps.push_back(std::move(row));
  }
  nlohmann::json j{{"type", "sequential"},
                   {"outcome",
                    trace.outcome == SeqOutcome::Accept ? "ACCEPT" : "REJECT"},
                   {"handoffs", trace.handoff_count},
                   {"evals", trace.predicate_evals()},
                   {"steps", std::move(steps)}};
  if (trace.outcome == SeqOutcome::Reject) j["reject_step"] = trace.reject_step;
  return j;
}

}  // namespace htr
