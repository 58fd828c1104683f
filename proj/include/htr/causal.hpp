#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "htr/instance.hpp"
#include "htr/sequential.hpp"

namespace htr {

// ---------------------------------------------------------------------------
// Causal execution
// ---------------------------------------------------------------------------
//
// A world of level-indexed observers, a single non-duplicable token, and one
// action per tick. A HOP performs the next validation and, if the boundary
// is crossed, hands the accumulated routing transcript to the next level;
// the per-boundary ledger charges only the fresh routing bits delivered by
// that crossing (plus token-state bits in FULL mode). The final step always
// carries the token into the leaf level together with the verdict, so the
// terminal behavior is visible at the end of the chain; an intermediate
// validation failure halts the run with nothing crossing.
//
// The legal action alphabet cannot express a constraint violation; illegal
// effects exist only behind the explicit unsafe entry point so that each
// detector can be exercised.

enum class ActionKind : std::uint8_t { Hop, Noop, Halt };

inline const char* action_name(ActionKind a) {
  switch (a) {
    case ActionKind::Hop:  return "HOP";
    case ActionKind::Noop: return "NOOP";
    case ActionKind::Halt: return "HALT";
  }
  return "?";
}

struct Schedule {
  std::vector<ActionKind> actions;

  std::size_t length() const { return actions.size(); }

  // N consecutive HOPs: the minimum-time legal execution.
  static Schedule canonical(std::uint32_t hops) {
    return Schedule{std::vector<ActionKind>(hops, ActionKind::Hop)};
  }
};

// No action may follow HALT within a schedule.
inline void validate_schedule(const Schedule& schedule) {
  for (std::size_t i = 0; i + 1 < schedule.actions.size(); ++i)
    if (schedule.actions[i] == ActionKind::Halt)
      throw HtrError(Err::BadSchedule, "action follows HALT at position " +
                                           std::to_string(i));
}

enum class CapacityMode : std::uint8_t { RoutingOnly, Full };

inline const char* capacity_mode_name(CapacityMode m) {
  return m == CapacityMode::RoutingOnly ? "routing" : "full";
}

// Per-boundary capacity in bits per tick. ROUTING_ONLY counts the w routing
// bits a crossing reveals; FULL adds the token-state bits that travel with
// the handoff.
inline std::uint32_t capacity_bits(std::uint32_t d, CapacityMode mode) {
  const std::uint32_t w = block_width(d);
  if (mode == CapacityMode::RoutingOnly) return w;
  return w + block_width(std::max(d, 2u));
}

enum class ViolationRule : std::uint8_t {
  TokenDuplication,
  MultiHopPerTick,
  BypassBoundary,
  CapacityExceeded,
  ActionAfterHalt,
};

inline const char* violation_rule_name(ViolationRule r) {
  switch (r) {
    case ViolationRule::TokenDuplication: return "TOKEN_DUPLICATION";
    case ViolationRule::MultiHopPerTick:  return "MULTI_HOP_PER_TICK";
    case ViolationRule::BypassBoundary:   return "BYPASS_BOUNDARY";
    case ViolationRule::CapacityExceeded: return "CAPACITY_EXCEEDED";
    case ViolationRule::ActionAfterHalt:  return "ACTION_AFTER_HALT";
  }
  return "?";
}

struct ConstraintViolation {
  std::uint32_t tick = 0;
  ViolationRule rule = ViolationRule::BypassBoundary;
  std::string detail;
};

// One routing record as relayed along the chain: the tick slot at which the
// digit was first revealed, and the digit itself.
struct ViewRecord {
  std::uint32_t tick;
  std::uint32_t digit;
  std::uint32_t width;
  std::optional<std::uint32_t> state;  // token state bits, FULL mode only

  bool operator==(const ViewRecord&) const = default;
};

struct Verdict {
  std::uint32_t tick;
  bool accepted;

  bool operator==(const Verdict&) const = default;
};

// Everything a level has received across its upstream boundary. A handoff
// delivers the full transcript accumulated so far, so the leaf level ends a
// complete run knowing the entire address; the ledger still charges each
// boundary only for the fresh bits that first crossed it. Records keep
// their original reveal ticks, so delivered_tick marks when the level
// actually received them; before that tick the level has seen nothing.
// The root's initial knowledge has no delivery tick: it was never received.
struct LevelView {
  std::vector<ViewRecord> records;
  std::optional<Verdict> verdict;
  std::optional<std::uint32_t> delivered_tick;

  bool operator==(const LevelView&) const = default;
};

struct Crossing {
  std::uint32_t tick;      // 0-based action slot
  std::uint32_t boundary;  // i for boundary i -> i+1
  std::uint32_t bits;      // ledger charge
};

enum class HaltReason : std::uint8_t { None, Rejected, Scheduled };

struct CausalWorld {
  std::uint32_t tick = 0;
  std::uint32_t token_level = 0;
  std::uint32_t token_state = 0;
  HaltReason halt = HaltReason::None;
  std::uint32_t halt_tick = 0;
  std::uint32_t reject_step = 0;          // set when halt == Rejected
  bool accepted = false;
  std::optional<std::uint32_t> t_complete;  // tick count at the Nth crossing

  std::vector<LevelView> views;        // size N+1; views[0] = root knowledge
  std::vector<ViewRecord> transcript;  // carried by the token
  std::vector<Crossing> crossings;     // sparse per-boundary per-tick ledger
  std::vector<std::uint32_t> level_history;  // token_level after each tick

  bool halted() const { return halt != HaltReason::None; }

  std::uint32_t ledger_at(std::uint32_t boundary, std::uint32_t tick_slot) const {
    for (const auto& c : crossings)
      if (c.boundary == boundary && c.tick == tick_slot) return c.bits;
    return 0;
  }

  std::uint64_t ledger_total(std::uint32_t boundary) const {
    std::uint64_t sum = 0;
    for (const auto& c : crossings)
      if (c.boundary == boundary) sum += c.bits;
    return sum;
  }

  std::uint64_t ledger_total() const {
    std::uint64_t sum = 0;
    for (const auto& c : crossings) sum += c.bits;
    return sum;
  }
};

// Tick-level simulation keeps every level's received transcript, which is
// quadratic in the hop count; sequential execution is the tool for large N.
constexpr std::uint32_t kMaxCausalHops = 1024;

// Root starts holding the full address; every other view is empty.
inline CausalWorld init_world(const HtrInstance& inst) {
  if (inst.hops > kMaxCausalHops)
    throw HtrError(Err::BadShape,
                   "causal runs are capped at N = " +
                       std::to_string(kMaxCausalHops) +
                       "; use the sequential executor beyond that");
  CausalWorld world;
  world.views.resize(inst.hops + 1);
  world.views[0].records.reserve(inst.hops);
  for (std::uint32_t i = 0; i < inst.hops; ++i)
    world.views[0].records.push_back(
        ViewRecord{0, inst.address[i], inst.width(), std::nullopt});
  world.level_history.push_back(0);
  return world;
}

namespace detail {

inline void deliver_crossing(CausalWorld& world, const HtrInstance& inst,
                             CapacityMode mode, std::uint32_t slot,
                             std::uint32_t boundary, std::uint32_t digit,
                             std::optional<std::uint32_t> state_after,
                             std::uint32_t bits) {
  ViewRecord record{slot, digit, inst.width(),
                    mode == CapacityMode::Full ? state_after : std::nullopt};
  world.transcript.push_back(record);
  world.views[boundary + 1].records = world.transcript;
  world.views[boundary + 1].delivered_tick = slot;
  world.crossings.push_back(Crossing{slot, boundary, bits});
}

}  // namespace detail

// Advance the world by one action. Returns a violation (world untouched)
// when the action is illegal in context; legal actions never leave the
// world in a constraint-breaking state.
inline std::optional<ConstraintViolation> apply_tick(CausalWorld& world,
                                                     ActionKind action,
                                                     const HtrInstance& inst,
                                                     CapacityMode mode) {
  const std::uint32_t slot = world.tick;
  if (world.halted())
    return ConstraintViolation{slot, ViolationRule::ActionAfterHalt,
                               "world halted at tick " +
                                   std::to_string(world.halt_tick)};
  switch (action) {
    case ActionKind::Noop:
      break;  // fixed point: nothing moves, nothing is delivered
    case ActionKind::Halt:
      world.halt = HaltReason::Scheduled;
      world.halt_tick = slot;
      break;
    case ActionKind::Hop: {
      if (world.token_level >= inst.hops)
        return ConstraintViolation{
            slot, ViolationRule::BypassBoundary,
            "no boundary " + std::to_string(world.token_level) + "->" +
                std::to_string(world.token_level + 1) + " exists"};
      const std::uint32_t step = world.token_level + 1;  // 1-based
      const std::uint32_t digit = inst.address[step - 1];
      const bool ok = eval_predicate(inst.family, step, inst.hops,
                                     world.token_state, digit, inst.d,
                                     inst.target);
      if (step < inst.hops) {
        if (!ok) {
          // Intermediate failure: halt in place, nothing crosses.
          world.halt = HaltReason::Rejected;
          world.halt_tick = slot;
          world.reject_step = step;
          break;
        }
        const std::uint32_t state_after =
            transition(inst.family, step, world.token_state, digit, inst.d);
        detail::deliver_crossing(world, inst, mode, slot, step - 1, digit,
                                 state_after, capacity_bits(inst.d, mode));
        world.token_level = step;
        world.token_state = state_after;
      } else {
        // Final step: the handoff into the leaf always completes, carrying
        // the transcript and the verdict; a failed check rejects there.
        const std::uint32_t state_after =
            ok ? transition(inst.family, step, world.token_state, digit,
                            inst.d)
               : world.token_state;
        detail::deliver_crossing(world, inst, mode, slot, step - 1, digit,
                                 state_after, capacity_bits(inst.d, mode));
        world.views[inst.hops].verdict = Verdict{slot, ok};
        world.token_level = step;
        world.token_state = state_after;
        if (ok) {
          world.accepted = true;
          world.t_complete = slot + 1;
        } else {
          world.halt = HaltReason::Rejected;
          world.halt_tick = slot;
          world.reject_step = step;
        }
      }
      break;
    }
  }
  ++world.tick;
  world.level_history.push_back(world.token_level);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Unsafe actions
// ---------------------------------------------------------------------------
//
// Each variant forces one violation class through the detector. Unlike
// apply_tick these do mutate the world, so the invariant checker can be
// shown to catch the damage independently.

struct UnsafeAction {
  enum class Kind : std::uint8_t { Duplicate, DoubleHop, Bypass, Flood };
  Kind kind = Kind::Duplicate;
  std::uint32_t arg = 0;  // Bypass: target level; Flood: extra bits
};

inline const char* unsafe_kind_name(UnsafeAction::Kind k) {
  switch (k) {
    case UnsafeAction::Kind::Duplicate: return "DUPLICATE";
    case UnsafeAction::Kind::DoubleHop: return "DOUBLE_HOP";
    case UnsafeAction::Kind::Bypass:    return "BYPASS";
    case UnsafeAction::Kind::Flood:     return "FLOOD";
  }
  return "?";
}

inline ConstraintViolation apply_unsafe(CausalWorld& world,
                                        const UnsafeAction& action,
                                        const HtrInstance& inst,
                                        CapacityMode mode) {
  const std::uint32_t slot = world.tick;
  ConstraintViolation violation{slot, ViolationRule::TokenDuplication, ""};
  if (world.halted()) {
    violation.rule = ViolationRule::ActionAfterHalt;
    violation.detail = "unsafe action after halt";
    ++world.tick;
    world.level_history.push_back(world.token_level);
    return violation;
  }
  const std::uint32_t w = inst.width();
  switch (action.kind) {
    case UnsafeAction::Kind::Duplicate: {
      // Copy the token's knowledge across the next boundary while the token
      // stays put: two live carriers.
      const std::uint32_t boundary =
          std::min(world.token_level, inst.hops - 1);
      detail::deliver_crossing(world, inst, mode, slot, boundary,
                               inst.address[boundary], std::nullopt,
                               capacity_bits(inst.d, mode));
      violation.rule = ViolationRule::TokenDuplication;
      violation.detail = "token duplicated across boundary " +
                         std::to_string(boundary);
      break;
    }
    case UnsafeAction::Kind::DoubleHop: {
      // Two crossings in a single tick.
      for (int k = 0; k < 2 && world.token_level < inst.hops; ++k) {
        const std::uint32_t step = world.token_level + 1;
        const std::uint32_t digit = inst.address[step - 1];
        const std::uint32_t state_after =
            transition(inst.family, step, world.token_state, digit, inst.d);
        detail::deliver_crossing(world, inst, mode, slot, step - 1, digit,
                                 state_after, capacity_bits(inst.d, mode));
        world.token_level = step;
        world.token_state = state_after;
      }
      violation.rule = ViolationRule::MultiHopPerTick;
      violation.detail = "token advanced two boundaries in one tick";
      break;
    }
    case UnsafeAction::Kind::Bypass: {
      // Drop routing bits at a level the token has not reached.
      const std::uint32_t level =
          std::min(std::max(action.arg, world.token_level + 2), inst.hops);
      world.views[level].records.push_back(
          ViewRecord{slot, inst.address[level - 1], w, std::nullopt});
      if (!world.views[level].delivered_tick)
        world.views[level].delivered_tick = slot;
      world.crossings.push_back(Crossing{slot, level - 1, w});
      violation.rule = ViolationRule::BypassBoundary;
      violation.detail =
          "bits delivered to level " + std::to_string(level) +
          " while the token is at level " + std::to_string(world.token_level);
      break;
    }
    case UnsafeAction::Kind::Flood: {
      // A legal hop that ships more bits than the boundary admits.
      const std::uint32_t capacity = capacity_bits(inst.d, mode);
      const std::uint32_t bits = capacity + std::max(action.arg, 1u);
      if (world.token_level < inst.hops) {
        const std::uint32_t step = world.token_level + 1;
        const std::uint32_t digit = inst.address[step - 1];
        const std::uint32_t state_after =
            transition(inst.family, step, world.token_state, digit, inst.d);
        detail::deliver_crossing(world, inst, mode, slot, step - 1, digit,
                                 state_after, bits);
        world.token_level = step;
        world.token_state = state_after;
      } else {
        world.crossings.push_back(Crossing{slot, inst.hops - 1, bits});
      }
      violation.rule = ViolationRule::CapacityExceeded;
      violation.detail = std::to_string(bits) + " bits crossed, capacity " +
                         std::to_string(capacity);
      break;
    }
  }
  ++world.tick;
  world.level_history.push_back(world.token_level);
  return violation;
}

// ---------------------------------------------------------------------------
// Schedule runs
// ---------------------------------------------------------------------------

enum class RunOutcome : std::uint8_t { Accept, Reject, Incomplete, Violation };

inline const char* run_outcome_name(RunOutcome o) {
  switch (o) {
    case RunOutcome::Accept:     return "ACCEPT";
    case RunOutcome::Reject:     return "REJECT";
    case RunOutcome::Incomplete: return "INCOMPLETE";
    case RunOutcome::Violation:  return "VIOLATION";
  }
  return "?";
}

struct TickRow {
  std::string action;
  std::uint32_t token_level;
  std::optional<Crossing> crossing;
};

struct CausalTrace {
  std::uint32_t d = 2;
  std::uint32_t hops = 1;
  Family family = Family::Checksum;
  std::uint32_t target = 0;
  CapacityMode mode = CapacityMode::RoutingOnly;
  std::vector<TickRow> rows;
  RunOutcome outcome = RunOutcome::Incomplete;
  std::optional<std::uint32_t> t_complete;
  std::optional<ConstraintViolation> violation;
  CausalWorld world;
};

using AnyAction = std::variant<ActionKind, UnsafeAction>;

// Folds actions over a fresh world. A runtime halt (reject or scheduled)
// simply ends the run; the remaining schedule is not applied. A violation
// stops the run and is reported in the trace.
inline CausalTrace run_actions(const HtrInstance& inst,
                               const std::vector<AnyAction>& actions,
                               CapacityMode mode, bool allow_unsafe) {
  CausalTrace trace;
  trace.d = inst.d;
  trace.hops = inst.hops;
  trace.family = inst.family;
  trace.target = inst.target;
  trace.mode = mode;
  trace.world = init_world(inst);
  CausalWorld& world = trace.world;

  for (const AnyAction& any : actions) {
    if (world.halted()) break;
    if (std::holds_alternative<UnsafeAction>(any)) {
      if (!allow_unsafe)
        throw HtrError(Err::BadSchedule,
                       "unsafe action requires unsafe mode");
      const auto& ua = std::get<UnsafeAction>(any);
      const std::uint32_t before = world.crossings.size();
      ConstraintViolation v = apply_unsafe(world, ua, inst, mode);
      TickRow row{unsafe_kind_name(ua.kind), world.token_level, std::nullopt};
      if (world.crossings.size() > before)
        row.crossing = world.crossings.back();
      trace.rows.push_back(std::move(row));
      trace.violation = v;
      trace.outcome = RunOutcome::Violation;
      trace.t_complete = world.t_complete;
      return trace;
    }
    const ActionKind action = std::get<ActionKind>(any);
    const std::uint32_t before = world.crossings.size();
    if (auto v = apply_tick(world, action, inst, mode)) {
      trace.violation = *v;
      trace.outcome = RunOutcome::Violation;
      trace.t_complete = world.t_complete;
      return trace;
    }
    TickRow row{action_name(action), world.token_level, std::nullopt};
    if (world.crossings.size() > before) row.crossing = world.crossings.back();
    trace.rows.push_back(std::move(row));
  }

  trace.t_complete = world.t_complete;
  if (world.accepted)
    trace.outcome = RunOutcome::Accept;
  else if (world.halt == HaltReason::Rejected)
    trace.outcome = RunOutcome::Reject;
  else
    trace.outcome = RunOutcome::Incomplete;
  return trace;
}

inline CausalTrace run_schedule(const HtrInstance& inst,
                                const Schedule& schedule,
                                CapacityMode mode = CapacityMode::RoutingOnly) {
  validate_schedule(schedule);
  std::vector<AnyAction> actions;
  actions.reserve(schedule.actions.size());
  for (ActionKind a : schedule.actions) actions.emplace_back(a);
  return run_actions(inst, actions, mode, false);
}

constexpr std::uint32_t kMaxExhaustiveTicks = 16;

// Least completion tick over every {HOP, NOOP} schedule of length <= t_max,
// by exhaustive enumeration. Empty when no schedule accepts.
inline std::optional<std::uint32_t> min_causal_time(const HtrInstance& inst,
                                                    std::uint32_t t_max) {
  if (t_max > kMaxExhaustiveTicks)
    throw HtrError(Err::SearchSpaceTooLarge,
                   "schedule enumeration capped at 2^" +
                       std::to_string(kMaxExhaustiveTicks));
  std::optional<std::uint32_t> best;
  const std::uint64_t total = 1ull << t_max;
  Schedule schedule;
  schedule.actions.resize(t_max);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (std::uint32_t i = 0; i < t_max; ++i)
      schedule.actions[i] =
          (mask >> i) & 1ull ? ActionKind::Hop : ActionKind::Noop;
    const CausalTrace trace = run_schedule(inst, schedule);
    if (trace.outcome == RunOutcome::Accept && trace.t_complete)
      if (!best || *trace.t_complete < *best) best = *trace.t_complete;
  }
  return best;
}

// ---------------------------------------------------------------------------
// World invariants
// ---------------------------------------------------------------------------

// Everything a legal run must preserve, checked from the world's own
// records: unit token steps, at most one charged boundary per tick within
// capacity, charges only at crossing ticks, views only at reached levels.
inline std::optional<std::string> check_world_invariants(
    const CausalWorld& world, const HtrInstance& inst, CapacityMode mode) {
  const std::uint32_t capacity = capacity_bits(inst.d, mode);
  std::uint32_t max_level = 0;
  for (std::size_t t = 1; t < world.level_history.size(); ++t) {
    const std::uint32_t prev = world.level_history[t - 1];
    const std::uint32_t cur = world.level_history[t];
    if (cur < prev) return "token level decreased at tick " + std::to_string(t - 1);
    if (cur - prev > 1)
      return "token advanced " + std::to_string(cur - prev) +
             " levels at tick " + std::to_string(t - 1);
    max_level = std::max(max_level, cur);
  }
  for (std::size_t a = 0; a < world.crossings.size(); ++a) {
    const Crossing& c = world.crossings[a];
    if (c.bits > capacity)
      return "ledger entry of " + std::to_string(c.bits) +
             " bits exceeds capacity " + std::to_string(capacity);
    if (c.tick + 1 >= world.level_history.size() ||
        world.level_history[c.tick + 1] != world.level_history[c.tick] + 1 ||
        world.level_history[c.tick] != c.boundary)
      return "ledger charge at tick " + std::to_string(c.tick) +
             " without a matching crossing of boundary " +
             std::to_string(c.boundary);
    for (std::size_t b = a + 1; b < world.crossings.size(); ++b)
      if (world.crossings[b].tick == c.tick)
        return "two charged boundaries at tick " + std::to_string(c.tick);
  }
  for (std::uint32_t level = 1; level < world.views.size(); ++level)
    if (!world.views[level].records.empty() && level > max_level)
      return "nonempty view at unreached level " + std::to_string(level);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

inline nlohmann::json schedule_to_json(const Schedule& schedule) {
  nlohmann::json j = nlohmann::json::array();
  for (ActionKind a : schedule.actions) j.push_back(action_name(a));
  return j;
}

// Parses the action list. Unsafe tokens (DUPLICATE, DOUBLE_HOP, BYPASS:k,
// FLOOD:b) are accepted only when allow_unsafe is set.
inline std::vector<AnyAction> actions_from_json(const nlohmann::json& j,
                                                bool allow_unsafe) {
  if (!j.is_array())
    throw HtrError(Err::ParseError, "schedule file must be a JSON list");
  std::vector<AnyAction> actions;
  bool saw_halt = false;
  for (const auto& item : j) {
    if (!item.is_string())
      throw HtrError(Err::ParseError, "schedule entries must be strings");
    if (saw_halt)
      throw HtrError(Err::BadSchedule, "action follows HALT");
    const std::string s = item.get<std::string>();
    if (s == "HOP") {
      actions.emplace_back(ActionKind::Hop);
    } else if (s == "NOOP") {
      actions.emplace_back(ActionKind::Noop);
    } else if (s == "HALT") {
      actions.emplace_back(ActionKind::Halt);
      saw_halt = true;
    } else {
      UnsafeAction ua;
      const auto colon = s.find(':');
      const std::string head = s.substr(0, colon);
      if (head == "DUPLICATE") ua.kind = UnsafeAction::Kind::Duplicate;
      else if (head == "DOUBLE_HOP") ua.kind = UnsafeAction::Kind::DoubleHop;
      else if (head == "BYPASS") ua.kind = UnsafeAction::Kind::Bypass;
      else if (head == "FLOOD") ua.kind = UnsafeAction::Kind::Flood;
      else throw HtrError(Err::ParseError, "unknown action '" + s + "'");
      if (colon != std::string::npos)
        ua.arg = static_cast<std::uint32_t>(
            std::stoul(s.substr(colon + 1)));
      if (!allow_unsafe)
        throw HtrError(Err::BadSchedule,
                       "'" + s + "' requires unsafe mode");
      actions.emplace_back(ua);
    }
  }
  return actions;
}

inline nlohmann::json violation_to_json(const ConstraintViolation& v) {
  return nlohmann::json{{"tick", v.tick},
                        {"rule", violation_rule_name(v.rule)},
                        {"detail", v.detail}};
}

inline nlohmann::json causal_trace_to_json(const CausalTrace& trace) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : trace.rows) {
    nlohmann::json r{{"action", row.action}, {"token_level", row.token_level}};
    if (row.crossing)
      r["crossing"] = nlohmann::json{{"boundary", row.crossing->boundary},
                                     {"bits", row.crossing->bits}};
    else
      r["crossing"] = nullptr;
    rows.push_back(std::move(r));
  }
  nlohmann::json views = nlohmann::json::array();
  for (std::size_t level = 0; level < trace.world.views.size(); ++level) {
    const LevelView& view = trace.world.views[level];
    nlohmann::json records = nlohmann::json::array();
    for (const auto& rec : view.records) {
      nlohmann::json r{{"tick", rec.tick}, {"digit", rec.digit},
                       {"width", rec.width}};
      if (rec.state) r["state"] = *rec.state;
      records.push_back(std::move(r));
    }
    nlohmann::json v{{"level", level}, {"records", std::move(records)}};
    if (view.verdict)
      v["verdict"] = nlohmann::json{
          {"tick", view.verdict->tick},
          {"outcome", view.verdict->accepted ? "ACCEPT" : "REJECT"}};
    views.push_back(std::move(v));
  }
  nlohmann::json j{{"type", "causal"},
                   {"d", trace.d},
                   {"N", trace.hops},
                   {"family", family_name(trace.family)},
                   {"target", trace.target},
                   {"capacity_mode", capacity_mode_name(trace.mode)},
                   {"T", trace.world.tick},
                   {"outcome", run_outcome_name(trace.outcome)},
                   {"ticks", std::move(rows)},
                   {"views", std::move(views)}};
  if (trace.t_complete) j["t_complete"] = *trace.t_complete;
  if (trace.violation) j["violation"] = violation_to_json(*trace.violation);
  return j;
}

}  // namespace htr
