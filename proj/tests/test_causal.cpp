#include <doctest.h>

#include <vector>

#include "htr/causal.hpp"
#include "htr/rng.hpp"

using namespace htr;

namespace {

HtrInstance accepting_d2(std::uint32_t hops, std::uint32_t bits) {
  std::vector<std::uint32_t> address(hops);
  std::uint32_t sum = 0;
  for (std::uint32_t i = 0; i < hops; ++i) {
    address[i] = (bits >> i) & 1;
    sum += address[i];
  }
  return new_instance(2, hops, address, Family::Checksum, sum % 2);
}

}  // namespace

TEST_SUITE("causal") {

TEST_CASE("initial world") {
  const auto inst = new_instance(2, 3, {0, 1, 1}, Family::Checksum, 0);
  const auto world = init_world(inst);
  CHECK(world.tick == 0);
  CHECK(world.token_level == 0);
  CHECK(world.views[0].records.size() == 3);  // root knows the address
  for (std::uint32_t level = 1; level <= 3; ++level)
    CHECK(world.views[level].records.empty());
  CHECK(world.ledger_total() == 0);
}

TEST_CASE("single hop delivers one routing block") {
  const auto inst = new_instance(2, 3, {0, 1, 1}, Family::Checksum, 0);
  auto world = init_world(inst);
  const auto violation =
      apply_tick(world, ActionKind::Hop, inst, CapacityMode::RoutingOnly);
  CHECK_FALSE(violation.has_value());
  CHECK(world.token_level == 1);
  CHECK(world.tick == 1);
  CHECK(world.ledger_at(0, 0) == 1);  // w bits in slot 0
  REQUIRE(world.views[1].records.size() == 1);
  CHECK(world.views[1].records[0].digit == 0);
  CHECK(world.views[1].records[0].tick == 0);
}

TEST_CASE("full-mode crossings carry state bits") {
  const auto inst = new_instance(4, 2, {3, 2}, Family::Checksum, 1);
  auto world = init_world(inst);
  CHECK_FALSE(
      apply_tick(world, ActionKind::Hop, inst, CapacityMode::Full).has_value());
  CHECK(world.ledger_at(0, 0) == 4);  // w + state bits = 2 + 2
  REQUIRE(world.views[1].records.size() == 1);
  CHECK(world.views[1].records[0].state == 3);  // (0 + 3) mod 4
}

TEST_CASE("noop freezes the world") {
  const auto inst = new_instance(2, 2, {1, 1}, Family::Checksum, 0);
  auto world = init_world(inst);
  apply_tick(world, ActionKind::Hop, inst, CapacityMode::RoutingOnly);
  const auto views_before = world.views;
  apply_tick(world, ActionKind::Noop, inst, CapacityMode::RoutingOnly);
  CHECK(world.views == views_before);
  CHECK(world.token_level == 1);
  CHECK(world.tick == 2);
}

TEST_CASE("hop past the leaf is a bypass attempt") {
  const auto inst = new_instance(2, 1, {1}, Family::Checksum, 1);
  auto world = init_world(inst);
  apply_tick(world, ActionKind::Hop, inst, CapacityMode::RoutingOnly);
  CHECK(world.accepted);
  const auto violation =
      apply_tick(world, ActionKind::Hop, inst, CapacityMode::RoutingOnly);
  REQUIRE(violation.has_value());
  CHECK(violation->rule == ViolationRule::BypassBoundary);
}

TEST_CASE("actions after a halt are refused") {
  const auto inst = new_instance(2, 2, {1, 1}, Family::Checksum, 1);
  auto world = init_world(inst);
  apply_tick(world, ActionKind::Halt, inst, CapacityMode::RoutingOnly);
  const auto violation =
      apply_tick(world, ActionKind::Noop, inst, CapacityMode::RoutingOnly);
  REQUIRE(violation.has_value());
  CHECK(violation->rule == ViolationRule::ActionAfterHalt);
}

TEST_CASE("final step carries the verdict to the leaf") {
  SUBCASE("accept") {
    const auto inst = new_instance(2, 2, {1, 1}, Family::Checksum, 0);
    const auto trace = run_schedule(inst, Schedule::canonical(2));
    CHECK(trace.outcome == RunOutcome::Accept);
    REQUIRE(trace.world.views[2].verdict.has_value());
    CHECK(trace.world.views[2].verdict->accepted);
    CHECK(trace.world.views[2].records.size() == 2);
  }
  SUBCASE("reject still crosses, flagged at the leaf") {
    const auto inst = new_instance(2, 2, {1, 1}, Family::Checksum, 1);
    const auto trace = run_schedule(inst, Schedule::canonical(2));
    CHECK(trace.outcome == RunOutcome::Reject);
    CHECK(trace.world.token_level == 2);
    REQUIRE(trace.world.views[2].verdict.has_value());
    CHECK_FALSE(trace.world.views[2].verdict->accepted);
    CHECK_FALSE(trace.t_complete.has_value());
  }
}

TEST_CASE("canonical schedule completes in exactly N ticks") {
  CHECK(Schedule::canonical(1).actions ==
        std::vector<ActionKind>{ActionKind::Hop});
  CHECK(Schedule::canonical(4).length() == 4);

  const auto inst = new_instance(2, 3, {0, 1, 1}, Family::Checksum, 0);
  const auto trace = run_schedule(inst, Schedule::canonical(3));
  CHECK(trace.outcome == RunOutcome::Accept);
  CHECK(trace.t_complete == 3);
}

TEST_CASE("a leading delay shifts completion") {
  const auto inst = new_instance(2, 3, {0, 1, 1}, Family::Checksum, 0);
  const Schedule delayed{{ActionKind::Noop, ActionKind::Hop, ActionKind::Hop,
                          ActionKind::Hop}};
  const auto trace = run_schedule(inst, delayed);
  CHECK(trace.outcome == RunOutcome::Accept);
  CHECK(trace.t_complete == 4);
}

TEST_CASE("too few hops leave the run incomplete") {
  const auto inst = new_instance(2, 3, {0, 1, 1}, Family::Checksum, 0);
  const Schedule twoHops{{ActionKind::Hop, ActionKind::Hop}};
  const auto trace = run_schedule(inst, twoHops);
  CHECK(trace.outcome == RunOutcome::Incomplete);
  CHECK(trace.world.token_level == 2);
}

TEST_CASE("schedules may not continue past HALT") {
  const Schedule bad{{ActionKind::Halt, ActionKind::Hop}};
  const auto inst = new_instance(2, 1, {0}, Family::Checksum, 0);
  CHECK_THROWS_AS(run_schedule(inst, bad), HtrError);
}

TEST_CASE("min causal time by exhaustive enumeration") {
  CHECK(min_causal_time(accepting_d2(3, 0b011), 5) == 3);
  CHECK(min_causal_time(accepting_d2(1, 0b1), 2) == 1);
  CHECK_FALSE(min_causal_time(accepting_d2(4, 0b1010), 3).has_value());
  CHECK_THROWS_AS(min_causal_time(accepting_d2(2, 0), 17), HtrError);
}

TEST_CASE("exhaustive lower bound at desk scale") {
  // All d=2 addresses and both targets, N <= 3 here (the acceptance suite
  // extends to N = 4): accepting instances complete in exactly N ticks and
  // never faster.
  for (std::uint32_t n = 1; n <= 3; ++n) {
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
      for (std::uint32_t target : {0u, 1u}) {
        std::vector<std::uint32_t> address(n);
        for (std::uint32_t i = 0; i < n; ++i) address[i] = (bits >> i) & 1;
        const auto inst =
            new_instance(2, n, address, Family::Checksum, target);
        const auto best = min_causal_time(inst, n + 2);
        if (run_schedule(inst, Schedule::canonical(n)).outcome ==
            RunOutcome::Accept)
          CHECK(best == n);
        else
          CHECK_FALSE(best.has_value());
      }
    }
  }
}

TEST_CASE("canonical agreement with the sequential run, exhaustive") {
  for (std::uint32_t n = 1; n <= 6; ++n)
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits)
      for (std::uint32_t target : {0u, 1u}) {
        std::vector<std::uint32_t> address(n);
        for (std::uint32_t i = 0; i < n; ++i) address[i] = (bits >> i) & 1;
        for (Family family : {Family::Checksum, Family::Parity}) {
          const auto inst = new_instance(2, n, address, family, target);
          const auto seq = run_sequential(inst);
          const auto causal = run_schedule(inst, Schedule::canonical(n));
          const bool seq_accepts = seq.outcome == SeqOutcome::Accept;
          const bool causal_accepts = causal.outcome == RunOutcome::Accept;
          CHECK(seq_accepts == causal_accepts);
        }
      }
}

TEST_CASE("legal runs never break world invariants (spot fuzz)") {
  SplitMix64 rng(2024);
  for (int iter = 0; iter < 2000; ++iter) {
    const std::uint32_t d = 2 + rng.below(3);
    const std::uint32_t n = 1 + rng.below(8);
    const auto inst = random_instance(d, n, Family::Checksum, rng.next());
    const auto mode = rng.below(2) ? CapacityMode::Full
                                   : CapacityMode::RoutingOnly;
    auto world = init_world(inst);
    const std::uint32_t len = 1 + rng.below(12);
    for (std::uint32_t k = 0; k < len; ++k) {
      const auto roll = rng.below(8);
      const ActionKind action = roll < 5 ? ActionKind::Hop
                                : roll < 7 ? ActionKind::Noop
                                           : ActionKind::Halt;
      apply_tick(world, action, inst, mode);  // refusals leave it intact
      const auto breach = check_world_invariants(world, inst, mode);
      if (breach) CAPTURE(*breach);
      CHECK_FALSE(breach.has_value());
    }
  }
}

TEST_CASE("unsafe actions are detected and damage the world visibly") {
  const auto inst = new_instance(2, 4, {1, 0, 1, 1}, Family::Checksum, 1);
  const auto mode = CapacityMode::RoutingOnly;

  SUBCASE("duplicate") {
    auto world = init_world(inst);
    const auto v = apply_unsafe(world, {UnsafeAction::Kind::Duplicate, 0},
                                inst, mode);
    CHECK(v.rule == ViolationRule::TokenDuplication);
    CHECK(check_world_invariants(world, inst, mode).has_value());
  }
  SUBCASE("double hop") {
    auto world = init_world(inst);
    const auto v = apply_unsafe(world, {UnsafeAction::Kind::DoubleHop, 0},
                                inst, mode);
    CHECK(v.rule == ViolationRule::MultiHopPerTick);
    CHECK(world.token_level == 2);
    CHECK(check_world_invariants(world, inst, mode).has_value());
  }
  SUBCASE("bypass") {
    auto world = init_world(inst);
    const auto v =
        apply_unsafe(world, {UnsafeAction::Kind::Bypass, 3}, inst, mode);
    CHECK(v.rule == ViolationRule::BypassBoundary);
    CHECK(check_world_invariants(world, inst, mode).has_value());
  }
  SUBCASE("flood") {
    auto world = init_world(inst);
    const auto v =
        apply_unsafe(world, {UnsafeAction::Kind::Flood, 1}, inst, mode);
    CHECK(v.rule == ViolationRule::CapacityExceeded);
    CHECK(check_world_invariants(world, inst, mode).has_value());
  }
  SUBCASE("unsafe after halt") {
    auto world = init_world(inst);
    apply_tick(world, ActionKind::Halt, inst, mode);
    const auto v =
        apply_unsafe(world, {UnsafeAction::Kind::Flood, 1}, inst, mode);
    CHECK(v.rule == ViolationRule::ActionAfterHalt);
  }
  SUBCASE("run_actions requires the unsafe flag") {
    std::vector<AnyAction> actions{UnsafeAction{UnsafeAction::Kind::Flood, 1}};
    CHECK_THROWS_AS(run_actions(inst, actions, mode, false), HtrError);
    const auto trace = run_actions(inst, actions, mode, true);
    CHECK(trace.outcome == RunOutcome::Violation);
    REQUIRE(trace.violation.has_value());
    CHECK(trace.violation->rule == ViolationRule::CapacityExceeded);
  }
}

TEST_CASE("schedule JSON round-trip and unsafe gating") {
  const auto j = schedule_to_json(Schedule::canonical(3));
  CHECK(j.size() == 3);
  const auto actions = actions_from_json(j, false);
  CHECK(actions.size() == 3);

  const nlohmann::json unsafe = {"HOP", "FLOOD:2"};
  CHECK_THROWS_AS(actions_from_json(unsafe, false), HtrError);
  const auto mixed = actions_from_json(unsafe, true);
  CHECK(std::holds_alternative<UnsafeAction>(mixed[1]));
  CHECK(std::get<UnsafeAction>(mixed[1]).arg == 2);

  const nlohmann::json trailing = {"HALT", "HOP"};
  CHECK_THROWS_AS(actions_from_json(trailing, true), HtrError);
}

TEST_CASE("causal trace JSON carries rows, views and the outcome") {
  const auto inst = new_instance(2, 2, {1, 0}, Family::Checksum, 1);
  const auto trace = run_schedule(inst, Schedule::canonical(2));
  const auto j = causal_trace_to_json(trace);
  CHECK(j["type"] == "causal");
  CHECK(j["outcome"] == "ACCEPT");
  CHECK(j["T"] == 2);
  CHECK(j["ticks"].size() == 2);
  CHECK(j["ticks"][0]["crossing"]["boundary"] == 0);
  CHECK(j["views"].size() == 3);
}

}  // TEST_SUITE
