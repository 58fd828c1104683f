#include <doctest.h>

#include <vector>

#include "htr/sequential.hpp"

using namespace htr;

namespace {

// Independent oracle: the checksum family accepts exactly when the digit sum
// lands on the target, and the parity family when the joint bit parity does.
bool oracle_accepts(const HtrInstance& inst) {
  if (inst.family == Family::Checksum) {
    std::uint64_t sum = 0;
    for (auto digit : inst.address) sum += digit;
    return sum % inst.d == inst.target;
  }
  std::uint32_t par = 0;
  for (auto digit : inst.address) par ^= digit_parity(digit) ? 1u : 0u;
  return par == inst.target;
}

}  // namespace

TEST_SUITE("sequential") {

TEST_CASE("predicate semantics") {
  // Intermediate steps only screen the digit range.
  CHECK(eval_predicate(Family::Checksum, 1, 3, 0, 1, 2, 0));
  CHECK(eval_predicate(Family::Checksum, 2, 3, 1, 0, 2, 1));
  CHECK_FALSE(eval_predicate(Family::Checksum, 1, 2, 0, 3, 3, 0));  // 3 >= d

  // Final step: (s + a) mod d == target.
  CHECK(eval_predicate(Family::Checksum, 3, 3, 1, 1, 2, 0));
  CHECK_FALSE(eval_predicate(Family::Checksum, 3, 3, 1, 1, 2, 1));

  // Parity final step: (s ^ parity(a)) == target.
  CHECK(eval_predicate(Family::Parity, 2, 2, 0, 0b11, 4, 0));
  CHECK_FALSE(eval_predicate(Family::Parity, 2, 2, 0, 0b10, 4, 0));
}

TEST_CASE("transition semantics") {
  CHECK(transition(Family::Checksum, 1, 1, 1, 2) == 0);
  CHECK(transition(Family::Checksum, 1, 3, 2, 4) == 1);
  CHECK(transition(Family::Parity, 1, 0, 0b11, 4) == 0);
  CHECK(transition(Family::Parity, 1, 0, 0b10, 4) == 1);
}

TEST_CASE("accepting run, hand-checked") {
  // (0+0+1+1) mod 2 == 0.
  const auto inst = new_instance(2, 3, {0, 1, 1}, Family::Checksum, 0);
  const auto trace = run_sequential(inst);
  CHECK(trace.outcome == SeqOutcome::Accept);
  CHECK(trace.handoff_count == 3);
  CHECK(trace.predicate_evals() == 3);
  REQUIRE(trace.steps.size() == 3);
  CHECK(trace.steps[0].state_before == 0);
  CHECK(trace.steps[1].state_after == 1);
  CHECK(trace.steps[2].state_after == 0);  // lands on the target
}

TEST_CASE("final-step rejection, hand-checked") {
  const auto inst = new_instance(2, 3, {0, 1, 1}, Family::Checksum, 1);
  const auto trace = run_sequential(inst);
  CHECK(trace.outcome == SeqOutcome::Reject);
  CHECK(trace.reject_step == 3);
  CHECK(trace.handoff_count == 2);
  CHECK(trace.predicate_evals() == 3);
  CHECK_FALSE(trace.steps.back().state_after.has_value());
}

TEST_CASE("invalid block halts immediately") {
  // Raw blocks may carry out-of-range values; step 1 rejects with exactly
  // one evaluation performed.
  const std::vector<std::uint32_t> blocks{3, 1};
  const auto trace = run_blocks(3, 2, Family::Checksum, 0, blocks);
  CHECK(trace.outcome == SeqOutcome::Reject);
  CHECK(trace.reject_step == 1);
  CHECK(trace.handoff_count == 0);
  CHECK(trace.predicate_evals() == 1);
}

TEST_CASE("determinism") {
  const auto inst = random_instance(4, 12, Family::Parity, 3);
  const auto a = run_sequential(inst);
  const auto b = run_sequential(inst);
  REQUIRE(a.steps.size() == b.steps.size());
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    CHECK(a.steps[i].digit == b.steps[i].digit);
    CHECK(a.steps[i].predicate_ok == b.steps[i].predicate_ok);
  }
}

TEST_CASE("step-count law across random instances") {
  std::uint64_t seed = 1000;
  for (int iter = 0; iter < 400; ++iter) {
    const std::uint32_t d = 2 + (iter % 4);
    const auto inst = random_instance(
        d, 1 + (iter % 12), iter % 2 ? Family::Parity : Family::Checksum,
        ++seed);
    const auto trace = run_sequential(inst);
    CHECK(trace.outcome ==
          (oracle_accepts(inst) ? SeqOutcome::Accept : SeqOutcome::Reject));
    if (trace.outcome == SeqOutcome::Accept) {
      CHECK(trace.predicate_evals() == inst.hops);
      CHECK(trace.handoff_count == inst.hops);
    } else {
      CHECK(trace.predicate_evals() == trace.reject_step);
      CHECK(trace.handoff_count == trace.reject_step - 1);
    }
  }
}

TEST_CASE("no strict prefix decides the outcome") {
  // Exhaustive at d=2, N <= 6: for every accepting instance and every
  // proper prefix, some suffix (digits beyond the prefix, target fixed)
  // rejects while another accepts.
  for (std::uint32_t n = 2; n <= 6; ++n) {
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
      std::vector<std::uint32_t> address(n);
      for (std::uint32_t i = 0; i < n; ++i) address[i] = (bits >> i) & 1;
      for (std::uint32_t target : {0u, 1u}) {
        const auto inst =
            new_instance(2, n, address, Family::Checksum, target);
        if (run_sequential(inst).outcome != SeqOutcome::Accept) continue;
        for (std::uint32_t prefix = 0; prefix + 1 < n; ++prefix) {
          bool saw_accept = false, saw_reject = false;
          const std::uint32_t suffix_len = n - (prefix + 1);
          for (std::uint32_t sfx = 0; sfx < (1u << suffix_len); ++sfx) {
            auto mutated = address;
            for (std::uint32_t i = 0; i < suffix_len; ++i)
              mutated[prefix + 1 + i] = (sfx >> i) & 1;
            const auto out = run_sequential(new_instance(
                2, n, mutated, Family::Checksum, target));
            (out.outcome == SeqOutcome::Accept ? saw_accept : saw_reject) =
                true;
          }
          CHECK(saw_accept);
          CHECK(saw_reject);
        }
      }
    }
  }
}

TEST_CASE("trace serialization shape") {
  const auto inst = new_instance(2, 2, {1, 1}, Family::Checksum, 0);
  const auto j = trace_to_json(run_sequential(inst));
  CHECK(j["type"] == "sequential");
  CHECK(j["outcome"] == "ACCEPT");
  CHECK(j["steps"].size() == 2);
  CHECK(j["evals"] == 2);
}

}  // TEST_SUITE
