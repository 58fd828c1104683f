#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "htr/bits.hpp"
#include "htr/causal.hpp"
#include "htr/infoflow.hpp"
#include "htr/instance.hpp"
#include "htr/rng.hpp"
#include "htr/sequential.hpp"

namespace htr {

// ---------------------------------------------------------------------------
// Layered circuits with depth read as elapsed causal time
// ---------------------------------------------------------------------------
//
// Wires span exactly one layer boundary and gates have fan-in at most two.
// Input bits are globally readable taps; what the checker constrains is
// which blocks the token-annotated gates may consume, and how many wires
// cross between consecutive token sets. A circuit "implements" the relay
// process only if its layer evolution is a legal token run: annotations
// claim the trajectory, the checker verifies it.

enum class GateOp : std::uint8_t { And, Or, Not, Xor, Xnor, Copy, Const, Input };

inline const char* gate_op_name(GateOp op) {
  switch (op) {
    case GateOp::And:   return "AND";
    case GateOp::Or:    return "OR";
    case GateOp::Not:   return "NOT";
    case GateOp::Xor:   return "XOR";
    case GateOp::Xnor:  return "XNOR";
    case GateOp::Copy:  return "COPY";
    case GateOp::Const: return "CONST";
    case GateOp::Input: return "INPUT";
  }
  return "?";
}

inline GateOp gate_op_from_name(const std::string& name) {
  if (name == "AND") return GateOp::And;
  if (name == "OR") return GateOp::Or;
  if (name == "NOT") return GateOp::Not;
  if (name == "XOR") return GateOp::Xor;
  if (name == "XNOR") return GateOp::Xnor;
  if (name == "COPY") return GateOp::Copy;
  if (name == "CONST") return GateOp::Const;
  if (name == "INPUT") return GateOp::Input;
  throw HtrError(Err::ParseError, "unknown gate op '" + name + "'");
}

inline std::uint32_t gate_arity(GateOp op) {
  switch (op) {
    case GateOp::And:
    case GateOp::Or:
    case GateOp::Xor:
    case GateOp::Xnor:  return 2;
    case GateOp::Not:
    case GateOp::Copy:  return 1;
    case GateOp::Const:
    case GateOp::Input: return 0;
  }
  return 0;
}

struct Gate {
  GateOp op = GateOp::Const;
  std::vector<std::uint32_t> inputs;  // indices into the previous layer
  std::uint32_t input_bit = 0;        // INPUT only
  bool const_value = false;           // CONST only
  std::optional<std::uint32_t> token_level;
};

struct LayeredCircuit {
  std::vector<std::vector<Gate>> layers;
  std::vector<std::uint32_t> outputs;  // gate indices in the final layer

  std::uint32_t depth() const {
    return static_cast<std::uint32_t>(layers.size());
  }
};

// Structural validation: arities, wire targets, output indices.
inline void validate_circuit(const LayeredCircuit& circuit) {
  if (circuit.layers.empty())
    throw HtrError(Err::WireError, "circuit has no layers");
  for (std::size_t t = 0; t < circuit.layers.size(); ++t) {
    for (std::size_t g = 0; g < circuit.layers[t].size(); ++g) {
      const Gate& gate = circuit.layers[t][g];
      if (gate.inputs.size() != gate_arity(gate.op))
        throw HtrError(Err::WireError,
                       std::string(gate_op_name(gate.op)) + " gate at layer " +
                           std::to_string(t) + " has " +
                           std::to_string(gate.inputs.size()) + " inputs");
      for (std::uint32_t ref : gate.inputs) {
        if (t == 0)
          throw HtrError(Err::WireError, "layer 0 gates cannot have wires");
        if (ref >= circuit.layers[t - 1].size())
          throw HtrError(Err::WireError,
                         "dangling wire at layer " + std::to_string(t));
      }
    }
  }
  if (circuit.outputs.empty())
    throw HtrError(Err::WireError, "circuit has no outputs");
  for (std::uint32_t out : circuit.outputs)
    if (out >= circuit.layers.back().size())
      throw HtrError(Err::WireError, "output index out of range");
}

inline std::vector<bool> evaluate_circuit(const LayeredCircuit& circuit,
                                          const Bits& input) {
  validate_circuit(circuit);
  std::vector<bool> prev, cur;
  for (const auto& layer : circuit.layers) {
    cur.assign(layer.size(), false);
    for (std::size_t g = 0; g < layer.size(); ++g) {
      const Gate& gate = layer[g];
      const auto in = [&](std::size_t k) { return prev[gate.inputs[k]]; };
      switch (gate.op) {
        case GateOp::And:   cur[g] = in(0) && in(1); break;
        case GateOp::Or:    cur[g] = in(0) || in(1); break;
        case GateOp::Not:   cur[g] = !in(0); break;
        case GateOp::Xor:   cur[g] = in(0) != in(1); break;
        case GateOp::Xnor:  cur[g] = in(0) == in(1); break;
        case GateOp::Copy:  cur[g] = in(0); break;
        case GateOp::Const: cur[g] = gate.const_value; break;
        case GateOp::Input:
          if (gate.input_bit >= input.size())
            throw HtrError(Err::WireError,
                           "INPUT bit " + std::to_string(gate.input_bit) +
                               " outside the payload");
          cur[g] = input.get(gate.input_bit);
          break;
      }
    }
    prev.swap(cur);
  }
  std::vector<bool> out;
  out.reserve(circuit.outputs.size());
  for (std::uint32_t idx : circuit.outputs) out.push_back(prev[idx]);
  return out;
}

// ---------------------------------------------------------------------------
// Builders (d = 2)
// ---------------------------------------------------------------------------
//
// At d = 2 each step is a single XOR of the running state with the next
// address bit, and the final check folds the target into an XOR/XNOR, so
// one layer per step fits within fan-in two. Wider branching would need
// several gate levels per step, which the depth contract here rules out.

namespace detail {

inline void require_d2(std::uint32_t d) {
  if (d != 2)
    throw HtrError(Err::UnsupportedBranching,
                   "single-layer steps require d = 2");
}

}  // namespace detail

// Depth N+1 pipeline: layer t carries the token at level t; the state wire
// absorbs one address bit per layer and the last layer resolves the verdict.
inline LayeredCircuit build_canonical_circuit(std::uint32_t d,
                                              std::uint32_t hops,
                                              Family family,
                                              std::uint32_t target) {
  detail::require_d2(d);
  if (hops < 1) throw HtrError(Err::BadShape, "need N >= 1");
  if (target >= target_space(family, d))
    throw HtrError(Err::BadTarget, "target out of range for family");
  LayeredCircuit circuit;
  circuit.layers.resize(hops + 1);

  // Layer 0: state s_1 = 0 plus a tap staging block 1 for the next layer.
  {
    Gate state{GateOp::Const, {}, 0, false, 0u};
    Gate tap{GateOp::Input, {}, 1, false, std::nullopt};
    circuit.layers[0] = {state, tap};
  }
  for (std::uint32_t t = 1; t < hops; ++t) {
    Gate state{GateOp::Xor, {0, 1}, 0, false, t};   // s ^ a_t
    Gate tap{GateOp::Input, {}, 1 + t, false, std::nullopt};
    circuit.layers[t] = {state, tap};
  }
  // Final layer: verdict gate. (s ^ a_N) == target, i.e. XOR for target 1
  // and XNOR for target 0; parity(a) == a at one-bit blocks, so both
  // families share the structure.
  {
    Gate verdict{target == 1 ? GateOp::Xor : GateOp::Xnor,
                 {0, 1},
                 0,
                 false,
                 hops};
    circuit.layers[hops] = {verdict};
  }
  circuit.outputs = {0};
  return circuit;
}

// Logically parallel evaluator of the same predicate: a balanced XOR tree
// over all address bits. Functionally equal to the sequential run, but its
// honest token annotations cannot keep pace with the aggregation, which is
// exactly the gap the checker exposes.
inline LayeredCircuit build_flat_circuit(std::uint32_t d, std::uint32_t hops,
                                         Family family, std::uint32_t target) {
  detail::require_d2(d);
  if (hops < 2) throw HtrError(Err::BadShape, "flat exhibit needs N >= 2");
  if (target >= target_space(family, d))
    throw HtrError(Err::BadTarget, "target out of range for family");
  LayeredCircuit circuit;

  // Layer 0: a level-0 token placeholder plus all address taps at once.
  {
    std::vector<Gate> layer;
    layer.push_back(Gate{GateOp::Const, {}, 0, false, 0u});
    for (std::uint32_t i = 1; i <= hops; ++i)
      layer.push_back(Gate{GateOp::Input, {}, i, false, std::nullopt});
    circuit.layers.push_back(std::move(layer));
  }

  // Balanced XOR reduction; the root gate folds the target compare. One
  // gate per layer carries the honest unit-step token claim.
  std::vector<std::uint32_t> frontier(hops);
  for (std::uint32_t i = 0; i < hops; ++i) frontier[i] = i + 1;
  std::uint32_t level = 0;
  while (frontier.size() > 1) {
    ++level;
    std::vector<Gate> layer;
    std::vector<std::uint32_t> next;
    const bool last = (frontier.size() + 1) / 2 == 1;
    for (std::size_t g = 0; g + 1 < frontier.size(); g += 2) {
      const GateOp op = last && target == 0 ? GateOp::Xnor : GateOp::Xor;
      layer.push_back(Gate{op,
                           {frontier[g], frontier[g + 1]},
                           0,
                           false,
                           layer.empty() ? std::optional<std::uint32_t>(
                                               std::min(level, hops))
                                         : std::nullopt});
      next.push_back(static_cast<std::uint32_t>(layer.size()) - 1);
    }
    if (frontier.size() % 2 == 1) {
      layer.push_back(Gate{GateOp::Copy, {frontier.back()}, 0, false,
                           std::nullopt});
      next.push_back(static_cast<std::uint32_t>(layer.size()) - 1);
    }
    circuit.layers.push_back(std::move(layer));
    frontier = std::move(next);
  }
  circuit.outputs = {frontier.front()};
  return circuit;
}

// ---------------------------------------------------------------------------
// The implements-check
// ---------------------------------------------------------------------------

struct CircuitCrossing {
  std::uint32_t layer;
  std::uint32_t boundary;
  std::uint32_t bits;
};

struct CausalCertificate {
  std::vector<std::uint32_t> trajectory;  // token level per layer
  std::vector<CircuitCrossing> crossings;
  std::uint32_t depth = 0;
};

enum class CircuitRule : std::uint8_t {
  TokenDuplication,
  MultiHopPerTick,
  BypassBoundary,
  CapacityExceeded,
  ActionAfterHalt,
  NoTokenAnnotation,
  NonlocalDependence,
  FunctionalMismatch,
};

inline const char* circuit_rule_name(CircuitRule r) {
  switch (r) {
    case CircuitRule::TokenDuplication:   return "TOKEN_DUPLICATION";
    case CircuitRule::MultiHopPerTick:    return "MULTI_HOP_PER_TICK";
    case CircuitRule::BypassBoundary:     return "BYPASS_BOUNDARY";
    case CircuitRule::CapacityExceeded:   return "CAPACITY_EXCEEDED";
    case CircuitRule::ActionAfterHalt:    return "ACTION_AFTER_HALT";
    case CircuitRule::NoTokenAnnotation:  return "NO_TOKEN_ANNOTATION";
    case CircuitRule::NonlocalDependence: return "NONLOCAL_DEPENDENCE";
    case CircuitRule::FunctionalMismatch: return "FUNCTIONAL_MISMATCH";
  }
  return "?";
}

struct CircuitViolation {
  std::uint32_t layer = 0;
  CircuitRule rule = CircuitRule::NonlocalDependence;
  std::string detail;
};

using CheckResult = std::variant<CausalCertificate, CircuitViolation>;

inline bool implements(const CheckResult& r) {
  return std::holds_alternative<CausalCertificate>(r);
}

namespace detail {

// Which address block an input bit belongs to; the header is block 0 and is
// always readable.
inline std::uint32_t block_of_bit(std::uint32_t bit, std::uint32_t w) {
  return bit == 0 ? 0 : 1 + (bit - 1) / w;
}

struct GateFacts {
  bool token_tainted = false;          // transitively reads a token gate
  std::set<std::uint32_t> block_support;  // blocks reachable through it
};

}  // namespace detail

// Certifies or refutes that the circuit realizes the relay process when
// layer t is read as causal tick t. Checks, in order: functional agreement
// with the sequential reference on every payload (seeded samples past the
// enumeration cap), the claimed token trajectory (unique level per layer,
// unit advances from level 0), causal locality of every token gate, the
// per-crossing wire budget, and finally that the verdict is token-carried
// at level N. Capacity defaults to FULL because the crossing wires carry
// the token state itself.
inline CheckResult check_implements_htr(const LayeredCircuit& circuit,
                                        std::uint32_t d, std::uint32_t hops,
                                        Family family, std::uint32_t target,
                                        CapacityMode mode = CapacityMode::Full) {
  validate_circuit(circuit);
  const std::uint32_t w = block_width(d);
  const std::size_t input_bits = 1 + static_cast<std::size_t>(hops) * w;

  bool any_annotation = false;
  for (const auto& layer : circuit.layers)
    for (const auto& gate : layer)
      if (gate.token_level) any_annotation = true;
  if (!any_annotation)
    throw HtrError(Err::AnnotationMissing, "circuit carries no token claims");

  // (a) functional agreement
  if (circuit.outputs.size() != 1)
    return CircuitViolation{circuit.depth() - 1, CircuitRule::FunctionalMismatch,
                            "expected a single accept output"};
  std::uint64_t message_count = 1;
  bool exhaustive = true;
  for (std::uint32_t i = 0; i < hops && exhaustive; ++i) {
    message_count *= d;
    if (message_count > kEnumerationCap) exhaustive = false;
  }
  const auto agree = [&](const Bits& payload) -> std::optional<CircuitViolation> {
    const bool expect = payload_accepts(d, hops, family, target, payload);
    const bool got = evaluate_circuit(circuit, payload)[0];
    if (expect != got)
      return CircuitViolation{circuit.depth() - 1,
                              CircuitRule::FunctionalMismatch,
                              "disagrees with the sequential run on payload " +
                                  payload.to_hex()};
    return std::nullopt;
  };
  if (exhaustive && input_bits <= 20) {
    for (std::uint64_t pattern = 0; pattern < (1ull << input_bits);
         ++pattern) {
      Bits payload(input_bits);
      for (std::size_t b = 0; b < input_bits; ++b)
        payload.set(b, (pattern >> b) & 1ull);
      if (auto v = agree(payload)) return *v;
    }
  } else {
    SplitMix64 rng(0x9E3779B9u);
    for (int sample = 0; sample < 10000; ++sample) {
      Bits payload(input_bits);
      for (std::size_t b = 0; b < input_bits; ++b)
        payload.set(b, rng.below(2) == 1);
      if (auto v = agree(payload)) return *v;
    }
  }

  // (b) token trajectory
  std::vector<std::uint32_t> trajectory(circuit.depth(), 0);
  for (std::uint32_t t = 0; t < circuit.depth(); ++t) {
    std::optional<std::uint32_t> level;
    for (const auto& gate : circuit.layers[t]) {
      if (!gate.token_level) continue;
      if (*gate.token_level > hops)
        return CircuitViolation{t, CircuitRule::BypassBoundary,
                                "token claim beyond level N"};
      if (level && *level != *gate.token_level)
        return CircuitViolation{t, CircuitRule::TokenDuplication,
                                "layer claims token levels " +
                                    std::to_string(*level) + " and " +
                                    std::to_string(*gate.token_level)};
      level = *gate.token_level;
    }
    if (!level)
      return CircuitViolation{t, CircuitRule::NoTokenAnnotation,
                              "layer has no token claim"};
    trajectory[t] = *level;
  }
  if (trajectory[0] != 0)
    return CircuitViolation{0, CircuitRule::BypassBoundary,
                            "token must start at level 0"};
  for (std::uint32_t t = 1; t < circuit.depth(); ++t) {
    if (trajectory[t] < trajectory[t - 1] ||
        trajectory[t] - trajectory[t - 1] > 1)
      return CircuitViolation{t, CircuitRule::MultiHopPerTick,
                              "token level moves " +
                                  std::to_string(trajectory[t - 1]) + " -> " +
                                  std::to_string(trajectory[t]) +
                                  " across one layer"};
  }

  // (c) locality and crossing capacity
  std::vector<std::vector<detail::GateFacts>> facts(circuit.depth());
  for (std::uint32_t t = 0; t < circuit.depth(); ++t) {
    facts[t].resize(circuit.layers[t].size());
    for (std::size_t g = 0; g < circuit.layers[t].size(); ++g) {
      const Gate& gate = circuit.layers[t][g];
      detail::GateFacts f;
      if (gate.op == GateOp::Input)
        f.block_support.insert(detail::block_of_bit(gate.input_bit, w));
      if (gate.token_level) f.token_tainted = true;
      for (std::uint32_t ref : gate.inputs) {
        const auto& pf = facts[t - 1][ref];
        f.token_tainted = f.token_tainted || pf.token_tainted;
        f.block_support.insert(pf.block_support.begin(),
                               pf.block_support.end());
      }
      facts[t][g] = std::move(f);
    }
  }
  const std::uint32_t capacity = capacity_bits(d, mode);
  std::vector<CircuitCrossing> crossings;
  for (std::uint32_t t = 0; t < circuit.depth(); ++t) {
    std::uint32_t crossing_wires = 0;
    for (std::size_t g = 0; g < circuit.layers[t].size(); ++g) {
      const Gate& gate = circuit.layers[t][g];
      if (!gate.token_level) continue;
      if (gate.op == GateOp::Input) {
        const std::uint32_t block = detail::block_of_bit(gate.input_bit, w);
        if (block > trajectory[t])
          return CircuitViolation{t, CircuitRule::NonlocalDependence,
                                  "token gate reads block " +
                                      std::to_string(block) +
                                      " before the token reaches level " +
                                      std::to_string(block)};
      }
      for (std::uint32_t ref : gate.inputs) {
        const Gate& pred = circuit.layers[t - 1][ref];
        const auto& pf = facts[t - 1][ref];
        if (pred.token_level) {
          ++crossing_wires;
          continue;
        }
        if (pf.token_tainted)
          return CircuitViolation{t, CircuitRule::NonlocalDependence,
                                  "token state routed through unannotated "
                                  "gates"};
        for (std::uint32_t block : pf.block_support)
          if (block > trajectory[t])
            return CircuitViolation{
                t, CircuitRule::NonlocalDependence,
                "token gate depends on block " + std::to_string(block) +
                    " ahead of the token at level " +
                    std::to_string(trajectory[t])};
      }
    }
    if (t > 0 && trajectory[t] == trajectory[t - 1] + 1) {
      if (crossing_wires > capacity)
        return CircuitViolation{t, CircuitRule::CapacityExceeded,
                                std::to_string(crossing_wires) +
                                    " wires cross boundary " +
                                    std::to_string(trajectory[t - 1]) +
                                    ", capacity " + std::to_string(capacity)};
      crossings.push_back(
          CircuitCrossing{t, trajectory[t - 1], crossing_wires});
    }
  }

  // (d) the verdict must be token-carried at the leaf level
  if (trajectory.back() != hops)
    return CircuitViolation{circuit.depth() - 1, CircuitRule::BypassBoundary,
                            "token never reaches level " +
                                std::to_string(hops) +
                                " (trajectory tops out at " +
                                std::to_string(trajectory.back()) + ")"};
  for (std::uint32_t out : circuit.outputs)
    if (!circuit.layers.back()[out].token_level)
      return CircuitViolation{circuit.depth() - 1, CircuitRule::BypassBoundary,
                              "output is not carried by the token"};

  return CausalCertificate{std::move(trajectory), std::move(crossings),
                           circuit.depth()};
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

inline nlohmann::json circuit_to_json(const LayeredCircuit& circuit) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : circuit.layers) {
    nlohmann::json jl = nlohmann::json::array();
    for (const auto& gate : layer) {
      nlohmann::json jg{{"op", gate_op_name(gate.op)},
                        {"inputs", gate.inputs}};
      if (gate.op == GateOp::Input) jg["input_bit"] = gate.input_bit;
      if (gate.op == GateOp::Const) jg["value"] = gate.const_value ? 1 : 0;
      if (gate.token_level) jg["token_level"] = *gate.token_level;
      jl.push_back(std::move(jg));
    }
    layers.push_back(std::move(jl));
  }
  return nlohmann::json{{"layers", std::move(layers)},
                        {"outputs", circuit.outputs}};
}

inline LayeredCircuit circuit_from_json(const nlohmann::json& j) {
  try {
    LayeredCircuit circuit;
    for (const auto& jl : j.at("layers")) {
      std::vector<Gate> layer;
      for (const auto& jg : jl) {
        Gate gate;
        gate.op = gate_op_from_name(jg.at("op").get<std::string>());
        if (jg.contains("inputs"))
          gate.inputs = jg["inputs"].get<std::vector<std::uint32_t>>();
        if (jg.contains("input_bit"))
          gate.input_bit = jg["input_bit"].get<std::uint32_t>();
        if (jg.contains("value")) gate.const_value = jg["value"].get<int>() != 0;
        if (jg.contains("token_level"))
          gate.token_level = jg["token_level"].get<std::uint32_t>();
        layer.push_back(std::move(gate));
      }
      circuit.layers.push_back(std::move(layer));
    }
    circuit.outputs = j.at("outputs").get<std::vector<std::uint32_t>>();
    validate_circuit(circuit);
    return circuit;
  } catch (const nlohmann::json::exception& e) {
    throw HtrError(Err::ParseError, std::string("circuit file: ") + e.what());
  }
}

inline nlohmann::json check_result_to_json(const CheckResult& result) {
  if (const auto* cert = std::get_if<CausalCertificate>(&result)) {
    nlohmann::json crossings = nlohmann::json::array();
    for (const auto& c : cert->crossings)
      crossings.push_back(nlohmann::json{
          {"layer", c.layer}, {"boundary", c.boundary}, {"bits", c.bits}});
    return nlohmann::json{{"verdict", "IMPLEMENTS"},
                          {"depth", cert->depth},
                          {"token_trajectory", cert->trajectory},
                          {"crossings", std::move(crossings)}};
  }
  const auto& v = std::get<CircuitViolation>(result);
  return nlohmann::json{{"verdict", "VIOLATION"},
                        {"layer", v.layer},
                        {"rule", circuit_rule_name(v.rule)},
                        {"detail", v.detail}};
}

}  // namespace htr
