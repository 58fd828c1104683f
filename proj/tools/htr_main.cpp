// Command-line front end: instance generation, the canonical codec,
// sequential and causal runs, schedule search, information audits, circuit
// checks, and parameter sweeps. Every command is deterministic given its
// inputs and --seed; exit codes are 0 accept/ok, 1 reject-or-refute,
// 2 error-or-violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "htr/htr.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw htr::HtrError(htr::Err::IoError, "cannot open " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw htr::HtrError(htr::Err::ParseError, path + ": " + e.what());
  }
}

// temp-then-rename so partially written files never appear under the
// destination name.
void write_text_atomic(const std::string& path, const std::string& text) {
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw htr::HtrError(htr::Err::IoError, "cannot write " + path);
    out << text;
  }
  fs::rename(tmp, target);
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    write_text_atomic(out_path, text);
}

void emit_json(const std::string& out_path, const json& j) {
  emit(out_path, j.dump(2) + "\n");
}

htr::CapacityMode parse_mode(const std::string& name) {
  if (name == "routing") return htr::CapacityMode::RoutingOnly;
  if (name == "full") return htr::CapacityMode::Full;
  throw htr::HtrError(htr::Err::BadInput,
                      "capacity mode must be 'routing' or 'full'");
}

std::vector<std::uint32_t> parse_int_list(const std::string& csv) {
  std::vector<std::uint32_t> values;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ','))
    if (!item.empty())
      values.push_back(static_cast<std::uint32_t>(std::stoul(item)));
  return values;
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

struct Options {
  std::uint64_t seed = 0;
  std::string capacity = "routing";
  bool unsafe = false;
  std::string out = "-";

  std::uint32_t d = 2;
  std::uint32_t hops = 1;
  std::string family = "CHECKSUM";
  std::uint32_t target = 0;
  std::string instance_path;
  std::string payload_path;
  std::string schedule_path;
  std::string trace_path;
  std::string circuit_path;
  std::string mode = "sequential";
  std::string d_list = "2";
  std::string n_list;
  std::uint32_t level = 0;
  std::uint32_t ticks = 0;
  double i_exact = -1.0;
  double p_error = 0.0;
  std::string csv_path;
  std::string hex;
  std::uint32_t bit_len = 0;
};

int cmd_gen(const Options& opt) {
  const auto inst = htr::random_instance(
      opt.d, opt.hops, htr::family_from_name(opt.family), opt.seed);
  emit_json(opt.out, htr::instance_to_json(inst));
  return 0;
}

int cmd_encode(const Options& opt) {
  const auto inst = htr::instance_from_json(read_json_file(opt.instance_path));
  emit_json(opt.out, htr::payload_to_json(htr::encode(inst)));
  return 0;
}

int cmd_decode(const Options& opt) {
  const auto payload = htr::payload_from_json(read_json_file(opt.payload_path));
  const auto inst =
      htr::decode(payload, opt.d, opt.hops,
                  htr::family_from_name(opt.family), opt.target);
  emit_json(opt.out, htr::instance_to_json(inst));
  return 0;
}

int cmd_run(const Options& opt) {
  const auto inst = htr::instance_from_json(read_json_file(opt.instance_path));
  if (opt.mode == "sequential") {
    const auto trace = htr::run_sequential(inst);
    emit_json(opt.out, htr::trace_to_json(trace));
    return trace.outcome == htr::SeqOutcome::Accept ? 0 : 1;
  }
  if (opt.mode != "causal")
    throw htr::HtrError(htr::Err::BadInput,
                        "mode must be 'sequential' or 'causal'");
  std::vector<htr::AnyAction> actions;
  if (opt.schedule_path.empty()) {
    for (std::uint32_t i = 0; i < inst.hops; ++i)
      actions.emplace_back(htr::ActionKind::Hop);
  } else {
    actions = htr::actions_from_json(read_json_file(opt.schedule_path),
                                     opt.unsafe);
  }
  const auto trace =
      htr::run_actions(inst, actions, parse_mode(opt.capacity), opt.unsafe);
  emit_json(opt.out, htr::causal_trace_to_json(trace));
  switch (trace.outcome) {
    case htr::RunOutcome::Accept: return 0;
    case htr::RunOutcome::Reject:
    case htr::RunOutcome::Incomplete: return 1;
    case htr::RunOutcome::Violation: return 2;
  }
  return 2;
}

int cmd_sweep(const Options& opt) {
  const auto mode = parse_mode(opt.capacity);
  const auto family = htr::family_from_name(opt.family);
  std::string csv = "d,N,family,T_sequential,T_min_causal,H_M,"
                    "cutset_T_lower,depth_canonical\n";
  for (std::uint32_t d : parse_int_list(opt.d_list)) {
    for (std::uint32_t n : parse_int_list(opt.n_list)) {
      // Seeded accepting instance: draw the address, then pick the target
      // that completes it.
      auto inst = htr::random_instance(d, n, family,
                                       htr::mix_seed(opt.seed, d, n));
      if (family == htr::Family::Checksum) {
        std::uint64_t sum = 0;
        for (auto digit : inst.address) sum += digit;
        inst.target = static_cast<std::uint32_t>(sum % d);
      } else {
        std::uint32_t par = 0;
        for (auto digit : inst.address)
          par ^= htr::digit_parity(digit) ? 1u : 0u;
        inst.target = par;
      }
      const auto seq = htr::run_sequential(inst);
      std::string min_causal;
      if (n <= 4) {
        const auto best = htr::min_causal_time(inst, n + 2);
        min_causal = best ? std::to_string(*best) : "NONE";
      }
      std::string depth;
      if (d == 2)
        depth = std::to_string(
            htr::build_canonical_circuit(d, n, family, inst.target).depth());
      csv += std::to_string(d) + "," + std::to_string(n) + "," +
             htr::family_name(family) + "," +
             std::to_string(seq.predicate_evals()) + "," + min_causal + "," +
             format_double(htr::message_entropy(d, n)) + "," +
             std::to_string(htr::time_lower_bound(d, n, 0.0, mode)) + "," +
             depth + "\n";
    }
  }
  emit(opt.out, csv);
  return 0;
}

// Rebuilds enough of a causal trace from its JSON export to audit it.
htr::CausalTrace trace_from_json(const json& j) {
  if (!j.contains("type") || j["type"] != "causal")
    throw htr::HtrError(htr::Err::ParseError, "expected a causal trace file");
  try {
    htr::CausalTrace trace;
    trace.d = j.at("d").get<std::uint32_t>();
    trace.hops = j.at("N").get<std::uint32_t>();
    trace.family = htr::family_from_name(j.at("family").get<std::string>());
    trace.target = j.at("target").get<std::uint32_t>();
    trace.world.tick = j.at("T").get<std::uint32_t>();
    std::uint32_t slot = 0;
    for (const auto& row : j.at("ticks")) {
      if (row.contains("crossing") && !row["crossing"].is_null())
        trace.world.crossings.push_back(htr::Crossing{
            slot, row["crossing"].at("boundary").get<std::uint32_t>(),
            row["crossing"].at("bits").get<std::uint32_t>()});
      ++slot;
    }
    return trace;
  } catch (const json::exception& e) {
    throw htr::HtrError(htr::Err::ParseError,
                        std::string("trace file: ") + e.what());
  }
}

int cmd_audit(const Options& opt) {
  const auto trace = trace_from_json(read_json_file(opt.trace_path));
  std::optional<double> i_exact;
  if (opt.i_exact >= 0.0) i_exact = opt.i_exact;
  const auto report = htr::audit_run(trace, parse_mode(opt.capacity), i_exact,
                                     opt.p_error);
  emit_json(opt.out, htr::report_to_json(report));
  return report.violation ? 1 : 0;
}

int cmd_mi(const Options& opt) {
  const auto family = htr::family_from_name(opt.family);
  const auto mode = parse_mode(opt.capacity);
  htr::Schedule schedule;
  std::string schedule_id;
  if (opt.schedule_path.empty()) {
    schedule = htr::Schedule::canonical(opt.hops);
    while (schedule.length() < opt.ticks)
      schedule.actions.push_back(htr::ActionKind::Noop);
    schedule_id = "canonical";
  } else {
    for (const auto& any :
         htr::actions_from_json(read_json_file(opt.schedule_path), false))
      schedule.actions.push_back(std::get<htr::ActionKind>(any));
    schedule_id = fs::path(opt.schedule_path).stem().string();
  }
  const double mi = htr::exact_mutual_information(
      opt.d, opt.hops, family, opt.target, schedule, opt.level, opt.ticks,
      mode);
  json j{{"d", opt.d},
         {"N", opt.hops},
         {"family", htr::family_name(family)},
         {"target", opt.target},
         {"level", opt.level},
         {"T", opt.ticks},
         {"schedule_id", schedule_id},
         {"I_exact", mi},
         {"H_M", htr::message_entropy(opt.d, opt.hops)},
         {"cutset_budget", htr::cutset_budget(opt.ticks, opt.d, mode)}};
  emit_json(opt.out, j);
  if (!opt.csv_path.empty()) {
    std::string csv = "d,N,T,schedule_id,level,I_exact,cutset_budget\n";
    for (std::uint32_t t = 0; t <= opt.ticks; ++t) {
      const double mi_t = htr::exact_mutual_information(
          opt.d, opt.hops, family, opt.target, schedule, opt.level, t, mode);
      csv += std::to_string(opt.d) + "," + std::to_string(opt.hops) + "," +
             std::to_string(t) + "," + schedule_id + "," +
             std::to_string(opt.level) + "," + format_double(mi_t) + "," +
             format_double(htr::cutset_budget(t, opt.d, mode)) + "\n";
    }
    write_text_atomic(opt.csv_path, csv);
  }
  return 0;
}

int cmd_circuit_build(const Options& opt, bool flat) {
  const auto family = htr::family_from_name(opt.family);
  const auto circuit =
      flat ? htr::build_flat_circuit(opt.d, opt.hops, family, opt.target)
           : htr::build_canonical_circuit(opt.d, opt.hops, family, opt.target);
  emit_json(opt.out, htr::circuit_to_json(circuit));
  return 0;
}

int cmd_circuit_check(const Options& opt) {
  const auto circuit = htr::circuit_from_json(read_json_file(opt.circuit_path));
  const auto result = htr::check_implements_htr(
      circuit, opt.d, opt.hops, htr::family_from_name(opt.family), opt.target,
      parse_mode(opt.capacity));
  emit_json(opt.out, htr::check_result_to_json(result));
  return htr::implements(result) ? 0 : 1;
}

int cmd_circuit_eval(const Options& opt) {
  const auto circuit = htr::circuit_from_json(read_json_file(opt.circuit_path));
  htr::Bits payload;
  if (!opt.payload_path.empty())
    payload = htr::payload_from_json(read_json_file(opt.payload_path));
  else if (!opt.hex.empty())
    payload = htr::Bits::from_hex(opt.hex, opt.bit_len);
  else
    throw htr::HtrError(htr::Err::BadInput, "need --payload or --hex");
  const auto bits = htr::evaluate_circuit(circuit, payload);
  std::string text;
  for (bool b : bits) text += b ? '1' : '0';
  emit(opt.out, text + "\n");
  return bits.size() == 1 ? (bits[0] ? 0 : 1) : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical temporal relay toolkit"};
  app.require_subcommand(1);
  Options opt;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", opt.seed, "deterministic seed");
    sub->add_option("--capacity-mode", opt.capacity,
                    "boundary capacity accounting: routing | full");
    sub->add_flag("--unsafe", opt.unsafe,
                  "permit schedule actions that violate the causal rules");
    sub->add_option("--out", opt.out, "output file ('-' for stdout)");
  };

  std::function<int()> action;

  auto* gen = app.add_subcommand("gen", "generate a seeded random instance");
  gen->add_option("--d", opt.d, "branching factor")->required();
  gen->add_option("--N", opt.hops, "hop count")->required();
  gen->add_option("--family", opt.family, "CHECKSUM | PARITY");
  add_common(gen);
  gen->callback([&] { action = [&] { return cmd_gen(opt); }; });

  auto* encode = app.add_subcommand("encode", "instance file -> payload file");
  encode->add_option("--instance", opt.instance_path)->required();
  add_common(encode);
  encode->callback([&] { action = [&] { return cmd_encode(opt); }; });

  auto* decode = app.add_subcommand("decode", "payload file -> instance file");
  decode->add_option("--payload", opt.payload_path)->required();
  decode->add_option("--d", opt.d)->required();
  decode->add_option("--N", opt.hops)->required();
  decode->add_option("--family", opt.family);
  decode->add_option("--target", opt.target);
  add_common(decode);
  decode->callback([&] { action = [&] { return cmd_decode(opt); }; });

  auto* run = app.add_subcommand("run", "execute an instance");
  run->add_option("--instance", opt.instance_path)->required();
  run->add_option("--mode", opt.mode, "sequential | causal");
  run->add_option("--schedule", opt.schedule_path,
                  "schedule file (causal mode; default canonical)");
  add_common(run);
  run->callback([&] { action = [&] { return cmd_run(opt); }; });

  auto* sweep = app.add_subcommand("sweep", "emit a CSV over (d, N) grids");
  sweep->add_option("--d-list", opt.d_list, "comma-separated d values");
  sweep->add_option("--N-list", opt.n_list, "comma-separated N values");
  sweep->add_option("--family", opt.family);
  add_common(sweep);
  sweep->callback([&] { action = [&] { return cmd_sweep(opt); }; });

  auto* audit = app.add_subcommand("audit", "audit a causal trace file");
  audit->add_option("--trace", opt.trace_path)->required();
  audit->add_option("--i-exact", opt.i_exact,
                    "externally computed mutual information to check");
  audit->add_option("--p-error", opt.p_error, "audited error probability");
  add_common(audit);
  audit->callback([&] { action = [&] { return cmd_audit(opt); }; });

  auto* mi = app.add_subcommand(
      "mi", "exact mutual information at a level and time");
  mi->add_option("--d", opt.d)->required();
  mi->add_option("--N", opt.hops)->required();
  mi->add_option("--family", opt.family);
  mi->add_option("--target", opt.target);
  mi->add_option("--level", opt.level)->required();
  mi->add_option("--T", opt.ticks)->required();
  mi->add_option("--schedule", opt.schedule_path);
  mi->add_option("--csv", opt.csv_path, "also sweep T into a CSV file");
  add_common(mi);
  mi->callback([&] { action = [&] { return cmd_mi(opt); }; });

  auto* circuit = app.add_subcommand("circuit", "layered circuit operations");
  circuit->require_subcommand(1);

  auto* build = circuit->add_subcommand("build", "canonical pipeline circuit");
  build->add_option("--d", opt.d)->required();
  build->add_option("--N", opt.hops)->required();
  build->add_option("--family", opt.family);
  build->add_option("--target", opt.target);
  add_common(build);
  build->callback([&] { action = [&] { return cmd_circuit_build(opt, false); }; });

  auto* flat = circuit->add_subcommand(
      "flat", "logically parallel counterexample circuit");
  flat->add_option("--d", opt.d)->required();
  flat->add_option("--N", opt.hops)->required();
  flat->add_option("--family", opt.family);
  flat->add_option("--target", opt.target);
  add_common(flat);
  flat->callback([&] { action = [&] { return cmd_circuit_build(opt, true); }; });

  auto* check = circuit->add_subcommand("check",
                                        "certify or refute a circuit");
  check->add_option("--circuit", opt.circuit_path)->required();
  check->add_option("--d", opt.d)->required();
  check->add_option("--N", opt.hops)->required();
  check->add_option("--family", opt.family);
  check->add_option("--target", opt.target);
  add_common(check);
  check->get_option("--capacity-mode")->default_str("full");
  check->preparse_callback([&](std::size_t) { opt.capacity = "full"; });
  check->callback([&] { action = [&] { return cmd_circuit_check(opt); }; });

  auto* eval = circuit->add_subcommand("eval", "evaluate a circuit file");
  eval->add_option("--circuit", opt.circuit_path)->required();
  eval->add_option("--payload", opt.payload_path);
  eval->add_option("--hex", opt.hex);
  eval->add_option("--bit-len", opt.bit_len);
  add_common(eval);
  eval->callback([&] { action = [&] { return cmd_circuit_eval(opt); }; });

  CLI11_PARSE(app, argc, argv);

  try {
    return action ? action() : 2;
  } catch (const htr::HtrError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
