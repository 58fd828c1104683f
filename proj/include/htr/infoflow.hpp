#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "htr/causal.hpp"
#include "htr/instance.hpp"

namespace htr {

// ---------------------------------------------------------------------------
// Information-flow accounting
// ---------------------------------------------------------------------------
//
// The address is a uniform message over [d]^N, so H(M) = N log2 d bits, and
// a run of T ticks can deliver at most T times the minimum boundary
// capacity. These helpers make that arithmetic, the Fano residual, and the
// resulting time lower bound executable, and compute the delivered mutual
// information exactly by enumerating every message (the protocol is
// deterministic given the message, so I(M; view) = H(view)).

inline double message_entropy(std::uint32_t d, std::uint32_t hops) {
  if (d < 2 || hops < 1)
    throw HtrError(Err::BadInput, "need d >= 2 and N >= 1");
  return static_cast<double>(hops) * std::log2(static_cast<double>(d));
}

// min_i C_i; boundaries are homogeneous, so this is the capacity itself.
inline std::uint32_t min_capacity(std::uint32_t d, CapacityMode mode) {
  if (d < 2) throw HtrError(Err::BadInput, "need d >= 2");
  return capacity_bits(d, mode);
}

inline double cutset_budget(std::uint32_t ticks, std::uint32_t d,
                            CapacityMode mode) {
  return static_cast<double>(ticks) * min_capacity(d, mode);
}

inline double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0)
    throw HtrError(Err::DomainError, "probability outside [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;  // continuity limit
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// h(P_e) + P_e log2(|M| - 1): the residual conditional entropy tolerated at
// error probability P_e over a message set of the given size.
inline double fano_residual(double p_error, double message_count) {
  if (message_count < 2.0)
    throw HtrError(Err::BadInput, "message set must have at least 2 elements");
  return binary_entropy(p_error) +
         p_error * std::log2(message_count - 1.0);
}

namespace detail {

// log2(d^N - 1) without overflowing; exact when d^N fits a double, and the
// correction term drops below double precision past ~2^60 anyway.
inline double log2_pow_minus_one(std::uint32_t d, std::uint32_t hops) {
  const double l = static_cast<double>(hops) * std::log2(static_cast<double>(d));
  if (l <= 60.0)
    return std::log2(std::pow(static_cast<double>(d),
                              static_cast<double>(hops)) -
                     1.0);
  return l;
}

}  // namespace detail

// Finite form of the time bound: T >= ceil((H(M) - fano) / min C), floored
// at zero. With P_e = 0 and power-of-two d this is exactly N.
inline std::int64_t time_lower_bound(std::uint32_t d, std::uint32_t hops,
                                     double p_error, CapacityMode mode) {
  const double h_m = message_entropy(d, hops);
  const double residual =
      binary_entropy(p_error) + p_error * detail::log2_pow_minus_one(d, hops);
  const double raw = (h_m - residual) / min_capacity(d, mode);
  if (raw <= 0.0) return 0;
  return static_cast<std::int64_t>(std::ceil(raw));
}

// ---------------------------------------------------------------------------
// Exact mutual information by enumeration
// ---------------------------------------------------------------------------

constexpr std::uint64_t kEnumerationCap = 4096;

inline std::uint64_t message_count_checked(std::uint32_t d,
                                           std::uint32_t hops) {
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < hops; ++i) {
    count *= d;
    if (count > kEnumerationCap)
      throw HtrError(Err::EnumerationTooLarge,
                     "d^N exceeds the enumeration cap of " +
                         std::to_string(kEnumerationCap));
  }
  return count;
}

inline double entropy_of_counts(const std::map<std::string, std::uint64_t>& classes,
                                std::uint64_t total) {
  double h = 0.0;
  for (const auto& [key, count] : classes) {
    const double p = static_cast<double>(count) / static_cast<double>(total);
    h += p * std::log2(static_cast<double>(total) /
                       static_cast<double>(count));
  }
  return h;
}

namespace detail {

inline std::string view_key(const LevelView& view, std::uint32_t t_cut) {
  // Nothing is visible until the handoff that delivered the transcript has
  // happened; the root's by-fiat knowledge was never delivered at all.
  if (!view.delivered_tick || *view.delivered_tick >= t_cut) return {};
  std::string key;
  for (const auto& rec : view.records) {
    if (rec.tick >= t_cut) break;
    key += std::to_string(rec.tick);
    key += ':';
    key += std::to_string(rec.digit);
    if (rec.state) {
      key += 's';
      key += std::to_string(*rec.state);
    }
    key += ';';
  }
  if (view.verdict && view.verdict->tick < t_cut) {
    key += view.verdict->accepted ? "A@" : "R@";
    key += std::to_string(view.verdict->tick);
  }
  return key;
}

}  // namespace detail

// Shannon entropy of the named level's received view after T ticks of the
// fixed schedule, under a uniform message. Enumerates all d^N addresses;
// the target and family stay fixed, so the view is a deterministic function
// of the address and H(view) is exactly I(M; view).
inline double exact_mutual_information(std::uint32_t d, std::uint32_t hops,
                                       Family family, std::uint32_t target,
                                       const Schedule& schedule,
                                       std::uint32_t level, std::uint32_t ticks,
                                       CapacityMode mode =
                                           CapacityMode::RoutingOnly) {
  if (level > hops)
    throw HtrError(Err::BadInput, "level exceeds N");
  if (schedule.length() < ticks)
    throw HtrError(Err::BadInput, "schedule shorter than T");
  const std::uint64_t total = message_count_checked(d, hops);

  std::map<std::string, std::uint64_t> classes;
  std::vector<std::uint32_t> address(hops, 0);
  for (std::uint64_t index = 0; index < total; ++index) {
    const HtrInstance inst =
        new_instance(d, hops, address, family, target);
    const CausalTrace trace = run_schedule(inst, schedule, mode);
    classes[detail::view_key(trace.world.views[level], ticks)] += 1;
    // odometer over [d]^N, last digit fastest
    for (std::size_t pos = address.size(); pos-- > 0;) {
      if (++address[pos] < d) break;
      address[pos] = 0;
    }
  }
  return entropy_of_counts(classes, total);
}

// ---------------------------------------------------------------------------
// Run audits
// ---------------------------------------------------------------------------

struct InfoReport {
  double h_m = 0.0;               // message entropy, bits
  std::uint32_t min_cap = 0;      // bits per tick
  std::uint32_t ticks = 0;        // T
  double budget = 0.0;            // T * min capacity
  double fano = 0.0;              // residual at the audited error rate
  std::int64_t t_lower = 0;       // time bound at that rate
  std::optional<double> i_exact;  // externally computed, when supplied
  std::uint64_t delivered_total = 0;
  std::vector<std::uint64_t> boundary_totals;
  bool violation = false;
  std::vector<std::string> findings;
};

// Checks a finished run's ledger against the per-tick capacity and the
// cut-set budget. An externally computed mutual information may be passed
// in to be checked against the budget as well.
inline InfoReport audit_run(const CausalTrace& trace, CapacityMode mode,
                            std::optional<double> i_exact = std::nullopt,
                            double p_error = 0.0) {
  InfoReport report;
  report.h_m = message_entropy(trace.d, trace.hops);
  report.min_cap = min_capacity(trace.d, mode);
  report.ticks = trace.world.tick;
  report.budget = cutset_budget(report.ticks, trace.d, mode);
  report.fano = p_error == 0.0
                    ? 0.0
                    : fano_residual(p_error,
                                    std::pow(static_cast<double>(trace.d),
                                             static_cast<double>(trace.hops)));
  report.t_lower = time_lower_bound(trace.d, trace.hops, p_error, mode);
  report.i_exact = i_exact;
  report.boundary_totals.assign(trace.hops, 0);
  for (const auto& crossing : trace.world.crossings) {
    report.delivered_total += crossing.bits;
    if (crossing.boundary < trace.hops)
      report.boundary_totals[crossing.boundary] += crossing.bits;
    if (crossing.bits > report.min_cap) {
      report.violation = true;
      report.findings.push_back(
          "CAPACITY_EXCEEDED: " + std::to_string(crossing.bits) +
          " bits across boundary " + std::to_string(crossing.boundary) +
          " at tick " + std::to_string(crossing.tick) + ", capacity " +
          std::to_string(report.min_cap));
    }
  }
  for (std::uint32_t boundary = 0; boundary < trace.hops; ++boundary)
    if (static_cast<double>(report.boundary_totals[boundary]) >
        report.budget + 1e-9) {
      report.violation = true;
      report.findings.push_back(
          "BUDGET_EXCEEDED: boundary " + std::to_string(boundary) +
          " carried " + std::to_string(report.boundary_totals[boundary]) +
          " bits, budget " + std::to_string(report.budget));
    }
  if (i_exact && *i_exact > report.budget + 1e-9) {
    report.violation = true;
    report.findings.push_back("CUTSET_EXCEEDED: I_exact above T * min C");
  }
  return report;
}

inline nlohmann::json report_to_json(const InfoReport& report) {
  nlohmann::json j{{"H_M", report.h_m},
                   {"min_capacity", report.min_cap},
                   {"T", report.ticks},
                   {"cutset_budget", report.budget},
                   {"fano_residual", report.fano},
                   {"T_lower", report.t_lower},
                   {"delivered_total", report.delivered_total},
                   {"boundary_totals", report.boundary_totals},
                   {"violation", report.violation},
                   {"findings", report.findings}};
  if (report.i_exact) j["I_exact"] = *report.i_exact;
  return j;
}

}  // namespace htr
