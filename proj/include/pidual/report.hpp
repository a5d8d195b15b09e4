#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pidual/bracket.hpp"
#include "pidual/types.hpp"

namespace pidual {

inline constexpr int kReportVersion = 1;

// One verified identity instance: two independently computed norm brackets
// and their gap. Witnesses are serialized inline so a standalone pass can
// re-verify them against rebuilt instances.
struct DualityRecord {
  std::string family;
  std::string instance_id;
  double lhs_lower = 0.0, lhs_upper = 0.0;
  double rhs_lower = 0.0, rhs_upper = 0.0;
  double gap = 0.0;  // |lhs midpoint - rhs midpoint|
  Provenance provenance = Provenance::Heuristic;
  std::uint64_t seed = 0;
  long wall_ms = 0;
  std::string witness;
  bool failure = false;
  std::string note;
};

struct DualityReport {
  std::vector<DualityRecord> records;
  double max_gap = 0.0;
  double max_certified_gap = 0.0;  // over exact / extreme-enumeration records
  double max_heuristic_gap = 0.0;
  int failures = 0;

  void add(DualityRecord record);
  void merge(const DualityReport& other);
  bool ok() const { return failures == 0; }
};

// Fixed 17-significant-digit formatting; reports must be byte-stable.
std::string format_double(double v);
std::string format_vector(const Vector& v);  // comma separated
Vector parse_vector(const std::string& csv);

// Witness payload helpers. A witness string is '+'-joined sections of the
// form kind:payload with kinds pair, decomp, lambda, target, value.
std::string witness_pair(const Vector& x, const Vector& y);
std::string witness_decomposition(const Decomposition& d);
std::string witness_lambda(const Vector& lambda);
std::string witness_target(const Vector& target);

std::string serialize_record(const DualityRecord& r);
DualityRecord parse_record(const std::string& line);

// Machine-readable report: one record per line plus a summary footer.
std::string serialize_report(const DualityReport& report,
                             const std::vector<std::string>& config_echo);
struct ParsedReport {
  DualityReport report;
  std::vector<std::string> config_echo;
};
ParsedReport parse_report(const std::string& text);

// Human-readable summary table.
std::string summarize_report(const DualityReport& report);

}  // namespace pidual
