#include "pidual/report.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>

namespace pidual {

void DualityReport::add(DualityRecord record) {
  max_gap = std::max(max_gap, record.gap);
  if (record.provenance == Provenance::Heuristic) {
    max_heuristic_gap = std::max(max_heuristic_gap, record.gap);
  } else {
    max_certified_gap = std::max(max_certified_gap, record.gap);
  }
  if (record.failure) ++failures;
  records.push_back(std::move(record));
}

void DualityReport::merge(const DualityReport& other) {
  for (const DualityRecord& r : other.records) add(r);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_vector(const Vector& v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s;
}

Vector parse_vector(const std::string& csv) {
  std::vector<double> vals;
  std::string token;
  std::istringstream in(csv);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) vals.push_back(std::stod(token));
  }
  Vector v(static_cast<Index>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v[static_cast<Index>(i)] = vals[i];
  return v;
}

std::string witness_pair(const Vector& x, const Vector& y) {
  return "pair:" + format_vector(x) + "|" + format_vector(y);
}

std::string witness_decomposition(const Decomposition& d) {
  std::string s = "decomp:";
  for (size_t k = 0; k < d.terms.size(); ++k) {
    if (k) s += ';';
    s += format_vector(d.terms[k].first) + "|" + format_vector(d.terms[k].second);
  }
  s += ";cost=" + format_double(d.cost);
  return s;
}

std::string witness_lambda(const Vector& lambda) {
  return "lambda:" + format_vector(lambda);
}

std::string witness_target(const Vector& target) {
  return "target:" + format_vector(target);
}

std::string serialize_record(const DualityRecord& r) {
  std::string s;
  s += "family=" + r.family;
  s += " instance_id=" + r.instance_id;
  s += " lhs_lower=" + format_double(r.lhs_lower);
  s += " lhs_upper=" + format_double(r.lhs_upper);
  s += " rhs_lower=" + format_double(r.rhs_lower);
  s += " rhs_upper=" + format_double(r.rhs_upper);
  s += " gap=" + format_double(r.gap);
  s += " provenance=" + std::string(to_cstring(r.provenance));
  s += " seed=" + std::to_string(r.seed);
  s += " wall_ms=" + std::to_string(r.wall_ms);
  s += " report_version=" + std::to_string(kReportVersion);
  s += " failure=" + std::string(r.failure ? "1" : "0");
  if (!r.witness.empty()) s += " witness=" + r.witness;
  if (!r.note.empty()) s += " note=" + r.note;
  return s;
}

namespace {

Provenance parse_provenance(const std::string& s) {
  if (s == "exact") return Provenance::Exact;
  if (s == "extreme_enumeration") return Provenance::ExtremeEnumeration;
  return Provenance::Heuristic;
}

}  // namespace

DualityRecord parse_record(const std::string& line) {
  DualityRecord r;
  std::istringstream in(line);
  std::string token;
  while (in >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    std::string key = token.substr(0, eq);
    std::string value = token.substr(eq + 1);
    if (key == "family") r.family = value;
    else if (key == "instance_id") r.instance_id = value;
    else if (key == "lhs_lower") r.lhs_lower = std::stod(value);
    else if (key == "lhs_upper") r.lhs_upper = std::stod(value);
    else if (key == "rhs_lower") r.rhs_lower = std::stod(value);
    else if (key == "rhs_upper") r.rhs_upper = std::stod(value);
    else if (key == "gap") r.gap = std::stod(value);
    else if (key == "provenance") r.provenance = parse_provenance(value);
    else if (key == "seed") r.seed = std::stoull(value);
    else if (key == "wall_ms") r.wall_ms = std::stol(value);
    else if (key == "failure") r.failure = value == "1";
    else if (key == "witness") r.witness = value;
    else if (key == "note") r.note = value;
  }
  return r;
}

std::string serialize_report(const DualityReport& report,
                             const std::vector<std::string>& config_echo) {
  std::string out;
  for (const std::string& line : config_echo) out += "# config: " + line + "\n";
  for (const DualityRecord& r : report.records) out += serialize_record(r) + "\n";
  out += "summary records=" + std::to_string(report.records.size());
  out += " max_gap=" + format_double(report.max_gap);
  out += " max_certified_gap=" + format_double(report.max_certified_gap);
  out += " max_heuristic_gap=" + format_double(report.max_heuristic_gap);
  out += " failures=" + std::to_string(report.failures);
  out += " report_version=" + std::to_string(kReportVersion);
  out += "\n";
  return out;
}

ParsedReport parse_report(const std::string& text) {
  ParsedReport parsed;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# config: ", 0) == 0) {
      parsed.config_echo.push_back(line.substr(std::strlen("# config: ")));
      continue;
    }
    if (line.rfind("summary ", 0) == 0) continue;
    if (line[0] == '#') continue;
    parsed.report.add(parse_record(line));
  }
  return parsed;
}

std::string summarize_report(const DualityReport& report) {
  std::ostringstream out;
  out << "records: " << report.records.size() << "\n";
  out << "max gap: " << format_double(report.max_gap) << "\n";
  out << "max certified gap: " << format_double(report.max_certified_gap) << "\n";
  out << "max heuristic gap: " << format_double(report.max_heuristic_gap) << "\n";
  out << "failures: " << report.failures << "\n";
  return out.str();
}

}  // namespace pidual
