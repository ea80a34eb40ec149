#pragma once

// Report assembly and rendering (json, csv, text).

#include "suites.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace tautsig::cli {

struct Report {
  Json config;
  std::vector<SuiteResult> suites;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& s : suites) n += s.assertions.size();
    return n;
  }

  std::size_t failed() const {
    std::size_t n = 0;
    for (const auto& s : suites)
      for (const auto& a : s.assertions) n += !a.passed;
    return n;
  }

  bool passed() const { return failed() == 0; }

  const Assertion* first_failure(std::string* suite = nullptr) const {
    for (const auto& s : suites)
      for (const auto& a : s.assertions)
        if (!a.passed) {
          if (suite) *suite = s.name;
          return &a;
        }
    return nullptr;
  }

  Json to_json() const {
    Json j;
    j["tool"] = "tautsig";
    j["config"] = config;
    j["suites"] = Json::array();
    for (const auto& s : suites) {
      Json sj;
      sj["name"] = s.name;
      sj["passed"] = s.passed();
      sj["info"] = s.info;
      sj["assertions"] = Json::array();
      for (const auto& a : s.assertions) sj["assertions"].push_back(a.to_json());
      j["suites"].push_back(sj);
    }
    j["summary"] = {{"assertions", total()}, {"failed", failed()}, {"passed", passed()}};
    return j;
  }
};

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline void write_json(std::ostream& os, const Report& r) { os << r.to_json().dump(2) << "\n"; }

inline void write_csv(std::ostream& os, const Report& r) {
  os << "suite,anchor,identity,inputs,outcome,passed\n";
  for (const auto& s : r.suites)
    for (const auto& a : s.assertions)
      os << detail::csv_field(s.name) << "," << detail::csv_field(a.anchor) << "," << detail::csv_field(a.identity)
         << "," << detail::csv_field(a.inputs.dump()) << "," << detail::csv_field(a.outcome.dump()) << ","
         << (a.passed ? "true" : "false") << "\n";
}

/// Summary table: one row per suite, then every failing assertion.
inline void write_text(std::ostream& os, const Report& r) {
  os << std::left << std::setw(16) << "suite" << std::right << std::setw(8) << "checks" << std::setw(8) << "failed"
     << std::setw(8) << "N" << "  result\n";
  os << std::string(48, '-') << "\n";
  for (const auto& s : r.suites) {
    std::size_t failed = 0;
    for (const auto& a : s.assertions) failed += !a.passed;
    std::string n = s.info.contains("final_cutoff") ? std::to_string(s.info.at("final_cutoff").get<int>()) : "-";
    os << std::left << std::setw(16) << s.name << std::right << std::setw(8) << s.assertions.size() << std::setw(8)
       << failed << std::setw(8) << n << "  " << (failed ? "FAIL" : "PASS") << "\n";
  }
  os << std::string(48, '-') << "\n";
  os << "total " << r.total() << " checks, " << r.failed() << " failed\n";
  for (const auto& s : r.suites)
    for (const auto& a : s.assertions)
      if (!a.passed)
        os << "  FAIL " << s.name << "/" << a.anchor << " " << a.inputs.dump() << " -> " << a.outcome.dump() << "\n";
}

inline void write_report(std::ostream& os, const Report& r, const std::string& format) {
  if (format == "json") write_json(os, r);
  else if (format == "csv") write_csv(os, r);
  else write_text(os, r);
}

inline std::string describe(const SuiteInfo& s) {
  std::ostringstream os;
  os << s.name << "\n  " << s.summary << "\n  anchors:\n";
  for (const auto& a : s.anchors) os << "    " << a << "\n";
  return os.str();
}

}  // namespace tautsig::cli
