#ifndef L4NORM_REPORT_HPP
#define L4NORM_REPORT_HPP

#include <algorithm>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

namespace l4norm {

/// Numbers in reports and CSV use 17 significant digits.
inline std::string num(double v) { return fmt::format("{:.17g}", v); }

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// Non-gating checks are reported but never fail a run.
  bool gating = true;
  std::string note;
};

inline Check make_check(std::string name, double value, double tol, bool gating = true,
                        std::string note = {}) {
  return {std::move(name), value, tol, value < tol, gating, std::move(note)};
}

struct CsvBlock {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& os) const {
    auto join = [&](const std::vector<std::string>& cells) {
      std::string line;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
      }
      return line;
    };
    os << join(header) << '\n';
    for (const auto& r : rows) os << join(r) << '\n';
  }
};

/// A closed-form formula that disagrees with its oracle beyond truncation order.
struct ErratumFlag {
  std::string id;
  std::string location;
  std::string perturbation;
  std::string order;  // "zeroth-order" or "first-order"
  double d_full = 0.0;
  double d_half = 0.0;
  std::string detail;
};

struct StageReport {
  std::string stage;
  std::vector<Check> checks;
  std::vector<CsvBlock> tables;
  std::vector<ErratumFlag> errata;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const Check& c) { return c.pass || !c.gating; });
  }
};

struct VerificationReport {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<StageReport> stages;

  bool passed() const {
    return std::all_of(stages.begin(), stages.end(), [](const auto& s) { return s.passed(); });
  }

  std::optional<std::string> first_failing_stage() const {
    for (const auto& s : stages) {
      if (!s.passed()) return s.stage;
    }
    return std::nullopt;
  }

  const StageReport* find(const std::string& stage) const {
    for (const auto& s : stages) {
      if (s.stage == stage) return &s;
    }
    return nullptr;
  }

  /// "key: value" lines, then per stage its checks, errata and CSV blocks.
  void write(std::ostream& os) const {
    for (const auto& [k, v] : header) os << k << ": " << v << '\n';
    os << "result: " << (passed() ? "pass" : "fail") << '\n';
    for (const auto& s : stages) {
      os << '\n' << "stage: " << s.stage << '\n';
      os << "stage_result: " << (s.passed() ? "pass" : "fail") << '\n';
      for (const auto& c : s.checks) {
        os << "check." << c.name << ": " << num(c.value) << " tol " << num(c.tolerance) << ' '
           << (c.pass ? "pass" : "fail") << (c.gating ? "" : " (informational)");
        if (!c.note.empty()) os << " # " << c.note;
        os << '\n';
      }
      for (const auto& e : s.errata) {
        os << "erratum." << e.id << ": " << e.order << " in " << e.perturbation << " at "
           << e.location << "; d(h) " << num(e.d_full) << ", d(h/2) " << num(e.d_half);
        if (!e.detail.empty()) os << "; " << e.detail;
        os << '\n';
      }
      for (const auto& t : s.tables) {
        os << "csv: " << t.name << '\n';
        t.write(os);
        os << "end_csv\n";
      }
    }
  }
};

}  // namespace l4norm

#endif  // L4NORM_REPORT_HPP
