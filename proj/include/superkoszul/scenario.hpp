#pragma once

// Scenario ingestion and orchestration: JSON configurations describing a
// ring, bundle, connection, and section; named verification suites run over
// them; deterministic machine-readable reports.
//
// Config schema (series and form literals use the expression grammar):
//   {
//     "name": "example_a",                 // optional; defaults to the file stem
//     "ring": {"num_vars": 1, "truncation": 8},
//     "bundle": {"rank": 1},
//     "connection": {"gamma": [["(-1)*w1*(1+z1*w1)^-1*dz1"]]},  // optional; zero when absent
//     "section": {"tau": ["z1"], "u": [["1"]]},  // u optional; solver-derived when absent
//     "ideal": {"vars": [1]},
//     "checks": ["all"],                   // subset of all|chern|koszul|supertrace|twisted
//     "report": "out/report.json"          // optional default report path
//   }
// "all" expands to every suite applicable to the section: "koszul" requires a
// holomorphic section and is included only then; naming it explicitly for a
// section with antiholomorphic dependence is a load-time error.
//
// Reports list one record per check, ordered by check name.  The serialized
// JSON document is byte-identical across runs of the same scenario with the
// same library version; per-check wall-clock timing therefore appears only in
// the console summary, never in the document.

#include <optional>
#include <string>
#include <vector>

#include "superkoszul/twisted.hpp"

namespace skz {

inline constexpr const char* kVersion = "1.0.0";

// Schema violation in a scenario config; the message starts with the path of
// the offending field ("section.tau[0]: ...").
struct ScenarioError : RingError {
  using RingError::RingError;
};

struct Scenario {
  std::string name;
  RingSpec ring;
  BundleSpec bundle;
  // Connection matrix; absent means the zero connection.
  std::optional<FormMatrix> gamma;
  std::vector<TruncatedSeries> tau;
  std::optional<SeriesMatrix> u;
  IdealSpec ideal;
  // Canonical: sorted, deduplicated, "all" expanded to the applicable suites.
  std::vector<std::string> checks;
  std::optional<std::string> report_path;

  Connection connection() const;
  DualMultivector tau_covector() const;
};

// True when no component of tau involves an antiholomorphic variable.
bool holomorphic_section(const Scenario& s);

// Validates suite names against {all, chern, koszul, supertrace, twisted},
// expands "all", and rejects "koszul" for non-holomorphic sections; returns
// the canonical sorted list.  `field_path` prefixes error messages.
std::vector<std::string> canonical_checks(const std::vector<std::string>& requested,
                                          bool holomorphic_tau, const std::string& field_path);

// Parses and validates a config document.  `default_name` is used when the
// config carries no "name"; `truncation_override` replaces ring.truncation
// before any literal is parsed.  Throws ScenarioError with a field path on
// schema violations and ParseError (with the field path prepended) when a
// series or form literal is malformed.
Scenario load_scenario_text(const std::string& text, const std::string& default_name,
                            std::optional<int> truncation_override = std::nullopt);

// load_scenario_text on the contents of the file; the default name is the
// file stem.
Scenario load_scenario(const std::string& path,
                       std::optional<int> truncation_override = std::nullopt);

struct CheckRecord {
  std::string name;
  std::string status;  // "pass" | "fail" | "error"
  int verified_order = 0;
  std::optional<std::string> witness;  // first failing location, or error text
  double millis = 0.0;                 // console summary only; never serialized
};

struct Report {
  std::string scenario;
  RingSpec ring;
  int rank = 1;
  std::vector<CheckRecord> checks;  // ordered by check name
};

// Executes every requested suite.  Check records never throw: exceptions from
// pipeline construction become status "error" with the message as witness.
Report run(const Scenario& s);

bool all_passed(const Report& r);
bool any_error(const Report& r);
// 0 = every check passed, 1 = some check failed, 2 = some check errored.
int exit_status(const Report& r);

// Deterministic JSON document (alphabetical keys, two-space indent, trailing
// newline, no timing).
std::string report_json(const Report& r);

// Human-readable console summary with per-check timing.
std::string report_summary(const Report& r);

// "det(R) = ..." and "tr_s(psi) = ..." in canonical form syntax, one per
// line.  Throws NotFlat when the connection is not flat.
std::string emit_chern(const Scenario& s);

}  // namespace skz
