#include "superkoszul/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <utility>

namespace skz {

namespace {

using nlohmann::json;

// ------------------------------------------------------- schema navigation --

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

std::string index_path(const std::string& parent, std::size_t i) {
  return parent + "[" + std::to_string(i) + "]";
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw ScenarioError(path + ": " + what);
}

const json& require_object(const json& node, const std::string& path) {
  if (!node.is_object()) schema_error(path, "expected an object");
  return node;
}

const json& require_array(const json& node, const std::string& path) {
  if (!node.is_array()) schema_error(path, "expected an array");
  return node;
}

const json& require_member(const json& obj, const std::string& parent, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(join_path(parent, key), "missing required field");
  return *it;
}

int require_int(const json& node, const std::string& path, int lo, int hi) {
  if (!node.is_number_integer()) schema_error(path, "expected an integer");
  const std::int64_t v = node.get<std::int64_t>();
  if (v < lo || v > hi) {
    schema_error(path, "expected an integer in [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "], got " + std::to_string(v));
  }
  return static_cast<int>(v);
}

std::string require_string(const json& node, const std::string& path) {
  if (!node.is_string()) schema_error(path, "expected a string");
  return node.get<std::string>();
}

void reject_unknown_keys(const json& obj, const std::string& parent,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) schema_error(join_path(parent, key), "unknown key");
  }
}

// ------------------------------------------------- literal parsing wrappers --

// Strip the " (at offset N)" suffix ParseError appends, so re-throwing with a
// field path does not duplicate it.
std::string strip_offset_suffix(const std::string& message) {
  const std::size_t pos = message.rfind(" (at offset ");
  return pos == std::string::npos ? message : message.substr(0, pos);
}

TruncatedSeries parse_series_at(const std::string& text, const RingSpec& ring,
                                const std::string& path) {
  try {
    return parse_series(text, ring);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + strip_offset_suffix(e.what()), e.offset);
  }
}

Form parse_form_at(const std::string& text, const RingSpec& ring, const std::string& path) {
  try {
    return parse_form(text, ring);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + strip_offset_suffix(e.what()), e.offset);
  }
}

// --------------------------------------------------- deterministic sampling --

// Pseudorandom algebra elements for the property suites.  mt19937_64 output
// is fully specified by the standard and the draws below avoid
// std::uniform_int_distribution (whose mapping is implementation-defined), so
// reports stay byte-identical across platforms.
class Sampler {
 public:
  Sampler(const RingSpec& ring, std::uint64_t seed) : ring_(ring), rng_(seed) {}

  int pick(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  Rational coefficient() {
    int num = pick(-9, 9);
    if (num == 0) num = 1;
    return Rational(num, pick(1, 4));
  }

  Monomial monomial() {
    Monomial m(ring_.num_vars);
    int budget = std::min(ring_.truncation, 4);
    for (std::size_t slot = 0; slot < m.e.size(); ++slot) {
      const int e = pick(0, std::min(budget, 2));
      m.e[slot] = static_cast<std::uint8_t>(e);
      budget -= e;
    }
    return m;
  }

  TruncatedSeries series(int terms) {
    TruncatedSeries s = TruncatedSeries::zero(ring_);
    for (int i = 0; i < terms; ++i) s.add_term(monomial(), coefficient());
    return s;
  }

  Form form(int parts) {
    Form f(ring_);
    const std::uint32_t top = (1u << ring_.num_vars) - 1u;
    for (int i = 0; i < parts; ++i) {
      FormKey key{static_cast<std::uint32_t>(pick(0, static_cast<int>(top))),
                  static_cast<std::uint32_t>(pick(0, static_cast<int>(top)))};
      f.add_part(key, series(2));
    }
    return f;
  }

  Multivector multivector(const BundleSpec& b, int parts) {
    Multivector v(b, ring_);
    const int top = (1 << b.rank) - 1;
    for (int i = 0; i < parts; ++i) {
      v.add_part(static_cast<ExtMask>(pick(0, top)), form(2));
    }
    return v;
  }

  EndMatrix matrix(const BundleSpec& b, int entries) {
    EndMatrix m(b, ring_);
    const int top = (1 << b.rank) - 1;
    for (int i = 0; i < entries; ++i) {
      m.add_entry(static_cast<ExtMask>(pick(0, top)), static_cast<ExtMask>(pick(0, top)),
                  form(2));
    }
    return m;
  }

 private:
  RingSpec ring_;
  std::mt19937_64 rng_;
};

// ------------------------------------------------------------ verdict glue --

int clamp_order(int order, const RingSpec& ring) { return std::min(order, ring.truncation); }

IdentityVerdict verdict_from_form_residual(const Form& residual, const RingSpec& ring,
                                           const std::string& label) {
  IdentityVerdict v;
  const int window = clamp_order(residual.min_valid_order(), ring);
  if (residual.is_zero()) {
    v.pass = true;
    v.verified_order = window;
    return v;
  }
  v.pass = false;
  v.verified_order = 0;
  if (auto w = first_nonzero_part(residual, window)) {
    v.witness = label + " at " + to_string(w->key) + ", " + to_string(w->monomial);
  } else {
    v.witness = label;
  }
  return v;
}

IdentityVerdict verdict_from_matrix_residual(const EndMatrix& residual, const RingSpec& ring,
                                             const std::string& label) {
  IdentityVerdict v;
  const int window = clamp_order(residual.min_valid_order(), ring);
  if (residual.is_zero()) {
    v.pass = true;
    v.verified_order = window;
    return v;
  }
  v.pass = false;
  v.verified_order = 0;
  if (auto w = first_nonzero_entry(residual, window)) {
    v.witness = label + " at " + w->to_string();
  } else {
    v.witness = label;
  }
  return v;
}

void fold(IdentityVerdict& into, const IdentityVerdict& piece) {
  if (!piece.pass) {
    if (into.pass) {
      into.pass = false;
      into.verified_order = piece.verified_order;
      into.witness = piece.witness;
    }
    return;
  }
  if (into.pass) into.verified_order = std::min(into.verified_order, piece.verified_order);
}

// -------------------------------------------------------- property suites --

IdentityVerdict supertrace_commutator_check(const Scenario& sc) {
  Sampler gen(sc.ring, 0x73757065u);
  IdentityVerdict v{true, sc.ring.truncation, std::nullopt};
  for (int trial = 0; trial < 20; ++trial) {
    const EndMatrix a = gen.matrix(sc.bundle, 4);
    const EndMatrix b = gen.matrix(sc.bundle, 4);
    const Form residual = supertrace(supercommutator(a, b));
    fold(v, verdict_from_form_residual(
                residual, sc.ring,
                "supertrace of a supercommutator, pair " + std::to_string(trial)));
    if (!v.pass) break;
  }
  return v;
}

IdentityVerdict supertrace_inclusion_check(const Scenario& sc) {
  Sampler gen(sc.ring, 0x696e636cu);
  IdentityVerdict v{true, sc.ring.truncation, std::nullopt};
  const ExtMask top = static_cast<ExtMask>((1 << sc.bundle.rank) - 1);
  for (ExtMask mask = 0; mask <= top; ++mask) {
    DualMultivector alpha = DualMultivector::basis(sc.bundle, sc.ring, mask);
    alpha.add_part(mask, gen.form(1).parity_part(0));
    const DualMultivector residual = gen_supertrace(inclusion_i(alpha)) - alpha;
    IdentityVerdict piece{true, sc.ring.truncation, std::nullopt};
    if (!residual.is_zero()) {
      piece.pass = false;
      piece.verified_order = 0;
      piece.witness =
          "generalized supertrace does not invert inclusion on " + mask_to_string(mask, true);
    }
    fold(v, piece);
    if (!v.pass) break;
  }
  return v;
}

IdentityVerdict supertrace_superderivation_check(const Scenario& sc) {
  Sampler gen(sc.ring, 0x64657276u);
  IdentityVerdict v{true, sc.ring.truncation, std::nullopt};
  for (int parity = 0; parity < 2 && v.pass; ++parity) {
    for (int trial = 0; trial < 5 && v.pass; ++trial) {
      std::vector<Multivector> images;
      images.reserve(static_cast<std::size_t>(sc.bundle.rank));
      for (int j = 0; j < sc.bundle.rank; ++j) {
        images.push_back(gen.multivector(sc.bundle, 2).parity_part((1 + parity) % 2));
      }
      const EndMatrix delta = extend_derivation(sc.bundle, sc.ring, images, parity);
      const EndMatrix phi = gen.matrix(sc.bundle, 4);
      const EndMatrix lhs = inclusion_i(gen_supertrace(supercommutator(delta, phi)));
      const EndMatrix rhs = supercommutator(delta, inclusion_i(gen_supertrace(phi)));
      fold(v, verdict_from_matrix_residual(
                  lhs - rhs, sc.ring,
                  "generalized supertrace against a superderivation, parity " +
                      std::to_string(parity) + " trial " + std::to_string(trial)));
    }
  }
  return v;
}

// ------------------------------------------------------------- run helpers --

void add_record(Report& rep, const std::string& name,
                const std::function<IdentityVerdict()>& fn) {
  CheckRecord rec;
  rec.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const IdentityVerdict v = fn();
    rec.status = v.pass ? "pass" : "fail";
    rec.verified_order = v.verified_order;
    rec.witness = v.witness;
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.verified_order = 0;
    rec.witness = std::string(e.what());
  }
  rec.millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  rep.checks.push_back(std::move(rec));
}

bool has_check(const Scenario& sc, const char* name) {
  return std::find(sc.checks.begin(), sc.checks.end(), name) != sc.checks.end();
}

}  // namespace

// ---------------------------------------------------------------- scenario --

Connection Scenario::connection() const {
  return gamma ? Connection(bundle, ring, *gamma) : Connection::zero(bundle, ring);
}

DualMultivector Scenario::tau_covector() const {
  return DualMultivector::covector(bundle, ring, tau);
}

bool holomorphic_section(const Scenario& s) {
  for (const TruncatedSeries& component : s.tau) {
    if (!is_holomorphic(component)) return false;
  }
  return true;
}

std::vector<std::string> canonical_checks(const std::vector<std::string>& requested,
                                          bool holomorphic_tau,
                                          const std::string& field_path) {
  static const std::set<std::string> known{"all", "chern", "koszul", "supertrace", "twisted"};
  if (requested.empty()) schema_error(field_path, "expected at least one check");
  std::set<std::string> result;
  for (std::size_t i = 0; i < requested.size(); ++i) {
    const std::string& name = requested[i];
    if (!known.count(name)) {
      schema_error(index_path(field_path, i),
                   "unknown check '" + name +
                       "' (expected all, chern, koszul, supertrace, or twisted)");
    }
    if (name == "all") {
      result.insert("chern");
      result.insert("supertrace");
      result.insert("twisted");
      if (holomorphic_tau) result.insert("koszul");
    } else {
      if (name == "koszul" && !holomorphic_tau) {
        schema_error(index_path(field_path, i),
                     "the koszul suite requires a holomorphic section, but a component of "
                     "section.tau involves an antiholomorphic variable");
      }
      result.insert(name);
    }
  }
  return {result.begin(), result.end()};
}

Scenario load_scenario_text(const std::string& text, const std::string& default_name,
                            std::optional<int> truncation_override) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("config is not valid JSON: ") + e.what());
  }
  require_object(doc, "config");
  reject_unknown_keys(doc, "",
                      {"name", "ring", "bundle", "connection", "section", "ideal", "checks",
                       "report"});

  Scenario sc;
  sc.name = default_name;
  if (auto it = doc.find("name"); it != doc.end()) sc.name = require_string(*it, "name");

  // ring
  {
    const json& ring = require_object(require_member(doc, "", "ring"), "ring");
    reject_unknown_keys(ring, "ring", {"num_vars", "truncation"});
    sc.ring.num_vars = require_int(require_member(ring, "ring", "num_vars"), "ring.num_vars", 1, 4);
    sc.ring.truncation =
        require_int(require_member(ring, "ring", "truncation"), "ring.truncation", 0, 16);
  }
  if (truncation_override) {
    if (*truncation_override < 0 || *truncation_override > 16) {
      schema_error("truncation override",
                   "expected an integer in [0, 16], got " + std::to_string(*truncation_override));
    }
    sc.ring.truncation = *truncation_override;
  }

  // bundle
  {
    const json& bundle = require_object(require_member(doc, "", "bundle"), "bundle");
    reject_unknown_keys(bundle, "bundle", {"rank"});
    sc.bundle.rank = require_int(require_member(bundle, "bundle", "rank"), "bundle.rank", 1, 6);
  }

  // connection (optional; zero when absent)
  if (auto it = doc.find("connection"); it != doc.end()) {
    const json& conn = require_object(*it, "connection");
    reject_unknown_keys(conn, "connection", {"gamma"});
    const json& rows = require_array(require_member(conn, "connection", "gamma"),
                                     "connection.gamma");
    if (static_cast<int>(rows.size()) != sc.bundle.rank) {
      schema_error("connection.gamma", "expected " + std::to_string(sc.bundle.rank) +
                                           " rows (one per frame vector), got " +
                                           std::to_string(rows.size()));
    }
    FormMatrix gamma(sc.bundle, sc.ring);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::string row_path = index_path("connection.gamma", i);
      const json& row = require_array(rows[i], row_path);
      if (static_cast<int>(row.size()) != sc.bundle.rank) {
        schema_error(row_path, "expected " + std::to_string(sc.bundle.rank) +
                                   " entries, got " + std::to_string(row.size()));
      }
      for (std::size_t j = 0; j < row.size(); ++j) {
        const std::string entry_path = index_path(row_path, j);
        gamma.set_entry(static_cast<int>(i), static_cast<int>(j),
                        parse_form_at(require_string(row[j], entry_path), sc.ring, entry_path));
      }
    }
    // Validate the bidegree contract now so the failure carries the field path.
    try {
      Connection probe(sc.bundle, sc.ring, gamma);
    } catch (const RingError& e) {
      throw ScenarioError(std::string("connection.gamma: ") + e.what());
    }
    sc.gamma = std::move(gamma);
  }

  // ideal (before section: the certificate width depends on it)
  {
    const json& ideal = require_object(require_member(doc, "", "ideal"), "ideal");
    reject_unknown_keys(ideal, "ideal", {"vars"});
    const json& vars = require_array(require_member(ideal, "ideal", "vars"), "ideal.vars");
    if (vars.empty()) schema_error("ideal.vars", "expected at least one variable index");
    std::set<int> seen;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const std::string path = index_path("ideal.vars", i);
      const int v = require_int(vars[i], path, 1, sc.ring.num_vars);
      if (!seen.insert(v).second) {
        schema_error(path, "duplicate variable index " + std::to_string(v));
      }
      sc.ideal.vars.push_back(v);
    }
  }

  // section
  {
    const json& section = require_object(require_member(doc, "", "section"), "section");
    reject_unknown_keys(section, "section", {"tau", "u"});
    const json& tau = require_array(require_member(section, "section", "tau"), "section.tau");
    if (static_cast<int>(tau.size()) != sc.bundle.rank) {
      schema_error("section.tau", "expected one component per frame vector (rank " +
                                      std::to_string(sc.bundle.rank) + ", got " +
                                      std::to_string(tau.size()) + ")");
    }
    for (std::size_t j = 0; j < tau.size(); ++j) {
      const std::string path = index_path("section.tau", j);
      sc.tau.push_back(parse_series_at(require_string(tau[j], path), sc.ring, path));
    }
    if (auto it = section.find("u"); it != section.end()) {
      const json& rows = require_array(*it, "section.u");
      if (static_cast<int>(rows.size()) != sc.bundle.rank) {
        schema_error("section.u", "expected one row per frame vector (rank " +
                                      std::to_string(sc.bundle.rank) + ", got " +
                                      std::to_string(rows.size()) + ")");
      }
      SeriesMatrix u;
      for (std::size_t j = 0; j < rows.size(); ++j) {
        const std::string row_path = index_path("section.u", j);
        const json& row = require_array(rows[j], row_path);
        if (row.size() != sc.ideal.vars.size()) {
          schema_error(row_path, "expected one entry per ideal variable (" +
                                     std::to_string(sc.ideal.vars.size()) + ", got " +
                                     std::to_string(row.size()) + ")");
        }
        std::vector<TruncatedSeries> parsed;
        for (std::size_t i = 0; i < row.size(); ++i) {
          const std::string path = index_path(row_path, i);
          parsed.push_back(parse_series_at(require_string(row[i], path), sc.ring, path));
        }
        u.push_back(std::move(parsed));
      }
      sc.u = std::move(u);
    }
  }

  // checks
  {
    const json& checks = require_array(require_member(doc, "", "checks"), "checks");
    std::vector<std::string> requested;
    for (std::size_t i = 0; i < checks.size(); ++i) {
      requested.push_back(require_string(checks[i], index_path("checks", i)));
    }
    sc.checks = canonical_checks(requested, holomorphic_section(sc), "checks");
  }

  if (auto it = doc.find("report"); it != doc.end()) {
    sc.report_path = require_string(*it, "report");
  }
  return sc;
}

Scenario load_scenario(const std::string& path, std::optional<int> truncation_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario config: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_scenario_text(buffer.str(), std::filesystem::path(path).stem().string(),
                            truncation_override);
}

// --------------------------------------------------------------------- run --

Report run(const Scenario& sc) {
  Report rep;
  rep.scenario = sc.name;
  rep.ring = sc.ring;
  rep.rank = sc.bundle.rank;

  if (has_check(sc, "chern")) {
    const FlatnessVerdict flat = check_flat(sc.connection());
    add_record(rep, "chern.flatness", [&]() {
      IdentityVerdict v{flat.flat, flat.verified_order, std::nullopt};
      if (flat.witness) v.witness = flat.witness->to_string();
      return v;
    });
    // The remaining chern identities presuppose flatness; they are emitted
    // only when the flatness verdict holds.
    if (flat.flat) {
      add_record(rep, "chern.scalar_supertrace", [&]() {
        RealSection section(sc.bundle, sc.ring, sc.tau_covector(), sc.ideal, sc.u);
        const TracedPsi tp = psi_and_trace(build_twist(section), sc.connection());
        const Form lhs = gen_supertrace(tp.psi).coefficient(ExtMask{0});
        const Form rhs = supertrace(tp.psi);
        return verdict_from_form_residual(
            lhs - rhs, sc.ring,
            "exterior-degree-0 generalized supertrace differs from the plain supertrace");
      });
      if (holomorphic_section(sc)) {
        add_record(rep, "chern.top_form", [&]() {
          KoszulData kd(sc.bundle, sc.ring, sc.tau_covector(), sc.connection(), sc.ideal);
          const Form lhs = psi_value(kd, 0, ExtMask{0});
          const Form rhs = chern_form_top(kd.curvature());
          return verdict_from_form_residual(
              lhs - rhs, sc.ring,
              "degree-0 chain map differs from the top Chern form of the curvature");
        });
      }
    }
  }

  if (has_check(sc, "koszul")) {
    // Shared construction, memoized across the three records; a constructor
    // failure surfaces as an error record for each.
    std::optional<KoszulData> kd;
    auto data = [&]() -> const KoszulData& {
      if (!kd) kd.emplace(sc.bundle, sc.ring, sc.tau_covector(), sc.connection(), sc.ideal);
      return *kd;
    };
    add_record(rep, "koszul.bracket_facts", [&]() { return verify_bracket_facts(data()); });
    add_record(rep, "koszul.chain_map", [&]() { return verify_chain_map_psi(data()); });
    add_record(rep, "koszul.fundamental_class",
               [&]() { return fundamental_class_local(data()); });
  }

  if (has_check(sc, "supertrace")) {
    add_record(rep, "supertrace.commutator", [&]() { return supertrace_commutator_check(sc); });
    add_record(rep, "supertrace.inclusion", [&]() { return supertrace_inclusion_check(sc); });
    add_record(rep, "supertrace.superderivation",
               [&]() { return supertrace_superderivation_check(sc); });
  }

  if (has_check(sc, "twisted")) {
    std::optional<RealSection> section;
    std::optional<TwistData> twist;
    auto data = [&]() -> const TwistData& {
      if (!twist) {
        section.emplace(sc.bundle, sc.ring, sc.tau_covector(), sc.ideal, sc.u);
        twist = build_twist(*section);
      }
      return *twist;
    };
    add_record(rep, "twisted.cochain_trace",
               [&]() { return verify_cochain_trace(data(), sc.connection()); });
    add_record(rep, "twisted.comparison_chain", [&]() {
      const TwistData& t = data();
      const ComparisonData cmp = build_comparison(*section, t);
      return verify_comparison_chain(cmp, t);
    });
    add_record(rep, "twisted.fundamental_class", [&]() {
      const TwistData& t = data();
      const ComparisonData cmp = build_comparison(*section, t);
      return fundamental_class_local_twisted(cmp, psi_and_trace(t, sc.connection()));
    });
    add_record(rep, "twisted.square_zero", [&]() { return verify_twist(data()); });
  }

  std::sort(rep.checks.begin(), rep.checks.end(),
            [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  return rep;
}

bool all_passed(const Report& r) {
  return std::all_of(r.checks.begin(), r.checks.end(),
                     [](const CheckRecord& c) { return c.status == "pass"; });
}

bool any_error(const Report& r) {
  return std::any_of(r.checks.begin(), r.checks.end(),
                     [](const CheckRecord& c) { return c.status == "error"; });
}

int exit_status(const Report& r) {
  if (any_error(r)) return 2;
  return all_passed(r) ? 0 : 1;
}

std::string report_json(const Report& r) {
  json checks = json::array();
  for (const CheckRecord& rec : r.checks) {
    json entry;
    entry["name"] = rec.name;
    entry["status"] = rec.status;
    entry["verified_order"] = rec.verified_order;
    entry["witness"] = rec.witness ? json(*rec.witness) : json(nullptr);
    checks.push_back(std::move(entry));
  }
  json doc;
  doc["checks"] = std::move(checks);
  doc["rank"] = r.rank;
  doc["result"] = any_error(r) ? "error" : (all_passed(r) ? "pass" : "fail");
  doc["ring"] = {{"num_vars", r.ring.num_vars}, {"truncation", r.ring.truncation}};
  doc["scenario"] = r.scenario;
  doc["version"] = kVersion;
  return doc.dump(2) + "\n";
}

std::string report_summary(const Report& r) {
  std::ostringstream out;
  out << "scenario " << r.scenario << ": n=" << r.ring.num_vars << ", D=" << r.ring.truncation
      << ", rank " << r.rank << "\n";
  for (const CheckRecord& rec : r.checks) {
    std::string status = rec.status;
    std::transform(status.begin(), status.end(), status.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    out << "  " << status << std::string(status.size() < 5 ? 6 - status.size() : 1, ' ')
        << rec.name << std::string(rec.name.size() < 28 ? 29 - rec.name.size() : 1, ' ');
    if (rec.status == "pass") out << "order " << rec.verified_order << "  ";
    char ms[32];
    std::snprintf(ms, sizeof(ms), "%.1f ms", rec.millis);
    out << ms << "\n";
    if (rec.status != "pass" && rec.witness) out << "        " << *rec.witness << "\n";
  }
  out << "result: " << (any_error(r) ? "error" : (all_passed(r) ? "pass" : "fail")) << " ("
      << r.checks.size() << " checks)\n";
  return out.str();
}

std::string emit_chern(const Scenario& sc) {
  const Connection c = sc.connection();
  const FlatnessVerdict flat = check_flat(c);
  if (!flat.flat) throw NotFlat(*flat.witness);
  std::string out = "det(R) = " + to_string(chern_form_top(curvature_R(c))) + "\n";
  RealSection section(sc.bundle, sc.ring, sc.tau_covector(), sc.ideal, sc.u);
  const TracedPsi tp = psi_and_trace(build_twist(section), c);
  out += "tr_s(psi) = " + to_string(supertrace(tp.psi)) + "\n";
  return out;
}

}  // namespace skz
