#include "superkoszul/solver.hpp"

#include <algorithm>
#include <map>
#include <memory>

namespace skz {

namespace {

// All monomials of total degree <= bound, in canonical grlex order.
std::vector<Monomial> enumerate_monomials(const RingSpec& ring, int bound) {
  std::vector<Monomial> out;
  Monomial m(ring.num_vars);
  const std::size_t slots = m.e.size();
  // Depth-first enumeration, then canonical sort.
  std::vector<uint8_t> exps(slots, 0);
  auto rec = [&](auto&& self, std::size_t slot, int remaining) -> void {
    if (slot == slots) {
      Monomial mm(ring.num_vars);
      mm.e = exps;
      out.push_back(std::move(mm));
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      exps[slot] = static_cast<uint8_t>(e);
      self(self, slot + 1, remaining - e);
    }
    exps[slot] = 0;
  };
  rec(rec, 0, bound);
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

struct SparseRow {
  // (column, coefficient), sorted by column, coefficients nonzero.
  std::vector<std::pair<int, Rational>> entries;
  Rational rhs{0};
  int degree = 0;          // witness data
  std::string label;
  std::string monomial;

  int leading_column() const { return entries.empty() ? -1 : entries.front().first; }

  void normalize() {
    if (entries.empty()) return;
    Rational lead = entries.front().second;
    for (auto& [c, v] : entries) v /= lead;
    rhs /= lead;
  }
};

// row -= factor * pivot  (pivot normalized, aligned sparse merge).
void eliminate(SparseRow& row, const SparseRow& pivot, const Rational& factor) {
  std::vector<std::pair<int, Rational>> merged;
  merged.reserve(row.entries.size() + pivot.entries.size());
  std::size_t i = 0, j = 0;
  while (i < row.entries.size() || j < pivot.entries.size()) {
    if (j == pivot.entries.size() ||
        (i < row.entries.size() && row.entries[i].first < pivot.entries[j].first)) {
      merged.push_back(row.entries[i++]);
    } else if (i == row.entries.size() || pivot.entries[j].first < row.entries[i].first) {
      merged.emplace_back(pivot.entries[j].first, -factor * pivot.entries[j].second);
      ++j;
    } else {
      Rational v = row.entries[i].second - factor * pivot.entries[j].second;
      if (v != 0) merged.emplace_back(row.entries[i].first, std::move(v));
      ++i;
      ++j;
    }
  }
  row.entries = std::move(merged);
  row.rhs -= factor * pivot.rhs;
}

}  // namespace

void GradedLinearSystem::add_equation(std::string label,
                                      std::vector<std::pair<int, TruncatedSeries>> lhs,
                                      TruncatedSeries rhs) {
  for (const auto& [j, c] : lhs) {
    if (j < 0 || j >= num_unknowns_) throw RingError("solver: unknown index out of range");
    require_same_ring(c.ring(), ring_);
  }
  require_same_ring(rhs.ring(), ring_);
  equations_.push_back({std::move(label), std::move(lhs), std::move(rhs)});
}

int GradedLinearSystem::target_order() const {
  int order = ring_.truncation;
  for (const auto& eq : equations_) {
    for (const auto& [j, c] : eq.lhs) order = std::min(order, c.cap());
    order = std::min(order, eq.rhs.cap());
  }
  return order;
}

std::vector<TruncatedSeries> GradedLinearSystem::solve() const {
  const int target = target_order();
  const std::vector<Monomial> monomials = enumerate_monomials(ring_, target);
  std::map<Monomial, int, GrlexLess> rank;
  for (std::size_t i = 0; i < monomials.size(); ++i) rank.emplace(monomials[i], static_cast<int>(i));
  auto column = [&](int unknown, const Monomial& m) {
    return rank.at(m) * num_unknowns_ + unknown;
  };

  // Expand every constraint into one rational row per monomial of the target
  // range.  Row order follows (degree, grlex, insertion) so inconsistency
  // witnesses are reported at the lowest failing degree.
  std::vector<SparseRow> rows;
  for (const auto& eq : equations_) {
    std::map<Monomial, SparseRow, GrlexLess> per_monomial;
    for (const Monomial& nu : monomials) {
      SparseRow row;
      row.degree = nu.degree();
      row.label = eq.label;
      row.monomial = to_string(nu);
      row.rhs = eq.rhs.coefficient(nu);
      per_monomial.emplace(nu, std::move(row));
    }
    for (const auto& [j, c] : eq.lhs) {
      for (const auto& [mu, coeff] : c.terms()) {
        for (const Monomial& m : monomials) {
          Monomial nu = monomial_product(mu, m);
          if (nu.degree() > target) continue;
          auto it = per_monomial.find(nu);
          it->second.entries.emplace_back(column(j, m), coeff);
        }
      }
    }
    for (auto& [nu, row] : per_monomial) {
      std::sort(row.entries.begin(), row.entries.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      // combine duplicate columns (same unknown hit twice in one equation)
      std::vector<std::pair<int, Rational>> packed;
      for (auto& [col, v] : row.entries) {
        if (!packed.empty() && packed.back().first == col)
          packed.back().second += v;
        else
          packed.emplace_back(col, v);
      }
      std::erase_if(packed, [](const auto& e) { return e.second == 0; });
      row.entries = std::move(packed);
      if (row.entries.empty() && row.rhs == 0) continue;  // trivially satisfied
      rows.push_back(std::move(row));
    }
  }

  // Incremental echelon reduction keyed by leading column.  The pivot set
  // (earliest independent columns) is canonical for the column order.
  std::map<int, SparseRow> pivots;
  std::unique_ptr<SolverInconsistency> inconsistency;
  auto consider_inconsistent = [&](const SparseRow& row) {
    if (row.rhs == 0) return;
    if (!inconsistency || row.degree < inconsistency->degree) {
      inconsistency = std::make_unique<SolverInconsistency>(row.degree, row.label, row.monomial,
                                                            row.rhs);
    }
  };
  for (SparseRow row : rows) {
    while (!row.entries.empty()) {
      auto it = pivots.find(row.leading_column());
      if (it == pivots.end()) break;
      eliminate(row, it->second, row.entries.front().second);
    }
    if (row.entries.empty()) {
      consider_inconsistent(row);
      continue;
    }
    row.normalize();
    pivots.emplace(row.leading_column(), std::move(row));
  }
  if (inconsistency) throw *inconsistency;

  // Back-substitution with free variables at zero, descending column order.
  std::map<int, Rational> values;
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    const SparseRow& row = it->second;
    Rational v = row.rhs;
    for (std::size_t k = 1; k < row.entries.size(); ++k) {
      auto found = values.find(row.entries[k].first);
      if (found != values.end()) v -= row.entries[k].second * found->second;
    }
    values.emplace(row.entries.front().first, std::move(v));
  }

  // Honest validity: a coefficient of x_j at degree d only ever appears in
  // equations at degree >= d + m_j, where m_j is the lowest degree among the
  // stored coefficients multiplying x_j.  Equations reach up to `target`, so
  // degrees beyond target - m_j are never constrained; the claimed window
  // excludes them (their zero fill is a representative choice, not data).
  std::vector<int> lowest(static_cast<std::size_t>(num_unknowns_), kExactOrder);
  for (const auto& eq : equations_) {
    for (const auto& [j, c] : eq.lhs) {
      for (const auto& [mu, coeff] : c.terms()) {
        if (mu.degree() <= c.cap()) {
          lowest[static_cast<std::size_t>(j)] =
              std::min(lowest[static_cast<std::size_t>(j)], mu.degree());
        }
      }
    }
  }

  std::vector<TruncatedSeries> solution;
  solution.reserve(static_cast<std::size_t>(num_unknowns_));
  for (int j = 0; j < num_unknowns_; ++j) {
    const int m = lowest[static_cast<std::size_t>(j)];
    solution.push_back(TruncatedSeries::zero(ring_, m >= kExactOrder ? target : target - m));
  }
  for (const auto& [col, v] : values) {
    int unknown = col % num_unknowns_;
    const Monomial& m = monomials[static_cast<std::size_t>(col / num_unknowns_)];
    solution[static_cast<std::size_t>(unknown)].add_term(m, v);
  }
  return solution;
}

}  // namespace skz
