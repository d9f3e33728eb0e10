#include "superkoszul/ring.hpp"

#include <algorithm>
#include <sstream>

#include "superkoszul/detail/expr.hpp"

namespace skz {

Monomial monomial_product(const Monomial& a, const Monomial& b) {
  Monomial r = a;
  for (std::size_t i = 0; i < r.e.size(); ++i) r.e[i] = static_cast<uint8_t>(r.e[i] + b.e[i]);
  return r;
}

std::string to_string(const Monomial& m) {
  std::ostringstream out;
  bool first = true;
  const int n = static_cast<int>(m.e.size()) / 2;
  auto emit = [&](const char* name, int idx, int exp) {
    if (exp == 0) return;
    if (!first) out << '*';
    first = false;
    out << name << idx;
    if (exp > 1) out << '^' << exp;
  };
  for (int i = 1; i <= n; ++i) emit("z", i, m.e[static_cast<std::size_t>(i - 1)]);
  for (int i = 1; i <= n; ++i) emit("w", i, m.e[static_cast<std::size_t>(n + i - 1)]);
  if (first) out << '1';
  return out.str();
}

TruncatedSeries TruncatedSeries::constant(const RingSpec& ring, const Rational& c,
                                          int valid_order) {
  TruncatedSeries s(ring, valid_order);
  s.add_term(Monomial(ring.num_vars), c);
  return s;
}

TruncatedSeries TruncatedSeries::variable(const RingSpec& ring, VarKind kind, int index1) {
  if (index1 < 1 || index1 > ring.num_vars)
    throw RingError("variable index out of range: " + std::to_string(index1));
  Monomial m(ring.num_vars);
  m.e[m.slot(kind, index1)] = 1;
  return from_monomial(ring, m, Rational{1});
}

TruncatedSeries TruncatedSeries::from_monomial(const RingSpec& ring, const Monomial& m,
                                               const Rational& c, int valid_order) {
  TruncatedSeries s(ring, valid_order);
  s.add_term(m, c);
  return s;
}

void TruncatedSeries::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  if (m.degree() > cap()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

TruncatedSeries TruncatedSeries::truncated_to(int order) const {
  TruncatedSeries r(ring_, std::min(valid_order_, order));
  for (const auto& [m, c] : terms_) r.add_term(m, c);
  return r;
}

TruncatedSeries TruncatedSeries::homogeneous_part(int degree) const {
  TruncatedSeries r(ring_, valid_order_);
  for (const auto& [m, c] : terms_)
    if (m.degree() == degree) r.add_term(m, c);
  return r;
}

TruncatedSeries TruncatedSeries::operator-() const { return scaled(Rational{-1}); }

TruncatedSeries TruncatedSeries::scaled(const Rational& c) const {
  TruncatedSeries r(ring_, valid_order_);
  if (c == 0) return r;
  for (const auto& [m, q] : terms_) r.terms_.emplace(m, q * c);
  return r;
}

TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
  require_same_ring(a.ring_, b.ring_);
  TruncatedSeries r(a.ring_, std::min(a.valid_order_, b.valid_order_));
  for (const auto& [m, c] : a.terms_) r.add_term(m, c);
  for (const auto& [m, c] : b.terms_) r.add_term(m, c);
  return r;
}

TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) {
  return a + (-b);
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
  require_same_ring(a.ring_, b.ring_);
  int order = std::min(a.valid_order_, b.valid_order_);
  // A product of exact polynomials stays exact only when no cross term falls
  // beyond the truncation bound.
  if (order >= kExactOrder) {
    const int D = a.ring_.truncation;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_)
        if (ma.degree() + mb.degree() > D) {
          order = D;
          break;
        }
  }
  TruncatedSeries r(a.ring_, order);
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      if (ma.degree() + mb.degree() > r.cap()) continue;
      r.add_term(monomial_product(ma, mb), ca * cb);
    }
  return r;
}

TruncatedSeries series_pow(const TruncatedSeries& a, int k) {
  TruncatedSeries acc = TruncatedSeries::constant(a.ring(), Rational{1}, a.valid_order());
  for (int i = 0; i < k; ++i) acc = acc * a;
  return acc;
}

TruncatedSeries invert_unit(const TruncatedSeries& a) {
  Rational c0 = a.constant_term();
  if (c0 == 0) throw ZeroConstantTerm{};
  const RingSpec& ring = a.ring();
  bool constant_input = a.terms().size() == 1;
  // x_{k+1} = x_k (2 - a x_k) doubles the correct order each step; the usual
  // min-order bookkeeping of the products carries the input's valid order
  // through to the result.
  TruncatedSeries x = TruncatedSeries::constant(ring, Rational{1} / c0);
  TruncatedSeries two = TruncatedSeries::constant(ring, Rational{2});
  for (int reached = 0; reached < a.cap(); reached = 2 * reached + 1)
    x = x * (two - a * x);
  x = x.truncated_to(a.valid_order());
  // A non-constant unit never has a polynomial inverse, so exactness cannot
  // survive inversion even when every intermediate product stayed in bounds.
  if (!constant_input && x.exact()) x = x.truncated_to(ring.truncation);
  return x;
}

TruncatedSeries wirtinger(const TruncatedSeries& a, VarKind kind, int index1) {
  if (index1 < 1 || index1 > a.ring().num_vars)
    throw RingError("variable index out of range: " + std::to_string(index1));
  TruncatedSeries r(a.ring(), order_after_derivative(a.valid_order()));
  for (const auto& [m, c] : a.terms()) {
    std::size_t slot = m.slot(kind, index1);
    if (m.e[slot] == 0) continue;
    Monomial d = m;
    d.e[slot] -= 1;
    r.add_term(d, c * m.e[slot]);
  }
  return r;
}

TruncatedSeries reduce_mod_ideal(const TruncatedSeries& a, const IdealSpec& ideal) {
  TruncatedSeries r(a.ring(), a.valid_order());
  for (const auto& [m, c] : a.terms()) {
    bool kill = false;
    for (int v : ideal.vars)
      if (m.exponent(VarKind::Z, v) > 0) {
        kill = true;
        break;
      }
    if (!kill) r.add_term(m, c);
  }
  return r;
}

std::optional<int> agree_order(const TruncatedSeries& a, const TruncatedSeries& b) {
  require_same_ring(a.ring(), b.ring());
  int order = std::min(a.cap(), b.cap());
  TruncatedSeries diff = a.truncated_to(order) - b.truncated_to(order);
  if (first_nonzero_monomial(diff, order)) return std::nullopt;
  return order;
}

std::optional<Monomial> first_nonzero_monomial(const TruncatedSeries& a, int order) {
  for (const auto& [m, c] : a.terms())
    if (m.degree() <= order) return m;
  return std::nullopt;
}

namespace {

// Evaluation value that keeps literal monomials symbolic so that a monomial
// written past the truncation bound is reported (DegreeOverflow) instead of
// silently vanishing.  Sums and inversions leave monomial-land.
struct SeriesValue {
  bool is_monomial = false;
  Rational coef;
  std::vector<long> exps;  // 2n exponents, exact (never truncated)
  TruncatedSeries series;

  explicit SeriesValue(const RingSpec& ring) : series(TruncatedSeries::zero(ring)) {}
};

std::string describe_monomial(const std::vector<long>& exps, int n) {
  std::ostringstream out;
  bool first = true;
  auto emit = [&](const char* name, int idx, long e) {
    if (e == 0) return;
    if (!first) out << '*';
    first = false;
    out << name << idx;
    if (e > 1) out << '^' << e;
  };
  for (int i = 1; i <= n; ++i) emit("z", i, exps[static_cast<std::size_t>(i - 1)]);
  for (int i = 1; i <= n; ++i) emit("w", i, exps[static_cast<std::size_t>(n + i - 1)]);
  if (first) out << '1';
  return out.str();
}

TruncatedSeries materialize(const SeriesValue& v, const RingSpec& ring) {
  if (!v.is_monomial) return v.series;
  long degree = 0;
  for (long e : v.exps) degree += e;
  if (degree > ring.truncation)
    throw DegreeOverflow(describe_monomial(v.exps, ring.num_vars), ring.truncation);
  Monomial m(ring.num_vars);
  for (std::size_t i = 0; i < m.e.size(); ++i) m.e[i] = static_cast<uint8_t>(v.exps[i]);
  return TruncatedSeries::from_monomial(ring, m, v.coef);
}

SeriesValue monomial_value(const RingSpec& ring, Rational coef, std::vector<long> exps) {
  SeriesValue v(ring);
  v.is_monomial = true;
  v.coef = std::move(coef);
  v.exps = std::move(exps);
  return v;
}

SeriesValue series_value(const RingSpec& ring, TruncatedSeries s) {
  SeriesValue v(ring);
  v.series = std::move(s);
  return v;
}

SeriesValue eval_series(const detail::ExprNode& node, const RingSpec& ring) {
  using K = detail::ExprNode::Kind;
  switch (node.kind) {
    case K::Number:
      return monomial_value(ring, node.number,
                            std::vector<long>(static_cast<std::size_t>(2 * ring.num_vars), 0));
    case K::Var: {
      if (node.var_index < 1 || node.var_index > ring.num_vars)
        throw ParseError("variable index out of range", node.offset);
      std::vector<long> exps(static_cast<std::size_t>(2 * ring.num_vars), 0);
      std::size_t slot = static_cast<std::size_t>(
          (node.var_kind == VarKind::W ? ring.num_vars : 0) + node.var_index - 1);
      exps[slot] = 1;
      return monomial_value(ring, Rational{1}, std::move(exps));
    }
    case K::FormAtom:
      throw ParseError("form generators are not allowed in a scalar series", node.offset);
    case K::Neg: {
      SeriesValue v = eval_series(*node.lhs, ring);
      if (v.is_monomial)
        v.coef = -v.coef;
      else
        v.series = -v.series;
      return v;
    }
    case K::Add:
    case K::Sub: {
      TruncatedSeries a = materialize(eval_series(*node.lhs, ring), ring);
      TruncatedSeries b = materialize(eval_series(*node.rhs, ring), ring);
      return series_value(ring, node.kind == K::Add ? a + b : a - b);
    }
    case K::Mul: {
      SeriesValue a = eval_series(*node.lhs, ring);
      SeriesValue b = eval_series(*node.rhs, ring);
      if (a.is_monomial && b.is_monomial) {
        std::vector<long> exps = a.exps;
        for (std::size_t i = 0; i < exps.size(); ++i) exps[i] += b.exps[i];
        return monomial_value(ring, a.coef * b.coef, std::move(exps));
      }
      return series_value(ring, materialize(a, ring) * materialize(b, ring));
    }
    case K::Div: {
      SeriesValue a = eval_series(*node.lhs, ring);
      if (node.rhs->number == 0) throw ParseError("division by zero", node.rhs->offset);
      Rational inv = Rational{1} / node.rhs->number;
      if (a.is_monomial) {
        a.coef *= inv;
        return a;
      }
      return series_value(ring, a.series.scaled(inv));
    }
    case K::Pow: {
      SeriesValue base = eval_series(*node.lhs, ring);
      int k = node.exponent;
      if (k >= 0 && base.is_monomial) {
        std::vector<long> exps = base.exps;
        for (auto& e : exps) e *= k;
        return monomial_value(ring, rational_pow(base.coef, k), std::move(exps));
      }
      TruncatedSeries b = materialize(base, ring);
      if (k >= 0) return series_value(ring, series_pow(b, k));
      return series_value(ring, series_pow(invert_unit(b), -k));
    }
  }
  throw RingError("unreachable expression node");
}

}  // namespace

TruncatedSeries parse_series(const std::string& text, const RingSpec& ring) {
  detail::ExprPtr ast = detail::parse_expression(text);
  return materialize(eval_series(*ast, ring), ring);
}

std::string to_string(const TruncatedSeries& s) {
  if (s.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, c] : s.terms()) {
    Rational abs_c = c < 0 ? Rational(-c) : c;
    if (first) {
      if (c < 0) out << '-';
      first = false;
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    if (m.degree() == 0) {
      out << abs_c.str();
    } else {
      if (abs_c != 1) out << abs_c.str() << '*';
      out << to_string(m);
    }
  }
  return out.str();
}

}  // namespace skz
