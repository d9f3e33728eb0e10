#include "superkoszul/forms.hpp"

#include <bit>

#include "superkoszul/detail/expr.hpp"

namespace skz {

int FormKey::p() const { return std::popcount(zmask); }
int FormKey::q() const { return std::popcount(wmask); }

int merge_sign(std::uint64_t a, std::uint64_t b) {
  // Inversions between the sorted sequences gens(a), gens(b): pairs with the
  // a-generator above the b-generator.
  int inversions = 0;
  for (std::uint64_t rest = b; rest != 0; rest &= rest - 1) {
    int pos = std::countr_zero(rest);
    inversions += std::popcount(a >> (pos + 1));
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

Form Form::scalar(const TruncatedSeries& s) {
  Form f(s.ring());
  f.add_part(FormKey{}, s);
  return f;
}

Form Form::generator(const RingSpec& ring, VarKind kind, int index1) {
  if (index1 < 1 || index1 > ring.num_vars)
    throw RingError("form generator index out of range: " + std::to_string(index1));
  FormKey key;
  (kind == VarKind::Z ? key.zmask : key.wmask) = 1u << (index1 - 1);
  return from_part(ring, key, TruncatedSeries::constant(ring, 1));
}

Form Form::from_part(const RingSpec& ring, const FormKey& key, const TruncatedSeries& coef) {
  Form f(ring);
  f.add_part(key, coef);
  return f;
}

bool Form::is_zero() const {
  for (const auto& [key, coef] : parts_)
    if (!coef.is_zero()) return false;
  return true;
}

bool Form::exact() const {
  for (const auto& [key, coef] : parts_)
    if (!coef.exact()) return false;
  return true;
}

int Form::min_valid_order() const {
  int v = kExactOrder;
  for (const auto& [key, coef] : parts_) v = std::min(v, coef.valid_order());
  return v;
}

TruncatedSeries Form::coefficient(const FormKey& key) const {
  auto it = parts_.find(key);
  return it == parts_.end() ? TruncatedSeries::zero(ring_) : it->second;
}

void Form::add_part(const FormKey& key, const TruncatedSeries& coef) {
  require_same_ring(ring_, coef.ring());
  auto it = parts_.find(key);
  if (it == parts_.end()) {
    if (coef.is_zero() && coef.exact()) return;
    parts_.emplace(key, coef);
    return;
  }
  it->second = it->second + coef;
  if (it->second.is_zero() && it->second.exact()) parts_.erase(it);
}

Form Form::operator-() const {
  Form r(ring_);
  for (const auto& [key, coef] : parts_) r.add_part(key, -coef);
  return r;
}

Form Form::scaled(const Rational& c) const {
  Form r(ring_);
  for (const auto& [key, coef] : parts_) r.add_part(key, coef.scaled(c));
  return r;
}

Form Form::truncated_to(int order) const {
  Form r(ring_);
  for (const auto& [key, coef] : parts_) r.add_part(key, coef.truncated_to(order));
  return r;
}

Form Form::bidegree_part(int p, int q) const {
  Form r(ring_);
  for (const auto& [key, coef] : parts_)
    if (key.p() == p && key.q() == q) r.add_part(key, coef);
  return r;
}

Form Form::parity_part(int parity) const {
  Form r(ring_);
  for (const auto& [key, coef] : parts_)
    if (key.parity() == parity) r.add_part(key, coef);
  return r;
}

Form operator+(const Form& a, const Form& b) {
  require_same_ring(a.ring_, b.ring_);
  Form r = a;
  for (const auto& [key, coef] : b.parts_) r.add_part(key, coef);
  return r;
}

Form operator-(const Form& a, const Form& b) { return a + (-b); }

Form wedge(const Form& a, const Form& b) {
  require_same_ring(a.ring(), b.ring());
  int n = a.ring().num_vars;
  Form r(a.ring());
  for (const auto& [ka, fa] : a.parts()) {
    for (const auto& [kb, fb] : b.parts()) {
      if ((ka.zmask & kb.zmask) || (ka.wmask & kb.wmask)) continue;  // repeated generator
      int sign = merge_sign(ka.combined(n), kb.combined(n));
      FormKey key{ka.zmask | kb.zmask, ka.wmask | kb.wmask};
      TruncatedSeries coef = fa * fb;
      r.add_part(key, sign < 0 ? -coef : coef);
    }
  }
  return r;
}

Form left_mult(const TruncatedSeries& s, const Form& a) { return wedge(Form::scalar(s), a); }

namespace {

Form apply_exterior_derivative(const Form& a, VarKind kind) {
  const RingSpec& ring = a.ring();
  int n = ring.num_vars;
  Form r(ring);
  for (const auto& [key, coef] : a.parts()) {
    for (int i = 1; i <= n; ++i) {
      TruncatedSeries g = wirtinger(coef, kind, i);
      if (g.is_zero() && g.exact()) continue;
      FormKey gen;
      (kind == VarKind::Z ? gen.zmask : gen.wmask) = 1u << (i - 1);
      if ((gen.zmask & key.zmask) || (gen.wmask & key.wmask)) continue;  // dx ^ dx = 0
      // The new generator is wedged on the left of the existing ones.
      int sign = merge_sign(gen.combined(n), key.combined(n));
      FormKey out{key.zmask | gen.zmask, key.wmask | gen.wmask};
      r.add_part(out, sign < 0 ? -g : g);
    }
  }
  return r;
}

}  // namespace

Form dbar(const Form& a) { return apply_exterior_derivative(a, VarKind::W); }
Form partial(const Form& a) { return apply_exterior_derivative(a, VarKind::Z); }

std::optional<int> agree_order(const Form& a, const Form& b) {
  Form diff = a - b;
  int order = a.ring().truncation;
  for (const auto& [key, coef] : a.parts()) order = std::min(order, coef.cap());
  for (const auto& [key, coef] : b.parts()) order = std::min(order, coef.cap());
  if (first_nonzero_part(diff, order)) return std::nullopt;
  return order;
}

std::optional<FormWitness> first_nonzero_part(const Form& a, int order) {
  for (const auto& [key, coef] : a.parts()) {
    if (auto m = first_nonzero_monomial(coef, order)) return FormWitness{key, *m};
  }
  return std::nullopt;
}

std::string to_string(const FormKey& key) {
  std::string out;
  for (std::uint32_t rest = key.zmask; rest != 0; rest &= rest - 1) {
    if (!out.empty()) out += "*";
    out += "dz" + std::to_string(std::countr_zero(rest) + 1);
  }
  for (std::uint32_t rest = key.wmask; rest != 0; rest &= rest - 1) {
    if (!out.empty()) out += "*";
    out += "dw" + std::to_string(std::countr_zero(rest) + 1);
  }
  return out.empty() ? "1" : out;
}

std::string to_string(const Form& a) {
  std::string out;
  for (const auto& [key, coef] : a.parts()) {
    if (coef.is_zero()) continue;  // order-limited zero: nothing to print
    if (!out.empty()) out += " + ";
    out += "(" + to_string(coef) + ")";
    if (key.degree() > 0) out += "*" + to_string(key);
  }
  return out.empty() ? "0" : out;
}

// ------------------------------------------------------- form expressions --

namespace {

using detail::ExprNode;

// Evaluation value: either a single symbolic term coef * monomial * wedge
// (so literal monomial degrees can be checked at materialization, even when
// generators are attached), or a general form.
struct FormValue {
  bool symbolic = false;
  Rational coef;
  std::vector<long> exps;
  FormKey key;
  Form form;

  explicit FormValue(const RingSpec& ring) : form(Form::zero(ring)) {}
};

std::string describe_exps(const std::vector<long>& exps, int num_vars) {
  std::string out;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    if (exps[i] == 0) continue;
    if (!out.empty()) out += "*";
    out += (static_cast<int>(i) < num_vars ? "z" + std::to_string(i + 1)
                                           : "w" + std::to_string(static_cast<int>(i) - num_vars + 1));
    if (exps[i] != 1) out += "^" + std::to_string(exps[i]);
  }
  return out.empty() ? "1" : out;
}

FormValue symbolic_term(const RingSpec& ring, Rational coef, std::vector<long> exps,
                        FormKey key) {
  FormValue v(ring);
  v.symbolic = true;
  v.coef = std::move(coef);
  v.exps = std::move(exps);
  v.key = key;
  return v;
}

Form materialize(const FormValue& v, const RingSpec& ring) {
  if (!v.symbolic) return v.form;
  long degree = 0;
  for (long e : v.exps) degree += e;
  if (degree > ring.truncation)
    throw DegreeOverflow(describe_exps(v.exps, ring.num_vars), ring.truncation);
  Monomial m(ring.num_vars);
  for (std::size_t i = 0; i < m.e.size(); ++i) m.e[i] = static_cast<uint8_t>(v.exps[i]);
  return Form::from_part(ring, v.key, TruncatedSeries::from_monomial(ring, m, v.coef));
}

FormValue eval_form(const ExprNode& node, const RingSpec& ring) {
  using K = ExprNode::Kind;
  std::vector<long> no_exps(static_cast<std::size_t>(2 * ring.num_vars), 0);
  switch (node.kind) {
    case K::Number:
      return symbolic_term(ring, node.number, no_exps, FormKey{});
    case K::Var: {
      if (node.var_index < 1 || node.var_index > ring.num_vars)
        throw ParseError("variable index out of range", node.offset);
      std::vector<long> exps = no_exps;
      std::size_t slot = static_cast<std::size_t>(
          (node.var_kind == VarKind::W ? ring.num_vars : 0) + node.var_index - 1);
      exps[slot] = 1;
      return symbolic_term(ring, Rational{1}, std::move(exps), FormKey{});
    }
    case K::FormAtom: {
      if (node.var_index < 1 || node.var_index > ring.num_vars)
        throw ParseError("form generator index out of range", node.offset);
      FormKey key;
      (node.var_kind == VarKind::Z ? key.zmask : key.wmask) = 1u << (node.var_index - 1);
      return symbolic_term(ring, Rational{1}, no_exps, key);
    }
    case K::Neg: {
      FormValue v = eval_form(*node.lhs, ring);
      if (v.symbolic) {
        v.coef = -v.coef;
      } else {
        v.form = -v.form;
      }
      return v;
    }
    case K::Add:
    case K::Sub: {
      FormValue a = eval_form(*node.lhs, ring);
      FormValue b = eval_form(*node.rhs, ring);
      FormValue r(ring);
      Form fa = materialize(a, ring), fb = materialize(b, ring);
      r.form = node.kind == K::Add ? fa + fb : fa - fb;
      return r;
    }
    case K::Mul: {
      FormValue a = eval_form(*node.lhs, ring);
      FormValue b = eval_form(*node.rhs, ring);
      if (a.symbolic && b.symbolic) {
        bool repeated = (a.key.zmask & b.key.zmask) || (a.key.wmask & b.key.wmask);
        FormKey key{a.key.zmask | b.key.zmask, a.key.wmask | b.key.wmask};
        int sign = repeated ? 0
                            : merge_sign(a.key.combined(ring.num_vars),
                                         b.key.combined(ring.num_vars));
        std::vector<long> exps = a.exps;
        for (std::size_t i = 0; i < exps.size(); ++i) exps[i] += b.exps[i];
        return symbolic_term(ring, a.coef * b.coef * sign, std::move(exps), key);
      }
      FormValue r(ring);
      r.form = wedge(materialize(a, ring), materialize(b, ring));
      return r;
    }
    case K::Div: {
      if (node.rhs->number == 0) throw ParseError("division by zero", node.rhs->offset);
      FormValue v = eval_form(*node.lhs, ring);
      Rational inv = Rational{1} / node.rhs->number;
      if (v.symbolic) {
        v.coef *= inv;
      } else {
        v.form = v.form.scaled(inv);
      }
      return v;
    }
    case K::Pow: {
      FormValue base = eval_form(*node.lhs, ring);
      int k = node.exponent;
      if (k < 0) {
        Form f = materialize(base, ring);
        for (const auto& [key, coef] : f.parts())
          if (key.degree() > 0 && !coef.is_zero())
            throw ParseError("negative power of a non-scalar form", node.offset);
        TruncatedSeries s = f.coefficient(FormKey{});
        FormValue r(ring);
        r.form = Form::scalar(series_pow(invert_unit(s), -k));
        return r;
      }
      if (base.symbolic) {
        if (base.key.degree() == 0) {
          std::vector<long> exps = base.exps;
          for (auto& e : exps) e *= k;
          return symbolic_term(ring, rational_pow(base.coef, k), std::move(exps), base.key);
        }
        if (k == 1) return base;
        if (k == 0) return symbolic_term(ring, Rational{1}, no_exps, FormKey{});
        // A repeated generator annihilates the term; keep the monomial for
        // the overflow check.
        std::vector<long> exps = base.exps;
        for (auto& e : exps) e *= k;
        return symbolic_term(ring, Rational{0}, std::move(exps), base.key);
      }
      FormValue r(ring);
      Form acc = Form::scalar(TruncatedSeries::constant(ring, 1));
      for (int i = 0; i < k; ++i) acc = wedge(acc, base.form);
      r.form = acc;
      return r;
    }
  }
  throw ParseError("unsupported expression", node.offset);
}

}  // namespace

Form parse_form(const std::string& text, const RingSpec& ring) {
  detail::ExprPtr root = detail::parse_expression(text);
  return materialize(eval_form(*root, ring), ring);
}

}  // namespace skz
