#include "superkoszul/connections.hpp"

#include <string>
#include <utility>
#include <vector>

namespace skz {

// ------------------------------------------------------------ form matrix --

FormMatrix::FormMatrix(const BundleSpec& bundle, const RingSpec& ring)
    : bundle_(bundle), ring_(ring) {
  entries_.assign(bundle.rank, std::vector<Form>(bundle.rank, Form::zero(ring)));
}

namespace {

void require_index(const BundleSpec& bundle, int i, int j) {
  if (i < 0 || i >= bundle.rank || j < 0 || j >= bundle.rank) {
    throw RingError("matrix index (" + std::to_string(i) + ", " + std::to_string(j) +
                    ") out of range for rank " + std::to_string(bundle.rank));
  }
}

}  // namespace

const Form& FormMatrix::entry(int i, int j) const {
  require_index(bundle_, i, j);
  return entries_[i][j];
}

void FormMatrix::set_entry(int i, int j, const Form& f) {
  require_index(bundle_, i, j);
  require_same_ring(ring_, f.ring());
  entries_[i][j] = f;
}

bool FormMatrix::is_zero() const {
  for (const auto& row : entries_) {
    for (const auto& f : row) {
      if (!f.is_zero()) return false;
    }
  }
  return true;
}

int FormMatrix::min_valid_order() const {
  int v = kExactOrder;
  for (const auto& row : entries_) {
    for (const auto& f : row) v = std::min(v, f.min_valid_order());
  }
  return v;
}

FormMatrix FormMatrix::transposed() const {
  FormMatrix out(bundle_, ring_);
  for (int i = 0; i < bundle_.rank; ++i) {
    for (int j = 0; j < bundle_.rank; ++j) out.entries_[j][i] = entries_[i][j];
  }
  return out;
}

FormMatrix FormMatrix::operator-() const {
  FormMatrix out(bundle_, ring_);
  for (int i = 0; i < bundle_.rank; ++i) {
    for (int j = 0; j < bundle_.rank; ++j) out.entries_[i][j] = -entries_[i][j];
  }
  return out;
}

FormMatrix operator+(const FormMatrix& a, const FormMatrix& b) {
  require_same_bundle(a.bundle_, b.bundle_);
  require_same_ring(a.ring_, b.ring_);
  FormMatrix out(a.bundle_, a.ring_);
  for (int i = 0; i < a.bundle_.rank; ++i) {
    for (int j = 0; j < a.bundle_.rank; ++j) out.entries_[i][j] = a.entries_[i][j] + b.entries_[i][j];
  }
  return out;
}

FormMatrix operator-(const FormMatrix& a, const FormMatrix& b) { return a + (-b); }

FormMatrix dbar_entries(const FormMatrix& m) {
  FormMatrix out(m.bundle(), m.ring());
  for (int i = 0; i < m.bundle().rank; ++i) {
    for (int j = 0; j < m.bundle().rank; ++j) out.set_entry(i, j, dbar(m.entry(i, j)));
  }
  return out;
}

FormMatrix partial_entries(const FormMatrix& m) {
  FormMatrix out(m.bundle(), m.ring());
  for (int i = 0; i < m.bundle().rank; ++i) {
    for (int j = 0; j < m.bundle().rank; ++j) out.set_entry(i, j, partial(m.entry(i, j)));
  }
  return out;
}

namespace {

void require_selection(const BundleSpec& bundle, const std::vector<int>& idx,
                       const char* which) {
  for (std::size_t t = 0; t < idx.size(); ++t) {
    if (idx[t] < 0 || idx[t] >= bundle.rank)
      throw RingError(std::string("determinant ") + which + " index out of range");
    if (t > 0 && idx[t] <= idx[t - 1])
      throw RingError(std::string("determinant ") + which + " indices must be strictly ascending");
  }
}

Form determinant_rec(const FormMatrix& m, const std::vector<int>& rows,
                     const std::vector<int>& cols) {
  if (rows.empty()) return Form::scalar(TruncatedSeries::constant(m.ring(), 1));
  Form out = Form::zero(m.ring());
  std::vector<int> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t t = 0; t < cols.size(); ++t) {
    const Form& head = m.entry(rows[0], cols[t]);
    if (head.is_zero() && head.parts().empty()) continue;
    std::vector<int> sub_cols;
    sub_cols.reserve(cols.size() - 1);
    for (std::size_t s = 0; s < cols.size(); ++s) {
      if (s != t) sub_cols.push_back(cols[s]);
    }
    Form term = wedge(head, determinant_rec(m, sub_rows, sub_cols));
    out = (t % 2 == 0) ? out + term : out - term;
  }
  return out;
}

}  // namespace

Form wedge_determinant(const FormMatrix& m, const std::vector<int>& rows,
                       const std::vector<int>& cols) {
  if (rows.size() != cols.size())
    throw RingError("determinant selection must pick equally many rows and columns");
  require_selection(m.bundle(), rows, "row");
  require_selection(m.bundle(), cols, "column");
  return determinant_rec(m, rows, cols);
}

Form wedge_determinant(const FormMatrix& m) {
  std::vector<int> all(m.bundle().rank);
  for (int i = 0; i < m.bundle().rank; ++i) all[i] = i;
  return wedge_determinant(m, all, all);
}

// ------------------------------------------------------------- connection --

Connection::Connection(const BundleSpec& bundle, const RingSpec& ring, const FormMatrix& gamma)
    : gamma_(gamma) {
  require_same_bundle(bundle, gamma.bundle());
  require_same_ring(ring, gamma.ring());
  for (int i = 0; i < bundle.rank; ++i) {
    for (int j = 0; j < bundle.rank; ++j) {
      const Form& f = gamma.entry(i, j);
      if (!(f - f.bidegree_part(1, 0)).is_zero()) {
        throw RingError("connection entry (" + std::to_string(i + 1) + ", " +
                        std::to_string(j + 1) + ") is not of bidegree (1,0)");
      }
    }
  }
}

Connection Connection::zero(const BundleSpec& b, const RingSpec& r) {
  return Connection(b, r, FormMatrix::zero(b, r));
}

std::string FlatnessWitness::to_string() const {
  return "entry (" + std::to_string(row) + ", " + std::to_string(col) + "), part " +
         skz::to_string(key) + ", monomial " + skz::to_string(monomial);
}

NotFlat::NotFlat(const FlatnessWitness& w)
    : RingError("connection is not flat: first nonzero term of the curvature test at " +
                w.to_string()),
      witness(w) {}

FlatnessVerdict check_flat(const Connection& c) {
  const int r = c.bundle().rank;
  const FormMatrix& g = c.gamma();
  FlatnessVerdict verdict;
  verdict.flat = true;
  int order = kExactOrder;
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      Form f = partial(g.entry(k, j));
      for (int i = 0; i < r; ++i) f = f + wedge(g.entry(k, i), g.entry(i, j));
      order = std::min(order, f.min_valid_order());
      if (verdict.flat && !f.is_zero()) {
        verdict.flat = false;
        auto w = first_nonzero_part(f, c.ring().truncation);
        verdict.witness = FlatnessWitness{k + 1, j + 1, w->key, w->monomial};
      }
    }
  }
  verdict.verified_order = std::min(order, c.ring().truncation);
  return verdict;
}

Connection dual_connection(const Connection& c) {
  return Connection(c.bundle(), c.ring(), -c.gamma().transposed());
}

EndMatrix exterior_extension_matrix(const Connection& c) {
  const int r = c.bundle().rank;
  std::vector<Multivector> images;
  images.reserve(r);
  for (int j = 0; j < r; ++j) {
    Multivector image(c.bundle(), c.ring());
    for (int i = 0; i < r; ++i) image.add_part(ExtMask{1} << i, c.gamma().entry(i, j));
    images.push_back(image);
  }
  return extend_derivation(c.bundle(), c.ring(), images, 1);
}

FormMatrix curvature_R(const Connection& c) {
  FlatnessVerdict verdict = check_flat(c);
  if (!verdict.flat) throw NotFlat(*verdict.witness);
  return dbar_entries(dual_connection(c).gamma());
}

Form chern_form_top(const FormMatrix& R) {
  for (int i = 0; i < R.bundle().rank; ++i) {
    for (int j = 0; j < R.bundle().rank; ++j) {
      const Form& f = R.entry(i, j);
      if (!(f - f.bidegree_part(1, 1)).is_zero()) {
        throw RingError("top Chern form requires a matrix of (1,1)-forms; entry (" +
                        std::to_string(i + 1) + ", " + std::to_string(j + 1) + ") is not");
      }
    }
  }
  return wedge_determinant(R);
}

// --------------------------------------------------------- superconnection --

NotFlatHalves::NotFlatHalves(const std::string& half_name, const EntryWitness& w)
    : RingError("the " + half_name + " half of the superconnection does not square to zero: " +
                w.to_string()),
      half(half_name),
      witness(w) {}

Superconnection::Superconnection(const BundleSpec& b, const RingSpec& r, Base base,
                                 std::vector<EndMatrix> partial_pieces,
                                 std::vector<EndMatrix> dbar_pieces)
    : bundle_(b),
      ring_(r),
      base_(base),
      partial_pieces_(std::move(partial_pieces)),
      dbar_pieces_(std::move(dbar_pieces)) {
  auto validate = [&](const std::vector<EndMatrix>& pieces) {
    for (const EndMatrix& piece : pieces) {
      require_same_bundle(bundle_, piece.bundle());
      require_same_ring(ring_, piece.ring());
      if (!piece.total_parity_part(0).is_zero())
        throw RingError("superconnection pieces must have odd total parity");
    }
  };
  validate(partial_pieces_);
  validate(dbar_pieces_);
}

Superconnection Superconnection::dbar_based(const BundleSpec& b, const RingSpec& r,
                                            std::vector<EndMatrix> pieces) {
  return Superconnection(b, r, Base::Dbar, {}, std::move(pieces));
}

Superconnection Superconnection::partial_based(const BundleSpec& b, const RingSpec& r,
                                               std::vector<EndMatrix> pieces) {
  return Superconnection(b, r, Base::Partial, std::move(pieces), {});
}

Superconnection Superconnection::combine(const Superconnection& partial_half,
                                         const Superconnection& dbar_half) {
  if (partial_half.base() != Base::Partial || dbar_half.base() != Base::Dbar)
    throw RingError("combine expects a (1,0)-based half and a (0,1)-based half, in that order");
  require_same_bundle(partial_half.bundle(), dbar_half.bundle());
  require_same_ring(partial_half.ring(), dbar_half.ring());
  return Superconnection(partial_half.bundle(), partial_half.ring(), Base::Full,
                         partial_half.partial_pieces(), dbar_half.dbar_pieces());
}

namespace {

EndMatrix sum_pieces(const BundleSpec& b, const RingSpec& r,
                     const std::vector<EndMatrix>& pieces) {
  EndMatrix out = EndMatrix::zero(b, r);
  for (const EndMatrix& piece : pieces) out = out + piece;
  return out;
}

}  // namespace

EndMatrix Superconnection::partial_half_matrix() const {
  return sum_pieces(bundle_, ring_, partial_pieces_);
}

EndMatrix Superconnection::dbar_half_matrix() const {
  return sum_pieces(bundle_, ring_, dbar_pieces_);
}

EndMatrix Superconnection::matrix_part() const {
  return partial_half_matrix() + dbar_half_matrix();
}

Multivector Superconnection::apply_to(const Multivector& v) const {
  Multivector out = apply(matrix_part(), v);
  if (base_ != Base::Dbar) out = out + partial(v);
  if (base_ != Base::Partial) out = out + dbar(v);
  return out;
}

EndMatrix Superconnection::square() const {
  EndMatrix m = matrix_part();
  EndMatrix out = compose(m, m);
  if (base_ != Base::Dbar) out = out + partial_entries(m);
  if (base_ != Base::Partial) out = out + dbar_entries(m);
  return out;
}

EndMatrix supercurvature(const Superconnection& A) {
  if (A.base() != Superconnection::Base::Full)
    throw RingError("supercurvature requires a combined superconnection with both halves");
  const int order = A.ring().truncation;
  EndMatrix mp = A.partial_half_matrix();
  EndMatrix md = A.dbar_half_matrix();
  EndMatrix sq_partial = partial_entries(mp) + compose(mp, mp);
  if (!sq_partial.is_zero())
    throw NotFlatHalves("(1,0)", *first_nonzero_entry(sq_partial, order));
  EndMatrix sq_dbar = dbar_entries(md) + compose(md, md);
  if (!sq_dbar.is_zero()) throw NotFlatHalves("(0,1)", *first_nonzero_entry(sq_dbar, order));
  return partial_entries(md) + dbar_entries(mp) + compose(mp, md) + compose(md, mp);
}

Form chern_character(const Superconnection& A) {
  EndMatrix curv = supercurvature(A);
  EndMatrix sum = EndMatrix::identity(A.bundle(), A.ring());
  EndMatrix power = sum;
  for (int k = 1; k <= A.ring().num_vars; ++k) {
    power = compose(power, curv).scaled(Rational(1, k));
    sum = sum + power;
  }
  return supertrace(sum);
}

}  // namespace skz
