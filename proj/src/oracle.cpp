#include "curlra/oracle.hpp"

#include "curlra/detail/rng.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curlra {

namespace {

inline std::uint64_t cell_key(Index i, Index j) {
  return (std::uint64_t(i) << 32) | std::uint64_t(j);
}

}  // namespace

EntryOracle::EntryOracle(Index m, Index n,
                         std::function<double(Index, Index)> entry)
    : m_(m), n_(n), entry_(std::move(entry)) {
  if (m < 0 || n < 0)
    throw std::invalid_argument("EntryOracle: negative dimensions");
}

double EntryOracle::operator()(Index i, Index j) const {
  if (i < 0 || i >= m_ || j < 0 || j >= n_)
    throw std::out_of_range("EntryOracle: index out of range");
  {
    std::lock_guard<std::mutex> lock(mutex_);
    seen_.insert(cell_key(i, j));
  }
  return entry_(i, j);
}

double EntryOracle::peek(Index i, Index j) const {
  if (i < 0 || i >= m_ || j < 0 || j >= n_)
    throw std::out_of_range("EntryOracle: index out of range");
  return entry_(i, j);
}

std::size_t EntryOracle::access_count() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return seen_.size();
}

bool EntryOracle::was_accessed(Index i, Index j) const {
  std::lock_guard<std::mutex> lock(mutex_);
  return seen_.count(cell_key(i, j)) > 0;
}

void EntryOracle::reset_counter() const {
  std::lock_guard<std::mutex> lock(mutex_);
  seen_.clear();
}

Vector EntryOracle::fetch_row(Index i, const IndexSet& cols) const {
  Vector v(Index(cols.size()));
  for (std::size_t a = 0; a < cols.size(); ++a) v(Index(a)) = (*this)(i, cols[a]);
  return v;
}

Vector EntryOracle::fetch_col(Index j, const IndexSet& rows) const {
  Vector v(Index(rows.size()));
  for (std::size_t a = 0; a < rows.size(); ++a) v(Index(a)) = (*this)(rows[a], j);
  return v;
}

DenseMatrix EntryOracle::fetch_block(const IndexSet& rows,
                                     const IndexSet& cols) const {
  DenseMatrix B(Index(rows.size()), Index(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b)
      B(Index(a), Index(b)) = (*this)(rows[a], cols[b]);
  return B;
}

DenseMatrix EntryOracle::densify() const {
  DenseMatrix M(m_, n_);
  for (Index i = 0; i < m_; ++i)
    for (Index j = 0; j < n_; ++j) M(i, j) = (*this)(i, j);
  return M;
}

EntryOracle dense_oracle(DenseMatrix M) {
  auto held = std::make_shared<DenseMatrix>(std::move(M));
  return EntryOracle(held->rows(), held->cols(),
                     [held](Index i, Index j) { return (*held)(i, j); });
}

EntryOracle null_oracle(Index m, Index n) {
  return EntryOracle(m, n, [](Index, Index) { return 0.0; });
}

EntryOracle delta_oracle(Index m, Index n, Index i, Index j) {
  if (i < 0 || i >= m || j < 0 || j >= n)
    throw std::invalid_argument("delta_oracle: cell outside the matrix");
  return EntryOracle(m, n, [i, j](Index a, Index b) {
    return (a == i && b == j) ? 1.0 : 0.0;
  });
}

EntryOracle cauchy_oracle(std::vector<double> x, std::vector<double> y) {
  std::vector<double> ys = y;
  std::sort(ys.begin(), ys.end());
  for (double v : x)
    if (std::binary_search(ys.begin(), ys.end(), v))
      throw std::invalid_argument("cauchy_oracle: coincident nodes");
  auto xs = std::make_shared<std::vector<double>>(std::move(x));
  auto yv = std::make_shared<std::vector<double>>(std::move(y));
  return EntryOracle(Index(xs->size()), Index(yv->size()),
                     [xs, yv](Index i, Index j) {
                       return 1.0 / ((*xs)[std::size_t(i)] - (*yv)[std::size_t(j)]);
                     });
}

EntryOracle cauchy_oracle(Index n) {
  std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    x[std::size_t(i)] = double(i) + 1.0;
    y[std::size_t(i)] = double(i) + 1.5;
  }
  return cauchy_oracle(std::move(x), std::move(y));
}

namespace {

Vector geometric_terms(Index n, double ratio) {
  if (!(ratio > 0.0) || ratio > 1.0)
    throw std::invalid_argument("spsd_oracle: ratio must be in (0, 1]");
  // Terms below machine noise relative to the leading one contribute
  // nothing representable; cut them to keep entry cost bounded.
  std::vector<double> terms;
  double v = 1.0;
  while (Index(terms.size()) < n && v > 1e-18) {
    terms.push_back(v);
    v *= ratio;
  }
  Vector out(Index(terms.size()));
  for (std::size_t t = 0; t < terms.size(); ++t) out(Index(t)) = terms[t];
  return out;
}

}  // namespace

EntryOracle spsd_oracle(Index n, double ratio, std::uint64_t seed) {
  const Vector lambda = geometric_terms(n, ratio);
  auto Q = std::make_shared<DenseMatrix>(
      random_orthonormal(n, lambda.size(), seed));
  auto lam = std::make_shared<Vector>(lambda);
  return EntryOracle(n, n, [Q, lam](Index i, Index j) {
    double acc = 0.0;
    for (Index t = 0; t < lam->size(); ++t)
      acc += (*lam)(t) * (*Q)(i, t) * (*Q)(j, t);
    return acc;
  });
}

Vector spsd_oracle_spectrum(Index n, double ratio) {
  // Terms past the generator's cutoff are exactly zero in the assembled
  // matrix, so the declared spectrum pads with zeros out to full length.
  const Vector kept = geometric_terms(n, ratio);
  Vector full = Vector::Zero(n);
  full.head(kept.size()) = kept;
  return full;
}

DenseMatrix random_orthonormal(Index m, Index k, std::uint64_t seed) {
  if (k > m)
    throw std::invalid_argument("random_orthonormal: more columns than rows");
  detail::Rng rng(detail::mix_seed(seed, 0x0f0f));
  DenseMatrix G(m, k);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < k; ++j) G(i, j) = rng.normal();
  Eigen::HouseholderQR<DenseMatrix> qr(G);
  DenseMatrix Q = qr.householderQ() * DenseMatrix::Identity(m, k);
  // Pin column signs so the factor is a deterministic function of the seed
  // alone, not of the QR sign convention.
  for (Index j = 0; j < k; ++j)
    if (Q(j, j) < 0) Q.col(j) = -Q.col(j);
  return Q;
}

DenseMatrix random_rank_matrix(Index m, Index n, Index r, std::uint64_t seed) {
  if (r < 0 || r > std::min(m, n))
    throw std::invalid_argument("random_rank_matrix: bad rank");
  detail::Rng rng(detail::mix_seed(seed, 0x5151));
  DenseMatrix G(m, r), H(r, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < r; ++j) G(i, j) = rng.normal();
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < n; ++j) H(i, j) = rng.normal();
  return G * H;
}

DenseMatrix random_spsd_matrix(const Vector& spectrum, std::uint64_t seed) {
  const Index n = spectrum.size();
  for (Index i = 0; i < n; ++i)
    if (spectrum(i) < 0.0)
      throw std::invalid_argument("random_spsd_matrix: negative eigenvalue");
  const DenseMatrix Q = random_orthonormal(n, n, seed);
  DenseMatrix W = Q * spectrum.asDiagonal() * Q.transpose();
  return 0.5 * (W + W.transpose());  // exact symmetry
}

}  // namespace curlra
