#include "sleepsched/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace sleepsched {

RowMatrix RowMatrix::identity(std::size_t n) {
  RowMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

RowMatrix RowMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  RowMatrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::vector<std::vector<double>> RowMatrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r].assign(row(r).begin(), row(r).end());
  return out;
}

MarkovChain::MarkovChain(RowMatrix transitions) : p_(std::move(transitions)) {
  if (p_.rows() == 0 || p_.rows() != p_.cols())
    throw std::invalid_argument("transition matrix must be square and non-empty");
  for (std::size_t r = 0; r < p_.rows(); ++r) {
    double sum = 0.0;
    for (double v : p_.row(r)) {
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("transition probabilities must lie in [0, 1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("transition row " + std::to_string(r) + " sums to " +
                                  std::to_string(sum));
  }
}

StateIndex sample_index(std::span<const double> probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;  // rounding slack in the cumulative sum
}

StateIndex step_chain(const MarkovChain& chain, StateIndex current, Rng& rng) {
  if (current >= chain.n_states()) throw std::invalid_argument("step_chain: state out of range");
  return sample_index(chain.transitions().row(current), rng);
}

MarkovChain adjacent_state_process(std::size_t n_states, double p_change) {
  if (n_states < 2) throw std::invalid_argument("adjacent_state_process needs >= 2 states");
  if (!(p_change >= 0.0 && p_change <= 1.0))
    throw std::invalid_argument("p_change must lie in [0, 1]");
  RowMatrix p(n_states, n_states);
  for (std::size_t i = 0; i < n_states; ++i) {
    const bool first = i == 0;
    const bool last = i + 1 == n_states;
    const double deg = (first || last) ? 1.0 : 2.0;
    p(i, i) = 1.0 - p_change;
    if (!first) p(i, i - 1) = p_change / deg;
    if (!last) p(i, i + 1) = p_change / deg;
  }
  return MarkovChain(std::move(p));
}

std::vector<double> stationary_distribution(const MarkovChain& chain) {
  const std::size_t n = chain.n_states();
  const std::vector<double> uniform(n, 1.0 / static_cast<double>(n));
  // Solve pi (P - I) = 0 with the last equation replaced by sum(pi) = 1,
  // i.e. A x = b with A = (P - I)^T.
  RowMatrix a(n, n);
  std::vector<double> b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = chain(j, i) - (i == j ? 1.0 : 0.0);
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  b[n - 1] = 1.0;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) < 1e-12) return uniform;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(pivot, c));
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> pi(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a(i, c) * pi[c];
    pi[i] = s / a(i, i);
  }
  double total = 0.0;
  for (double& v : pi) {
    if (v < -1e-9) return uniform;
    v = std::max(v, 0.0);
    total += v;
  }
  if (!(total > 0.0)) return uniform;
  for (double& v : pi) v /= total;
  return pi;
}

}  // namespace sleepsched
