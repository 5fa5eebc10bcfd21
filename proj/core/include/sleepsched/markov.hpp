#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sleepsched/model.hpp"
#include "sleepsched/rng.hpp"

namespace sleepsched {

/// Row-major dense matrix.
class RowMatrix {
 public:
  RowMatrix() = default;
  RowMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static RowMatrix identity(std::size_t n);
  static RowMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<std::vector<double>> to_rows() const;

  friend bool operator==(const RowMatrix&, const RowMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Finite Markov chain with a row-stochastic transition matrix. Construction
/// validates that every row sums to 1 within 1e-9.
class MarkovChain {
 public:
  MarkovChain() = default;
  explicit MarkovChain(RowMatrix transitions);

  std::size_t n_states() const { return p_.rows(); }
  const RowMatrix& transitions() const { return p_; }
  double operator()(StateIndex from, StateIndex to) const { return p_(from, to); }

 private:
  RowMatrix p_;
};

/// Quantized process state space with optional physical labels per state.
struct ProcessSpace {
  std::size_t n_states = 0;
  std::vector<double> labels;
};

/// Process chain together with its state space.
struct ProcessModel {
  MarkovChain chain;
  ProcessSpace space;
};

StateIndex step_chain(const MarkovChain& chain, StateIndex current, Rng& rng);

/// Line-graph chain: stay with 1 - p_change, move to each neighbour with
/// p_change / (number of neighbours).
MarkovChain adjacent_state_process(std::size_t n_states, double p_change);

/// Stationary distribution by direct solve; uniform when the chain has no
/// unique stationary distribution.
std::vector<double> stationary_distribution(const MarkovChain& chain);

/// Draws an index from a probability vector.
StateIndex sample_index(std::span<const double> probs, Rng& rng);

}  // namespace sleepsched
