#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "trajsyn/grid.hpp"
#include "trajsyn/oue.hpp"

namespace trajsyn {

// Indicator vector over the transition domain: which transitions get their
// maintained frequency replaced by the fresh estimate this tick.
struct SignificantSet {
  std::vector<std::uint8_t> selected;

  std::size_t count() const;
  static SignificantSet none(std::size_t size) { return {std::vector<std::uint8_t>(size, 0)}; }
  static SignificantSet all(std::size_t size) { return {std::vector<std::uint8_t>(size, 1)}; }
};

// Per-transition update rule behind the selection: choosing a transition
// costs the perturbation variance err_upd, keeping the old value costs the
// squared gap to the fresh estimate. The total error is a sum of independent
// terms, so the minimizer is the per-index comparison
//   |f_model - f_fresh|^2 >= err_upd  (ties select, preferring fresh data).
std::vector<std::uint8_t> select_indicator(std::span<const double> f_model,
                                           std::span<const double> f_fresh, double err_upd);

// Curator-side model over the transition domain: maintained non-negative
// frequencies for movement/enter/quit transitions, a bounded history of the
// per-tick vectors (for the deviation signal), and a history of selection
// ratios (for the allocation portion).
class MobilityModel {
 public:
  MobilityModel(const TransitionDomain& dom, std::size_t history_capacity);

  const TransitionDomain& domain() const { return *dom_; }
  const std::vector<double>& frequencies() const { return f_; }

  // Threshold selection against a fresh estimate collected with budget eps_t
  // from n_t reporters. Throws UnusableEstimate when the estimate has no
  // contributing reports.
  SignificantSet select_significant(const FrequencyEstimate& fresh, double eps_t,
                                    std::size_t n_t) const;

  // Replaces selected entries with max(0, fresh value), leaves the rest
  // unchanged, and appends the post-update vector to the history ring.
  void apply_update(const FrequencyEstimate& fresh, const SignificantSet& sig);

  // Tick with no collection: frequencies unchanged, history still advances
  // so it holds one vector per timestamp.
  void carry_forward();

  // True once any update has been applied. The allocator keeps the bootstrap
  // portion until then.
  bool initialized() const { return initialized_; }

  void push_sig_ratio(double ratio);
  // Most recent `kappa` selection ratios, oldest first.
  std::vector<double> recent_sig_ratios(std::size_t kappa) const;

  std::size_t history_size() const { return history_.size(); }
  const std::vector<double>& history_at(std::size_t i) const { return history_[i]; }

  // Markov-chain distributions over the maintained frequencies.
  // P(move i->j) = f_ij / (sum over neighbors x of f_ix + f_iQ). Rows whose
  // denominator is zero fall back to uniform over neighbors with quit
  // probability zero, so synthesis never stalls on a cold cell.
  double move_prob(Cell from, Cell to) const;  // throws NonAdjacentQuery
  double quit_given_cell(Cell c) const;

  // Raw maintained movement frequencies of the row at `from`, aligned with
  // neighbors(from) order. Sampling proportional to these equals sampling
  // from move_prob renormalized over the neighbors.
  void move_row(Cell from, std::vector<double>& out) const;

  // Normalized over all K^2 cells; all-zero input falls back to uniform.
  std::vector<double> enter_dist() const;
  std::vector<double> quit_dist() const;

  // Snapshot of the domain descriptor plus the frequency vector, for
  // checkpoint/restart and test fixtures.
  std::string to_json_string() const;
  static MobilityModel from_json_string(const std::string& text, std::size_t history_capacity);

 private:
  double row_denominator(Cell from) const;

  const TransitionDomain* dom_;  // non-owning for the common path
  std::vector<double> f_;
  bool initialized_ = false;
  std::size_t history_capacity_;
  std::deque<std::vector<double>> history_;
  std::deque<double> sig_ratio_history_;
  std::shared_ptr<const TransitionDomain> owned_dom_;  // set by from_json_string
};

}  // namespace trajsyn
