#include "trajsyn/mobility.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

namespace trajsyn {

std::size_t SignificantSet::count() const {
  return static_cast<std::size_t>(std::count(selected.begin(), selected.end(), 1));
}

std::vector<std::uint8_t> select_indicator(std::span<const double> f_model,
                                           std::span<const double> f_fresh, double err_upd) {
  if (f_model.size() != f_fresh.size()) {
    throw LengthMismatch("select_indicator: vector sizes differ");
  }
  std::vector<std::uint8_t> x(f_model.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double gap = f_model[i] - f_fresh[i];
    x[i] = (gap * gap >= err_upd) ? 1 : 0;
  }
  return x;
}

MobilityModel::MobilityModel(const TransitionDomain& dom, std::size_t history_capacity)
    : dom_(&dom), f_(dom.size(), 0.0), history_capacity_(std::max<std::size_t>(history_capacity, 2)) {
  // The pre-run state counts as the timestamp-0 history entry; the first
  // update then registers as deviation instead of starting from a blind spot.
  history_.push_back(f_);
}

SignificantSet MobilityModel::select_significant(const FrequencyEstimate& fresh, double eps_t,
                                                 std::size_t n_t) const {
  if (n_t == 0 || !fresh.usable()) {
    throw UnusableEstimate("select_significant: estimate has no contributing reports");
  }
  const double err_upd = oue_variance(PrivacyParams{eps_t}, n_t);
  return SignificantSet{select_indicator(f_, fresh.values, err_upd)};
}

void MobilityModel::apply_update(const FrequencyEstimate& fresh, const SignificantSet& sig) {
  if (sig.selected.size() != f_.size() || fresh.values.size() != f_.size()) {
    throw LengthMismatch("apply_update: vectors not aligned with domain");
  }
  for (std::size_t i = 0; i < f_.size(); ++i) {
    if (sig.selected[i]) {
      f_[i] = std::max(0.0, fresh.values[i]);
    }
  }
  initialized_ = true;
  carry_forward();
}

void MobilityModel::carry_forward() {
  history_.push_back(f_);
  while (history_.size() > history_capacity_) history_.pop_front();
}

void MobilityModel::push_sig_ratio(double ratio) {
  sig_ratio_history_.push_back(ratio);
  while (sig_ratio_history_.size() > history_capacity_) sig_ratio_history_.pop_front();
}

std::vector<double> MobilityModel::recent_sig_ratios(std::size_t kappa) const {
  const std::size_t n = std::min(kappa, sig_ratio_history_.size());
  return {sig_ratio_history_.end() - n, sig_ratio_history_.end()};
}

double MobilityModel::row_denominator(Cell from) const {
  double denom = 0.0;
  for (std::size_t mi : dom_->moves_from(from)) denom += f_[mi];
  denom += f_[dom_->quit_index(from)];
  return denom;
}

double MobilityModel::move_prob(Cell from, Cell to) const {
  if (!adjacent(from, to)) {
    throw NonAdjacentQuery("move_prob: destination not adjacent to origin");
  }
  const double denom = row_denominator(from);
  const auto row = dom_->moves_from(from);
  if (denom <= 0.0) {
    return 1.0 / static_cast<double>(row.size());
  }
  for (std::size_t mi : row) {
    if (dom_->state_at(mi).b == to) return f_[mi] / denom;
  }
  throw NonAdjacentQuery("move_prob: destination outside grid");
}

double MobilityModel::quit_given_cell(Cell c) const {
  const double denom = row_denominator(c);
  if (denom <= 0.0) return 0.0;
  return f_[dom_->quit_index(c)] / denom;
}

void MobilityModel::move_row(Cell from, std::vector<double>& out) const {
  const auto row = dom_->moves_from(from);
  out.resize(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = f_[row[j]];
}

namespace {
std::vector<double> normalize_or_uniform(std::vector<double> v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (total <= 0.0) {
    std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(v.size()));
    return v;
  }
  for (double& x : v) x /= total;
  return v;
}
}  // namespace

std::vector<double> MobilityModel::enter_dist() const {
  const int n = dom_->grid().cell_count();
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = f_[dom_->enter_index(cell_at(i, dom_->grid().k))];
  return normalize_or_uniform(std::move(v));
}

std::vector<double> MobilityModel::quit_dist() const {
  const int n = dom_->grid().cell_count();
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = f_[dom_->quit_index(cell_at(i, dom_->grid().k))];
  return normalize_or_uniform(std::move(v));
}

std::string MobilityModel::to_json_string() const {
  nlohmann::json j;
  j["grid"] = {{"min_x", dom_->grid().bbox.min_x},
               {"min_y", dom_->grid().bbox.min_y},
               {"max_x", dom_->grid().bbox.max_x},
               {"max_y", dom_->grid().bbox.max_y},
               {"k", dom_->grid().k}};
  j["frequencies"] = f_;
  return j.dump(2);
}

MobilityModel MobilityModel::from_json_string(const std::string& text,
                                              std::size_t history_capacity) {
  const nlohmann::json j = nlohmann::json::parse(text);
  GridSpec g;
  g.bbox.min_x = j.at("grid").at("min_x").get<double>();
  g.bbox.min_y = j.at("grid").at("min_y").get<double>();
  g.bbox.max_x = j.at("grid").at("max_x").get<double>();
  g.bbox.max_y = j.at("grid").at("max_y").get<double>();
  g.k = j.at("grid").at("k").get<int>();
  auto dom = std::make_shared<TransitionDomain>(g);
  MobilityModel m(*dom, history_capacity);
  m.owned_dom_ = dom;
  m.dom_ = m.owned_dom_.get();
  auto freqs = j.at("frequencies").get<std::vector<double>>();
  if (freqs.size() != dom->size()) {
    throw LengthMismatch("model snapshot frequency vector does not match domain size");
  }
  m.f_ = std::move(freqs);
  m.initialized_ = true;
  m.history_.clear();
  m.history_.push_back(m.f_);
  return m;
}

}  // namespace trajsyn
