#include <doctest.h>

#include <cmath>
#include <numeric>

#include "trajsyn/mobility.hpp"
#include "trajsyn/rng.hpp"

using namespace trajsyn;

namespace {

const GridSpec kGrid2{BoundingBox{0.0, 0.0, 1.0, 1.0}, 2};

FrequencyEstimate estimate_of(std::vector<double> values, std::size_t n, double eps) {
  FrequencyEstimate est;
  est.values = std::move(values);
  est.n = n;
  est.epsilon_used = eps;
  return est;
}

// Total error of Eq-style indicator assignment: selected entries cost the
// perturbation variance, unselected ones the squared approximation gap.
double total_error(const std::vector<std::uint8_t>& x, const std::vector<double>& f_model,
                   const std::vector<double>& f_fresh, double err_upd) {
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) {
      err += err_upd;
    } else {
      const double gap = f_model[i] - f_fresh[i];
      err += gap * gap;
    }
  }
  return err;
}

}  // namespace

TEST_CASE("selection threshold: gap^2 vs update error") {
  // err_upd = 0.01 at eps = ln 3, n = 300.
  const double err_upd = oue_variance({std::log(3.0)}, 300);
  CHECK(err_upd == doctest::Approx(0.01));
  const std::vector<double> model{0.5, 0.5};
  const std::vector<double> fresh{0.7, 0.45};  // gaps 0.2 and 0.05
  CHECK(select_indicator(model, fresh, err_upd) == std::vector<std::uint8_t>{1, 0});
}

TEST_CASE("zero approximation error selects nothing; ties select") {
  const std::vector<double> v{0.1, 0.2, 0.3};
  CHECK(select_indicator(v, v, 0.01) == std::vector<std::uint8_t>{0, 0, 0});
  // An exact tie of the two error terms prefers the fresh data.
  const std::vector<double> model_tied{0.0};
  const std::vector<double> fresh_tied{0.1};
  CHECK(select_indicator(model_tied, fresh_tied, 0.1 * 0.1) == std::vector<std::uint8_t>{1});
}

TEST_CASE("threshold rule matches the exhaustive minimizer") {
  Rng rng(2024);
  for (int instance = 0; instance < 1000; ++instance) {
    const std::size_t n = 1 + rng.uniform_below(12);
    std::vector<double> f_model(n), f_fresh(n);
    for (std::size_t i = 0; i < n; ++i) {
      f_model[i] = rng.next_double();
      f_fresh[i] = rng.next_double();
    }
    const double err_upd = 0.001 + 0.2 * rng.next_double();
    const auto x = select_indicator(f_model, f_fresh, err_upd);

    double best = 1e300;
    for (std::size_t mask = 0; mask < (1ull << n); ++mask) {
      std::vector<std::uint8_t> cand(n);
      for (std::size_t i = 0; i < n; ++i) cand[i] = (mask >> i) & 1;
      best = std::min(best, total_error(cand, f_model, f_fresh, err_upd));
    }
    CHECK(total_error(x, f_model, f_fresh, err_upd) == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("selection never shrinks as the report count grows") {
  Rng rng(7);
  const TransitionDomain dom(kGrid2);
  MobilityModel model(dom, 6);
  std::vector<double> fresh_values(dom.size());
  for (double& v : fresh_values) v = rng.next_double() * 0.1;
  for (std::size_t n_small : {10u, 50u, 200u}) {
    const auto small = model.select_significant(estimate_of(fresh_values, n_small, 1.0), 1.0,
                                                n_small);
    const auto large = model.select_significant(estimate_of(fresh_values, 4 * n_small, 1.0),
                                                1.0, 4 * n_small);
    for (std::size_t i = 0; i < dom.size(); ++i) {
      if (small.selected[i]) CHECK(large.selected[i]);
    }
  }
}

TEST_CASE("select_significant rejects unusable estimates") {
  const TransitionDomain dom(kGrid2);
  MobilityModel model(dom, 6);
  CHECK_THROWS_AS(model.select_significant(estimate_of({}, 0, 1.0), 1.0, 0),
                  UnusableEstimate);
}

TEST_CASE("apply_update: selective replacement with clipping") {
  const TransitionDomain dom(GridSpec{BoundingBox{0, 0, 1, 1}, 1});  // 3 states
  MobilityModel model(dom, 6);
  model.apply_update(estimate_of({0.5, -0.1, 0.6}, 10, 1.0), SignificantSet::all(3));
  CHECK(model.frequencies() == std::vector<double>{0.5, 0.0, 0.6});

  const auto before = model.frequencies();
  const auto history_before = model.history_size();
  model.apply_update(estimate_of({0.9, 0.9, 0.9}, 10, 1.0), SignificantSet::none(3));
  CHECK(model.frequencies() == before);
  CHECK(model.history_size() == history_before + 1);

  SignificantSet one = SignificantSet::none(3);
  one.selected[0] = 1;
  model.apply_update(estimate_of({0.3, 0.9, 0.9}, 10, 1.0), one);
  CHECK(model.frequencies() == std::vector<double>{0.3, 0.0, 0.6});
}

namespace {

// K=2 grid where every cell is adjacent to every other. Cell c = (0,0);
// f_{c->a} = 0.2 (a = (0,1)), f_{c->b} = 0.1 (b = (1,0)), f_{cQ} = 0.1.
MobilityModel hand_model(const TransitionDomain& dom) {
  MobilityModel model(dom, 6);
  std::vector<double> values(dom.size(), 0.0);
  values[dom.index_of(TransitionState::move({0, 0}, {0, 1}))] = 0.2;
  values[dom.index_of(TransitionState::move({0, 0}, {1, 0}))] = 0.1;
  values[dom.quit_index({0, 0})] = 0.1;
  model.apply_update(estimate_of(values, 100, 1.0), SignificantSet::all(dom.size()));
  return model;
}

}  // namespace

TEST_CASE("move_prob and quit_given_cell follow the row normalization") {
  const TransitionDomain dom(kGrid2);
  const MobilityModel model = hand_model(dom);
  CHECK(model.move_prob({0, 0}, {0, 1}) == doctest::Approx(0.5));
  CHECK(model.quit_given_cell({0, 0}) == doctest::Approx(0.25));
  CHECK(model.move_prob({0, 0}, {1, 1}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(model.move_prob({0, 0}, {5, 5}), NonAdjacentQuery);
}

TEST_CASE("cold rows fall back to uniform movement with zero quit") {
  const TransitionDomain dom(kGrid2);
  const MobilityModel model = hand_model(dom);
  // Cell (1,1) has no mass at all.
  const auto nbs = neighbors({1, 1}, kGrid2);
  for (const Cell& to : nbs) {
    CHECK(model.move_prob({1, 1}, to) == doctest::Approx(1.0 / nbs.size()));
  }
  CHECK(model.quit_given_cell({1, 1}) == doctest::Approx(0.0));
}

TEST_CASE("single dominant move takes the full row") {
  const TransitionDomain dom(kGrid2);
  MobilityModel model(dom, 6);
  std::vector<double> values(dom.size(), 0.0);
  values[dom.index_of(TransitionState::move({0, 0}, {0, 1}))] = 0.4;
  model.apply_update(estimate_of(values, 10, 1.0), SignificantSet::all(dom.size()));
  CHECK(model.move_prob({0, 0}, {0, 1}) == doctest::Approx(1.0));
  CHECK(model.quit_given_cell({0, 0}) == doctest::Approx(0.0));
}

TEST_CASE("every row sums to one, including fallback rows") {
  Rng rng(99);
  const GridSpec grid{BoundingBox{0, 0, 1, 1}, 4};
  const TransitionDomain dom(grid);
  MobilityModel model(dom, 6);
  std::vector<double> values(dom.size());
  for (double& v : values) v = rng.bernoulli(0.3) ? rng.next_double() : 0.0;
  model.apply_update(estimate_of(values, 100, 1.0), SignificantSet::all(dom.size()));
  for (int i = 0; i < grid.cell_count(); ++i) {
    const Cell c = cell_at(i, grid.k);
    double row = model.quit_given_cell(c);
    for (const Cell& to : neighbors(c, grid)) row += model.move_prob(c, to);
    CHECK(row == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("enter and quit distributions normalize with uniform fallback") {
  const TransitionDomain dom(kGrid2);
  MobilityModel model(dom, 6);
  // All-zero model: uniform over the 4 cells.
  CHECK(model.enter_dist() == std::vector<double>{0.25, 0.25, 0.25, 0.25});
  CHECK(model.quit_dist() == std::vector<double>{0.25, 0.25, 0.25, 0.25});

  std::vector<double> values(dom.size(), 0.0);
  values[dom.enter_index(cell_at(0, 2))] = 0.3;
  values[dom.enter_index(cell_at(1, 2))] = 0.1;
  values[dom.quit_index(cell_at(3, 2))] = 0.7;
  model.apply_update(estimate_of(values, 10, 1.0), SignificantSet::all(dom.size()));
  const auto enter = model.enter_dist();
  CHECK(enter[0] == doctest::Approx(0.75));
  CHECK(enter[1] == doctest::Approx(0.25));
  CHECK(enter[2] == doctest::Approx(0.0));
  CHECK(model.quit_dist() == std::vector<double>{0.0, 0.0, 0.0, 1.0});
  CHECK(std::accumulate(enter.begin(), enter.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("snapshot round-trips through JSON") {
  const TransitionDomain dom(kGrid2);
  const MobilityModel model = hand_model(dom);
  const MobilityModel restored = MobilityModel::from_json_string(model.to_json_string(), 6);
  CHECK(restored.frequencies() == model.frequencies());
  CHECK(restored.domain().size() == dom.size());
  CHECK(restored.move_prob({0, 0}, {0, 1}) == doctest::Approx(0.5));
}
