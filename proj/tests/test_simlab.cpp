#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "hcdetect/erf.hpp"
#include "hcdetect/error.hpp"
#include "hcdetect/simlab.hpp"

using namespace hcdetect;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no hcdetect::Error thrown");
  return Errc::undefined;
}

double ks_against_normal(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = 0.5 * special::erfc(-x[i] / std::sqrt(2.0));
    d = std::max({d, std::fabs((i + 1) / n - f), std::fabs(f - i / n)});
  }
  return d;
}

std::vector<double> values_of(const TimeSeries& s) { return {s.values().begin(), s.values().end()}; }

TracePoint point(std::size_t m, double hc, double threshold) {
  TracePoint tp;
  tp.m = m;
  tp.aggregated_hc = hc;
  tp.threshold = threshold;
  return tp;
}

}  // namespace

TEST_CASE("geometric_grid") {
  const auto g = geometric_grid(100, 1'000'000, 16);
  REQUIRE(g.size() == 16);
  CHECK(g.front() == 100);
  CHECK(g.back() == 1'000'000);
  CHECK(std::adjacent_find(g.begin(), g.end(), std::greater_equal<>()) == g.end());
  CHECK(SimConfig{}.m_grid == g);
  const auto small = geometric_grid(3, 6, 10);  // rounding collapses duplicates
  CHECK(std::adjacent_find(small.begin(), small.end(), std::greater_equal<>()) == small.end());
}

TEST_CASE("sample generators") {
  SUBCASE("null moments") {
    const auto x = values_of(sample(GeneratorSpec::null_model(), 100'000, 1));
    const auto mo = population_moments(x);
    CHECK(std::fabs(mo.mean) < 4.0 / std::sqrt(1e5));
    CHECK(std::fabs(mo.sd * mo.sd - 1.0) < 0.05);
  }
  SUBCASE("mixture with mu = 0 is the null") {
    const auto x = values_of(sample(GeneratorSpec::sparse_mixture(0.5, 0.0), 20'000, 2));
    CHECK(ks_against_normal(x) < 1.628 / std::sqrt(20'000.0));
  }
  SUBCASE("mixture mean is eps * mu") {
    const auto x = values_of(sample(GeneratorSpec::sparse_mixture(0.1, 3.0), 100'000, 3));
    // sd of the mixture is sqrt(1 + eps (1 - eps) mu^2) ~ 1.38; 5 standard errors.
    CHECK(std::fabs(population_moments(x).mean - 0.3) < 5 * 1.38 / std::sqrt(1e5));
  }
  SUBCASE("sum variant has the printed mean and variance") {
    const auto x = values_of(sample(GeneratorSpec::sparse_sum(0.1, 2.0), 100'000, 4));
    const auto mo = population_moments(x);
    CHECK(std::fabs(mo.mean - 2.0) < 0.01);
    CHECK(std::fabs(mo.sd * mo.sd - (0.81 + 0.01)) < 0.02);
  }
  SUBCASE("deterministic, common noise across mu") {
    const auto a = values_of(sample(GeneratorSpec::shifted_mean(0.5), 1000, 9));
    const auto b = values_of(sample(GeneratorSpec::shifted_mean(0.5), 1000, 9));
    const auto n = values_of(sample(GeneratorSpec::null_model(), 1000, 9));
    CHECK(a == b);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] - 0.5 == doctest::Approx(n[i]).epsilon(1e-12));
  }
  SUBCASE("validation") {
    CHECK(code_of([] { sample(GeneratorSpec::sparse_mixture(0.0, 1.0), 10, 0); }) ==
          Errc::domain_error);
    CHECK(code_of([] { sample(GeneratorSpec::sparse_sum(1.0, 1.0), 10, 0); }) == Errc::domain_error);
    CHECK(code_of([] { sample(GeneratorSpec::shifted_mean(NAN), 10, 0); }) == Errc::domain_error);
    CHECK(code_of([] { sample(GeneratorSpec::null_model(), 2, 0); }) == Errc::too_short);
  }
}

TEST_CASE("SimConfig validation") {
  SimConfig c;
  c.replicates = 0;
  CHECK(code_of([&] { c.validate(); }) == Errc::domain_error);
  c.replicates = 1;
  c.m_grid = {};
  CHECK(code_of([&] { c.validate(); }) == Errc::domain_error);
  c.m_grid = {10, 10};
  CHECK(code_of([&] { c.validate(); }) == Errc::domain_error);
  c.m_grid = {2, 10};
  CHECK(code_of([&] { c.validate(); }) == Errc::domain_error);
}

TEST_CASE("aggregate") {
  const std::vector<double> v = {3.0, 1.0, 2.0, 10.0};
  CHECK(aggregate(v, Aggregator::mean) == 4.0);
  CHECK(aggregate(v, Aggregator::median) == 2.5);
  CHECK(aggregate(std::vector<double>{5.0, 1.0, 3.0}, Aggregator::median) == 3.0);
}

TEST_CASE("mc_hc") {
  SimConfig c;
  c.seed = 42;
  SUBCASE("one replicate aggregates to itself") {
    c.replicates = 1;
    const auto r = mc_hc(GeneratorSpec::null_model(), 5000, c);
    REQUIRE(r.replicate_hc.size() == 1);
    CHECK(r.aggregated == r.replicate_hc[0]);
  }
  SUBCASE("null replicates are finite and stable across seeds") {
    c.replicates = 100;
    const auto a = mc_hc(GeneratorSpec::null_model(), 10'000, c);
    c.seed = 43;
    const auto b = mc_hc(GeneratorSpec::null_model(), 10'000, c);
    for (double v : a.replicate_hc) CHECK(std::isfinite(v));
    CHECK(std::fabs(a.aggregated - b.aggregated) <= 0.15 * std::max(a.aggregated, b.aggregated));
  }
  SUBCASE("a unit mean shift is detected at m = 10^4") {
    c.replicates = 100;
    const auto r = mc_hc(GeneratorSpec::shifted_mean(1.0), 10'000, c);
    CHECK(r.aggregated > asymptotic_threshold(10'000));
    CHECK(asymptotic_threshold(10'000) == doctest::Approx(2.107).epsilon(1e-3));
    for (double v : r.replicate_hc) CHECK(v > asymptotic_threshold(10'000));
  }
  SUBCASE("replicates do not depend on the thread count") {
    c.replicates = 24;
    c.threads = 1;
    const auto one = mc_hc(GeneratorSpec::sparse_mixture(0.05, 2.0), 3000, c);
    c.threads = 4;
    const auto four = mc_hc(GeneratorSpec::sparse_mixture(0.05, 2.0), 3000, c);
    CHECK(one.replicate_hc == four.replicate_hc);
    CHECK(one.aggregated == four.aggregated);
  }
  SUBCASE("resample mode is deterministic") {
    c.replicates = 10;
    c.mode = ReplicateMode::resample;
    const auto a = mc_hc(GeneratorSpec::shifted_mean(0.3), 2000, c);
    const auto b = mc_hc(GeneratorSpec::shifted_mean(0.3), 2000, c);
    CHECK(a.replicate_hc == b.replicate_hc);
  }
  SUBCASE("standardized scoring erases a pure mean shift") {
    c.replicates = 1;
    c.standardize = true;
    const double shifted = mc_hc(GeneratorSpec::shifted_mean(3.0), 5000, c).aggregated;
    const double null = mc_hc(GeneratorSpec::null_model(), 5000, c).aggregated;
    CHECK(shifted == doctest::Approx(null).epsilon(1e-9));
  }
}

TEST_CASE("mixture and sum readings diverge") {
  SimConfig c;
  c.replicates = 20;
  c.seed = 5;
  const auto mix = mc_hc(GeneratorSpec::sparse_mixture(0.01, 3.0), 100'000, c);
  const auto sum = mc_hc(GeneratorSpec::sparse_sum(0.01, 3.0), 100'000, c);
  const auto se = [](const std::vector<double>& v) {
    const auto mo = population_moments(v);
    return mo.sd / std::sqrt(static_cast<double>(v.size()));
  };
  CHECK(std::fabs(mix.aggregated - sum.aggregated) > 5 * std::max(se(mix.replicate_hc), se(sum.replicate_hc)));
}

TEST_CASE("crossing_index") {
  std::vector<TracePoint> t = {point(10, 0, 1), point(20, 2, 1), point(30, 0.5, 1), point(40, 2, 1),
                               point(50, 2, 1), point(60, 2, 1)};
  CHECK(crossing_index(t, 2) == std::optional<std::size_t>(3));
  CHECK(crossing_index(t, 0) == std::optional<std::size_t>(1));
  // Clipped at the end of the grid.
  CHECK(crossing_index(std::span(t).subspan(4), 2) == std::optional<std::size_t>(0));
  t[5].aggregated_hc = 0.0;
  CHECK(crossing_index(t, 2) == std::nullopt);
  // Equality counts as a crossing.
  const std::vector<TracePoint> eq = {point(10, 1, 1)};
  CHECK(crossing_index(eq, 2) == std::optional<std::size_t>(0));
}

TEST_CASE("find_crossing and boundary_grid") {
  SimConfig c;
  c.replicates = 10;
  c.seed = 3;
  c.m_grid = {200, 400, 800, 1600};

  const auto always = find_crossing(GeneratorSpec::shifted_mean(3.0), c);
  REQUIRE(always.m_star);
  CHECK(*always.m_star == 200);
  REQUIRE(always.trace.size() == 4);
  for (const auto& tp : always.trace) {
    CHECK(tp.threshold == asymptotic_threshold(tp.m));
    CHECK(tp.replicate_hc.size() == 10);
  }

  const std::vector<double> mu = {3.0};
  const auto curve = boundary_grid(BoundaryKind::mean_shift, {}, mu, c);
  REQUIRE(curve.points.size() == 1);
  CHECK(curve.points[0].crossing.m_star == always.m_star);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(curve.points[0].crossing.trace[i].replicate_hc == always.trace[i].replicate_hc);
  }

  const std::vector<double> eps = {0.1, 0.2};
  const std::vector<double> mus = {1.0, 2.0, 3.0};
  const auto sparse = boundary_grid(BoundaryKind::sparse, eps, mus, c);
  REQUIRE(sparse.points.size() == 12);
  CHECK(sparse.points[0].spec.kind == GeneratorKind::sparse_mixture);
  CHECK(sparse.points[1].spec.mu == 2.0);
  CHECK(sparse.points[3].spec.eps == 0.2);
  CHECK(sparse.points[6].spec.kind == GeneratorKind::sparse_sum);

  c.threads = 3;
  const auto threaded = boundary_grid(BoundaryKind::sparse, eps, mus, c);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(threaded.points[i].crossing.m_star == sparse.points[i].crossing.m_star);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(threaded.points[i].crossing.trace[j].aggregated_hc ==
            sparse.points[i].crossing.trace[j].aggregated_hc);
    }
  }

  CHECK(code_of([&] { boundary_grid(BoundaryKind::mean_shift, {}, {}, c); }) == Errc::domain_error);
  CHECK(code_of([&] { boundary_grid(BoundaryKind::sparse, {}, mus, c); }) == Errc::domain_error);
  const std::vector<double> zero = {0.0};
  CHECK(code_of([&] { boundary_grid(BoundaryKind::sparse, zero, mus, c); }) == Errc::domain_error);
}
