#include "hcdetect/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hcdetect/error.hpp"
#include "hcdetect/random.hpp"

namespace hcdetect {
namespace {

// Points sorted ascending with the permutation back to input order and
// prefix sums for O(1) range means.
struct SortedPoints {
  std::vector<double> values;
  std::vector<std::size_t> index;
  std::vector<long double> prefix;  // prefix[i] = sum of values[0..i)

  explicit SortedPoints(std::span<const double> points) : index(points.size()) {
    std::iota(index.begin(), index.end(), std::size_t{0});
    std::stable_sort(index.begin(), index.end(),
                     [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
    values.resize(points.size());
    prefix.assign(points.size() + 1, 0.0L);
    for (std::size_t i = 0; i < index.size(); ++i) {
      values[i] = points[index[i]];
      prefix[i + 1] = prefix[i] + values[i];
    }
  }

  std::size_t size() const noexcept { return values.size(); }

  double range_mean(std::size_t lo, std::size_t hi) const noexcept {
    return static_cast<double>((prefix[hi] - prefix[lo]) / static_cast<long double>(hi - lo));
  }
};

// Cluster j owns sorted positions [cuts[j], cuts[j+1]).
using Cuts = std::vector<std::size_t>;

struct Fit {
  Cuts cuts;
  std::vector<double> centroids;
  double inertia = std::numeric_limits<double>::infinity();
};

std::size_t count_distinct(const std::vector<double>& sorted) {
  std::size_t n = sorted.empty() ? 0 : 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) n += sorted[i] != sorted[i - 1];
  return n;
}

std::vector<double> seed_plus_plus(const SortedPoints& pts, int k, Rng& rng) {
  const std::size_t m = pts.size();
  std::vector<double> centers;
  centers.reserve(static_cast<std::size_t>(k));
  centers.push_back(pts.values[rng.below(m)]);

  std::vector<double> d2(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double d = pts.values[i] - centers[0];
    d2[i] = d * d;
  }
  std::vector<long double> cumulative(m);
  while (centers.size() < static_cast<std::size_t>(k)) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < m; ++i) cumulative[i] = total += d2[i];
    const long double target = static_cast<long double>(rng.uniform()) * total;
    auto pos = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), target) - cumulative.begin());
    pos = std::min(pos, m - 1);
    // Skip zero-weight positions that upper_bound can land on at the edges.
    while (d2[pos] == 0.0 && pos + 1 < m) ++pos;
    while (d2[pos] == 0.0 && pos > 0) --pos;
    const double c = pts.values[pos];
    centers.push_back(c);
    for (std::size_t i = 0; i < m; ++i) {
      const double d = pts.values[i] - c;
      d2[i] = std::min(d2[i], d * d);
    }
  }
  return centers;
}

// Nearest-centroid assignment for ascending centroids: a point on a midpoint
// goes to the lower centroid.
Cuts assign(const SortedPoints& pts, const std::vector<double>& centroids) {
  const std::size_t k = centroids.size();
  Cuts cuts(k + 1, 0);
  cuts[k] = pts.size();
  for (std::size_t j = 0; j + 1 < k; ++j) {
    const double mid = 0.5 * (centroids[j] + centroids[j + 1]);
    cuts[j + 1] = static_cast<std::size_t>(
        std::upper_bound(pts.values.begin(), pts.values.end(), mid) - pts.values.begin());
  }
  return cuts;
}

bool has_empty(const Cuts& cuts) {
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    if (cuts[j] == cuts[j + 1]) return true;
  }
  return false;
}

// New centroids from cuts. An empty cluster takes the value of the point
// farthest from its own cluster mean.
std::vector<double> update(const SortedPoints& pts, const Cuts& cuts) {
  const std::size_t k = cuts.size() - 1;
  std::vector<double> c(k, 0.0);
  std::vector<std::size_t> empty;
  for (std::size_t j = 0; j < k; ++j) {
    if (cuts[j] == cuts[j + 1]) {
      empty.push_back(j);
    } else {
      c[j] = pts.range_mean(cuts[j], cuts[j + 1]);
    }
  }
  std::vector<bool> taken(pts.size(), false);
  for (std::size_t e : empty) {
    double best = -1.0;
    std::size_t best_pos = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (cuts[j] == cuts[j + 1]) continue;
      for (std::size_t pos : {cuts[j], cuts[j + 1] - 1}) {
        const double d = std::fabs(pts.values[pos] - c[j]);
        if (!taken[pos] && d > best) {
          best = d;
          best_pos = pos;
        }
      }
    }
    taken[best_pos] = true;
    c[e] = pts.values[best_pos];
  }
  std::sort(c.begin(), c.end());
  return c;
}

double inertia_of(const SortedPoints& pts, const Cuts& cuts, const std::vector<double>& c) {
  long double total = 0.0L;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    for (std::size_t i = cuts[j]; i < cuts[j + 1]; ++i) {
      const long double d = static_cast<long double>(pts.values[i]) - c[j];
      total += d * d;
    }
  }
  return static_cast<double>(total);
}

// Contiguous split with one run of distinct values per cluster boundary;
// used only if repair cannot clear an empty cluster within the cap.
Cuts distinct_split(const SortedPoints& pts, int k) {
  std::vector<std::size_t> starts;  // first position of each distinct value
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i == 0 || pts.values[i] != pts.values[i - 1]) starts.push_back(i);
  }
  const auto kk = static_cast<std::size_t>(k);
  Cuts cuts(kk + 1, 0);
  cuts[kk] = pts.size();
  for (std::size_t j = 1; j < kk; ++j) cuts[j] = starts[j * starts.size() / kk];
  return cuts;
}

Fit lloyd(const SortedPoints& pts, std::vector<double> centroids, int max_iterations) {
  const int k = static_cast<int>(centroids.size());
  std::sort(centroids.begin(), centroids.end());

  Cuts cuts;
  Cuts previous;
  // Empty-cluster repair may need up to k extra rounds past the cap.
  const int hard_cap = max_iterations + k + 1;
  for (int iter = 0; iter < hard_cap; ++iter) {
    cuts = assign(pts, centroids);
    const bool empty = has_empty(cuts);
    if (!empty && (cuts == previous || iter >= max_iterations)) break;
    centroids = update(pts, cuts);
    previous = empty ? Cuts{} : cuts;
  }

  if (has_empty(cuts)) cuts = distinct_split(pts, k);

  Fit fit;
  fit.cuts = std::move(cuts);
  fit.centroids.resize(static_cast<std::size_t>(k));
  for (std::size_t j = 0; j < fit.centroids.size(); ++j) {
    fit.centroids[j] = pts.range_mean(fit.cuts[j], fit.cuts[j + 1]);
  }
  fit.inertia = inertia_of(pts, fit.cuts, fit.centroids);
  return fit;
}

// Globally optimal contiguous partition by dynamic programming over sorted
// positions. The optimal split point is monotone in the right end, so each
// layer is filled by divide and conquer in O(m log m).
std::vector<double> optimal_centroids(const SortedPoints& pts, int k) {
  const std::size_t m = pts.size();
  const long double shift = pts.values[m / 2];
  std::vector<long double> s1(m + 1, 0.0L), s2(m + 1, 0.0L);
  for (std::size_t i = 0; i < m; ++i) {
    const long double v = pts.values[i] - shift;
    s1[i + 1] = s1[i] + v;
    s2[i + 1] = s2[i] + v * v;
  }
  auto cost = [&](std::size_t lo, std::size_t hi) {
    const long double n = static_cast<long double>(hi - lo);
    const long double sum = s1[hi] - s1[lo];
    return std::max(0.0L, (s2[hi] - s2[lo]) - sum * sum / n);
  };

  const auto kk = static_cast<std::size_t>(k);
  constexpr long double inf = std::numeric_limits<long double>::infinity();
  // prev[j]: best cost of the first j points in c clusters.
  std::vector<long double> prev(m + 1, inf), cur(m + 1, inf);
  std::vector<std::vector<std::size_t>> split(kk, std::vector<std::size_t>(m + 1, 0));
  for (std::size_t j = 1; j <= m; ++j) prev[j] = cost(0, j);

  for (std::size_t c = 1; c < kk; ++c) {
    std::fill(cur.begin(), cur.end(), inf);
    auto& arg = split[c];
    // Fill cur[j] for j in [jlo, jhi] knowing its split lies in [olo, ohi].
    auto solve = [&](auto&& self, std::size_t jlo, std::size_t jhi, std::size_t olo,
                     std::size_t ohi) -> void {
      if (jlo > jhi) return;
      const std::size_t j = jlo + (jhi - jlo) / 2;
      long double best = inf;
      std::size_t best_i = olo;
      for (std::size_t i = olo; i <= std::min(ohi, j - 1); ++i) {
        const long double v = prev[i] + cost(i, j);
        if (v < best) {
          best = v;
          best_i = i;
        }
      }
      cur[j] = best;
      arg[j] = best_i;
      if (j > jlo) self(self, jlo, j - 1, olo, best_i);
      self(self, j + 1, jhi, best_i, ohi);
    };
    solve(solve, c + 1, m, c, m - 1);
    std::swap(prev, cur);
  }

  Cuts cuts(kk + 1, 0);
  cuts[kk] = m;
  for (std::size_t c = kk - 1; c >= 1; --c) cuts[c] = split[c][cuts[c + 1]];
  std::vector<double> centroids(kk);
  for (std::size_t j = 0; j < kk; ++j) centroids[j] = pts.range_mean(cuts[j], cuts[j + 1]);
  return centroids;
}

}  // namespace

ClusterModel kmeans_1d(std::span<const double> points, int k, std::uint64_t seed,
                       const KMeansOptions& options) {
  if (k < 1) throw Error(Errc::domain_error, "k must be at least 1");
  if (points.size() < static_cast<std::size_t>(k)) {
    throw Error(Errc::too_few_points, std::to_string(points.size()) +
                                          " points cannot form " + std::to_string(k) +
                                          " clusters");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i])) {
      throw Error(Errc::non_finite, "point " + std::to_string(i) + " is not finite");
    }
  }
  const SortedPoints pts(points);
  if (count_distinct(pts.values) < static_cast<std::size_t>(k)) {
    throw Error(Errc::too_few_points, "fewer than " + std::to_string(k) + " distinct values");
  }

  Fit best;
  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    Rng rng(derive_seed({seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(r)}));
    Fit fit = lloyd(pts, seed_plus_plus(pts, k, rng), options.max_iterations);
    if (fit.inertia < best.inertia) best = std::move(fit);
  }
  // Seeded restarts can all settle in the same local optimum; the exact
  // contiguous partition, polished by Lloyd, competes as one more start.
  if (k > 1) {
    Fit exact = lloyd(pts, optimal_centroids(pts, k), options.max_iterations);
    if (exact.inertia < best.inertia) best = std::move(exact);
  }

  ClusterModel model;
  model.k = k;
  model.seed = seed;
  model.centroids = best.centroids;
  model.inertia = best.inertia;
  model.assignment.resize(points.size());
  for (int j = 0; j < k; ++j) {
    for (std::size_t pos = best.cuts[j]; pos < best.cuts[j + 1]; ++pos) {
      model.assignment[pts.index[pos]] = j;
    }
  }
  return model;
}

double silhouette(std::span<const double> points, const ClusterModel& model) {
  if (model.k < 2) throw Error(Errc::undefined, "silhouette needs at least 2 clusters");
  if (model.assignment.size() != points.size()) {
    throw Error(Errc::domain_error, "assignment does not cover the points");
  }
  const auto k = static_cast<std::size_t>(model.k);

  std::vector<std::vector<double>> members(k);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int c = model.assignment[i];
    if (c < 0 || static_cast<std::size_t>(c) >= k) {
      throw Error(Errc::domain_error, "assignment out of range at point " + std::to_string(i));
    }
    members[static_cast<std::size_t>(c)].push_back(points[i]);
  }
  std::vector<std::vector<long double>> prefix(k);
  for (std::size_t c = 0; c < k; ++c) {
    if (members[c].empty()) {
      throw Error(Errc::domain_error, "cluster " + std::to_string(c) + " is empty");
    }
    std::sort(members[c].begin(), members[c].end());
    prefix[c].assign(members[c].size() + 1, 0.0L);
    for (std::size_t i = 0; i < members[c].size(); ++i) {
      prefix[c][i + 1] = prefix[c][i] + members[c][i];
    }
  }

  // Sum of |x - y| over y in cluster c.
  auto distance_sum = [&](long double x, std::size_t c) {
    const auto& v = members[c];
    const auto& p = prefix[c];
    const auto below = static_cast<std::size_t>(
        std::lower_bound(v.begin(), v.end(), static_cast<double>(x)) - v.begin());
    const auto n = static_cast<long double>(v.size());
    const auto nb = static_cast<long double>(below);
    return (x * nb - p[below]) + ((p[v.size()] - p[below]) - x * (n - nb));
  };

  long double total = 0.0L;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto own = static_cast<std::size_t>(model.assignment[i]);
    if (members[own].size() == 1) continue;
    const long double x = points[i];
    const long double a =
        distance_sum(x, own) / static_cast<long double>(members[own].size() - 1);
    long double b = std::numeric_limits<long double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == own) continue;
      b = std::min(b, distance_sum(x, c) / static_cast<long double>(members[c].size()));
    }
    const long double denom = std::max(a, b);
    if (denom > 0.0L) total += (b - a) / denom;
  }
  return static_cast<double>(total / static_cast<long double>(points.size()));
}

KSelection select_model(std::span<const double> points, int k_min, int k_max,
                        std::uint64_t seed, const KMeansOptions& options) {
  if (k_min < 2 || k_max < k_min) {
    throw Error(Errc::domain_error, "k range must satisfy 2 <= k_min <= k_max");
  }
  KSelection sel;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = k_min; k <= k_max; ++k) {
    ClusterModel model = kmeans_1d(points, k, seed, options);
    const double s = silhouette(points, model);
    model.silhouette = s;
    sel.scores.emplace_back(k, s);
    if (s > best) {
      best = s;
      sel.k = k;
      sel.model = std::move(model);
    }
  }
  return sel;
}

int select_k(std::span<const double> points, int k_min, int k_max, std::uint64_t seed,
             const KMeansOptions& options) {
  return select_model(points, k_min, k_max, seed, options).k;
}

ThresholdSet thresholds_from(const ClusterModel& model, std::span<const double> points,
                             double factor) {
  const auto k = static_cast<std::size_t>(model.k);
  std::vector<ClusterRange> ranges(k);
  std::vector<long double> sums(k, 0.0L);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& r = ranges[static_cast<std::size_t>(model.assignment[i])];
    const double v = points[i];
    if (r.count == 0) {
      r.min = r.max = v;
    } else {
      r.min = std::min(r.min, v);
      r.max = std::max(r.max, v);
    }
    ++r.count;
    sums[static_cast<std::size_t>(model.assignment[i])] += v;
  }

  std::vector<double> raw(k);
  for (std::size_t c = 0; c < k; ++c) {
    if (ranges[c].count > 0) {
      ranges[c].mean = static_cast<double>(sums[c] / static_cast<long double>(ranges[c].count));
    }
    raw[c] = ranges[c].mean + factor * (ranges[c].max - ranges[c].min);
  }

  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return raw[a] < raw[b]; });

  ThresholdSet out;
  for (int c : order) {
    out.thresholds.push_back(raw[static_cast<std::size_t>(c)]);
    out.cluster_ids.push_back(c);
    out.cluster_ranges.push_back(ranges[static_cast<std::size_t>(c)]);
  }
  return out;
}

}  // namespace hcdetect
