#include "hcdetect/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>

#include "hcdetect/error.hpp"
#include "hcdetect/random.hpp"

namespace hcdetect {
namespace {

constexpr std::uint64_t kResampleBaseTag = 0x5245534D504C45ULL;

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t m, std::size_t replicate) {
  return derive_seed({seed, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(replicate)});
}

std::vector<double> resample(std::span<const double> base, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(base.size());
  for (double& v : out) v = base[rng.below(base.size())];
  return out;
}

// Every (spec, m, replicate) HC value, computed as one flat task list so the
// pool balances across the whole sweep.
std::vector<Crossing> evaluate(std::span<const GeneratorSpec> specs, const SimConfig& config) {
  config.validate();
  for (const auto& s : specs) s.validate();

  const std::size_t n_m = config.m_grid.size();
  const std::size_t reps = config.replicates;

  std::vector<std::vector<double>> bases;
  if (config.mode == ReplicateMode::resample) {
    bases.resize(specs.size() * n_m);
    parallel_for(bases.size(), config.threads, [&](std::size_t t) {
      const std::size_t m = config.m_grid[t % n_m];
      const auto series = sample(specs[t / n_m], m, derive_seed({config.seed, m, kResampleBaseTag}));
      bases[t].assign(series.values().begin(), series.values().end());
    });
  }

  std::vector<double> hc(specs.size() * n_m * reps);
  parallel_for(hc.size(), config.threads, [&](std::size_t t) {
    const std::size_t r = t % reps;
    const std::size_t mi = (t / reps) % n_m;
    const std::size_t si = t / (reps * n_m);
    const std::size_t m = config.m_grid[mi];
    const std::uint64_t seed = replicate_seed(config.seed, m, r);
    if (config.mode == ReplicateMode::resample) {
      hc[t] = dataset_hc(resample(bases[si * n_m + mi], seed), config);
    } else {
      hc[t] = dataset_hc(sample(specs[si], m, seed).values(), config);
    }
  });

  std::vector<Crossing> out(specs.size());
  for (std::size_t si = 0; si < specs.size(); ++si) {
    for (std::size_t mi = 0; mi < n_m; ++mi) {
      TracePoint tp;
      tp.m = config.m_grid[mi];
      const auto first = hc.begin() + static_cast<std::ptrdiff_t>((si * n_m + mi) * reps);
      tp.replicate_hc.assign(first, first + static_cast<std::ptrdiff_t>(reps));
      tp.aggregated_hc = aggregate(tp.replicate_hc, config.aggregator);
      tp.threshold = asymptotic_threshold(tp.m);
      out[si].trace.push_back(std::move(tp));
    }
    if (auto idx = crossing_index(out[si].trace, config.hysteresis)) {
      out[si].m_star = out[si].trace[*idx].m;
    }
  }
  return out;
}

}  // namespace

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::null_model: return "null";
    case GeneratorKind::shifted_mean: return "shifted_mean";
    case GeneratorKind::sparse_mixture: return "sparse_mixture";
    case GeneratorKind::sparse_sum: return "sparse_sum";
  }
  return "unknown";
}

void GeneratorSpec::validate() const {
  if (!std::isfinite(mu)) throw Error(Errc::domain_error, "mu must be finite");
  const bool sparse = kind == GeneratorKind::sparse_mixture || kind == GeneratorKind::sparse_sum;
  if (sparse && !(eps > 0.0 && eps < 1.0)) {
    throw Error(Errc::domain_error, "eps must lie in (0, 1), got " + std::to_string(eps));
  }
}

std::vector<std::size_t> geometric_grid(std::size_t lo, std::size_t hi, std::size_t points) {
  std::vector<std::size_t> grid;
  if (points == 0) return grid;
  if (points == 1) return {lo};
  const double ratio = static_cast<double>(hi) / static_cast<double>(lo);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    const auto v = static_cast<std::size_t>(std::llround(static_cast<double>(lo) * std::pow(ratio, t)));
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  return grid;
}

void SimConfig::validate() const {
  if (replicates < 1) throw Error(Errc::domain_error, "replicates must be at least 1");
  if (m_grid.empty()) throw Error(Errc::domain_error, "m grid is empty");
  for (std::size_t i = 0; i < m_grid.size(); ++i) {
    if (m_grid[i] < 3) throw Error(Errc::domain_error, "m grid entries must be >= 3");
    if (i > 0 && m_grid[i] <= m_grid[i - 1]) {
      throw Error(Errc::domain_error, "m grid must be strictly ascending");
    }
  }
}

TimeSeries sample(const GeneratorSpec& spec, std::size_t m, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  std::vector<double> x(m);
  switch (spec.kind) {
    case GeneratorKind::null_model:
      for (double& v : x) v = rng.normal();
      break;
    case GeneratorKind::shifted_mean:
      for (double& v : x) v = rng.normal() + spec.mu;
      break;
    case GeneratorKind::sparse_mixture:
      for (double& v : x) {
        const bool signal = rng.uniform() < spec.eps;
        v = rng.normal() + (signal ? spec.mu : 0.0);
      }
      break;
    case GeneratorKind::sparse_sum: {
      const double sd = std::sqrt((1.0 - spec.eps) * (1.0 - spec.eps) + spec.eps * spec.eps);
      for (double& v : x) v = rng.normal() * sd + spec.mu;
      break;
    }
  }
  return TimeSeries(std::move(x));
}

double dataset_hc(std::span<const double> values, const SimConfig& config) {
  const HcOptions options{config.restricted_rank_range};
  if (!config.standardize) return hc_max_of_scores(values, options);
  const Moments mo = population_moments(values);
  if (!(mo.sd > 0.0)) throw Error(Errc::zero_variance, "replicate has zero variance");
  std::vector<double> z(values.size());
  std::transform(values.begin(), values.end(), z.begin(),
                 [&](double v) { return (v - mo.mean) / mo.sd; });
  return hc_max_of_scores(z, options);
}

double aggregate(std::span<const double> values, Aggregator aggregator) {
  if (values.empty()) return 0.0;
  if (aggregator == Aggregator::mean) {
    long double sum = 0.0L;
    for (double v : values) sum += v;
    return static_cast<double>(sum / static_cast<long double>(values.size()));
  }
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

McResult mc_hc(const GeneratorSpec& spec, std::size_t m, const SimConfig& config) {
  SimConfig single = config;
  single.m_grid = {m};
  auto crossing = evaluate(std::span<const GeneratorSpec>(&spec, 1), single);
  auto& tp = crossing.front().trace.front();
  return {tp.aggregated_hc, std::move(tp.replicate_hc)};
}

std::optional<std::size_t> crossing_index(std::span<const TracePoint> trace,
                                          std::size_t hysteresis) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const std::size_t last = std::min(trace.size() - 1, i + hysteresis);
    bool holds = true;
    for (std::size_t j = i; j <= last && holds; ++j) {
      holds = trace[j].aggregated_hc >= trace[j].threshold;
    }
    if (holds) return i;
  }
  return std::nullopt;
}

Crossing find_crossing(const GeneratorSpec& spec, const SimConfig& config) {
  return std::move(evaluate(std::span<const GeneratorSpec>(&spec, 1), config).front());
}

BoundaryCurve boundary_grid(BoundaryKind kind, std::span<const double> eps_grid,
                            std::span<const double> mu_grid, const SimConfig& config) {
  if (mu_grid.empty()) throw Error(Errc::domain_error, "mu grid is empty");
  if (kind == BoundaryKind::sparse && eps_grid.empty()) {
    throw Error(Errc::domain_error, "eps grid is empty");
  }

  std::vector<GeneratorSpec> specs;
  if (kind == BoundaryKind::mean_shift) {
    for (double mu : mu_grid) specs.push_back(GeneratorSpec::shifted_mean(mu));
  } else {
    for (auto make : {&GeneratorSpec::sparse_mixture, &GeneratorSpec::sparse_sum}) {
      for (double eps : eps_grid) {
        for (double mu : mu_grid) specs.push_back(make(eps, mu));
      }
    }
  }
  auto crossings = evaluate(specs, config);

  BoundaryCurve curve;
  curve.kind = kind;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    curve.points.push_back({specs[i], std::move(crossings[i])});
  }
  return curve;
}

}  // namespace hcdetect
