#include "hcdetect/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>

#include "hcdetect/error.hpp"
#include "hcdetect/report.hpp"

namespace hcdetect {
namespace {

int guarded(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_validation() ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::io_error, "cannot open " + path.string() + " for writing");
  return f;
}

void finish(std::ofstream& f, const std::filesystem::path& path) {
  f.flush();
  if (!f) throw Error(Errc::io_error, "failed writing " + path.string());
}

nlohmann::json input_to_json(const InputSpec& in) {
  nlohmann::json j = {{"path", in.path.string()}, {"format", to_string(in.format)}};
  j["channel"] = in.channel ? nlohmann::json(*in.channel) : nlohmann::json(nullptr);
  j["sample_rate_hz"] = in.sample_rate_hz ? nlohmann::json(*in.sample_rate_hz) : nlohmann::json(nullptr);
  return j;
}

std::size_t parse_size(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !(v >= 0.0) || v != std::floor(v) ||
      v > 1e15) {
    throw Error(Errc::domain_error, "not a non-negative integer: '" + std::string(s) + "'");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<std::size_t> parse_m_grid(std::string_view text) {
  std::vector<std::string_view> parts;
  const char sep = text.find(':') != std::string_view::npos ? ':' : ',';
  std::size_t pos = 0;
  while (true) {
    const auto next = text.find(sep, pos);
    parts.push_back(text.substr(pos, next == std::string_view::npos ? text.npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  if (sep == ':') {
    if (parts.size() != 3) throw Error(Errc::domain_error, "geometric grid must be LO:HI:N");
    const std::size_t lo = parse_size(parts[0]);
    const std::size_t hi = parse_size(parts[1]);
    const std::size_t n = parse_size(parts[2]);
    if (lo < 3 || hi <= lo || n < 2) {
      throw Error(Errc::domain_error, "geometric grid needs 3 <= LO < HI and N >= 2");
    }
    return geometric_grid(lo, hi, n);
  }
  std::vector<std::size_t> grid;
  for (auto p : parts) grid.push_back(parse_size(p));
  return grid;
}

int cmd_detect(const DetectCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    cmd.config.validate();
    const Ingested in = ingest_with_digest(cmd.input);
    const DetectionReport report = detect(in.series, cmd.config);

    nlohmann::json config = config_to_json(cmd.config);
    config["input"] = input_to_json(cmd.input);
    const RunManifest manifest = make_manifest("detect", config, cmd.config.seed, in.digest);

    const std::string text = report_to_json(report, in.series, manifest).dump(2) + "\n";
    if (cmd.out) {
      auto f = open_output(*cmd.out);
      f << text;
      finish(f, *cmd.out);
    } else {
      out << text;
    }
    if (cmd.masked_csv) {
      auto f = open_output(*cmd.masked_csv);
      write_masked_csv(f, in.series, report, manifest);
      finish(f, *cmd.masked_csv);
    }
  });
}

int cmd_simulate(const SimulateCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const BoundaryCurve curve = boundary_grid(cmd.kind, cmd.eps_grid, cmd.mu_grid, cmd.config);

    nlohmann::json config = config_to_json(cmd.config);
    config["mu_grid"] = cmd.mu_grid;
    if (cmd.kind == BoundaryKind::sparse) config["eps_grid"] = cmd.eps_grid;
    const RunManifest manifest = make_manifest(
        cmd.kind == BoundaryKind::sparse ? "simulate-sparse" : "simulate-mean", config,
        cmd.config.seed);

    if (cmd.out) {
      auto f = open_output(*cmd.out);
      write_boundary_csv(f, curve, manifest);
      finish(f, *cmd.out);
    } else {
      write_boundary_csv(out, curve, manifest);
    }

    std::optional<std::filesystem::path> trace = cmd.trace;
    if (!trace && cmd.out) trace = std::filesystem::path(*cmd.out).replace_extension(".json");
    if (trace) {
      auto f = open_output(*trace);
      f << boundary_to_json(curve, manifest).dump(2) << '\n';
      finish(f, *trace);
    }
  });
}

int cmd_stats(const StatsCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Ingested in = ingest_with_digest(cmd.input);
    nlohmann::json config = {{"input", input_to_json(cmd.input)},
                             {"restricted_rank_range", cmd.options.restricted_rank_range}};
    const RunManifest manifest = make_manifest("stats", config, 0, in.digest);
    out << summary_to_json(summarize(in.series, cmd.options), manifest).dump(2) << '\n';
  });
}

}  // namespace hcdetect
