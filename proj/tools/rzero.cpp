// SPDX-License-Identifier: Apache-2.0
//
// Batch front door: JSON job files in, JSON/CSV results out.
//
//   rzero compute  --job job.json [--out out.json] [--threads N] [--seed S]
//   rzero verify   --job job.json [--out out.json] [--threads N] [--seed S]
//   rzero density  --job job.json [--out out.csv]
//   rzero envelope --job job.json [--out out.csv] [--points pts.csv]
//   rzero sweep    --job job.json [--out out.csv]
//
// Exit codes: 0 success, 2 schema error, 3 numerical failure. Errors are
// reported as JSON on stderr.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rzero/rzero.hpp"

namespace {

using rzero::json;

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json load_job(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rzero::SchemaError("cannot open job file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw rzero::SchemaError(std::string("job file is not valid JSON: ") + e.what());
  }
}

void emit(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
    if (!payload.empty() && payload.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw rzero::SchemaError("cannot open output file '" + out_path + "'");
  out << payload;
}

struct GridSpec {
  double lo, hi;
  int points;
};

GridSpec grid_from_job(const json& job, const rzero::Interval& fallback) {
  if (!job.contains("grid")) return {fallback.lo, fallback.hi, 401};
  const json& g = job["grid"];
  try {
    GridSpec spec{g.at("lo").get<double>(), g.at("hi").get<double>(),
                  g.value("points", 401)};
    if (!(spec.lo < spec.hi) || spec.points < 2)
      throw rzero::SchemaError("grid needs lo < hi and points >= 2");
    return spec;
  } catch (const json::exception& e) {
    throw rzero::SchemaError(std::string("malformed grid spec: ") + e.what());
  }
}

struct JobInputs {
  rzero::BasisFamily family;
  rzero::DensityModel density;
  rzero::Interval interval;
  double rel_tol;
  json family_json;
  json density_json;
  std::string hash;
};

JobInputs parse_common(const json& job) {
  if (!job.contains("family")) throw rzero::SchemaError("job needs 'family'");
  if (!job.contains("density")) throw rzero::SchemaError("job needs 'density'");
  if (!job.contains("interval")) throw rzero::SchemaError("job needs 'interval'");
  json fam_j = job["family"];
  json den_j = job["density"];
  auto family = rzero::family_from_json(fam_j);
  auto density = rzero::density_from_json(den_j);
  auto interval = rzero::interval_from_json(job["interval"]);
  const double rel_tol = job.value("rel_tol", 1e-8);
  // canonicalize through the parsed objects so defaults are filled in
  fam_j = rzero::family_to_json(family);
  den_j = rzero::density_to_json(density);
  return {family, density, interval, rel_tol, fam_j, den_j,
          rzero::spec_hash(fam_j, den_j, interval)};
}

struct McSettings {
  long long samples = 100000;
  std::uint64_t seed = 0;
  rzero::RootMethod method = rzero::RootMethod::GridBisect;
  int threads = 1;
};

McSettings mc_from_job(const json& job) {
  McSettings mc;
  if (!job.contains("mc")) return mc;
  const json& m = job["mc"];
  try {
    mc.samples = m.value("samples", mc.samples);
    mc.seed = m.value("seed", mc.seed);
    mc.threads = m.value("threads", mc.threads);
    if (m.contains("method"))
      mc.method = rzero::method_from_string(m["method"].get<std::string>());
  } catch (const json::exception& e) {
    throw rzero::SchemaError(std::string("malformed mc settings: ") + e.what());
  }
  return mc;
}

int run_compute(const json& job, const std::string& out_path) {
  const JobInputs in = parse_common(job);
  const auto result =
      rzero::expected_zeros(in.family, in.density, in.interval, in.rel_tol);
  emit(out_path, rzero::result_to_json(result, in.hash).dump(2));
  return 0;
}

int run_verify(const json& job, const std::string& out_path,
               std::optional<std::uint64_t> seed_override, int threads) {
  const JobInputs in = parse_common(job);
  McSettings mc = mc_from_job(job);
  if (seed_override) mc.seed = *seed_override;
  if (threads > 0) mc.threads = threads;
  rzero::RootCountConfig cfg;
  cfg.method = mc.method;
  const auto est = rzero::estimate_expectation(
      in.family, in.density, in.interval, mc.samples, mc.seed, cfg, mc.threads);
  const auto analytic =
      rzero::expected_zeros(in.family, in.density, in.interval, in.rel_tol);
  emit(out_path,
       rzero::estimate_to_json(est, analytic.value, mc.method, in.hash).dump(2));
  return 0;
}

int run_density(const json& job, const std::string& out_path) {
  const JobInputs in = parse_common(job);
  if (in.density.kind() != rzero::DensityKind::UniformBall)
    throw rzero::SchemaError("density table needs a uniform-ball density");
  const GridSpec grid = grid_from_job(job, in.interval);
  std::ostringstream csv;
  csv << "t,H,case,a,chi\n";
  for (int i = 0; i < grid.points; ++i) {
    const double t =
        grid.lo + (grid.hi - grid.lo) * i / (grid.points - 1);
    const auto p = rzero::h_uniform_ball(in.family, in.density.radius(), t);
    csv << format_g17(t) << ',' << format_g17(p.value) << ','
        << rzero::to_string(p.hcase) << ',' << format_g17(p.diag.a) << ','
        << format_g17(p.diag.chi) << '\n';
  }
  emit(out_path, csv.str());
  return 0;
}

std::vector<std::pair<double, double>> read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rzero::SchemaError("cannot open points file '" + path + "'");
  std::vector<std::pair<double, double>> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x1, x2;
    if (row >> x1 >> x2) pts.emplace_back(x1, x2);  // header rows skipped
  }
  if (pts.empty()) throw rzero::SchemaError("points file has no numeric rows");
  return pts;
}

int run_envelope(const json& job, const std::string& out_path,
                 const std::string& points_path) {
  const JobInputs in = parse_common(job);
  std::ostringstream csv;
  if (!points_path.empty()) {
    csv << "x1,x2,count,region\n";
    for (const auto& [x1, x2] : read_points_csv(points_path)) {
      const auto label = rzero::classify(in.family, in.interval, x1, x2);
      csv << format_g17(x1) << ',' << format_g17(x2) << ',' << label.count
          << ',' << rzero::to_string(label.region) << '\n';
    }
  } else {
    const GridSpec grid = grid_from_job(job, in.interval);
    csv << "t,x1,x2,s2\n";
    for (int i = 0; i < grid.points; ++i) {
      const double t =
          grid.lo + (grid.hi - grid.lo) * i / (grid.points - 1);
      const auto p = rzero::envelope_point(in.family, t);
      csv << format_g17(t) << ',' << format_g17(p.x1) << ','
          << format_g17(p.x2) << ',' << format_g17(p.s2) << '\n';
    }
  }
  emit(out_path, csv.str());
  return 0;
}

json family_with_param(json fam, const std::string& param, double v) {
  if (param == "n")
    fam["n"] = static_cast<int>(v);
  else
    fam[param] = v;
  return fam;
}

int run_sweep(const json& job, const std::string& out_path) {
  const JobInputs in = parse_common(job);
  if (!job.contains("sweep")) throw rzero::SchemaError("sweep job needs 'sweep'");
  const json& sw = job["sweep"];
  const std::string param = sw.value("param", "");
  if (param != "n" && param != "d" && param != "r" && param != "sigma")
    throw rzero::SchemaError("sweep param must be one of n, d, r, sigma");
  if (!sw.contains("values") || !sw["values"].is_array() || sw["values"].empty())
    throw rzero::SchemaError("sweep needs a nonempty 'values' array");
  const auto values = sw["values"].get<std::vector<double>>();
  const std::string quantity =
      sw.value("quantity", job.contains("grid") ? "density" : "expectation");

  const bool family_param = (param == "n" || param == "d");
  std::vector<rzero::BasisFamily> families;
  std::vector<rzero::DensityModel> densities;
  for (double v : values) {
    json fam_j = in.family_json, den_j = in.density_json;
    if (family_param)
      fam_j = family_with_param(fam_j, param, v);
    else
      den_j[param == "r" ? "r" : "sigma"] = v;
    families.push_back(rzero::family_from_json(fam_j));
    densities.push_back(rzero::density_from_json(den_j));
  }

  std::ostringstream csv;
  if (quantity == "density") {
    if (in.density.kind() != rzero::DensityKind::UniformBall)
      throw rzero::SchemaError("density sweep needs a uniform-ball density");
    const GridSpec grid = grid_from_job(job, in.interval);
    csv << "t";
    for (std::size_t k = 0; k < values.size(); ++k)
      csv << ",H[" << param << '=' << format_g17(values[k]) << ']';
    csv << '\n';
    for (int i = 0; i < grid.points; ++i) {
      const double t =
          grid.lo + (grid.hi - grid.lo) * i / (grid.points - 1);
      csv << format_g17(t);
      for (std::size_t k = 0; k < values.size(); ++k) {
        const auto p =
            rzero::h_uniform_ball(families[k], densities[k].radius(), t);
        csv << ',' << format_g17(p.value);
      }
      csv << '\n';
    }
  } else if (quantity == "expectation") {
    csv << param << ",value,abs_error_estimate\n";
    for (std::size_t k = 0; k < values.size(); ++k) {
      const auto r = rzero::expected_zeros(families[k], densities[k],
                                           in.interval, in.rel_tol);
      csv << format_g17(values[k]) << ',' << format_g17(r.value) << ','
          << format_g17(r.abs_error_estimate) << '\n';
    }
  } else {
    throw rzero::SchemaError("sweep quantity must be density or expectation");
  }
  emit(out_path, csv.str());
  return 0;
}

int fail(int code, const char* type, const std::string& message) {
  const json err = {{"error", {{"type", type}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"expected real zeros of random equations: compute, verify, plot data"};
  app.require_subcommand(1);

  std::string job_path, out_path, points_path;
  int threads = 0;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* cmd, bool with_mc) {
    cmd->add_option("--job", job_path, "job JSON file")->required();
    cmd->add_option("--out", out_path, "output file (default: stdout)");
    if (with_mc) {
      cmd->add_option("--threads", threads, "worker threads (never changes results)");
      cmd->add_option("--seed", seed, "override the job's mc seed");
    }
  };

  add_common(app.add_subcommand("compute", "expectation via the local density"), false);
  add_common(app.add_subcommand("verify", "Monte Carlo estimate + z-score vs analytic"), true);
  add_common(app.add_subcommand("density", "CSV table of H over a t-grid"), false);
  auto* env = app.add_subcommand("envelope", "CSV envelope curve or point classification");
  add_common(env, false);
  env->add_option("--points", points_path, "CSV of x1,x2 points to classify");
  add_common(app.add_subcommand("sweep", "CSV table over a parameter grid"), false);

  CLI11_PARSE(app, argc, argv);

  try {
    const json job = load_job(job_path);
    if (app.got_subcommand("compute")) return run_compute(job, out_path);
    if (app.got_subcommand("verify")) return run_verify(job, out_path, seed, threads);
    if (app.got_subcommand("density")) return run_density(job, out_path);
    if (app.got_subcommand("envelope")) return run_envelope(job, out_path, points_path);
    if (app.got_subcommand("sweep")) return run_sweep(job, out_path);
  } catch (const rzero::SchemaError& e) {
    return fail(2, "schema", e.what());
  } catch (const rzero::Error& e) {
    return fail(3, "numerical", e.what());
  } catch (const std::exception& e) {
    return fail(3, "internal", e.what());
  }
  return 0;
}
