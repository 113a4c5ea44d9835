// eotbench: build benchmark pairs, sample them, and score solver outputs.
//
// Every randomized command takes --seed and is bit-reproducible for any
// --threads value. Failures print a single line to stderr:
//   error: code=<code> message=<text>
// with exit status 2 for usage errors and 1 for everything else.

#include "eotbench/builder.hpp"
#include "eotbench/datasets.hpp"
#include "eotbench/drift_protocol.hpp"
#include "eotbench/mala.hpp"
#include "eotbench/metrics.hpp"
#include "eotbench/pair_io.hpp"
#include "eotbench/parallel.hpp"
#include "eotbench/plan.hpp"
#include "eotbench/reference.hpp"
#include "eotbench/report_io.hpp"
#include "eotbench/sde.hpp"
#include "eotbench/tensor_io.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace eotbench;


void emit_error(const std::string& code, const std::string& message) {
  std::string flat = message;
  for (char& c : flat) {
    if (c == '\n') c = ' ';
  }
  std::cerr << "error: code=" << code << " message=" << flat << "\n";
}

void write_samples(const std::string& path, const SampleMatrix& samples, bool csv) {
  if (csv) {
    write_csv(path, samples);
  } else {
    write_tensor(path, samples);
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file_atomic(path, text);
  }
}

std::vector<std::string> split_command(const std::string& command) {
  std::istringstream in(command);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

Point parse_point(const std::string& text, Index dim, const std::string& what) {
  std::vector<double> values;
  std::string cell;
  std::istringstream in(text);
  while (std::getline(in, cell, ',')) values.push_back(std::stod(cell));
  require(static_cast<Index>(values.size()) == dim, ErrorCode::kDimensionMismatch,
          what + " needs " + std::to_string(dim) + " comma separated values");
  return Eigen::Map<const Point>(values.data(), dim);
}

// ---------------------------------------------------------------- build

struct PresetArgs {
  MixturesPresetSpec spec;
  std::optional<double> matrix_scale;
  std::string out;
};

struct FromDataArgs {
  std::string target;
  std::string source;
  std::size_t clusters = 100;
  double lambda = 50.0;
  double eps = 0.05;
  std::uint64_t seed = 0;
  std::size_t restarts = 10;
  std::size_t iterations = 300;
  std::string name = "from-data";
  std::string out;
  std::string report;
};

void run_preset(const PresetArgs& a) {
  MixturesPresetSpec spec = a.spec;
  spec.matrix_scale = a.matrix_scale;
  const BenchmarkPair pair = build_mixtures_preset(spec);
  save_pair(a.out, pair);
  if (!pair.metadata().published_preset) {
    std::cerr << "note: (dim, eps) = (" << spec.dim << ", " << spec.epsilon
              << ") is outside the published preset grid\n";
  }
}

void run_from_data(const FromDataArgs& a) {
  DataRecipeSpec spec;
  spec.target = read_samples(a.target);
  spec.clusters = a.clusters;
  spec.lambda = a.lambda;
  spec.epsilon = a.eps;
  spec.kmeans_restarts = a.restarts;
  spec.kmeans_iterations = a.iterations;
  spec.seed = a.seed;
  spec.name = a.name;
  SourceDistribution source =
      a.source.empty()
          ? SourceDistribution::gaussian(Point::Zero(spec.target.cols()),
                                         SymMatrix::scalar_identity(spec.target.cols(), 1.0))
          : gaussian_fit_source(read_samples(a.source));
  const DataBuild built = build_from_data(spec, std::move(source));
  save_pair(a.out, built.pair);
  std::string report = "inertia: " + format_real(built.report.inertia) + "\n";
  report += "kmeans_iterations: " + std::to_string(built.report.kmeans_iterations) + "\n";
  report += "winning_restart: " + std::to_string(built.report.winning_restart) + "\n";
  report += "cluster_counts:";
  for (std::size_t c : built.report.cluster_counts) report += " " + std::to_string(c);
  report += "\n";
  if (a.report.empty()) {
    std::cerr << report;
  } else {
    write_file_atomic(a.report, report);
  }
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string pair;
  std::size_t count = 10000;
  std::uint64_t seed = 0;
  std::string out;
  bool csv = false;
  std::string x_file;
  std::string y_file;
  std::size_t steps = 200;
  std::optional<double> step_size;
  bool all_states = false;
};

MalaConfig reverse_config(const BenchmarkPair& pair, std::size_t steps, std::optional<double> step) {
  MalaConfig cfg = default_mala_config(pair.epsilon());
  cfg.steps = steps;
  if (step) cfg.step_size = *step;
  return cfg;
}

void run_sample(const std::string& what, const SampleArgs& a) {
  const BenchmarkPair pair = load_pair(a.pair);
  const Seed seed{a.seed, 0};
  if (what == "source") {
    write_samples(a.out, sample_source(pair, seed, a.count), a.csv);
  } else if (what == "target") {
    write_samples(a.out, sample_target(pair, seed, a.count), a.csv);
  } else if (what == "joint") {
    const JointSamples joint = sample_joint(pair, seed, a.count);
    SampleMatrix rows(static_cast<Index>(a.count), 2 * pair.dim());
    if (a.count > 0) {
      rows.leftCols(pair.dim()) = joint.x;
      rows.rightCols(pair.dim()) = joint.y;
    }
    write_samples(a.out, rows, a.csv);
  } else if (what == "conditional") {
    const SampleMatrix xs = read_samples(a.x_file);
    require_dim(xs.cols(), pair.dim(), "probe x file");
    SampleMatrix out(xs.rows() * static_cast<Index>(a.count), pair.dim());
    for (Index i = 0; i < xs.rows(); ++i) {
      const auto plan = conditional_plan(pair, xs.row(i).transpose());
      if (a.count > 0) {
        out.middleRows(i * static_cast<Index>(a.count), static_cast<Index>(a.count)) =
            sample_conditional(plan, seed.substream(static_cast<std::uint64_t>(i)), a.count);
      }
    }
    write_samples(a.out, out, a.csv);
  } else if (what == "reverse") {
    const SampleMatrix ys = read_samples(a.y_file);
    const MalaConfig cfg = reverse_config(pair, a.steps, a.step_size);
    write_samples(a.out, sample_reverse_batch(pair, ys, a.count, cfg, seed, !a.all_states), a.csv);
  } else if (what == "bridge") {
    const auto paths = sample_sb_trajectories_exact(pair, seed, uniform_grid(a.steps), a.count);
    std::vector<SampleMatrix> states;
    states.reserve(paths.size());
    for (const auto& p : paths) states.push_back(p.states);
    if (a.count == 0) {
      write_file_atomic(a.out, "0 " + std::to_string(a.steps + 1) + " " + std::to_string(pair.dim()) + " f64le\n");
    } else {
      write_trajectories(a.out, states);
    }
  }
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string pair;
  std::size_t steps = 200;
  std::optional<double> eps;
  std::size_t paths = 10000;
  std::uint64_t seed = 0;
  std::string out;
  bool endpoints = false;
  bool csv = false;
  std::string x_file;
};

void run_simulate(const SimulateArgs& a) {
  const BenchmarkPair pair = load_pair(a.pair);
  const double eps = a.eps.value_or(pair.epsilon());
  const Seed seed{a.seed, 0};
  SampleMatrix starts;
  if (a.x_file.empty()) {
    starts = sample_source(pair, seed.substream(0), a.paths);
  } else {
    // Fixed start points, each replicated --paths times.
    const SampleMatrix xs = read_samples(a.x_file);
    require_dim(xs.cols(), pair.dim(), "start point file");
    starts.resize(xs.rows() * static_cast<Index>(a.paths), pair.dim());
    for (Index i = 0; i < starts.rows(); ++i) starts.row(i) = xs.row(i / static_cast<Index>(a.paths));
  }
  const DriftField drift = DriftField::optimal(pair);
  if (a.endpoints) {
    SimulationSummary summary;
    const SampleMatrix ends = simulate_endpoints(drift, starts, eps, a.steps, seed.substream(1), &summary);
    require(summary.failed == 0, ErrorCode::kNonFinite, std::to_string(summary.failed) + " paths diverged");
    write_samples(a.out, ends, a.csv);
    return;
  }
  const auto trajectories = simulate_sb(drift, starts, eps, a.steps, seed.substream(1));
  std::vector<SampleMatrix> states;
  states.reserve(trajectories.size());
  for (const auto& t : trajectories) {
    require(t.ok(), ErrorCode::kNonFinite, "a simulated path diverged");
    states.push_back(t.states);
  }
  write_trajectories(a.out, states);
}

// ---------------------------------------------------------------- evaluate

struct EvalArgs {
  std::string pair;
  std::string pred;
  std::string ref;
  std::string test_x;
  std::string baseline;
  std::size_t samples_per_x = 1000;
  std::size_t test_count = 100;
  std::size_t ref_samples = 100000;
  std::size_t variance_samples = 100000;
  std::string a_file;
  std::string b_file;
  std::optional<double> bandwidth;
  std::string endpoint;
  std::string trajectories;
  std::string drifts;
  bool reverse = false;
  std::size_t steps = 200;
  std::size_t paths = 10000;
  std::uint64_t seed = 0;
  std::string format = "text";
  std::string out;
};

void emit_report(const EvalArgs& a, const MetricReport& report) {
  write_text(a.out, a.format == "csv" ? reports_to_csv({report}) : report_to_text(report));
}

void run_bw2(const EvalArgs& a) {
  const SampleMatrix pred = read_samples(a.pred);
  if (!a.ref.empty()) {
    emit_report(a, bw2_uvp(pred, read_samples(a.ref)));
    return;
  }
  require(!a.pair.empty(), ErrorCode::kInvalidArgument, "bw2uvp needs --ref or --pair");
  const BenchmarkPair pair = load_pair(a.pair);
  auto report = bw2_uvp(pred, target_moments(pair, Seed{a.seed, 0}, a.ref_samples), a.ref_samples);
  report.seed = a.seed;
  emit_report(a, report);
}

void run_cbw2(const EvalArgs& a) {
  const BenchmarkPair pair = load_pair(a.pair);
  const Seed seed{a.seed, 0};
  CbwOptions options;
  options.samples_per_x = a.samples_per_x;
  options.target_variance_samples = a.variance_samples;
  const SampleMatrix test_x =
      a.test_x.empty() ? sample_source(pair, seed.substream(7), a.test_count) : read_samples(a.test_x);
  MetricReport report;
  if (!a.pred.empty()) {
    report = cbw2_uvp_from_samples(pair, test_x, read_samples(a.pred), seed, options);
  } else if (a.baseline == "independent") {
    report = cbw2_uvp(pair, independent_plan_sampler(pair), test_x, seed, options);
  } else if (a.baseline == "ground-truth") {
    report = cbw2_uvp(pair, ground_truth_sampler(pair), test_x, seed, options);
  } else if (a.baseline == "analytic") {
    report = cbw2_uvp_analytic(
        pair, [&](const Point& x) { return conditional_moments(conditional_plan(pair, x)); }, test_x,
        seed, options);
  } else {
    throw Error(ErrorCode::kInvalidArgument,
                "cbw2uvp needs --pred-samples or --baseline independent|ground-truth|analytic");
  }
  emit_report(a, report);
}

void run_kl(const EvalArgs& a) {
  const BenchmarkPair pair = load_pair(a.pair);
  const DriftField truth = DriftField::optimal(pair);
  const Seed seed{a.seed, 0};
  if (!a.trajectories.empty()) {
    require(!a.drifts.empty(), ErrorCode::kInvalidArgument, "--trajectories needs --drifts");
    const auto states = read_trajectories(a.trajectories);
    const auto drifts = read_trajectories(a.drifts);
    const auto per_t = l2_drift_discrepancy_from_paths(truth, states, drifts);
    const double integral = integrate_over_time(per_t);
    MetricReport report;
    report.metric = a.reverse ? "rkl" : "kl";
    report.normalization = 2.0 * pair.epsilon();
    report.value = integral / report.normalization;
    report.set("source", "files");
    report.set("steps", static_cast<double>(per_t.size()));
    report.set("paths", static_cast<double>(states.size()));
    report.set("epsilon", pair.epsilon());
    report.set("l2_time_integral", integral);
    emit_report(a, report);
    return;
  }
  require(!a.endpoint.empty(), ErrorCode::kInvalidArgument,
          "kl needs --cand-drift-endpoint or --trajectories/--drifts");
  auto child = std::make_shared<DriftSubprocess>(split_command(a.endpoint), pair.dim());
  KlOptions options{a.steps, a.paths};
  const BatchDrift cand = subprocess_batch_drift(child);
  MetricReport report = a.reverse ? kl_reverse(truth, cand, pair.source(), pair.epsilon(), seed, options)
                                  : kl_forward(truth, cand, pair.source(), pair.epsilon(), seed, options);
  const int status = child->finish();
  require(status == 0, ErrorCode::kProtocol, "drift child exited with status " + std::to_string(status));
  report.set("candidate", "subprocess");
  emit_report(a, report);
}

void run_mmd(const EvalArgs& a) {
  emit_report(a, mmd_rbf(read_samples(a.a_file), read_samples(a.b_file), a.bandwidth));
}

// ---------------------------------------------------------------- misc

struct ServerArgs {
  std::string pair;
  std::string offset;
};

void run_drift_server(const ServerArgs& a) {
  const BenchmarkPair pair = load_pair(a.pair);
  DriftField field = DriftField::optimal(pair);
  if (!a.offset.empty()) field = DriftField::perturbed(field, parse_point(a.offset, pair.dim(), "--offset"));
  std::ios::sync_with_stdio(false);
  serve_drift(field, std::cin, std::cout);
}

struct RefArgs {
  std::string pair;
  std::string refs;
  std::uint64_t probe_seed = 0;
  std::string out;
};

void run_export_refs(const RefArgs& a) {
  ReferenceOptions options;
  options.probe_seed = a.probe_seed;
  write_text(a.out, export_reference_vectors(read_file(a.pair), options));
}

int run_verify_refs(const RefArgs& a) {
  const VerifyResult r = verify_reference_vectors(read_file(a.pair), read_file(a.refs));
  if (!r.ok()) {
    emit_error("reference_mismatch", std::to_string(r.mismatches) + " of " +
                                         std::to_string(r.values_checked) + " values differ; first: " +
                                         r.first_mismatch);
    return 1;
  }
  std::cout << "ok: " << r.values_checked << " values within tolerance (max scaled error "
            << format_real(r.max_error) << ")\n";
  return 0;
}

void run_validate(const std::string& path) {
  const std::string text = read_file(path);
  const BenchmarkPair pair = parse_pair(text);
  const ValidationReport report = validate_potential(pair.potential());
  std::cout << "name: " << pair.metadata().name << "\n"
            << "dim: " << pair.dim() << "\n"
            << "epsilon: " << format_real(pair.epsilon()) << "\n"
            << "components: " << pair.size() << "\n"
            << "appropriate: " << (report.appropriate ? "true" : "false") << "\n"
            << "min_eigenvalues:";
  for (double v : report.min_eigenvalues) std::cout << " " << format_real(v);
  std::cout << "\ndigest: " << pair_text_digest(text) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropic OT / Schrodinger bridge benchmark pairs with known solutions", "eotbench"};
  app.fallthrough();
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: EOTBENCH_THREADS or all cores)");

  int exit_code = 0;
  std::function<void()> action;

  // build
  auto* build = app.add_subcommand("build", "Construct a benchmark pair file");
  build->require_subcommand(1);
  PresetArgs preset;
  auto* preset_cmd = build->add_subcommand("preset-mixtures", "Gaussian source, sphere-centred mixture target");
  preset_cmd->add_option("--dim", preset.spec.dim, "Dimension D")->required();
  preset_cmd->add_option("--eps", preset.spec.epsilon, "Entropic regularization epsilon")->required();
  preset_cmd->add_option("--n", preset.spec.components, "Number of components")->capture_default_str();
  preset_cmd->add_option("--radius", preset.spec.radius, "Sphere radius for the centers")->capture_default_str();
  preset_cmd->add_option("--source-var", preset.spec.source_variance, "Source variance")->capture_default_str();
  preset_cmd->add_option("--matrix-scale", preset.matrix_scale, "Override the tabulated a in A = aI");
  preset_cmd->add_option("--seed", preset.spec.seed, "Seed for the centers")->capture_default_str();
  preset_cmd->add_option("-o,--out", preset.out, "Output pair file")->required();
  preset_cmd->callback([&] { action = [&] { run_preset(preset); }; });

  FromDataArgs from_data;
  auto* data_cmd = build->add_subcommand("from-data", "K-means recipe on a target dataset");
  data_cmd->add_option("--target", from_data.target, "Target dataset (tensor or CSV)")->required();
  data_cmd->add_option("--source", from_data.source, "Source dataset; a Gaussian fit becomes the source (default N(0, I))");
  data_cmd->add_option("--clusters", from_data.clusters, "Number of components N")->capture_default_str();
  data_cmd->add_option("--lambda", from_data.lambda, "A = lambda I")->capture_default_str();
  data_cmd->add_option("--eps", from_data.eps, "Entropic regularization epsilon")->required();
  data_cmd->add_option("--restarts", from_data.restarts, "K-means restarts")->capture_default_str();
  data_cmd->add_option("--iterations", from_data.iterations, "K-means iteration cap")->capture_default_str();
  data_cmd->add_option("--seed", from_data.seed, "K-means seed")->capture_default_str();
  data_cmd->add_option("--name", from_data.name, "Pair name")->capture_default_str();
  data_cmd->add_option("--report", from_data.report, "Write the fit report here (default stderr)");
  data_cmd->add_option("-o,--out", from_data.out, "Output pair file")->required();
  data_cmd->callback([&] { action = [&] { run_from_data(from_data); }; });

  // sample
  auto* sample = app.add_subcommand("sample", "Draw from the objects of a pair");
  sample->require_subcommand(1);
  std::vector<SampleArgs> sample_args(6);
  const char* kinds[] = {"source", "target", "joint", "conditional", "reverse", "bridge"};
  const char* help[] = {"Source draws", "Target draws", "Joint draws, rows hold x then y",
                        "Conditional draws per probe x, grouped by probe", "Reverse conditional draws per y (MALA)",
                        "Exact bridge trajectories (trajectory file)"};
  for (std::size_t k = 0; k < 6; ++k) {
    auto& a = sample_args[k];
    const std::string kind = kinds[k];
    auto* cmd = sample->add_subcommand(kind, help[k]);
    cmd->add_option("--pair", a.pair, "Pair file")->required();
    cmd->add_option("--count", a.count, kind == "reverse" ? "Chains per y" : kind == "conditional" ? "Draws per x" : "Number of draws")->required();
    cmd->add_option("--seed", a.seed, "Seed")->required();
    cmd->add_option("-o,--out", a.out, "Output file")->required();
    if (kind != "bridge") cmd->add_flag("--csv", a.csv, "Write CSV instead of the binary tensor");
    if (kind == "conditional") cmd->add_option("--x-file", a.x_file, "Probe points")->required();
    if (kind == "reverse") {
      cmd->add_option("--y-file", a.y_file, "Conditioning points")->required();
      cmd->add_option("--steps", a.steps, "MALA steps per chain")->capture_default_str();
      cmd->add_option("--step-size", a.step_size, "MALA step (default 1e-4 * eps)");
      cmd->add_flag("--all-states", a.all_states, "Emit every chain state instead of the final one");
    }
    if (kind == "bridge") cmd->add_option("--steps", a.steps, "Grid intervals")->capture_default_str();
    cmd->callback([&a, kind, &action] { action = [&a, kind] { run_sample(kind, a); }; });
  }

  SampleArgs reverse;
  auto* reverse_cmd = app.add_subcommand("reverse-sample", "MALA draws from the reverse conditional plan");
  reverse_cmd->add_option("--pair", reverse.pair, "Pair file")->required();
  reverse_cmd->add_option("--y-file", reverse.y_file, "Conditioning points")->required();
  reverse_cmd->add_option("--steps", reverse.steps, "MALA steps per chain")->capture_default_str();
  reverse_cmd->add_option("--step-size", reverse.step_size, "MALA step (default 1e-4 * eps)");
  reverse_cmd->add_option("--chains", reverse.count, "Chains per y")->default_val(1);
  reverse_cmd->add_option("--seed", reverse.seed, "Seed")->required();
  reverse_cmd->add_option("-o,--out", reverse.out, "Output file")->required();
  reverse_cmd->add_flag("--all-states", reverse.all_states, "Emit every chain state instead of the final one");
  reverse_cmd->add_flag("--csv", reverse.csv, "Write CSV instead of the binary tensor");
  reverse_cmd->callback([&] { action = [&] { run_sample("reverse", reverse); }; });

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Euler-Maruyama simulation with the optimal drift");
  sim_cmd->add_option("--pair", sim.pair, "Pair file")->required();
  sim_cmd->add_option("--steps", sim.steps, "Time steps")->capture_default_str();
  sim_cmd->add_option("--eps", sim.eps, "Volatility (default: the pair's epsilon)");
  sim_cmd->add_option("--paths", sim.paths, "Paths (per start point with --x-file)")->capture_default_str();
  sim_cmd->add_option("--x-file", sim.x_file, "Fixed start points instead of source draws");
  sim_cmd->add_option("--seed", sim.seed, "Seed")->required();
  sim_cmd->add_option("-o,--out", sim.out, "Output file")->required();
  sim_cmd->add_flag("--endpoints", sim.endpoints, "Write terminal states as a sample tensor");
  sim_cmd->add_flag("--csv", sim.csv, "With --endpoints, write CSV");
  sim_cmd->callback([&] { action = [&] { run_simulate(sim); }; });

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score candidate outputs");
  evaluate->require_subcommand(1);
  EvalArgs ev;
  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--format", ev.format, "text or csv")->check(CLI::IsMember({"text", "csv"}))->capture_default_str();
    cmd->add_option("-o,--out", ev.out, "Report file (default stdout)");
    cmd->add_option("--seed", ev.seed, "Seed")->capture_default_str();
  };
  auto* bw2 = evaluate->add_subcommand("bw2uvp", "BW2-UVP of predicted target samples");
  bw2->add_option("--pred", ev.pred, "Predicted samples")->required();
  bw2->add_option("--ref", ev.ref, "Reference samples");
  bw2->add_option("--pair", ev.pair, "Pair file; the reference then uses analytic target moments");
  bw2->add_option("--ref-samples", ev.ref_samples, "Draws for the target moments")->capture_default_str();
  common(bw2);
  bw2->callback([&] { action = [&] { run_bw2(ev); }; });

  auto* cbw = evaluate->add_subcommand("cbw2uvp", "Conditional BW2-UVP against the analytic plan");
  cbw->add_option("--pair", ev.pair, "Pair file")->required();
  cbw->add_option("--test-x", ev.test_x, "Test points (default: --test-count source draws)");
  cbw->add_option("--test-count", ev.test_count, "Test points drawn when --test-x is absent")->capture_default_str();
  cbw->add_option("--pred-samples", ev.pred, "Predicted samples grouped per test point");
  cbw->add_option("--baseline", ev.baseline, "Built-in predictor instead of a file")
      ->check(CLI::IsMember({"independent", "ground-truth", "analytic"}));
  cbw->add_option("--samples-per-x", ev.samples_per_x, "Draws per test point for baselines")->capture_default_str();
  cbw->add_option("--variance-samples", ev.variance_samples, "Draws for Var of the target")->capture_default_str();
  common(cbw);
  cbw->callback([&] { action = [&] { run_cbw2(ev); }; });

  auto* kl = evaluate->add_subcommand("kl", "Girsanov KL between the optimal and a candidate drift");
  kl->add_option("--pair", ev.pair, "Pair file")->required();
  kl->add_option("--cand-drift-endpoint", ev.endpoint, "Command speaking the line drift protocol");
  kl->add_option("--trajectories", ev.trajectories, "Trajectory file with the states");
  kl->add_option("--drifts", ev.drifts, "Trajectory-shaped file with candidate drifts at those states");
  kl->add_flag("--reverse", ev.reverse, "Reverse KL (paths driven by the candidate)");
  kl->add_option("--steps", ev.steps, "Time steps")->capture_default_str();
  kl->add_option("--paths", ev.paths, "Paths")->capture_default_str();
  common(kl);
  kl->callback([&] { action = [&] { run_kl(ev); }; });

  auto* mmd = evaluate->add_subcommand("mmd", "Unbiased RBF-kernel MMD^2");
  mmd->add_option("--a", ev.a_file, "First sample")->required();
  mmd->add_option("--b", ev.b_file, "Second sample")->required();
  mmd->add_option("--bandwidth", ev.bandwidth, "Kernel bandwidth (default: median heuristic)");
  common(mmd);
  mmd->callback([&] { action = [&] { run_mmd(ev); }; });

  ServerArgs server;
  auto* server_cmd = app.add_subcommand("drift-server", "Serve the optimal drift over stdin/stdout");
  server_cmd->add_option("--pair", server.pair, "Pair file")->required();
  server_cmd->add_option("--offset", server.offset, "Constant added to the drift, comma separated");
  server_cmd->callback([&] { action = [&] { run_drift_server(server); }; });

  RefArgs refs;
  auto* export_cmd = app.add_subcommand("export-refs", "Write reference vectors for a pair file");
  export_cmd->add_option("--pair", refs.pair, "Pair file")->required();
  export_cmd->add_option("--probe-seed", refs.probe_seed, "Seed for the probes")->capture_default_str();
  export_cmd->add_option("-o,--out", refs.out, "Output file (default stdout)");
  export_cmd->callback([&] { action = [&] { run_export_refs(refs); }; });

  auto* verify_cmd = app.add_subcommand("verify-refs", "Check a pair file against reference vectors");
  verify_cmd->add_option("--pair", refs.pair, "Pair file")->required();
  verify_cmd->add_option("--refs", refs.refs, "Reference file")->required();
  verify_cmd->callback([&] { action = [&] { exit_code = run_verify_refs(refs); }; });

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Print the validation report of a pair file");
  validate_cmd->add_option("pair", validate_path, "Pair file")->required();
  validate_cmd->callback([&] { action = [&] { run_validate(validate_path); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("usage", e.what());
    return 2;
  }

  try {
    if (threads > 0) set_thread_count(threads);
    if (action) action();
  } catch (const Error& e) {
    emit_error(std::string(to_string(e.code())), e.what());
    return 1;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
  return exit_code;
}
