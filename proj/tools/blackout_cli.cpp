// Command-line front end: schedules, forward simulation, training,
// generation, and the self-validation suites.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blackout/eval.hpp"
#include "blackout/general_ctmc.hpp"
#include "blackout/io.hpp"
#include "blackout/loss.hpp"
#include "blackout/pipeline.hpp"
#include "blackout/predictor.hpp"
#include "blackout/pure_death.hpp"
#include "blackout/schedule.hpp"
#include "blackout/validate.hpp"

namespace {

using namespace blackout;

std::filesystem::path resolve_out(const std::string& flag_value) {
  const char* env = std::getenv("BD_OUT");
  std::filesystem::path dir = env ? std::string(env) : flag_value;
  std::filesystem::create_directories(dir);
  return dir;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.precision(17);
  return out;
}

int run_schedule(int T, double horizon, const std::string& out_dir) {
  const Schedule sched = Schedule::make(T, horizon);
  auto out = open_csv(resolve_out(out_dir) / "schedule.csv");
  out << "k,t_k,exp_neg_t_k\n";
  for (int k = 1; k <= T; ++k)
    out << k << ',' << sched.time(k) << ',' << std::exp(-sched.time(k)) << "\n";
  std::cout << "wrote schedule.csv (" << T << " rows, horizon " << horizon
            << ")\n";
  return 0;
}

int run_simulate(const std::string& process, int o, double t, long paths,
                 std::uint64_t seed, const std::string& out_dir) {
  Generator g = process == "pure-death"
                    ? Generator::pure_death(std::max(o, 1))
                    : load_generator(process);
  if (o < 0 || o > g.max_label())
    throw std::invalid_argument("simulate: o outside the state space");

  std::vector<int> ends(paths);
  for (long p = 0; p < paths; ++p) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(p));
    ends[p] = simulate_exact(g, o, t, rng);
  }
  const auto dir = resolve_out(out_dir);
  auto out = open_csv(dir / "simulate.csv");
  out << "path,x_t\n";
  for (long p = 0; p < paths; ++p) out << p << ',' << ends[p] << "\n";

  const Distribution law = forward_solve(g, Distribution::delta(o, g.max_label()), t);
  const double tv = tv_distance(ends, law.probs);
  auto rep = open_csv(dir / "simulate_report.csv");
  rep << "paths,tv_to_forward_law\n" << paths << ',' << tv << "\n";
  std::cout << "simulated " << paths << " paths, TV to forward law " << tv
            << "\n";
  return 0;
}

int run_train(const std::string& dataset_path, const std::string& loss_name,
              int T, double horizon, long iters, std::uint64_t seed,
              double lr, int batch, int hidden, const std::string& out_dir) {
  const DiscreteDataset ds = load_dataset(dataset_path);
  const Schedule sched = Schedule::make(T, horizon);

  Mlp mlp = Mlp::create({ds.space.dims + 2, hidden, ds.space.dims}, seed);
  TrainConfig cfg;
  cfg.loss = loss_name == "inst" ? LossKind::Instantaneous : LossKind::FiniteTime;
  cfg.batch_size = batch;
  cfg.iterations = iters;
  cfg.learning_rate = lr;
  cfg.seed = seed;
  const TrainResult result = train(ds, mlp, sched, cfg);

  const auto dir = resolve_out(out_dir);
  mlp.save((dir / "model.mlp").string());
  auto out = open_csv(dir / "loss_trace.csv");
  out << "iteration,loss\n";
  for (std::size_t i = 0; i < result.loss_trace.size(); ++i)
    out << i << ',' << result.loss_trace[i] << "\n";
  std::cout << "trained " << iters << " iterations, final loss "
            << (result.loss_trace.empty() ? 0.0 : result.loss_trace.back())
            << ", wrote model.mlp\n";
  return 0;
}

int run_generate(const std::string& model, const std::string& dataset_path,
                 const std::string& sampler_name, int count,
                 std::uint64_t seed, int T, double horizon, int threads,
                 bool verbatim_rate, const std::string& out_dir) {
  if (model == "oracle" && dataset_path.empty())
    throw std::invalid_argument("generate: the oracle model needs --dataset");
  if (model != "oracle" && dataset_path.empty())
    throw std::invalid_argument(
        "generate: --dataset is needed to fix the state space");
  const DiscreteDataset ds = load_dataset(dataset_path);
  const Schedule sched = Schedule::make(T, horizon);

  Mlp mlp = model == "oracle" ? Mlp::create({1, 1, 1}, 0) : Mlp::load(model);
  const PredictFn predict = model == "oracle"
                                ? oracle_predictor(ds, sched)
                                : mlp_predictor(mlp, ds.space, sched);

  GenConfig cfg;
  cfg.count = count;
  cfg.seed = seed;
  cfg.threads = threads;
  cfg.poisson_verbatim_rate = verbatim_rate;

  std::vector<std::vector<int>> samples;
  if (sampler_name == "tau") {
    // reverse birth rates derived from the count predictor
    std::vector<RatePredictFn> rates{
        [&predict, &sched](const std::vector<int>& xt, int k) {
          auto y = predict(xt, k);
          const double tk = sched.time(k);
          const double f = std::exp(-tk) / (-std::expm1(-tk));
          for (double& v : y) v *= f;
          return y;
        }};
    samples = generate_tau_leaping(rates, {1}, ds.space, sched, cfg,
                                   std::vector<int>(ds.space.dims, 0));
  } else {
    cfg.sampler = sampler_name == "poisson" ? SamplerKind::Poisson
                                            : SamplerKind::BinomialBridge;
    samples = generate(predict, ds.space, sched, cfg);
  }

  const auto dir = resolve_out(out_dir);
  save_samples(samples, ds.space, (dir / "samples.txt").string());
  const double tv = tv_distance(samples, ds.items, ds.space);
  auto rep = open_csv(dir / "generate_report.csv");
  rep << "count,tv_to_dataset\n" << count << ',' << tv << "\n";
  std::cout << "generated " << count << " samples, TV to dataset items " << tv
            << ", wrote samples.txt\n";
  return 0;
}

int run_validate(const std::string& suite, int M, long paths,
                 std::uint64_t seed, const std::string& out_dir) {
  std::vector<CheckRow> rows;
  auto append = [&rows](std::vector<CheckRow> more) {
    rows.insert(rows.end(), more.begin(), more.end());
  };
  const bool all = suite == "all";
  if (all || suite == "bridge") append(validate_bridge(M));
  if (all || suite == "forward") append(validate_forward(M));
  if (all || suite == "reverse") append(validate_reverse(M, paths, seed));
  if (all || suite == "schedule") append(validate_schedule());
  if (all || suite == "loss") append(validate_loss());
  if (all || suite == "score") append(validate_score(M));
  if (rows.empty()) throw std::invalid_argument("validate: unknown suite " + suite);

  auto out = open_csv(resolve_out(out_dir) / "validate.csv");
  out << "check,value,tolerance,pass\n";
  bool ok = true;
  for (const auto& row : rows) {
    out << row.name << ',' << row.value << ',' << row.tolerance << ','
        << (row.pass() ? "yes" : "no") << "\n";
    std::cout << (row.pass() ? "PASS " : "FAIL ") << row.name << " = "
              << row.value << " (tol " << row.tolerance << ")\n";
    ok = ok && row.pass();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-state diffusion: pure-death forward processes, exact "
               "reverse-time samplers, and validation suites"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir = ".";
  app.add_option("--out", out_dir, "Output directory (BD_OUT overrides)");

  int T = 1000, M = 8, o = 8, count = 100, threads = 1, hidden = 16, batch = 8;
  double horizon = 15.0, t = 1.0, lr = 1e-2;
  long paths = 100000, iters = 2000;
  std::uint64_t seed = 0;
  std::string process = "pure-death", dataset, loss_name = "finite";
  std::string model = "oracle", sampler = "bridge", suite = "all";
  bool verbatim_rate = false;

  auto* sched_cmd = app.add_subcommand("schedule", "Emit the observation times");
  sched_cmd->add_option("--T", T, "Number of observation times")->required();
  sched_cmd->add_option("--horizon", horizon, "Final time t_T");

  auto* sim_cmd = app.add_subcommand("simulate", "Forward exact simulation");
  sim_cmd->add_option("--process", process, "pure-death or a generator file");
  sim_cmd->add_option("--o", o, "Initial state")->required();
  sim_cmd->add_option("--t", t, "Simulation time")->required();
  sim_cmd->add_option("--paths", paths, "Number of paths")->required();
  sim_cmd->add_option("--seed", seed, "RNG seed")->required();

  auto* train_cmd = app.add_subcommand("train", "Train the count predictor");
  train_cmd->add_option("--dataset", dataset, "BDDATA file")->required();
  train_cmd->add_option("--loss", loss_name, "inst or finite")
      ->check(CLI::IsMember({"inst", "finite"}));
  train_cmd->add_option("--T", T, "Number of observation times");
  train_cmd->add_option("--horizon", horizon, "Final time t_T");
  train_cmd->add_option("--iters", iters, "SGD iterations")->required();
  train_cmd->add_option("--seed", seed, "RNG seed")->required();
  train_cmd->add_option("--lr", lr, "Learning rate");
  train_cmd->add_option("--batch", batch, "Batch size");
  train_cmd->add_option("--hidden", hidden, "Hidden layer width");

  auto* gen_cmd = app.add_subcommand("generate", "Reverse-time generation");
  gen_cmd->add_option("--model", model, "Model file or 'oracle'");
  gen_cmd->add_option("--dataset", dataset, "BDDATA file")->required();
  gen_cmd->add_option("--sampler", sampler, "bridge, poisson, or tau")
      ->check(CLI::IsMember({"bridge", "poisson", "tau"}));
  gen_cmd->add_option("--count", count, "Number of samples")->required();
  gen_cmd->add_option("--seed", seed, "RNG seed")->required();
  gen_cmd->add_option("--T", T, "Number of observation times");
  gen_cmd->add_option("--horizon", horizon, "Final time t_T");
  gen_cmd->add_option("--threads", threads, "Worker threads");
  gen_cmd->add_flag("--poisson-verbatim-rate", verbatim_rate,
                    "Poisson branch without the time-step factor");

  auto* val_cmd = app.add_subcommand("validate", "Self-validation suites");
  val_cmd->add_option("--suite", suite,
                      "bridge, forward, reverse, schedule, loss, score, all");
  val_cmd->add_option("--M", M, "Label range for the grid suites");
  val_cmd->add_option("--paths", paths, "Reverse-suite path count");
  val_cmd->add_option("--seed", seed, "RNG seed for the reverse suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sched_cmd->parsed()) return run_schedule(T, horizon, out_dir);
    if (sim_cmd->parsed())
      return run_simulate(process, o, t, paths, seed, out_dir);
    if (train_cmd->parsed())
      return run_train(dataset, loss_name, T, horizon, iters, seed, lr, batch,
                       hidden, out_dir);
    if (gen_cmd->parsed())
      return run_generate(model, dataset, sampler, count, seed, T, horizon,
                          threads, verbatim_rate, out_dir);
    if (val_cmd->parsed()) return run_validate(suite, M, paths, seed, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
