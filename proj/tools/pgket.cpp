// Copyright 2026 The PGKET Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgket/pgket.hpp"

// Exit codes: 0 success, 2 config error, 3 data/format error, 4 numeric
// divergence, 5 acceptance-test failure.
namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;
constexpr int kExitCheckFailed = 5;

using pgket::RealTensor;
using pgket::SeededRng;

struct CheckReporter {
  int failures = 0;

  void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s %s (%s)\n", ok ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    if (!ok) ++failures;
  }
};

RealTensor random_token(std::size_t d, SeededRng& rng, double scale = 1.0) {
  RealTensor x({d});
  for (std::size_t t = 0; t < d; ++t) x[t] = rng.uniform(-scale, scale);
  return x;
}

/// Random tokens on a dyadic grid (multiples of 1/1024), so constant shifts
/// by a power of two are exact in floating point.
RealTensor dyadic_token(std::size_t d, SeededRng& rng) {
  RealTensor x({d});
  for (std::size_t t = 0; t < d; ++t) {
    x[t] = static_cast<double>(static_cast<long>(rng.below(2049)) - 1024) /
           1024.0;
  }
  return x;
}

int run_kernel_selftest(std::size_t trials, std::uint64_t seed) {
  using namespace pgket;
  CheckReporter rep;
  SeededRng root(seed);

  {  // exact score symmetry
    SeededRng rng = root.split("symmetry");
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t d = 2 + rng.below(6);
      kernel::KernelConfig cfg = kernel::KernelConfig::defaults(d);
      kernel::MeshParams mesh =
          kernel::MeshParams::random_init(d, d, rng, 0.7);
      const RealTensor xi = random_token(d, rng);
      const RealTensor xj = random_token(d, rng);
      worst = std::max(worst, std::abs(kernel::pgksas_exact(xi, xj, mesh, cfg) -
                                       kernel::pgksas_exact(xj, xi, mesh, cfg)));
    }
    rep.report("score symmetry", worst == 0.0,
               "max |s(i,j)-s(j,i)| = " + std::to_string(worst));
  }

  {  // translation invariance, bit for bit on dyadic inputs
    SeededRng rng = root.split("translation");
    bool ok = true;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t d = 2 + rng.below(6);
      kernel::KernelConfig cfg = kernel::KernelConfig::defaults(d);
      kernel::MeshParams mesh =
          kernel::MeshParams::random_init(d, d, rng, 0.7);
      const RealTensor xi = dyadic_token(d, rng);
      const RealTensor xj = dyadic_token(d, rng);
      RealTensor xi_s = xi, xj_s = xj;
      const double shift = 4.0;
      for (std::size_t k = 0; k < d; ++k) {
        xi_s[k] += shift;
        xj_s[k] += shift;
      }
      ok = ok && kernel::pgksas_exact(xi, xj, mesh, cfg) ==
                     kernel::pgksas_exact(xi_s, xj_s, mesh, cfg);
    }
    rep.report("translation invariance", ok, "shared shift leaves scores");
  }

  {  // bounds
    SeededRng rng = root.split("bounds");
    bool ok = true;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t d = 2 + rng.below(6);
      kernel::KernelConfig cfg = kernel::KernelConfig::defaults(d);
      kernel::MeshParams mesh =
          kernel::MeshParams::random_init(d, d, rng, 0.7);
      const RealTensor xi = random_token(d, rng);
      const RealTensor xj = random_token(d, rng);
      const double s = kernel::pgksas_exact(xi, xj, mesh, cfg);
      ok = ok && s > 0.0 && s <= 1.0 &&
           kernel::pgksas_exact(xi, xi, mesh, cfg) == 1.0;
    }
    rep.report("score bounds", ok, "0 < score <= 1, score(x,x) = 1");
  }

  {  // full-mode detection is mesh-independent
    SeededRng rng = root.split("full-mode");
    double spread = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t d = 2 + rng.below(6);
      kernel::KernelConfig cfg = kernel::KernelConfig::defaults(d);
      cfg.detected_modes = kernel::KernelConfig::all_modes(d);
      const RealTensor xi = random_token(d, rng);
      const RealTensor xj = random_token(d, rng);
      const double base = kernel::pgksas_exact(
          xi, xj, kernel::MeshParams::identity(d, d), cfg);
      for (int m = 0; m < 4; ++m) {
        kernel::MeshParams mesh =
            kernel::MeshParams::random_init(d, d, rng, 0.9);
        spread = std::max(
            spread, std::abs(kernel::pgksas_exact(xi, xj, mesh, cfg) - base));
      }
    }
    rep.report("full-mode mesh invariance", spread < 1e-12,
               "max spread = " + std::to_string(spread));
  }

  {  // Gamma PSD
    SeededRng rng = root.split("psd");
    double min_eig = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t d = 2 + rng.below(6);
      kernel::KernelConfig cfg = kernel::KernelConfig::defaults(d);
      kernel::MeshParams mesh =
          kernel::MeshParams::random_init(d, d, rng, 1.0);
      const RealTensor gamma =
          kernel::gamma_of_mesh(mesh, cfg.detected_modes);
      const EighResult eig = eigh_symmetric(gamma);
      min_eig = std::min(min_eig, eig.eigenvalues(0));
    }
    rep.report("Gamma positive semidefinite", min_eig >= -1e-10,
               "min eigenvalue = " + std::to_string(min_eig));
  }

  {  // shot estimator converges at the binomial rate
    SeededRng rng = root.split("shots");
    const std::size_t d = 4;
    kernel::KernelConfig cfg = kernel::KernelConfig::defaults(d);
    cfg.backend = pgket::kernel::ScoreBackend::kShots;
    kernel::MeshParams mesh = kernel::MeshParams::random_init(d, d, rng, 0.5);
    RealTensor xi = random_token(d, rng);
    RealTensor xj = random_token(d, rng);
    kernel::KernelConfig exact_cfg = cfg;
    exact_cfg.backend = pgket::kernel::ScoreBackend::kExact;
    const double p = kernel::pgksas_exact(xi, xj, mesh, exact_cfg);
    bool ok = true;
    std::string detail = "p = " + std::to_string(p);
    for (std::size_t shots : {100u, 1000u, 10000u}) {
      cfg.shots = shots;
      SeededRng shot_rng = rng.split(shots);
      const double est = kernel::pgksas_shots(xi, xj, mesh, cfg, shot_rng);
      const double sigma =
          std::sqrt(p * (1.0 - p) / static_cast<double>(shots));
      ok = ok && std::abs(est - p) <= 6.0 * sigma + 1e-12;
      detail += ", " + std::to_string(shots) + " shots -> " +
                std::to_string(est);
    }
    rep.report("shot estimator consistency", ok, detail);
  }

  {  // literal circuit on the Fock oracle agrees
    SeededRng rng = root.split("fock");
    const std::size_t d = 2, cutoff = 18;
    double worst = 0.0;
    const std::size_t fock_trials = std::min<std::size_t>(trials, 10);
    for (std::size_t t = 0; t < fock_trials; ++t) {
      kernel::KernelConfig cfg = kernel::KernelConfig::defaults(d);
      kernel::MeshParams mesh = kernel::MeshParams::random_init(d, 3, rng, 0.8);
      const RealTensor xi = random_token(d, rng);
      const RealTensor xj = random_token(d, rng);
      worst = std::max(
          worst, std::abs(kernel::pgksas_fock(xi, xj, mesh, cfg, cutoff) -
                          kernel::pgksas_exact(xi, xj, mesh, cfg)));
    }
    rep.report("Fock circuit agreement", worst < 1e-6,
               "max |fock - coherent| = " + std::to_string(worst));
  }

  std::printf("%s: %d failure(s)\n", rep.failures == 0 ? "OK" : "FAILED",
              rep.failures);
  return rep.failures == 0 ? kExitOk : kExitCheckFailed;
}

int run_oracle_check(std::size_t modes, std::size_t cutoff, std::size_t trials,
                     std::uint64_t seed) {
  using namespace pgket;
  SeededRng root(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    SeededRng rng = root.split(t);
    const std::size_t depth = 1 + rng.below(3);
    kernel::MeshParams mesh =
        kernel::MeshParams::random_init(modes, depth, rng, 0.8);
    const ComplexMatrix u = kernel::mesh_unitary(mesh);

    fock::FockState fstate = fock::vacuum_state(modes, cutoff);
    coherent::CoherentState cstate = coherent::coherent_vacuum(modes);
    for (std::size_t m = 0; m < modes; ++m) {
      const double alpha = rng.uniform(-1.0, 1.0);
      fstate = fock::apply_single_mode(fock::displacement_matrix(alpha, cutoff),
                                       m, fstate);
      cstate = coherent::displace(cstate, m, alpha);
    }
    for (std::size_t layer = 0; layer < mesh.depth(); ++layer) {
      for (std::size_t slot = 0; slot < mesh.theta[layer].size(); ++slot) {
        const std::size_t a = kernel::MeshParams::pair_low_mode(layer, slot);
        fstate = fock::apply_two_mode(
            fock::beamsplitter_matrix(mesh.theta[layer][slot],
                                      mesh.phi[layer][slot], cutoff),
            a, a + 1, fstate);
      }
    }
    cstate = coherent::apply_mesh(cstate, u);

    const double full_diff = std::abs(fock::vacuum_probability(fstate) -
                                      coherent::vacuum_probability(cstate));
    std::vector<std::size_t> subset{rng.below(modes)};
    const double sub_diff =
        std::abs(fock::vacuum_probability(fstate, subset) -
                 coherent::vacuum_probability(cstate, subset));
    worst = std::max(worst, std::max(full_diff, sub_diff));
  }
  std::printf("oracle-check: %zu trials, %zu modes, cutoff %zu, max |fock - "
              "coherent| = %.3e\n",
              trials, modes, cutoff, worst);
  if (worst >= 1e-6) {
    std::printf("FAILED (tolerance 1e-6)\n");
    return kExitCheckFailed;
  }
  std::printf("OK\n");
  return kExitOk;
}

void print_summary(const char* tag, const pgket::data::RunSummary& s) {
  std::printf("%-6s final_acc %.4f  best_acc %.4f  final_loss %.4f  "
              "conv_epoch %zu\n",
              tag, s.final_test_acc, s.best_test_acc, s.final_test_loss,
              s.convergence_epoch);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photonic Gaussian-kernel transformer harness"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Run a training experiment");
  std::string train_config;
  std::string train_data_dir;
  std::string train_out = "run";
  std::optional<std::uint64_t> train_seed;
  train_cmd->add_option("--config", train_config, "Experiment config JSON")
      ->required();
  train_cmd->add_option("--data-dir", train_data_dir,
                        "Override the config's data directory");
  train_cmd->add_option("--out", train_out, "Run output directory");
  train_cmd->add_option("--seed", train_seed, "Override the config's seed");

  // eval
  auto* eval_cmd =
      app.add_subcommand("eval", "Evaluate a checkpoint on a data split");
  std::string eval_config, eval_checkpoint, eval_data_dir;
  std::string eval_split = "test";
  eval_cmd->add_option("--config", eval_config, "Experiment config JSON")
      ->required();
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "PGKT checkpoint")
      ->required();
  eval_cmd->add_option("--split", eval_split, "train or test");
  eval_cmd->add_option("--data-dir", eval_data_dir,
                       "Override the config's data directory");

  // kernel-selftest
  auto* selftest_cmd = app.add_subcommand(
      "kernel-selftest", "Run the photonic-kernel invariant suite");
  std::size_t selftest_trials = 25;
  std::uint64_t selftest_seed = 7;
  selftest_cmd->add_option("--trials", selftest_trials, "Trials per property");
  selftest_cmd->add_option("--seed", selftest_seed, "Base seed");

  // oracle-check
  auto* oracle_cmd = app.add_subcommand(
      "oracle-check", "Fock vs coherent backend equivalence trials");
  std::size_t oracle_modes = 2, oracle_cutoff = 18, oracle_trials = 100;
  std::uint64_t oracle_seed = 11;
  oracle_cmd->add_option("--modes", oracle_modes, "Mode count (Fock side)");
  oracle_cmd->add_option("--cutoff", oracle_cutoff, "Fock cutoff");
  oracle_cmd->add_option("--trials", oracle_trials, "Trial count");
  oracle_cmd->add_option("--seed", oracle_seed, "Base seed");

  // noise-compare
  auto* noise_cmd = app.add_subcommand(
      "noise-compare", "Paired clean/noisy runs with a delta summary");
  std::string noise_config, noise_data_dir;
  std::string noise_out = "noise-compare";
  double noise_sigma = 0.0;
  noise_cmd->add_option("--config", noise_config, "Experiment config JSON")
      ->required();
  noise_cmd->add_option("--data-dir", noise_data_dir,
                        "Override the config's data directory");
  noise_cmd->add_option("--out", noise_out, "Output directory");
  noise_cmd->add_option("--sigma", noise_sigma,
                        "Noise level (default: config value or 0.4)");

  // synth-data
  auto* synth_cmd = app.add_subcommand(
      "synth-data", "Write a synthetic MNIST-format dataset (IDX pair)");
  std::string synth_out = ".";
  std::size_t synth_per_class = 100, synth_classes = 10;
  std::uint64_t synth_seed = 1;
  synth_cmd->add_option("--out", synth_out, "Output directory");
  synth_cmd->add_option("--per-class", synth_per_class, "Images per class");
  synth_cmd->add_option("--classes", synth_classes, "Class count (1..10)");
  synth_cmd->add_option("--seed", synth_seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      pgket::data::ExperimentConfig cfg =
          pgket::data::ExperimentConfig::load(train_config);
      if (!train_data_dir.empty()) cfg.data_dir = train_data_dir;
      if (train_seed) cfg.seed = *train_seed;
      const pgket::data::RunSummary summary =
          pgket::data::run_experiment(cfg, train_out);
      print_summary("run", summary);
      return kExitOk;
    }

    if (eval_cmd->parsed()) {
      pgket::data::ExperimentConfig cfg =
          pgket::data::ExperimentConfig::load(eval_config);
      if (!eval_data_dir.empty()) cfg.data_dir = eval_data_dir;
      if (eval_split != "train" && eval_split != "test") {
        throw pgket::ConfigError("eval: --split must be train or test");
      }
      const pgket::data::TokenizedData data = pgket::data::prepare_tokens(cfg);
      SeededRng init_rng = SeededRng(cfg.seed).split("init");
      pgket::nn::Model model =
          pgket::nn::Model::init(cfg.model_config(), init_rng);
      pgket::data::load_model_checkpoint(
          model, pgket::data::read_checkpoint(eval_checkpoint));
      SeededRng eval_rng = SeededRng(cfg.seed).split("cli-eval");
      const bool shots = cfg.backend == "shots";
      const auto [loss, acc] = pgket::optim::evaluate(
          model, eval_split == "train" ? data.train : data.test,
          shots ? &eval_rng : nullptr);
      std::printf("%s: loss %.6f  acc %.4f  (%zu samples, %s forward)\n",
                  eval_split.c_str(), loss, acc,
                  (eval_split == "train" ? data.train : data.test).size(),
                  shots ? "shot" : "exact");
      return kExitOk;
    }

    if (selftest_cmd->parsed()) {
      return run_kernel_selftest(selftest_trials, selftest_seed);
    }

    if (oracle_cmd->parsed()) {
      return run_oracle_check(oracle_modes, oracle_cutoff, oracle_trials,
                              oracle_seed);
    }

    if (noise_cmd->parsed()) {
      pgket::data::ExperimentConfig cfg =
          pgket::data::ExperimentConfig::load(noise_config);
      if (!noise_data_dir.empty()) cfg.data_dir = noise_data_dir;
      if (noise_sigma > 0.0) cfg.noise_sigma = noise_sigma;
      const pgket::data::NoiseComparison cmp =
          pgket::data::noise_compare(cfg, noise_out);
      print_summary("clean", cmp.clean);
      print_summary("noisy", cmp.noisy);
      std::printf("delta  final_acc %+.4f  loss %+.4f  conv_epoch %+ld\n",
                  cmp.acc_delta(), cmp.loss_delta(), cmp.epoch_delta());
      return kExitOk;
    }

    if (synth_cmd->parsed()) {
      const pgket::data::RawDataset ds =
          pgket::data::synth::make_synthetic_digits(synth_per_class,
                                                    synth_classes, synth_seed);
      std::filesystem::create_directories(synth_out);
      const auto images =
          std::filesystem::path(synth_out) / "train-images-idx3-ubyte";
      const auto labels =
          std::filesystem::path(synth_out) / "train-labels-idx1-ubyte";
      pgket::data::write_idx(ds, images, labels);
      std::printf("wrote %zu images (%zu classes) to %s\n", ds.count,
                  synth_classes, synth_out.c_str());
      return kExitOk;
    }
  } catch (const pgket::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const pgket::FormatError& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return kExitData;
  } catch (const pgket::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const pgket::DivergenceError& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
