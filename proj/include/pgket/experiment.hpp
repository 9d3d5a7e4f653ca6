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

#ifndef PGKET_EXPERIMENT_HPP_
#define PGKET_EXPERIMENT_HPP_

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pgket/checkpoint.hpp"
#include "pgket/data.hpp"
#include "pgket/errors.hpp"
#include "pgket/model.hpp"
#include "pgket/optim.hpp"
#include "pgket/rng.hpp"
#include "pgket/train.hpp"

// Experiment harness: a single flat JSON config drives ingest -> subset ->
// (noise) -> PCA -> tokenize -> train -> evaluate, with every stage seeded
// from labeled substreams of one experiment seed. Unknown config keys are
// errors; there are no silent typos.

namespace pgket::data {

struct ExperimentConfig {
  // data
  std::string data_format = "idx";  // "idx" | "cifar10"
  std::string data_dir = ".";
  std::string idx_images = "train-images-idx3-ubyte";
  std::string idx_labels = "train-labels-idx1-ubyte";
  std::size_t classes = 5;
  std::size_t per_class_train = 30;
  std::size_t per_class_test = 10;
  std::size_t tokens = 4;  // 1 | 4 | 16
  std::size_t dim = 16;
  double noise_sigma = 0.0;
  std::string noise_space = "pixel";  // "pixel" | "feature"
  bool clamp_noise = true;
  std::uint64_t seed = 1;
  // training
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double learning_rate = 0.009;
  std::size_t eval_every = 1;
  bool timing = true;
  std::size_t checkpoint_every = 0;  // 0: final checkpoint only
  bool shot_eval = false;
  bool shot_forward_train = false;
  // model
  std::string attention = "photonic";  // "photonic" | "classical"
  std::size_t encoder_layers = 1;
  std::size_t ffn_width = 0;  // 0 -> 4 * dim
  std::size_t heads = 2;
  std::size_t mesh_depth = 0;  // 0 -> dim
  bool ffn_single_affine = false;
  // kernel
  std::size_t detected_modes = 0;  // 0 -> ceil(dim / 2)
  double loading_scale = 0.70710678118654752440;
  bool normalize_rows = true;
  std::string score_mode = "gamma";  // "gamma" | "scalar"
  std::string backend = "exact";     // "exact" | "shots"
  std::size_t shots = 16;

  static ExperimentConfig from_json(const nlohmann::json& doc);
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  void validate() const {
    if (data_format != "idx" && data_format != "cifar10") {
      throw ConfigError("config: data_format must be \"idx\" or \"cifar10\"");
    }
    if (noise_space != "pixel" && noise_space != "feature") {
      throw ConfigError("config: noise_space must be \"pixel\" or \"feature\"");
    }
    if (attention != "photonic" && attention != "classical") {
      throw ConfigError(
          "config: attention must be \"photonic\" or \"classical\"");
    }
    if (score_mode != "gamma" && score_mode != "scalar") {
      throw ConfigError("config: score_mode must be \"gamma\" or \"scalar\"");
    }
    if (backend != "exact" && backend != "shots") {
      throw ConfigError("config: backend must be \"exact\" or \"shots\"");
    }
    if (tokens != 1 && tokens != 4 && tokens != 16) {
      throw ConfigError("config: tokens must be 1, 4 or 16");
    }
    if (noise_sigma < 0.0) throw ConfigError("config: noise_sigma >= 0");
    if (classes < 1) throw ConfigError("config: classes >= 1");
    if (epochs < 1 || batch_size < 1 || eval_every < 1) {
      throw ConfigError("config: training counts must be positive");
    }
    if (learning_rate <= 0.0) {
      throw ConfigError("config: learning_rate must be positive");
    }
  }

  kernel::KernelConfig kernel_config() const {
    kernel::KernelConfig k = kernel::KernelConfig::defaults(dim);
    if (detected_modes != 0) {
      if (detected_modes > dim) {
        throw ConfigError("config: detected_modes exceeds dim");
      }
      k.detected_modes.resize(detected_modes);
      for (std::size_t i = 0; i < detected_modes; ++i) {
        k.detected_modes[i] = i;
      }
    }
    k.loading_scale = loading_scale;
    k.normalize_rows = normalize_rows;
    k.score_mode = score_mode == "scalar" ? kernel::ScoreMode::kScalarWeighted
                                          : kernel::ScoreMode::kGammaForm;
    k.backend = backend == "shots" ? kernel::ScoreBackend::kShots
                                   : kernel::ScoreBackend::kExact;
    k.shots = shots;
    return k;
  }

  nn::ModelConfig model_config() const {
    nn::ModelConfig m;
    m.tokens = tokens;
    m.dim = dim;
    m.encoder_layers = encoder_layers;
    m.ffn_width = ffn_width;
    m.classes = classes;
    m.heads = heads;
    m.mesh_depth = mesh_depth;
    m.ffn_single_affine = ffn_single_affine;
    m.attention = attention == "classical" ? nn::AttentionKind::kClassical
                                           : nn::AttentionKind::kPhotonic;
    m.kernel = kernel_config();
    return m;
  }

  optim::TrainConfig train_config(std::uint64_t train_seed) const {
    optim::TrainConfig t;
    t.epochs = epochs;
    t.batch_size = batch_size;
    t.learning_rate = learning_rate;
    t.seed = train_seed;
    t.eval_every = eval_every;
    t.shot_eval = shot_eval;
    t.shot_forward_train = shot_forward_train;
    t.timing = timing;
    return t;
  }
};

namespace detail {

template <typename T>
void assign_field(const nlohmann::json& doc, const std::string& key, T& out) {
  try {
    out = doc.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config key \"" + key + "\": " + e.what());
  }
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config: document must be an object");
  ExperimentConfig cfg;
  for (const auto& [key, unused] : doc.items()) {
    (void)unused;
    if (key == "data_format") detail::assign_field(doc, key, cfg.data_format);
    else if (key == "data_dir") detail::assign_field(doc, key, cfg.data_dir);
    else if (key == "idx_images") detail::assign_field(doc, key, cfg.idx_images);
    else if (key == "idx_labels") detail::assign_field(doc, key, cfg.idx_labels);
    else if (key == "classes") detail::assign_field(doc, key, cfg.classes);
    else if (key == "per_class_train") detail::assign_field(doc, key, cfg.per_class_train);
    else if (key == "per_class_test") detail::assign_field(doc, key, cfg.per_class_test);
    else if (key == "tokens") detail::assign_field(doc, key, cfg.tokens);
    else if (key == "dim") detail::assign_field(doc, key, cfg.dim);
    else if (key == "noise_sigma") detail::assign_field(doc, key, cfg.noise_sigma);
    else if (key == "noise_space") detail::assign_field(doc, key, cfg.noise_space);
    else if (key == "clamp_noise") detail::assign_field(doc, key, cfg.clamp_noise);
    else if (key == "seed") detail::assign_field(doc, key, cfg.seed);
    else if (key == "epochs") detail::assign_field(doc, key, cfg.epochs);
    else if (key == "batch_size") detail::assign_field(doc, key, cfg.batch_size);
    else if (key == "learning_rate") detail::assign_field(doc, key, cfg.learning_rate);
    else if (key == "eval_every") detail::assign_field(doc, key, cfg.eval_every);
    else if (key == "timing") detail::assign_field(doc, key, cfg.timing);
    else if (key == "checkpoint_every") detail::assign_field(doc, key, cfg.checkpoint_every);
    else if (key == "shot_eval") detail::assign_field(doc, key, cfg.shot_eval);
    else if (key == "shot_forward_train") detail::assign_field(doc, key, cfg.shot_forward_train);
    else if (key == "attention") detail::assign_field(doc, key, cfg.attention);
    else if (key == "encoder_layers") detail::assign_field(doc, key, cfg.encoder_layers);
    else if (key == "ffn_width") detail::assign_field(doc, key, cfg.ffn_width);
    else if (key == "heads") detail::assign_field(doc, key, cfg.heads);
    else if (key == "mesh_depth") detail::assign_field(doc, key, cfg.mesh_depth);
    else if (key == "ffn_single_affine") detail::assign_field(doc, key, cfg.ffn_single_affine);
    else if (key == "detected_modes") detail::assign_field(doc, key, cfg.detected_modes);
    else if (key == "loading_scale") detail::assign_field(doc, key, cfg.loading_scale);
    else if (key == "normalize_rows") detail::assign_field(doc, key, cfg.normalize_rows);
    else if (key == "score_mode") detail::assign_field(doc, key, cfg.score_mode);
    else if (key == "backend") detail::assign_field(doc, key, cfg.backend);
    else if (key == "shots") detail::assign_field(doc, key, cfg.shots);
    else throw ConfigError("config: unknown key \"" + key + "\"");
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig ExperimentConfig::load(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(doc);
}

inline nlohmann::json ExperimentConfig::to_json() const {
  return nlohmann::json{
      {"data_format", data_format},
      {"data_dir", data_dir},
      {"idx_images", idx_images},
      {"idx_labels", idx_labels},
      {"classes", classes},
      {"per_class_train", per_class_train},
      {"per_class_test", per_class_test},
      {"tokens", tokens},
      {"dim", dim},
      {"noise_sigma", noise_sigma},
      {"noise_space", noise_space},
      {"clamp_noise", clamp_noise},
      {"seed", seed},
      {"epochs", epochs},
      {"batch_size", batch_size},
      {"learning_rate", learning_rate},
      {"eval_every", eval_every},
      {"timing", timing},
      {"checkpoint_every", checkpoint_every},
      {"shot_eval", shot_eval},
      {"shot_forward_train", shot_forward_train},
      {"attention", attention},
      {"encoder_layers", encoder_layers},
      {"ffn_width", ffn_width},
      {"heads", heads},
      {"mesh_depth", mesh_depth},
      {"ffn_single_affine", ffn_single_affine},
      {"detected_modes", detected_modes},
      {"loading_scale", loading_scale},
      {"normalize_rows", normalize_rows},
      {"score_mode", score_mode},
      {"backend", backend},
      {"shots", shots},
  };
}

/// All model state as named tensors; the mesh goes through its
/// (layer, pair, theta, phi) record view.
inline NamedTensors model_checkpoint_tensors(const nn::Model& model) {
  NamedTensors out;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& layer = model.layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    out.emplace_back(prefix + "mesh", model.mesh(l).to_records());
    out.emplace_back(prefix + "gamma_factor", layer.gamma_factor);
    out.emplace_back(prefix + "log_kernel_weight", layer.log_kernel_weight);
    out.emplace_back(prefix + "w_value", layer.w_value);
    out.emplace_back(prefix + "ln1_gain", layer.ln1_gain);
    out.emplace_back(prefix + "ln1_bias", layer.ln1_bias);
    out.emplace_back(prefix + "ffn_w1", layer.ffn_w1);
    out.emplace_back(prefix + "ffn_b1", layer.ffn_b1);
    if (layer.ffn_w2.size() > 0) {
      out.emplace_back(prefix + "ffn_w2", layer.ffn_w2);
      out.emplace_back(prefix + "ffn_b2", layer.ffn_b2);
    }
    out.emplace_back(prefix + "ln2_gain", layer.ln2_gain);
    out.emplace_back(prefix + "ln2_bias", layer.ln2_bias);
  }
  out.emplace_back("head.weight", model.head_w);
  out.emplace_back("head.bias", model.head_b);
  return out;
}

inline void load_model_checkpoint(nn::Model& model,
                                  const NamedTensors& tensors) {
  const auto find = [&tensors](const std::string& name) -> const RealTensor& {
    for (const auto& [n, t] : tensors) {
      if (n == name) return t;
    }
    throw FormatError("checkpoint: missing tensor \"" + name + "\"");
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    auto& layer = model.layers[l];
    const std::string prefix = "layer" + std::to_string(l) + ".";
    const kernel::MeshParams mesh = kernel::MeshParams::from_records(
        model.config.dim, model.config.resolved_mesh_depth(),
        find(prefix + "mesh"));
    layer.mesh_theta = RealTensor::vector(mesh.flat_theta());
    layer.mesh_phi = RealTensor::vector(mesh.flat_phi());
    layer.gamma_factor = find(prefix + "gamma_factor");
    layer.log_kernel_weight = find(prefix + "log_kernel_weight");
    layer.w_value = find(prefix + "w_value");
    layer.ln1_gain = find(prefix + "ln1_gain");
    layer.ln1_bias = find(prefix + "ln1_bias");
    layer.ffn_w1 = find(prefix + "ffn_w1");
    layer.ffn_b1 = find(prefix + "ffn_b1");
    if (!model.config.ffn_single_affine) {
      layer.ffn_w2 = find(prefix + "ffn_w2");
      layer.ffn_b2 = find(prefix + "ffn_b2");
    }
    layer.ln2_gain = find(prefix + "ln2_gain");
    layer.ln2_bias = find(prefix + "ln2_bias");
  }
  model.head_w = find("head.weight");
  model.head_b = find("head.bias");
}

struct RunSummary {
  double final_test_acc = 0.0;
  double best_test_acc = 0.0;
  double final_train_loss = 0.0;
  double final_test_loss = 0.0;
  std::size_t convergence_epoch = 0;
  std::size_t epochs_run = 0;

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"final_test_acc", final_test_acc},
        {"best_test_acc", best_test_acc},
        {"final_train_loss", final_train_loss},
        {"final_test_loss", final_test_loss},
        {"convergence_epoch", convergence_epoch},
        {"epochs_run", epochs_run},
    };
  }
};

namespace detail {

inline std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline void append_log(const std::filesystem::path& out_dir,
                       const std::string& line) {
  std::ofstream log(out_dir / "run.log", std::ios::app);
  log << line << "\n";
}

template <typename Fn>
auto run_stage(const std::filesystem::path& out_dir, const std::string& stage,
               Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    append_log(out_dir, "stage " + stage + ": ERROR: " + e.what());
    throw;
  }
}

}  // namespace detail

/// Materialized train/test token datasets plus the PCA model that produced
/// them; eval reuses this to reconstruct the pipeline deterministically.
struct TokenizedData {
  optim::Dataset train;
  optim::Dataset test;
};

inline TokenizedData prepare_tokens(const ExperimentConfig& cfg) {
  cfg.validate();
  SeededRng root(cfg.seed);

  RawDataset raw;
  if (cfg.data_format == "idx") {
    const std::filesystem::path dir(cfg.data_dir);
    raw = load_idx(dir / cfg.idx_images, dir / cfg.idx_labels);
  } else {
    raw = load_cifar10_bin(cfg.data_dir);
  }

  auto [train_raw, test_raw] =
      select_classes(raw, cfg.classes, cfg.per_class_train, cfg.per_class_test,
                     root.split("select"));

  FloatImages train_f = to_unit_floats(train_raw);
  FloatImages test_f = to_unit_floats(test_raw);
  if (cfg.noise_sigma > 0.0 && cfg.noise_space == "pixel") {
    SeededRng train_noise = root.split("noise-train");
    SeededRng test_noise = root.split("noise-test");
    add_gaussian_noise(train_f, cfg.noise_sigma, train_noise, cfg.clamp_noise);
    add_gaussian_noise(test_f, cfg.noise_sigma, test_noise, cfg.clamp_noise);
  }

  const TokenScheme scheme = token_scheme_from_count(cfg.tokens);
  const PcaModel pca = pca_fit(train_f, scheme, cfg.dim);
  std::vector<RealTensor> train_tokens = pca_transform(pca, train_f);
  std::vector<RealTensor> test_tokens = pca_transform(pca, test_f);

  if (cfg.noise_sigma > 0.0 && cfg.noise_space == "feature") {
    SeededRng train_noise = root.split("noise-train");
    SeededRng test_noise = root.split("noise-test");
    for (auto& t : train_tokens) {
      for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] += cfg.noise_sigma * train_noise.normal();
      }
    }
    for (auto& t : test_tokens) {
      for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] += cfg.noise_sigma * test_noise.normal();
      }
    }
  }

  TokenizedData out;
  out.train.reserve(train_tokens.size());
  for (std::size_t i = 0; i < train_tokens.size(); ++i) {
    out.train.push_back(
        optim::Sample{std::move(train_tokens[i]), train_raw.labels[i]});
  }
  out.test.reserve(test_tokens.size());
  for (std::size_t i = 0; i < test_tokens.size(); ++i) {
    out.test.push_back(
        optim::Sample{std::move(test_tokens[i]), test_raw.labels[i]});
  }
  return out;
}

/// Runs the full protocol into `out_dir`: config snapshot, streamed metrics
/// CSV, checkpoints, and a summary with the convergence epoch at the 0.95
/// fraction.
inline RunSummary run_experiment(const ExperimentConfig& cfg,
                                 const std::filesystem::path& out_dir) {
  cfg.validate();
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream snapshot(out_dir / "config.json");
    snapshot << cfg.to_json().dump(2) << "\n";
  }

  const TokenizedData data = detail::run_stage(
      out_dir, "prepare", [&] { return prepare_tokens(cfg); });

  SeededRng root(cfg.seed);
  nn::Model model = detail::run_stage(out_dir, "init", [&] {
    SeededRng init_rng = root.split("init");
    return nn::Model::init(cfg.model_config(), init_rng);
  });

  std::ofstream csv(out_dir / "metrics.csv");
  csv << "epoch,train_loss,train_acc,test_loss,test_acc,seconds\n";
  const auto on_row = [&](const optim::MetricsRow& row) {
    csv << row.epoch << ',' << detail::format_metric(row.train_loss) << ','
        << detail::format_metric(row.train_acc) << ','
        << detail::format_metric(row.test_loss) << ','
        << detail::format_metric(row.test_acc) << ','
        << detail::format_metric(row.seconds) << '\n';
    csv.flush();
    if (cfg.checkpoint_every > 0 && row.epoch % cfg.checkpoint_every == 0 &&
        row.epoch != cfg.epochs) {
      write_checkpoint(
          out_dir / ("model-epoch" + std::to_string(row.epoch) + ".pgkt"),
          model_checkpoint_tensors(model));
    }
  };

  const std::vector<optim::MetricsRow> rows =
      detail::run_stage(out_dir, "train", [&] {
        return optim::train(model, data.train, data.test,
                            cfg.train_config(root.split("train").seed()),
                            on_row);
      });

  write_checkpoint(out_dir / "model.pgkt", model_checkpoint_tensors(model));

  RunSummary summary;
  summary.epochs_run = rows.empty() ? 0 : rows.back().epoch;
  std::vector<double> test_acc;
  test_acc.reserve(rows.size());
  for (const auto& row : rows) test_acc.push_back(row.test_acc);
  summary.final_test_acc = rows.back().test_acc;
  summary.final_train_loss = rows.back().train_loss;
  summary.final_test_loss = rows.back().test_loss;
  summary.best_test_acc = *std::max_element(test_acc.begin(), test_acc.end());
  summary.convergence_epoch = optim::convergence_epoch(test_acc);
  {
    std::ofstream out(out_dir / "summary.json");
    out << summary.to_json().dump(2) << "\n";
  }
  detail::append_log(out_dir, "run complete");
  return summary;
}

/// Paired clean / noisy protocol: same config twice, once with sigma = 0 and
/// once with the configured sigma (0.4 if unset), plus a delta summary in
/// the Final Acc / Loss / Conv Epoch row schema.
struct NoiseComparison {
  RunSummary clean;
  RunSummary noisy;
  double noise_sigma = 0.4;

  double acc_delta() const {
    return noisy.final_test_acc - clean.final_test_acc;
  }
  double loss_delta() const {
    return noisy.final_test_loss - clean.final_test_loss;
  }
  long epoch_delta() const {
    return static_cast<long>(noisy.convergence_epoch) -
           static_cast<long>(clean.convergence_epoch);
  }

  nlohmann::json to_json() const {
    return nlohmann::json{
        {"noise_sigma", noise_sigma},
        {"clean",
         {{"final_acc", clean.final_test_acc},
          {"loss", clean.final_test_loss},
          {"conv_epoch", clean.convergence_epoch}}},
        {"noisy",
         {{"final_acc", noisy.final_test_acc},
          {"loss", noisy.final_test_loss},
          {"conv_epoch", noisy.convergence_epoch}}},
        {"delta",
         {{"final_acc", acc_delta()},
          {"loss", loss_delta()},
          {"conv_epoch", epoch_delta()}}},
    };
  }
};

inline NoiseComparison noise_compare(const ExperimentConfig& cfg,
                                     const std::filesystem::path& out_dir) {
  NoiseComparison cmp;
  cmp.noise_sigma = cfg.noise_sigma > 0.0 ? cfg.noise_sigma : 0.4;

  ExperimentConfig clean_cfg = cfg;
  clean_cfg.noise_sigma = 0.0;
  ExperimentConfig noisy_cfg = cfg;
  noisy_cfg.noise_sigma = cmp.noise_sigma;

  cmp.clean = run_experiment(clean_cfg, out_dir / "clean");
  cmp.noisy = run_experiment(noisy_cfg, out_dir / "noisy");

  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir / "comparison.json");
  out << cmp.to_json().dump(2) << "\n";
  return cmp;
}

}  // namespace pgket::data

#endif  // PGKET_EXPERIMENT_HPP_
