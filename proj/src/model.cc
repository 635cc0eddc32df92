// Copyright 2026 The TENet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tenet/model.h"

#include <cmath>
#include <sstream>

#include "tenet/error.h"
#include "tenet/log.h"

namespace tenet {

namespace {

constexpr char kCheckpointFormat[] = "tenet-checkpoint";
constexpr int kCheckpointVersion = 1;

}  // namespace

nlohmann::json to_json(const BackboneSpec& spec) {
  return {{"name", spec.name},
          {"pretrained", spec.pretrained},
          {"weights_path", spec.weights_path},
          {"freeze", spec.freeze},
          {"feature_dim", spec.feature_dim}};
}

BackboneSpec backbone_spec_from_json(const nlohmann::json& j) {
  BackboneSpec spec;
  spec.name = j.at("name").get<std::string>();
  spec.pretrained = j.at("pretrained").get<bool>();
  spec.weights_path = j.value("weights_path", std::string());
  spec.freeze = j.value("freeze", false);
  spec.feature_dim = j.at("feature_dim").get<std::int64_t>();
  return spec;
}

TENetModelImpl::TENetModelImpl(BackbonePtr backbone, BackboneSpec spec,
                               std::int64_t num_classes,
                               std::int64_t vocab_size)
    : backbone_(std::move(backbone)), spec_(std::move(spec)) {
  if (spec_.feature_dim < 1 || num_classes < 1 || vocab_size < 1) {
    throw ShapeError("model dimensions must be positive (feature_dim " +
                     std::to_string(spec_.feature_dim) + ", classes " +
                     std::to_string(num_classes) + ", words " +
                     std::to_string(vocab_size) + ")");
  }
  register_module("backbone", backbone_);
  classification_head = register_module(
      "classification_head", torch::nn::Linear(spec_.feature_dim, num_classes));
  caption_head = register_module(
      "caption_head", torch::nn::Linear(spec_.feature_dim, vocab_size));

  torch::NoGradGuard no_grad;
  const double bound = 1.0 / std::sqrt(static_cast<double>(spec_.feature_dim));
  for (auto* head : {&classification_head, &caption_head}) {
    (*head)->weight.uniform_(-bound, bound);
    (*head)->bias.zero_();
  }
}

ModelOutput TENetModelImpl::forward(const torch::Tensor& images) {
  if (images.dim() != 4 || images.size(1) != 3) {
    std::ostringstream msg;
    msg << "expected images of shape (B, 3, H, W), got " << images.sizes();
    throw ShapeError(msg.str());
  }
  auto features = backbone_->forward(images);
  if (features.dim() != 2 || features.size(0) != images.size(0) ||
      features.size(1) != spec_.feature_dim) {
    std::ostringstream msg;
    msg << "backbone returned " << features.sizes() << ", expected ("
        << images.size(0) << ", " << spec_.feature_dim << ")";
    throw ShapeError(msg.str());
  }
  return {classification_head(features), caption_head(features)};
}

TENetModel build_model(const BackboneSpec& spec, std::int64_t num_classes,
                       std::int64_t vocab_size, std::int64_t height,
                       std::int64_t width, std::uint64_t seed) {
  torch::manual_seed(seed);
  auto backbone = BackboneRegistry::instance().create(spec.name);
  if (spec.pretrained) {
    if (spec.weights_path.empty()) {
      throw ConfigError(
          "backbone '" + spec.name +
          "' is configured as pretrained but no weights file was given; "
          "export one with tools/export_torchvision_weights.py or disable "
          "pretrained");
    }
    load_python_state_dict(*backbone, spec.weights_path,
                           replaced_layer_prefixes(spec.name));
    log::info("loaded pretrained ", spec.name, " weights from ",
              spec.weights_path);
  }
  BackboneSpec resolved = spec;
  resolved.feature_dim = probe_feature_dim(*backbone, height, width);
  return TENetModel(std::move(backbone), resolved, num_classes, vocab_size);
}

std::vector<torch::Tensor> trainable_parameters(TENetModel& model) {
  const bool freeze = model->spec().freeze;
  for (auto& p : model->backbone().parameters()) p.set_requires_grad(!freeze);
  if (!freeze) return model->parameters();
  auto params = model->classification_head->parameters();
  for (auto& p : model->caption_head->parameters()) params.push_back(p);
  return params;
}

void save_checkpoint(const std::filesystem::path& path, TENetModel& model,
                     const HyperParams& params, const Vocabulary& vocab,
                     int epoch, const nlohmann::json& extra) {
  nlohmann::json meta = {{"format", kCheckpointFormat},
                         {"version", kCheckpointVersion},
                         {"backbone", to_json(model->spec())},
                         {"num_classes", model->num_classes()},
                         {"vocab_size", model->vocab_size()},
                         {"hyperparams", to_json(params)},
                         {"vocab_fingerprint", vocab.fingerprint()},
                         {"vocab_tsv", vocab.to_tsv()},
                         {"epoch", epoch},
                         {"extra", extra}};
  torch::serialize::OutputArchive archive;
  model->save(archive);
  archive.write("tenet_meta", c10::IValue(meta.dump()));

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  archive.save_to(tmp.string());
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  torch::serialize::InputArchive archive;
  c10::IValue meta_value;
  try {
    archive.load_from(path.string());
    if (!archive.try_read("tenet_meta", meta_value)) {
      throw DataError(path.string() + " is not a TENet checkpoint");
    }
  } catch (const c10::Error& e) {
    throw DataError("cannot read checkpoint " + path.string() + ": " +
                    e.what_without_backtrace());
  }
  const auto meta = nlohmann::json::parse(meta_value.toStringRef());
  if (meta.value("format", "") != kCheckpointFormat ||
      meta.value("version", 0) != kCheckpointVersion) {
    throw DataError(path.string() + " has an unsupported checkpoint format");
  }

  Checkpoint ckpt;
  ckpt.params = hyperparams_from_json(meta.at("hyperparams"));
  std::istringstream tsv(meta.at("vocab_tsv").get<std::string>());
  ckpt.vocab = Vocabulary::from_tsv(tsv);
  if (ckpt.vocab.fingerprint() != meta.at("vocab_fingerprint").get<std::uint64_t>()) {
    throw DataError("vocabulary in " + path.string() +
                    " does not match its fingerprint");
  }
  ckpt.epoch = meta.value("epoch", 0);
  ckpt.extra = meta.value("extra", nlohmann::json::object());

  auto spec = backbone_spec_from_json(meta.at("backbone"));
  auto backbone = BackboneRegistry::instance().create(spec.name);
  ckpt.model = TENetModel(std::move(backbone), spec,
                          meta.at("num_classes").get<std::int64_t>(),
                          meta.at("vocab_size").get<std::int64_t>());
  try {
    ckpt.model->load(archive);
  } catch (const c10::Error& e) {
    throw DataError("cannot load weights from " + path.string() + ": " +
                    e.what_without_backtrace());
  }
  return ckpt;
}

}  // namespace tenet
