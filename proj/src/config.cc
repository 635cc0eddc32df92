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

#include "tenet/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "tenet/error.h"

namespace tenet {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(key + ": expected an integer, got '" + value + "'");
  }
  return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" +
                      value + "'");
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::vector<std::uint64_t> parse_seeds(const std::string& key,
                                       const std::string& value) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    seeds.push_back(parse_uint(key, trim(item)));
  }
  if (seeds.empty()) throw ConfigError(key + ": needs at least one seed");
  return seeds;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_bool(bool v) { return v ? "true" : "false"; }

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define TENET_INT_FIELD(name, member)                                      \
  Field {                                                                  \
    name,                                                                  \
        [](ExperimentConfig& c, const std::string& v) {                    \
          c.member = parse_int(name, v);                                   \
        },                                                                 \
        [](const ExperimentConfig& c) { return std::to_string(c.member); } \
  }
#define TENET_DOUBLE_FIELD(name, member)                                    \
  Field {                                                                   \
    name,                                                                   \
        [](ExperimentConfig& c, const std::string& v) {                     \
          c.member = parse_double(name, v);                                 \
        },                                                                  \
        [](const ExperimentConfig& c) { return format_double(c.member); }   \
  }
#define TENET_BOOL_FIELD(name, member)                                      \
  Field {                                                                   \
    name,                                                                   \
        [](ExperimentConfig& c, const std::string& v) {                     \
          c.member = parse_bool(name, v);                                   \
        },                                                                  \
        [](const ExperimentConfig& c) { return format_bool(c.member); }     \
  }
#define TENET_STRING_FIELD(name, member)                                    \
  Field {                                                                   \
    name, [](ExperimentConfig& c, const std::string& v) { c.member = v; },  \
        [](const ExperimentConfig& c) { return c.member; }                  \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = {
      TENET_INT_FIELD("num_classes", params.num_classes),
      TENET_INT_FIELD("vocab_size", params.vocab_size),
      TENET_INT_FIELD("num_epochs", params.num_epochs),
      TENET_INT_FIELD("batch_size", params.batch_size),
      TENET_INT_FIELD("height", params.height),
      TENET_INT_FIELD("width", params.width),
      TENET_INT_FIELD("top_c", params.top_c),
      TENET_INT_FIELD("top_w", params.top_w),
      TENET_STRING_FIELD("optimizer", params.optimizer),
      TENET_DOUBLE_FIELD("learning_rate", params.learning_rate),
      TENET_DOUBLE_FIELD("weight_decay", params.weight_decay),
      TENET_DOUBLE_FIELD("explanation_loss_weight",
                         params.explanation_loss_weight),
      Field{"seeds",
            [](ExperimentConfig& c, const std::string& v) {
              c.seeds = parse_seeds("seeds", v);
              c.params.seed = c.seeds.front();
            },
            [](const ExperimentConfig& c) {
              std::string out;
              for (auto s : c.seeds) {
                out += (out.empty() ? "" : ",") + std::to_string(s);
              }
              return out;
            }},
      TENET_STRING_FIELD("backbone", backbone.name),
      TENET_BOOL_FIELD("pretrained", backbone.pretrained),
      TENET_STRING_FIELD("weights_path", backbone.weights_path),
      TENET_BOOL_FIELD("freeze_backbone", backbone.freeze),
      TENET_INT_FIELD("min_count", min_count),
      TENET_INT_FIELD("min_length", min_length),
      TENET_STRING_FIELD("vocab_path", vocab_path),
      TENET_STRING_FIELD("train_images", train_images),
      TENET_STRING_FIELD("train_instances", train_instances),
      TENET_STRING_FIELD("train_captions", train_captions),
      TENET_STRING_FIELD("val_images", val_images),
      TENET_STRING_FIELD("val_instances", val_instances),
      TENET_STRING_FIELD("val_captions", val_captions),
      TENET_STRING_FIELD("output_dir", output_dir),
      TENET_BOOL_FIELD("fixture", fixture),
      TENET_STRING_FIELD("fixture_dir", fixture_dir),
      TENET_BOOL_FIELD("augment", augment),
      TENET_BOOL_FIELD("cache_images", cache_images),
      TENET_BOOL_FIELD("save_checkpoints", save_checkpoints),
      TENET_INT_FIELD("parallel_seeds", parallel_seeds),
  };
  return kFields;
}

#undef TENET_INT_FIELD
#undef TENET_DOUBLE_FIELD
#undef TENET_BOOL_FIELD
#undef TENET_STRING_FIELD

const Field* find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

}  // namespace

void ExperimentConfig::validate() const {
  params.validate();
  if (seeds.empty()) throw ConfigError("seeds: needs at least one seed");
  if (min_count < 1) throw ConfigError("min_count must be at least 1");
  if (min_length < 1) throw ConfigError("min_length must be at least 1");
  if (parallel_seeds < 1) throw ConfigError("parallel_seeds must be at least 1");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  if (!BackboneRegistry::instance().contains(backbone.name)) {
    BackboneRegistry::instance().create(backbone.name);  // throws with names
  }
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  c.params.seed = 0;
  c.backbone.name = "resnet50";
  c.backbone.pretrained = true;
  c.backbone.weights_path = "weights/resnet50.pt";
  return c;
}

ExperimentConfig fixture_preset() {
  ExperimentConfig c;
  c.fixture = true;
  c.output_dir = "runs/fixture";
  c.backbone.name = "tiny_cnn";
  c.backbone.pretrained = false;
  c.backbone.weights_path.clear();
  c.params.num_epochs = 200;
  c.params.batch_size = 4;
  c.params.height = 32;
  c.params.width = 32;
  c.params.learning_rate = 3e-3;
  c.params.weight_decay = 0.0;
  c.seeds = {0};
  c.params.seed = 0;
  c.cache_images = true;
  c.save_checkpoints = true;
  return c;
}

void set_config_value(ExperimentConfig& config, const std::string& key,
                      const std::string& value) {
  const Field* field = find_field(key);
  if (field == nullptr) throw ConfigError("unknown config key '" + key + "'");
  field->set(config, value);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

ExperimentConfig parse_config(std::string_view text,
                              const ExperimentConfig& base) {
  ExperimentConfig config = base;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const auto key = trim(std::string_view(body).substr(0, eq));
    const auto value = trim(std::string_view(body).substr(eq + 1));
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" +
                        key + "'");
    }
    try {
      set_config_value(config, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str(), base);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string serialize_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& f : fields()) {
    out += f.key + " = " + f.get(config) + "\n";
  }
  return out;
}

void save_config(const std::filesystem::path& path,
                 const ExperimentConfig& config) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file " + path.string());
  out << serialize_config(config);
}

}  // namespace tenet
