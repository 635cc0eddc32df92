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

#include "tenet/coco_json.h"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "tenet/error.h"

namespace tenet {

std::optional<std::int64_t> CocoRecord::get_int(const std::string& key) const {
  auto it = fields_.find(key);
  if (it == fields_.end()) return std::nullopt;
  if (const auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
  if (const auto* d = std::get_if<double>(&it->second)) {
    return static_cast<std::int64_t>(*d);
  }
  return std::nullopt;
}

std::optional<std::string> CocoRecord::get_string(
    const std::string& key) const {
  auto it = fields_.find(key);
  if (it == fields_.end()) return std::nullopt;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  return std::nullopt;
}

namespace {

// Depth 1 is the root object, depth 2 a top-level array, depth 3 one of its
// object elements. Scalars seen directly at depth 3 become record fields.
class RecordHandler : public nlohmann::json_sax<nlohmann::json> {
 public:
  RecordHandler(const std::vector<std::string>& sections,
                const CocoRecordSink& sink)
      : sections_(sections), sink_(sink) {}

  bool null() override { return true; }
  bool boolean(bool v) override { return scalar(v); }
  bool number_integer(number_integer_t v) override {
    return scalar(static_cast<std::int64_t>(v));
  }
  bool number_unsigned(number_unsigned_t v) override {
    return scalar(static_cast<std::int64_t>(v));
  }
  bool number_float(number_float_t v, const string_t&) override {
    return scalar(static_cast<double>(v));
  }
  bool string(string_t& v) override { return scalar(std::move(v)); }
  bool binary(binary_t&) override { return true; }

  bool start_object(std::size_t) override {
    ++depth_;
    if (depth_ == 3 && in_section_) record_.clear();
    return true;
  }
  bool end_object() override {
    if (depth_ == 3 && in_section_) sink_(section_, record_);
    --depth_;
    return true;
  }
  bool start_array(std::size_t) override {
    ++depth_;
    if (depth_ == 2) {
      in_section_ = std::find(sections_.begin(), sections_.end(), key_) !=
                    sections_.end();
      section_ = key_;
    }
    return true;
  }
  bool end_array() override {
    if (depth_ == 2) in_section_ = false;
    --depth_;
    return true;
  }
  bool key(string_t& k) override {
    if (depth_ == 1 || (depth_ == 3 && in_section_)) key_ = k;
    return true;
  }
  bool parse_error(std::size_t position, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    error_ = "byte " + std::to_string(position) + ": " + ex.what();
    return false;
  }

  const std::string& error() const { return error_; }

 private:
  template <typename T>
  bool scalar(T&& v) {
    if (depth_ == 3 && in_section_) record_.set(key_, CocoValue(std::forward<T>(v)));
    return true;
  }

  const std::vector<std::string>& sections_;
  const CocoRecordSink& sink_;
  int depth_ = 0;
  bool in_section_ = false;
  std::string section_;
  std::string key_;
  CocoRecord record_;
  std::string error_;
};

}  // namespace

void stream_coco_records(const std::filesystem::path& path,
                         const std::vector<std::string>& sections,
                         const CocoRecordSink& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open annotation file " + path.string());
  RecordHandler handler(sections, sink);
  bool ok = false;
  try {
    ok = nlohmann::json::sax_parse(in, &handler);
  } catch (const nlohmann::json::exception& ex) {
    throw DataError("malformed JSON in " + path.string() + ": " + ex.what());
  }
  if (!ok) {
    throw DataError("malformed JSON in " + path.string() + " at " +
                    handler.error());
  }
}

}  // namespace tenet
