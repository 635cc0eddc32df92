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

// Streaming reader for COCO annotation files. The training instances file is
// several hundred megabytes, so records are pulled out with a SAX pass
// instead of materializing the whole document.

#ifndef TENET_COCO_JSON_H_
#define TENET_COCO_JSON_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tenet {

using CocoValue = std::variant<std::int64_t, double, std::string, bool>;

// The scalar fields of one element of a top-level array ("images",
// "annotations", ...). Nested arrays and objects (bbox, segmentation) are
// skipped.
class CocoRecord {
 public:
  void set(std::string key, CocoValue value) {
    fields_[std::move(key)] = std::move(value);
  }
  void clear() { fields_.clear(); }
  bool has(const std::string& key) const { return fields_.count(key) > 0; }

  std::optional<std::int64_t> get_int(const std::string& key) const;
  std::optional<std::string> get_string(const std::string& key) const;

 private:
  std::map<std::string, CocoValue> fields_;
};

using CocoRecordSink =
    std::function<void(std::string_view section, const CocoRecord& record)>;

// Calls `sink` once per object element of each requested top-level array, in
// file order. Throws DataError naming the file if it is missing or is not
// well-formed JSON.
void stream_coco_records(const std::filesystem::path& path,
                         const std::vector<std::string>& sections,
                         const CocoRecordSink& sink);

}  // namespace tenet

#endif  // TENET_COCO_JSON_H_
