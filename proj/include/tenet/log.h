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

// Process-wide logging to stderr.

#ifndef TENET_LOG_H_
#define TENET_LOG_H_

#include <sstream>
#include <string>
#include <string_view>
#include <utility>

namespace tenet::log {

enum class Level { kDebug, kInfo, kWarn, kError, kOff };

void set_level(Level level);
Level level();
// Inverse of parse_level.
std::string_view level_name(Level level);
// Accepts debug, info, warn, error, off. Throws std::invalid_argument.
Level parse_level(std::string_view name);

void write(Level level, std::string_view message);

// Streams every argument into one message.
template <typename... Args>
std::string cat(Args&&... args) {
  std::ostringstream out;
  (out << ... << std::forward<Args>(args));
  return out.str();
}

template <typename... Args>
void debug(Args&&... args) {
  write(Level::kDebug, cat(std::forward<Args>(args)...));
}
template <typename... Args>
void info(Args&&... args) {
  write(Level::kInfo, cat(std::forward<Args>(args)...));
}
template <typename... Args>
void warn(Args&&... args) {
  write(Level::kWarn, cat(std::forward<Args>(args)...));
}
template <typename... Args>
void error(Args&&... args) {
  write(Level::kError, cat(std::forward<Args>(args)...));
}

}  // namespace tenet::log

#endif  // TENET_LOG_H_
