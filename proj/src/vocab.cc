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

#include "tenet/vocab.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include "tenet/coco_json.h"
#include "tenet/error.h"

namespace tenet {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

bool is_word_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c >= 0x80;
}

void flush_token(std::string& token, std::vector<std::string>& out) {
  std::size_t begin = token.find_first_not_of('\'');
  if (begin != std::string::npos) {
    std::size_t end = token.find_last_not_of('\'');
    out.emplace_back(token.substr(begin, end - begin + 1));
  }
  token.clear();
}

// Ranking order: count descending, then word ascending.
bool ranks_before(std::int64_t count_a, const std::string& word_a,
                  std::int64_t count_b, const std::string& word_b) {
  if (count_a != count_b) return count_a > count_b;
  return word_a < word_b;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view caption) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : caption) {
    if (is_space(c)) {
      flush_token(current, tokens);
    } else if (is_word_char(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                             : static_cast<char>(c));
    } else if (c == '\'') {
      current.push_back('\'');
    }
  }
  flush_token(current, tokens);
  return tokens;
}

std::size_t token_length(std::string_view token) {
  // Count bytes that are not UTF-8 continuation bytes.
  return static_cast<std::size_t>(
      std::count_if(token.begin(), token.end(), [](char c) {
        return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
      }));
}

void FrequencyTable::add_caption(std::string_view caption) {
  for (auto& token : tokenize(caption)) ++counts_[std::move(token)];
}

void FrequencyTable::add_token(const std::string& token, std::int64_t count) {
  if (token.empty() || count < 1) {
    throw DataError("frequency table entries need a non-empty token and a "
                    "positive count");
  }
  counts_[token] += count;
}

void FrequencyTable::merge(const FrequencyTable& other) {
  for (const auto& [token, count] : other.counts_) counts_[token] += count;
}

std::int64_t FrequencyTable::count(const std::string& token) const {
  auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

FrequencyTable count_corpus(std::span<const std::string> captions) {
  FrequencyTable table;
  for (const auto& caption : captions) table.add_caption(caption);
  return table;
}

FrequencyTable count_corpus(std::istream& lines) {
  FrequencyTable table;
  std::string line;
  while (std::getline(lines, line)) table.add_caption(line);
  return table;
}

CorpusStats corpus_stats(const FrequencyTable& table) {
  CorpusStats stats;
  stats.distinct_words = static_cast<std::int64_t>(table.distinct());
  for (const auto& [token, count] : table.entries()) {
    if (count == 1) ++stats.hapax_count;
    if (count <= 3) ++stats.count_le_3;
    const auto len = token_length(token);
    if (len == 1) ++stats.len_1_count;
    if (len == 2) ++stats.len_2_count;
  }
  return stats;
}

nlohmann::json to_json(const CorpusStats& stats) {
  return {{"distinct_words", stats.distinct_words},
          {"hapax_count", stats.hapax_count},
          {"count_le_3", stats.count_le_3},
          {"len_1_count", stats.len_1_count},
          {"len_2_count", stats.len_2_count}};
}

Vocabulary::Vocabulary(std::vector<std::string> words,
                       std::vector<std::int64_t> counts,
                       std::int64_t min_count, std::int64_t min_length)
    : words_(std::move(words)),
      counts_(std::move(counts)),
      min_count_(min_count),
      min_length_(min_length) {
  if (words_.size() != counts_.size()) {
    throw DataError("vocabulary words and counts differ in length");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].empty()) throw DataError("empty vocabulary word");
    if (counts_[i] < min_count_ ||
        static_cast<std::int64_t>(token_length(words_[i])) < min_length_) {
      throw DataError("vocabulary word '" + words_[i] +
                      "' violates the count/length filter");
    }
    if (i > 0 && !ranks_before(counts_[i - 1], words_[i - 1], counts_[i],
                               words_[i])) {
      throw DataError("vocabulary is not in rank order at word '" +
                      words_[i] + "'");
    }
    if (!index_.emplace(words_[i], i).second) {
      throw DataError("duplicate vocabulary word '" + words_[i] + "'");
    }
  }
}

std::optional<std::size_t> Vocabulary::index_of(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::to_tsv() const {
  std::string out;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    out += words_[i];
    out += '\t';
    out += std::to_string(counts_[i]);
    out += '\n';
  }
  return out;
}

void Vocabulary::write_tsv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary " + path.string());
  out << to_tsv();
  if (!out) throw DataError("failed writing vocabulary " + path.string());
}

Vocabulary Vocabulary::from_tsv(std::istream& in) {
  std::vector<std::string> words;
  std::vector<std::int64_t> counts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError("vocabulary line " + std::to_string(line_no) +
                      " is not word<TAB>count");
    }
    std::int64_t count = 0;
    try {
      std::size_t used = 0;
      count = std::stoll(line.substr(tab + 1), &used);
      if (used != line.size() - tab - 1) throw std::invalid_argument("tail");
    } catch (const std::exception&) {
      throw DataError("vocabulary line " + std::to_string(line_no) +
                      " has a bad count");
    }
    words.push_back(line.substr(0, tab));
    counts.push_back(count);
  }
  std::int64_t min_count = counts.empty() ? 1 : counts.back();
  std::int64_t min_length = 0;
  for (const auto& w : words) {
    const auto len = static_cast<std::int64_t>(token_length(w));
    min_length = min_length == 0 ? len : std::min(min_length, len);
  }
  return Vocabulary(std::move(words), std::move(counts), min_count,
                    std::max<std::int64_t>(min_length, 1));
}

Vocabulary Vocabulary::read_tsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open vocabulary " + path.string());
  return from_tsv(in);
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_tsv()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

Vocabulary build_vocabulary(const FrequencyTable& table,
                            std::int64_t min_count, std::int64_t min_length,
                            std::int64_t vocab_size) {
  if (min_count < 1 || min_length < 1 || vocab_size < 1) {
    throw ConfigError(
        "min_count, min_length and vocab_size must all be at least 1");
  }
  std::vector<std::pair<std::int64_t, const std::string*>> kept;
  for (const auto& [token, count] : table.entries()) {
    if (count >= min_count &&
        static_cast<std::int64_t>(token_length(token)) >= min_length) {
      kept.emplace_back(count, &token);
    }
  }
  const auto limit =
      std::min<std::size_t>(kept.size(), static_cast<std::size_t>(vocab_size));
  auto by_rank = [](const auto& a, const auto& b) {
    return ranks_before(a.first, *a.second, b.first, *b.second);
  };
  std::partial_sort(kept.begin(), kept.begin() + limit, kept.end(), by_rank);

  std::vector<std::string> words;
  std::vector<std::int64_t> counts;
  words.reserve(limit);
  counts.reserve(limit);
  for (std::size_t i = 0; i < limit; ++i) {
    words.push_back(*kept[i].second);
    counts.push_back(kept[i].first);
  }
  return Vocabulary(std::move(words), std::move(counts), min_count,
                    min_length);
}

void for_each_caption(const std::filesystem::path& path,
                      const std::function<void(std::string_view)>& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open caption source " + path.string());
  char first = 0;
  while (in.get(first) && is_space(static_cast<unsigned char>(first))) {
  }
  if (!in) return;  // empty file
  if (first == '{') {
    in.close();
    stream_coco_records(path, {"annotations"},
                        [&](std::string_view, const CocoRecord& record) {
                          if (auto caption = record.get_string("caption")) {
                            sink(*caption);
                          }
                        });
    return;
  }
  in.seekg(0);
  std::string line;
  while (std::getline(in, line)) sink(line);
}

FrequencyTable count_caption_file(const std::filesystem::path& path) {
  FrequencyTable table;
  for_each_caption(path, [&](std::string_view c) { table.add_caption(c); });
  return table;
}

}  // namespace tenet
