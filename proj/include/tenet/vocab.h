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

// Explanation vocabulary: caption tokenization, corpus counting, and the
// frequency/length filtered, frequency-ranked word list that defines the
// explanation head's label space.

#ifndef TENET_VOCAB_H_
#define TENET_VOCAB_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace tenet {

// Splits a caption into lowercase word tokens.
//
// ASCII letters are case-folded and every character other than a letter,
// digit, or apostrophe is deleted. Tokens are the whitespace-separated runs
// that remain, with leading and trailing apostrophes trimmed, so only
// internal apostrophes survive ("don't" stays, "'cause" becomes "cause").
// Non-ASCII UTF-8 sequences are kept verbatim as word characters.
std::vector<std::string> tokenize(std::string_view caption);

// Number of Unicode code points in a UTF-8 token.
std::size_t token_length(std::string_view token);

// Occurrence counts of every token in a caption corpus.
class FrequencyTable {
 public:
  using Map = std::unordered_map<std::string, std::int64_t>;

  // Tokenizes `caption` and counts each occurrence.
  void add_caption(std::string_view caption);
  void add_token(const std::string& token, std::int64_t count = 1);

  // Commutative merge, for counting corpus shards independently.
  void merge(const FrequencyTable& other);

  std::int64_t count(const std::string& token) const;
  // Number of distinct tokens.
  std::size_t distinct() const { return counts_.size(); }
  bool empty() const { return counts_.empty(); }
  const Map& entries() const { return counts_; }

 private:
  Map counts_;
};

FrequencyTable count_corpus(std::span<const std::string> captions);

// Counts one caption per line.
FrequencyTable count_corpus(std::istream& lines);

struct CorpusStats {
  std::int64_t distinct_words = 0;
  std::int64_t hapax_count = 0;
  std::int64_t count_le_3 = 0;
  std::int64_t len_1_count = 0;
  std::int64_t len_2_count = 0;

  bool operator==(const CorpusStats&) const = default;
};

CorpusStats corpus_stats(const FrequencyTable& table);
nlohmann::json to_json(const CorpusStats& stats);

// Ranked word list. Rank 0 is the most frequent word; equal counts are
// ordered lexicographically.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Throws DataError unless the words are unique, non-empty, parallel to
  // `counts`, and ranked (counts non-increasing, ties ascending).
  Vocabulary(std::vector<std::string> words, std::vector<std::int64_t> counts,
             std::int64_t min_count, std::int64_t min_length);

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  const std::string& word(std::size_t rank) const { return words_.at(rank); }
  std::int64_t min_count() const { return min_count_; }
  std::int64_t min_length() const { return min_length_; }

  std::optional<std::size_t> index_of(const std::string& word) const;

  // One "word<TAB>count" line per word, in rank order.
  std::string to_tsv() const;
  void write_tsv(const std::filesystem::path& path) const;

  // The TSV carries no filter thresholds; the loaded vocabulary reports the
  // smallest count and length it contains instead.
  static Vocabulary from_tsv(std::istream& in);
  static Vocabulary read_tsv(const std::filesystem::path& path);

  // FNV-1a 64 of the TSV serialization. Used to tie checkpoints and caches
  // to the label space they were built with.
  std::uint64_t fingerprint() const;

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_ && counts_ == other.counts_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::int64_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
  std::int64_t min_count_ = 1;
  std::int64_t min_length_ = 1;
};

// Keeps tokens with count >= min_count and length >= min_length, ranks them
// and truncates to vocab_size. May return fewer words than vocab_size.
Vocabulary build_vocabulary(const FrequencyTable& table,
                            std::int64_t min_count, std::int64_t min_length,
                            std::int64_t vocab_size);

// Streams every caption of a caption source to `sink`. A source is either a
// COCO captions annotation file (JSON, annotations[*].caption) or a plain text
// file with one caption per line. JSON is detected by the first non-blank
// character being '{'.
void for_each_caption(const std::filesystem::path& path,
                      const std::function<void(std::string_view)>& sink);

FrequencyTable count_caption_file(const std::filesystem::path& path);

}  // namespace tenet

#endif  // TENET_VOCAB_H_
