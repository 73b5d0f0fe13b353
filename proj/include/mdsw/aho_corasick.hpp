// Copyright 2026 the mdsw authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include "mdsw/error.hpp"

namespace mdsw {

/// Aho-Corasick automaton over raw bytes with dense goto tables, converted
/// to a DFA after construction: one table lookup per input byte. Patterns
/// are matched as byte substrings; UTF-8 inputs align automatically because
/// a valid UTF-8 pattern can only occur on code point boundaries.
class MultiPatternMatcher {
 public:
  void add_pattern(std::string_view pattern, std::uint32_t id) {
    if (pattern.empty()) fail(Errc::SpecError, "empty pattern in matcher");
    if (built_) fail(Errc::Internal, "matcher already built");
    // before build(), next[c] == 0 means "no edge": a trie never links back
    // to the root, so 0 is free as a sentinel
    std::int32_t node = 0;
    for (unsigned char c : pattern) {
      std::int32_t next = nodes_[static_cast<std::size_t>(node)].next[c];
      if (next == 0) {
        next = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();
        nodes_[static_cast<std::size_t>(node)].next[c] = next;
      }
      node = next;
    }
    nodes_[static_cast<std::size_t>(node)].outputs.push_back(id);
    ++pattern_count_;
  }

  void build() {
    if (built_) return;
    std::deque<std::int32_t> queue;
    for (int c = 0; c < 256; ++c) {
      std::int32_t child = nodes_[0].next[c];
      if (child != 0) {
        nodes_[static_cast<std::size_t>(child)].fail = 0;
        queue.push_back(child);
      }
    }
    while (!queue.empty()) {
      std::int32_t u = queue.front();
      queue.pop_front();
      Node& nu = nodes_[static_cast<std::size_t>(u)];
      for (int c = 0; c < 256; ++c) {
        std::int32_t v = nu.next[c];
        if (v != 0) {
          std::int32_t f = nodes_[static_cast<std::size_t>(nu.fail)].next[c];
          nodes_[static_cast<std::size_t>(v)].fail = f;
          const auto& fout = nodes_[static_cast<std::size_t>(f)].outputs;
          auto& vout = nodes_[static_cast<std::size_t>(v)].outputs;
          vout.insert(vout.end(), fout.begin(), fout.end());
          queue.push_back(v);
        } else {
          // DFA conversion: missing edges follow the failure function
          nu.next[c] = nodes_[static_cast<std::size_t>(nu.fail)].next[c];
        }
      }
    }
    built_ = true;
  }

  /// Calls fn(pattern_id) for every occurrence (duplicates possible when a
  /// pattern occurs several times).
  template <typename Fn>
  void scan(std::string_view text, Fn&& fn) const {
    std::int32_t state = 0;
    for (unsigned char c : text) {
      state = nodes_[static_cast<std::size_t>(state)].next[c];
      const auto& out = nodes_[static_cast<std::size_t>(state)].outputs;
      for (std::uint32_t id : out) fn(id);
    }
  }

  std::size_t pattern_count() const { return pattern_count_; }
  std::size_t node_count() const { return nodes_.size(); }
  bool built() const { return built_; }

 private:
  struct Node {
    std::array<std::int32_t, 256> next{};
    std::int32_t fail = 0;
    std::vector<std::uint32_t> outputs;
  };

  std::vector<Node> nodes_{1};
  std::size_t pattern_count_ = 0;
  bool built_ = false;
};

}  // namespace mdsw
