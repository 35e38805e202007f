// Copyright 2026 The densestereo Authors.
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

#ifndef DENSESTEREO_TAPE_H_
#define DENSESTEREO_TAPE_H_

#include <any>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "densestereo/errors.h"

namespace densestereo {

// Forward intermediates saved by each differentiable stage, replayed in
// strict reverse order by the matching backward calls.
class GradientTape {
 public:
  void push(std::string stage, std::any saved) {
    entries_.push_back({std::move(stage), std::move(saved)});
  }

  // Removes the newest entry. Throws TapeError if the tape is empty, the
  // newest stage is not `stage`, or the payload type does not match.
  template <typename Record>
  Record pop(std::string_view stage) {
    if (entries_.empty()) {
      throw TapeError("tape is empty; expected stage '" + std::string(stage) + "'");
    }
    Entry& top = entries_.back();
    if (top.stage != stage) {
      throw TapeError("tape out of order: expected '" + std::string(stage) +
                      "', found '" + top.stage + "'");
    }
    auto* record = std::any_cast<Record>(&top.saved);
    if (record == nullptr) {
      throw TapeError("tape record for '" + top.stage + "' has the wrong type");
    }
    Record out = std::move(*record);
    entries_.pop_back();
    return out;
  }

  std::string_view top_stage() const {
    return entries_.empty() ? std::string_view() : entries_.back().stage;
  }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  void clear() { entries_.clear(); }

 private:
  struct Entry {
    std::string stage;
    std::any saved;
  };
  std::vector<Entry> entries_;
};

}  // namespace densestereo

#endif  // DENSESTEREO_TAPE_H_
