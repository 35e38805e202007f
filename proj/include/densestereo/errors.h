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

#ifndef DENSESTEREO_ERRORS_H_
#define DENSESTEREO_ERRORS_H_

#include <stdexcept>
#include <string>

namespace densestereo {

// Mismatched dimensions between arguments.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside its admissible range (non-positive width, d_max > width...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// NaN or infinity appeared where finite values are required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unsupported file content.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A loss or metric was asked to average over zero valid pixels.
class EmptyMaskError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A backward pass was replayed against a tape it does not belong to.
class TapeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace densestereo

#endif  // DENSESTEREO_ERRORS_H_
