// Copyright 2026 The GridGame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace gridgame {

// Bad user input: unreadable file, malformed document, failed validation.
// The CLI maps these to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

// A catalog effect names a component the network does not have.
class CatalogError : public InputError {
 public:
  using InputError::InputError;
};

// Internal invariant broken (loop handed to the radial solver, degenerate LP).
// The CLI maps these to exit code 3.
class RadialityError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class SolverError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace gridgame
