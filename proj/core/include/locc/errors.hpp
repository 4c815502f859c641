// Copyright 2026 The locc-usd Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace locc {

/// Operand dimensions do not agree (state/state, operator/party, tree/state).
class ShapeError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// An operation was called outside its documented domain.
class PreconditionError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// A constructive routine produced output that fails its own postcondition.
/// Seeing one of these is a bug.
class InternalError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// Malformed state-pair, protocol or canonical-form file.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace locc
