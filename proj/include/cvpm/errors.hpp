// Copyright 2026 The cv-phase-metrology Authors
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

namespace cvpm {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidProbe : public Error {
 public:
  using Error::Error;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

class InvalidChannel : public Error {
 public:
  using Error::Error;
};

/// A closed-form expression hit a 0/0 that the channel models should never produce.
class NumericalSingularity : public Error {
 public:
  using Error::Error;
};

class UnsupportedInput : public Error {
 public:
  using Error::Error;
};

/// Root search was handed a bracket without a sign change.
class BracketFailure : public Error {
 public:
  using Error::Error;
};

/// Fock-space truncation too small for the requested state.
class CutoffError : public Error {
 public:
  using Error::Error;
};

class OracleError : public Error {
 public:
  using Error::Error;
};

class InvalidDensity : public Error {
 public:
  using Error::Error;
};

}  // namespace cvpm
