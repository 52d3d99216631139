// Copyright 2026 The svfl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace svfl {

// Every failure surfaced by the library derives from Error. The CLI maps the
// subclasses onto stable exit codes (see tools/svfl.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid model specification (layer dims do not chain, etc).
class SpecError : public Error {
 public:
  using Error::Error;
};

// Matrix shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Operation called in the wrong state (e.g. backward before forward).
class StateError : public Error {
 public:
  using Error::Error;
};

// Caller-supplied value out of range.
class InputError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents: bad magic, truncation, checksum mismatch.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Invalid PSI secret.
class KeyError : public Error {
 public:
  using Error::Error;
};

// Peer violated the message protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Rows could not be linked across parties.
class LinkageError : public Error {
 public:
  using Error::Error;
};

// The global intersection is empty; training is impossible.
class EmptyIntersectionError : public LinkageError {
 public:
  using LinkageError::LinkageError;
};

// Malformed envelope frame.
class FramingError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

// Connection-level failures.
class TransportError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public TransportError {
 public:
  using TransportError::TransportError;
};

class DisconnectError : public TransportError {
 public:
  using TransportError::TransportError;
};

}  // namespace svfl
