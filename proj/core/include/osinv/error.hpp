// Copyright 2026 The osinv Authors
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

namespace osinv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Raised when a matrix fails the normality test; carries the defect norm.
class NotNormalError : public Error {
 public:
  NotNormalError(const std::string& what, double defect)
      : Error(what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

class NotUnitaryError : public Error {
 public:
  NotUnitaryError(const std::string& what, double defect)
      : Error(what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

class EmptySystemError : public Error {
 public:
  using Error::Error;
};

class NoUnitError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed its configured cap.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, long requested, long cap)
      : Error(what), requested_(requested), cap_(cap) {}
  long requested() const noexcept { return requested_; }
  long cap() const noexcept { return cap_; }

 private:
  long requested_;
  long cap_;
};

/// Distances between systems of different dimension are undefined.
class NotComparableError : public Error {
 public:
  using Error::Error;
};

/// Malformed or out-of-range input (bad parameter, missing relation, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

}  // namespace osinv
