/* Copyright 2026 The rmlab Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <stdexcept>
#include <string>

namespace rmlab {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class LevelError : public Error {
  public:
    using Error::Error;
};

class ShapeError : public Error {
  public:
    using Error::Error;
};

class NormalityError : public Error {
  public:
    using Error::Error;
};

class DomainError : public Error {
  public:
    using Error::Error;
};

class ResourceError : public Error {
  public:
    using Error::Error;
};

class InternalConsistencyError : public Error {
  public:
    using Error::Error;
};

class NumericalDegeneracyError : public Error {
  public:
    NumericalDegeneracyError(const std::string& what, int retries)
        : Error(what + " (after " + std::to_string(retries) + " retries)"), retries(retries) {}
    int retries;
};

class NotAnRMatrixError : public Error {
  public:
    NotAnRMatrixError(double ybe, double unitarity)
        : Error("not an R-matrix: ybe residual " + std::to_string(ybe) +
                ", unitarity residual " + std::to_string(unitarity)),
          ybe_residual(ybe),
          unitarity_residual(unitarity) {}
    double ybe_residual;
    double unitarity_residual;
};

class NotNormalFormError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    using Error::Error;
};

}  // namespace rmlab
