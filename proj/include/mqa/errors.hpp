// Copyright 2026 The mqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace mqa {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Tensor/matrix shape disagreement.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; message names the file and line.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Out-of-range or inconsistent operation parameter.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Invalid or incomplete configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Dataset-level problem (missing labels, empty set, bad split request).
class DataError : public Error {
public:
    using Error::Error;
};

/// Training could not start or proceed.
class TrainingError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown (non-finite values, degenerate covariance).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Model fitting failed (too few samples, no convergence path).
class FitError : public Error {
public:
    using Error::Error;
};

/// Score calibration impossible on the given statistics.
class CalibrationError : public Error {
public:
    using Error::Error;
};

/// API contract violated by the caller (e.g. non-scalar loss).
class ContractError : public Error {
public:
    using Error::Error;
};

/// File system / serialization failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace mqa
