// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace blockdvfs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (bad JSON, missing or mistyped field).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but violates a model invariant. `subject()` names the
/// offending operator id, table or entry.
class ValidationError : public Error {
 public:
  ValidationError(std::string subject, const std::string& what)
      : Error(what), subject_(std::move(subject)) {}

  const std::string& subject() const noexcept { return subject_; }

 private:
  std::string subject_;
};

/// Frequency that is not a member of the relevant level table.
class UnknownLevelError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// No triplet meets the latency budget.
class InfeasibleBudgetError : public Error {
 public:
  InfeasibleBudgetError(double budget, double min_t_exe);

  double budget() const noexcept { return budget_; }
  double min_t_exe() const noexcept { return min_t_exe_; }

 private:
  double budget_;
  double min_t_exe_;
};

}  // namespace blockdvfs
