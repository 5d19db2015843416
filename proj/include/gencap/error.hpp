#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gencap {

enum class ErrorCode {
  DimensionMismatch,
  EmptyMeasure,
  DomainError,
  ParseError,
  RaggedRows,
  BudgetTooSmall,
  TooManyBreakpoints,
  NonzeroBoundary,
  ShapeMismatch,
  InfeasibleEpsilon,
  EpsilonBelowResolution,
  CapacityExceeded,
  InfeasibleBudget,
  SizeLimit,
  NotSingular,
  DegenerateGrid,
  InvalidConfig,
  IoError,
};

const char* to_string(ErrorCode code);

/// Base error for every failure the library reports. Carries a machine
/// readable code so the CLI can map failures to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& what)
      : Error(ErrorCode::ParseError, "row " + std::to_string(row) + ", column " +
                                         std::to_string(column) + ": " + what),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// Raised when a requested transport error is not below the feasibility bound
/// at some ordered atom index (1-based, the index of the ramp).
class InfeasibleEpsilonError : public Error {
 public:
  InfeasibleEpsilonError(std::size_t index, double epsilon, double sup_epsilon)
      : Error(ErrorCode::InfeasibleEpsilon,
              "epsilon " + std::to_string(epsilon) + " violates the feasibility bound at index " +
                  std::to_string(index) + " (must be < " + std::to_string(sup_epsilon) + ")"),
        index_(index),
        sup_epsilon_(sup_epsilon) {}

  std::size_t index() const noexcept { return index_; }
  double sup_epsilon() const noexcept { return sup_epsilon_; }

 private:
  std::size_t index_;
  double sup_epsilon_;
};

class CapacityExceededError : public Error {
 public:
  CapacityExceededError(std::size_t atoms, std::size_t capacity)
      : Error(ErrorCode::CapacityExceeded, "target has " + std::to_string(atoms) +
                                               " atoms but the budget holds at most " +
                                               std::to_string(capacity)),
        atoms_(atoms),
        capacity_(capacity) {}

  std::size_t atoms() const noexcept { return atoms_; }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  std::size_t atoms_;
  std::size_t capacity_;
};

class TooManyBreakpointsError : public Error {
 public:
  TooManyBreakpointsError(std::size_t breakpoints, std::size_t budget)
      : Error(ErrorCode::TooManyBreakpoints, std::to_string(breakpoints) +
                                                 " interior breakpoints exceed the budget of " +
                                                 std::to_string(budget)),
        breakpoints_(breakpoints),
        budget_(budget) {}

  std::size_t breakpoints() const noexcept { return breakpoints_; }
  std::size_t budget() const noexcept { return budget_; }

 private:
  std::size_t breakpoints_;
  std::size_t budget_;
};

}  // namespace gencap
