#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace desparse {

using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConstantColumn : public Error {
 public:
  explicit ConstantColumn(Index column)
      : Error("column " + std::to_string(column) + " has zero variance"), column_(column) {}
  Index column() const noexcept { return column_; }

 private:
  Index column_;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class Disconnected : public Error {
 public:
  using Error::Error;
};

/// Column j is fully explained by the other columns; no score vector exists.
class DegenerateScore : public Error {
 public:
  explicit DegenerateScore(Index feature)
      : Error("degenerate score vector for feature " + std::to_string(feature)), feature_(feature) {}
  Index feature() const noexcept { return feature_; }

 private:
  Index feature_;
};

class SupportTooLarge : public Error {
 public:
  SupportTooLarge(Index s_hat, Index n)
      : Error("estimated support size " + std::to_string(s_hat) + " >= sample count " +
              std::to_string(n)) {}
};

class ZeroResidual : public Error {
 public:
  ZeroResidual() : Error("all residuals are zero; noise level cannot be estimated") {}
};

class InvalidClusterCount : public Error {
 public:
  InvalidClusterCount(Index C, Index p)
      : Error("cluster count " + std::to_string(C) + " outside [1, " + std::to_string(p) + "]") {}
};

class EnsembleMemberFailed : public Error {
 public:
  EnsembleMemberFailed(int member, const std::string& what)
      : Error("ensemble member " + std::to_string(member) + " failed: " + what), member_(member) {}
  int member() const noexcept { return member_; }

 private:
  int member_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace desparse
