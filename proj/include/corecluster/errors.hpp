#pragma once

#include <stdexcept>
#include <string>

namespace corecluster {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration, argument, or argument combination.
/// The command-line tool maps this to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Problems with input data: unreadable or malformed files, empty results
/// after filtering, dimension mismatches between artifacts.
/// The command-line tool maps this to exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A computation failed: clustering retries exhausted, no completed
/// iterations, or a guard (such as the clique-search vertex ceiling) fired.
/// The command-line tool maps this to exit code 4.
class ComputeError : public Error {
 public:
  using Error::Error;
};

/// A clustering function failed to produce a solution for one (re)sample.
/// Estimators catch this and apply the retry policy; anything else
/// propagates.
class ClusteringFailure : public ComputeError {
 public:
  using ComputeError::ComputeError;
};

/// Raised when a fitted clustering cannot assign unseen points (methods
/// without centroids define the clustering function only on the training
/// items).
class AssignmentUndefinedError : public Error {
 public:
  using Error::Error;
};

}  // namespace corecluster
