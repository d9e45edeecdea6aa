#pragma once

#include <stdexcept>
#include <string>

namespace coinstream {

// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInstance : public Error {
 public:
  using Error::Error;
};

class InvalidSchedule : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// Sampling or comparing through a handle that is no longer in memory.
class SampleAfterRelease : public Error {
 public:
  using Error::Error;
};

class DoubleRelease : public Error {
 public:
  using Error::Error;
};

// Retaining a coin would exceed the session's held_limit.
class HandleLimitExceeded : public Error {
 public:
  using Error::Error;
};

class EmptyStream : public Error {
 public:
  EmptyStream() : Error("stream contains no coins") {}
};

class InstanceTooSmall : public Error {
 public:
  using Error::Error;
};

// A level parameter (tower value, sample count) is not representable.
class LevelOverflow : public Error {
 public:
  using Error::Error;
};

// Swap case reached with no king defeated by the pivot.
class NoDefeatedKing : public Error {
 public:
  using Error::Error;
};

}  // namespace coinstream
