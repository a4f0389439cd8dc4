#pragma once

#include <stdexcept>
#include <string>

namespace sneakpeek {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotScheduled : public Error {
 public:
  using Error::Error;
};
class InvalidDeadline : public Error {
 public:
  using Error::Error;
};
class EmptyConfusion : public Error {
 public:
  using Error::Error;
};
class DimensionError : public Error {
 public:
  using Error::Error;
};
class EmptyInput : public Error {
 public:
  using Error::Error;
};
class MissingPriorHint : public Error {
 public:
  using Error::Error;
};
class InsufficientCorpus : public Error {
 public:
  using Error::Error;
};
class EmptyGroup : public Error {
 public:
  using Error::Error;
};
class DuplicateSneakPeek : public Error {
 public:
  using Error::Error;
};
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};
class IncompleteTrace : public Error {
 public:
  using Error::Error;
};
class GenError : public Error {
 public:
  using Error::Error;
};
class UnknownScenario : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sneakpeek
