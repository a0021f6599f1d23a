#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chunktag {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed corpus, tag, model or span input.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A tree exceeds the configured depth under the strict policy.
class DepthError : public Error {
 public:
  using Error::Error;
};

// Inputs that are well-formed but inconsistent with each other
// (misaligned corpora, empty treebank, out-of-range indices).
class DataError : public Error {
 public:
  using Error::Error;
};

// A POS symbol the model has never seen, under the strict unknown-POS policy.
class UnknownPosError : public Error {
 public:
  UnknownPosError(std::string pos, std::size_t position)
      : Error("unknown POS '" + pos + "' at position " +
              std::to_string(position)),
        pos_(std::move(pos)),
        position_(position) {}
  const std::string& pos() const { return pos_; }
  std::size_t position() const { return position_; }

 private:
  std::string pos_;
  std::size_t position_;
};

// No tag sequence satisfies the decoding constraints.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace chunktag
