#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace okpf {

enum class Errc {
  invalid_argument = 1,
  invalid_field,
  grid_mismatch,
  divergence,
  invalid_candidate,
  optimizer,
  out_of_range,
  io,
  corrupt_file,
  unsupported_version,
  degenerate,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(std::uint64_t step, const std::string& what)
      : Error(Errc::divergence, what), step_(step) {}
  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

class CorruptFileError : public Error {
 public:
  CorruptFileError(std::uint64_t offset, const std::string& what)
      : Error(Errc::corrupt_file, what), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace okpf
