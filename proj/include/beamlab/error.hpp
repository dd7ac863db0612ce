#pragma once

#include <stdexcept>
#include <string>

namespace beamlab {

enum class errc {
  configuration,
  lookup,
  register_access,
  ordering,
  codebook,
  parse,
  domain,
  selection,
  publish,
  subscribe,
  startup,
  validation,
  precondition,
  io,
};

const char* to_string(errc code) noexcept;

// Single exception type for the library; the kind tells callers which contract broke.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace beamlab
