#include "beamlab/error.hpp"

namespace beamlab {

const char* to_string(errc code) noexcept {
  switch (code) {
    case errc::configuration: return "configuration error";
    case errc::lookup: return "lookup error";
    case errc::register_access: return "register error";
    case errc::ordering: return "ordering error";
    case errc::codebook: return "codebook error";
    case errc::parse: return "parse error";
    case errc::domain: return "domain error";
    case errc::selection: return "selection error";
    case errc::publish: return "publish error";
    case errc::subscribe: return "subscribe error";
    case errc::startup: return "startup error";
    case errc::validation: return "validation error";
    case errc::precondition: return "precondition violated";
    case errc::io: return "I/O error";
  }
  return "error";
}

}  // namespace beamlab
