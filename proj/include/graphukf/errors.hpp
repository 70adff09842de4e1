#pragma once

#include <stdexcept>
#include <string>

namespace graphukf {

// Every library failure derives from Error; kind() is the stable name the CLI
// prints on its machine-readable error line.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "Error"; }
};

#define GRAPHUKF_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(what) {}           \
    const char* kind() const noexcept override { return #Name; }      \
  };

GRAPHUKF_DEFINE_ERROR(ShapeError)
GRAPHUKF_DEFINE_ERROR(ConnectivityError)
GRAPHUKF_DEFINE_ERROR(DomainError)
GRAPHUKF_DEFINE_ERROR(GenerationError)
GRAPHUKF_DEFINE_ERROR(DowndateFailure)
GRAPHUKF_DEFINE_ERROR(InputError)
GRAPHUKF_DEFINE_ERROR(ConfigError)
GRAPHUKF_DEFINE_ERROR(NumericalError)
GRAPHUKF_DEFINE_ERROR(UnstableDynamicsError)
GRAPHUKF_DEFINE_ERROR(IoError)

#undef GRAPHUKF_DEFINE_ERROR

}  // namespace graphukf
