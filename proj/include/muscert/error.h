#ifndef MUSCERT_ERROR_H_
#define MUSCERT_ERROR_H_

#include <stdexcept>
#include <string>

namespace muscert {

// Every failure raised by the library derives from Error. The kind drives the
// CLI exit code.
enum class ErrorKind {
  kDimension,
  kArity,
  kConfig,
  kClassifierContract,
  kPrecondition,
  kResource,
  kCapability,
  kNumerical,
  kParse,
  kSchema,
  kData,
  kParameter,
  kIo,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

#define MUSCERT_DEFINE_ERROR(Name, Kind)                               \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(Kind, what) {}      \
  };

MUSCERT_DEFINE_ERROR(DimensionError, ErrorKind::kDimension)
MUSCERT_DEFINE_ERROR(ArityError, ErrorKind::kArity)
MUSCERT_DEFINE_ERROR(ConfigError, ErrorKind::kConfig)
MUSCERT_DEFINE_ERROR(ClassifierContractError, ErrorKind::kClassifierContract)
MUSCERT_DEFINE_ERROR(PreconditionError, ErrorKind::kPrecondition)
MUSCERT_DEFINE_ERROR(ResourceError, ErrorKind::kResource)
MUSCERT_DEFINE_ERROR(CapabilityError, ErrorKind::kCapability)
MUSCERT_DEFINE_ERROR(NumericalError, ErrorKind::kNumerical)
MUSCERT_DEFINE_ERROR(ParseError, ErrorKind::kParse)
MUSCERT_DEFINE_ERROR(SchemaError, ErrorKind::kSchema)
MUSCERT_DEFINE_ERROR(DataError, ErrorKind::kData)
MUSCERT_DEFINE_ERROR(ParameterError, ErrorKind::kParameter)
MUSCERT_DEFINE_ERROR(IoError, ErrorKind::kIo)

#undef MUSCERT_DEFINE_ERROR

}  // namespace muscert

#endif  // MUSCERT_ERROR_H_
