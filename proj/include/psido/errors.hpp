#pragma once

#include <stdexcept>
#include <string>

namespace psido {

// Base of every library error. The category decides the CLI exit code.
class Error : public std::runtime_error {
 public:
  enum class Category { config, numerical };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

#define PSIDO_DEFINE_ERROR(Name, Cat)                                        \
  class Name : public Error {                                                \
   public:                                                                   \
    explicit Name(const std::string& what) : Error(Category::Cat, what) {}   \
  };

PSIDO_DEFINE_ERROR(ConfigError, config)
PSIDO_DEFINE_ERROR(ParameterError, config)
PSIDO_DEFINE_ERROR(EmptyWindowError, config)
PSIDO_DEFINE_ERROR(TypeMismatchError, config)
PSIDO_DEFINE_ERROR(ShapeError, config)
PSIDO_DEFINE_ERROR(RangeError, config)
PSIDO_DEFINE_ERROR(ContractError, config)
PSIDO_DEFINE_ERROR(UnsupportedGroupError, config)
PSIDO_DEFINE_ERROR(AliasingError, numerical)
PSIDO_DEFINE_ERROR(InsufficientDataError, numerical)
PSIDO_DEFINE_ERROR(UndefinedFitError, numerical)
PSIDO_DEFINE_ERROR(NumericError, numerical)

#undef PSIDO_DEFINE_ERROR

}  // namespace psido
