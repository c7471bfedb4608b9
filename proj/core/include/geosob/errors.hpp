#pragma once

#include <stdexcept>
#include <string>

namespace geosob {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadratureError : Error {
  QuadratureError(const std::string& what, double achieved)
      : Error(what), achieved_error(achieved) {}
  double achieved_error;
};

struct IntegrationError : Error {
  IntegrationError(const std::string& what, double t)
      : Error(what), last_valid_t(t) {}
  double last_valid_t;
};

struct ShootingError : Error {
  using Error::Error;
};

struct ConjugatePointError : Error {
  ConjugatePointError(const std::string& what, double t)
      : Error(what), first_crossing(t) {}
  double first_crossing;
};

struct MeshError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace geosob
