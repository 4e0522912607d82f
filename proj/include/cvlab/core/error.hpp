#pragma once

#include <stdexcept>
#include <string>

namespace cvlab {

// Every error the library raises derives from Error so the CLI can map
// families of failures onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidAutomorphism : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

class ChainBroken : public Error {
 public:
  using Error::Error;
};

class NoPrimitiveBasic : public Error {
 public:
  using Error::Error;
};

}  // namespace cvlab
