#ifndef NTD_ERRORS_HPP
#define NTD_ERRORS_HPP

#include <stdexcept>

namespace ntd {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Insert of a sample id that is still resident in the memory.
class DuplicateIdError : public Error {
public:
    using Error::Error;
};

// Insert/evict called outside the insert-then-evict protocol.
class ProtocolViolationError : public Error {
public:
    using Error::Error;
};

// Score map does not cover the group selected for eviction.
class IncompleteScoresError : public Error {
public:
    using Error::Error;
};

class EmptyMemoryError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class NonFiniteError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace ntd

#endif  // NTD_ERRORS_HPP
