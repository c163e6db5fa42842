#pragma once

#include <stdexcept>
#include <string>

namespace lightcast {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument or violated call precondition.
class ValueError : public Error {
public:
    using Error::Error;
};

/// Structural defect in the data itself: broken hourly grid, duplicate
/// timestamps or columns, constant series where variance is required.
class DataError : public Error {
public:
    using Error::Error;
};

/// File system or CSV parsing failure.
class IoError : public Error {
public:
    using Error::Error;
};

/// Transport-level HTTP failure. status == 0 means the connection itself failed.
class HttpError : public Error {
public:
    HttpError(const std::string& what, int status) : Error(what), status_(status) {}
    int status() const { return status_; }

private:
    int status_ = 0;
};

/// Authentication or authorization rejection (HTTP 401/403).
class AuthError : public HttpError {
public:
    using HttpError::HttpError;
};

/// Provider returned a document that does not match its schema.
class MalformedPayloadError : public Error {
public:
    using Error::Error;
};

/// Provider returned a syntactically valid document with no usable rows.
class EmptyPayloadError : public Error {
public:
    using Error::Error;
};

} // namespace lightcast
