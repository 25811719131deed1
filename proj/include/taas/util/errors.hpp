#pragma once

#include <stdexcept>
#include <string>

namespace taas {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration (files, scenarios, profiles).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A frame could not be parsed into a valid protocol envelope.
class CodecError : public Error {
public:
    using Error::Error;
};

class TransportError : public Error {
public:
    using Error::Error;
};

class AddressInUse : public TransportError {
public:
    using TransportError::TransportError;
};

class Unreachable : public TransportError {
public:
    using TransportError::TransportError;
};

class ConnectionClosed : public TransportError {
public:
    using TransportError::TransportError;
};

class RpcTimeout : public TransportError {
public:
    using TransportError::TransportError;
};

/// Protocol-level failure reported by the remote side (an error envelope).
class RpcError : public Error {
public:
    RpcError(int code, const std::string& message)
        : Error(message), code_(code) {}

    int code() const { return code_; }

private:
    int code_;
};

/// Tool-level failure: the tool ran and reported an error payload.
class ToolError : public Error {
public:
    using Error::Error;
};

class ToolCollision : public Error {
public:
    using Error::Error;
};

/// Manifest and handler map disagree at serve time.
class ManifestMismatch : public Error {
public:
    using Error::Error;
};

} // namespace taas
