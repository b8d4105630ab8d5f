#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rifs {

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration; `field()` names the offending key.
class ConfigError : public Error {
  public:
    ConfigError(std::string field, const std::string& msg)
        : Error(field + ": " + msg), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

class PlacementInfeasible : public Error {
  public:
    PlacementInfeasible(std::size_t node, const std::string& msg)
        : Error("node " + std::to_string(node) + ": " + msg), node_(node) {}
    std::size_t node() const noexcept { return node_; }

  private:
    std::size_t node_;
};

/// A depth with no surviving leaves was requested.
class ExtinctDepthError : public Error {
  public:
    explicit ExtinctDepthError(int depth)
        : Error("depth " + std::to_string(depth) + " has no leaves"), depth_(depth) {}
    int depth() const noexcept { return depth_; }

  private:
    int depth_;
};

class InsufficientDataError : public Error {
  public:
    using Error::Error;
};

class NotEnumerableError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    using Error::Error;
};

} // namespace rifs
