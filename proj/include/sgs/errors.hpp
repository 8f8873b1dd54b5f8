#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgs {

// Base class for all library errors. CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Normalized text shorter than the requested segment size.
class InsufficientInput : public Error {
public:
    using Error::Error;
};

// Corrupt or truncated input to a decoder; carries the byte offset of the
// first inconsistency where one is known.
class MalformedInput : public Error {
public:
    explicit MalformedInput(const std::string& what, std::size_t offset = 0)
        : Error(what), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class InvalidGrammar : public Error {
public:
    using Error::Error;
};

// A word matches no viable alternative at the current derivation point.
class ParseFailure : public Error {
public:
    using Error::Error;
};

// Bad framed payload: empty on embed, or declared length exceeds supply.
class FrameError : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

// Reference + suspect concatenation does not fit one compression block.
class BlockOverflow : public Error {
public:
    using Error::Error;
};

class InsufficientCorpus : public Error {
public:
    using Error::Error;
};

class EmptyDataset : public Error {
public:
    using Error::Error;
};

}  // namespace sgs
