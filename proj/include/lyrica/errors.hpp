#ifndef LYRICA_ERRORS_HPP
#define LYRICA_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lyrica {

// Base class for every error thrown by the library. The CLI maps these to
// nonzero exit codes with the message on stderr.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

// Malformed input data; carries the 1-based line number when known.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    explicit FormatError(const std::string& what) : Error(what), line_(0) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

class InvalidSpec : public Error {
public:
    explicit InvalidSpec(const std::string& what) : Error(what) {}
};

class DegenerateClassError : public Error {
public:
    explicit DegenerateClassError(const std::string& what) : Error(what) {}
};

class SingleClassError : public Error {
public:
    explicit SingleClassError(const std::string& what) : Error(what) {}
};

class AllOutOfVocabulary : public Error {
public:
    explicit AllOutOfVocabulary(const std::string& what) : Error(what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(what) {}
};

class EmptySequence : public Error {
public:
    explicit EmptySequence(const std::string& what) : Error(what) {}
};

class EmptyTrainingSet : public Error {
public:
    explicit EmptyTrainingSet(const std::string& what) : Error(what) {}
};

}  // namespace lyrica

#endif
