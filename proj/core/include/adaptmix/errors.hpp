#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace adaptmix {

// Base class for all toolkit errors. CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable files, bad layouts, invalid encodings during ingestion.
class IngestError : public Error {
public:
    IngestError(std::string path, const std::string& msg)
        : Error(path + ": " + msg), path_(std::move(path)) {}

    IngestError(std::string path, std::size_t byte_offset, const std::string& msg)
        : Error(path + ": byte offset " + std::to_string(byte_offset) + ": " + msg),
          path_(std::move(path)),
          byte_offset_(byte_offset),
          has_offset_(true) {}

    const std::string& path() const { return path_; }
    bool has_byte_offset() const { return has_offset_; }
    std::size_t byte_offset() const { return byte_offset_; }

private:
    std::string path_;
    std::size_t byte_offset_ = 0;
    bool has_offset_ = false;
};

class UnknownLanguageError : public Error {
public:
    explicit UnknownLanguageError(std::string lang)
        : Error("unknown language '" + lang + "'"), language_(std::move(lang)) {}

    const std::string& language() const { return language_; }

private:
    std::string language_;
};

// Vocabulary target too small for the mandatory seed set.
class SizingError : public Error {
public:
    SizingError(std::int64_t requested, std::int64_t minimum)
        : Error("vocab size " + std::to_string(requested) +
                " below minimum feasible size " + std::to_string(minimum)),
          requested_(requested),
          minimum_feasible_(minimum) {}

    std::int64_t requested() const { return requested_; }
    std::int64_t minimum_feasible() const { return minimum_feasible_; }

private:
    std::int64_t requested_;
    std::int64_t minimum_feasible_;
};

class DecodeError : public Error {
public:
    DecodeError(std::int64_t id, std::size_t position)
        : Error("token id " + std::to_string(id) + " out of range at position " +
                std::to_string(position)),
          id_(id),
          position_(position) {}

    std::int64_t id() const { return id_; }
    std::size_t position() const { return position_; }

private:
    std::int64_t id_;
    std::size_t position_;
};

// Malformed model/config/report files.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

}  // namespace adaptmix
