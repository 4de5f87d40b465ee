#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace koko {

/// Base class for every error the engine reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed corpus or index input. Maps to CLI exit code 2.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Corpus TSV problem, located by document, sentence and line.
class CorpusError : public FormatError {
 public:
  CorpusError(const std::string& doc_id, std::size_t sid, std::size_t line,
              const std::string& what)
      : FormatError(doc_id + ": sentence " + std::to_string(sid) + ", line " +
                    std::to_string(line) + ": " + what),
        doc_id_(doc_id), sid_(sid), line_(line) {}

  const std::string& doc_id() const { return doc_id_; }
  std::size_t sid() const { return sid_; }
  std::size_t line() const { return line_; }

 private:
  std::string doc_id_;
  std::size_t sid_;
  std::size_t line_;
};

/// Query text could not be parsed or is semantically invalid. Exit code 3.
class QueryError : public Error {
 public:
  using Error::Error;
};

class ParseError : public QueryError {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : QueryError(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Missing dictionary, vectors file, expansion table, ... Exit code 3.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace koko
