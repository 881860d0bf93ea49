#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace recveq {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Frontend failures (parse / static checks). Carries a machine-readable kind.
class FrontendError : public Error {
 public:
  FrontendError(std::string kind, const std::string& message, int line = 0, int column = 0)
      : Error(format(kind, message, line, column)), kind_(std::move(kind)), line_(line), column_(column) {}

  const std::string& kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& kind, const std::string& message, int line, int column) {
    std::string out = kind + ": " + message;
    if (line > 0) out += " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
    return out;
  }

  std::string kind_;
  int line_;
  int column_;
};

/// Failures of program rewrites (ArityMismatch, FreeVariable, InconsistentWitness, ...).
class TransformError : public Error {
 public:
  TransformError(std::string kind, const std::string& message)
      : Error(kind + ": " + message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

/// Raised when an enumeration exceeds its configured path budget.
class PathBudgetExceeded : public Error {
 public:
  explicit PathBudgetExceeded(std::size_t limit)
      : Error("PathBudgetExceeded(" + std::to_string(limit) + ")"), limit_(limit) {}
  std::size_t limit() const { return limit_; }

 private:
  std::size_t limit_;
};

/// Fixed-width two's complement helpers. Values are carried as sign-extended int64.
namespace bv {

inline std::uint64_t mask(unsigned width) {
  return width >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << width) - 1);
}

inline std::int64_t wrap(std::int64_t v, unsigned width) {
  if (width >= 64) return v;
  std::uint64_t u = static_cast<std::uint64_t>(v) & mask(width);
  std::uint64_t sign = std::uint64_t{1} << (width - 1);
  if (u & sign) u |= ~mask(width);
  return static_cast<std::int64_t>(u);
}

inline std::uint64_t to_unsigned(std::int64_t v, unsigned width) {
  return static_cast<std::uint64_t>(v) & mask(width);
}

inline std::int64_t min_value(unsigned width) {
  return width >= 64 ? INT64_MIN : -(std::int64_t{1} << (width - 1));
}
inline std::int64_t max_value(unsigned width) {
  return width >= 64 ? INT64_MAX : static_cast<std::int64_t>((std::uint64_t{1} << (width - 1)) - 1);
}

inline std::int64_t add(std::int64_t a, std::int64_t b, unsigned w) {
  return wrap(static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b)), w);
}
inline std::int64_t sub(std::int64_t a, std::int64_t b, unsigned w) {
  return wrap(static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b)), w);
}
inline std::int64_t mul(std::int64_t a, std::int64_t b, unsigned w) {
  return wrap(static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b)), w);
}
inline std::int64_t neg(std::int64_t a, unsigned w) { return sub(0, a, w); }

// Division and remainder by zero yield 0; the overflowing quotient wraps.
inline std::int64_t sdiv(std::int64_t a, std::int64_t b, unsigned w) {
  if (b == 0) return 0;
  if (b == -1) return neg(a, w);
  return wrap(a / b, w);
}
inline std::int64_t srem(std::int64_t a, std::int64_t b, unsigned w) {
  if (b == 0 || b == -1) return 0;
  return wrap(a % b, w);
}

}  // namespace bv
}  // namespace recveq
