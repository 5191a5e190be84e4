#pragma once

#include <stdexcept>
#include <string>

namespace smoothset {

enum class ErrorKind {
  EmptyBox,
  BadMagic,
  Truncated,
  MassOutOfRange,
  BadHeader,
  InvalidArgument,
  EpsilonOutsideWindow,
  TrivialSet,
  RegionEscapesDomain,
  MapRejected,
  Io,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers can map it
/// to an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, const std::string& what,
                    ErrorKind kind = ErrorKind::InvalidArgument) {
  if (!cond) throw Error(kind, what);
}

}  // namespace smoothset
