#pragma once

#include "tfab/group.hpp"

#include <string>
#include <vector>

namespace tfab {

struct SourcePos {
  std::size_t line = 1, col = 1;
  bool operator==(const SourcePos&) const = default;
};

/// A parse or name-resolution failure at a position in the source text.
class PositionedError : public Error {
 public:
  PositionedError(ErrorCode code, SourcePos pos, const std::string& msg)
      : Error(code, std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + msg), pos_(pos), msg_(msg) {}
  SourcePos pos() const { return pos_; }
  const std::string& message() const { return msg_; }

 private:
  SourcePos pos_;
  std::string msg_;
};

struct BaseDecl {
  std::string id;
  Characteristic chi;
  SourcePos pos;
};

struct RelDecl {
  std::vector<std::pair<Int, std::string>> terms;  // coefficient, identifier; in source order
  Int modulus;
  SourcePos pos;
};

/// Concrete syntax of a presentation. Base directions are the standard basis of Q^rank, in
/// declaration order.
struct PresentationDocument {
  std::string name;
  std::size_t rank = 0;
  SourcePos rank_pos;
  std::vector<BaseDecl> base;
  std::vector<RelDecl> relations;

  /// Index of a declared identifier, or npos.
  std::size_t index_of(const std::string& id) const;
  Group to_group() const;
  /// Identifiers e1..en, characteristics and relations of g in base coordinates.
  static PresentationDocument from_group(const std::string& name, const Group& g);

  /// Structural equality ignoring positions.
  bool same_as(const PresentationDocument& o) const;
};

/// Limits that keep malformed inputs cheap to reject.
inline constexpr std::uint64_t kMaxExponent = 64;
inline constexpr std::uint64_t kMaxPrime = 1ull << 31;
inline constexpr std::size_t kMaxRank = 64;

/// Throws PositionedError with code ParseError or UnknownIdentifier.
PresentationDocument parse_presentation(const std::string& text);
std::string print_presentation(const PresentationDocument& doc);

/// Rational linear combination of declared identifiers, e.g. "(e1 + e2)/3" or "2*e1 - e2/5".
/// Throws PositionedError.
Element parse_element(const PresentationDocument& doc, const std::string& text);
std::string print_element(const PresentationDocument& doc, const Element& x);

}  // namespace tfab
