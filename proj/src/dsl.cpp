#include "tfab/dsl.hpp"

#include <cctype>
#include <map>
#include <optional>

namespace tfab {

namespace {

constexpr std::size_t kMaxIntDigits = 30;
constexpr std::size_t kMaxModulusDigits = 18;

enum class Tok { Ident, Int, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

[[noreturn]] void fail(SourcePos pos, const std::string& msg, ErrorCode code = ErrorCode::ParseError) {
  throw PositionedError(code, pos, msg);
}

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  SourcePos pos;
  std::size_t i = 0;
  auto advance = [&]() {
    if (src[i] == '\n') {
      ++pos.line;
      pos.col = 1;
    } else {
      ++pos.col;
    }
    ++i;
  };
  while (i < src.size()) {
    unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      advance();
    } else if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance();
    } else if (std::isalpha(c) || c == '_') {
      Token t{Tok::Ident, "", pos};
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        t.text += src[i];
        advance();
      }
      out.push_back(std::move(t));
    } else if (std::isdigit(c)) {
      Token t{Tok::Int, "", pos};
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
        t.text += src[i];
        advance();
      }
      if (t.text.size() > kMaxIntDigits) fail(t.pos, "integer literal too long");
      out.push_back(std::move(t));
    } else if (std::string("{};:()/*^+-").find(static_cast<char>(c)) != std::string::npos) {
      out.push_back({Tok::Punct, std::string(1, static_cast<char>(c)), pos});
      advance();
    } else {
      fail(pos, std::string("unexpected character '") + (std::isprint(c) ? std::string(1, static_cast<char>(c)) : "\\x" + std::to_string(c)) + "'");
    }
  }
  out.push_back({Tok::End, "", pos});
  return out;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "'" + t.text + "'";
    case Tok::Int: return "integer " + t.text;
    case Tok::Punct: return "'" + t.text + "'";
  }
  return "?";
}

class Cursor {
 public:
  explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}
  const Token& peek() const { return toks_[i_]; }
  const Token& next() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }
  bool is(const std::string& punct) const { return peek().kind == Tok::Punct && peek().text == punct; }
  bool is_word(const std::string& w) const { return peek().kind == Tok::Ident && peek().text == w; }
  [[noreturn]] void expected(const std::string& what) const { fail(peek().pos, "expected " + what + ", found " + describe(peek())); }
  void punct(const std::string& p) {
    if (!is(p)) expected("'" + p + "'");
    next();
  }
  void word(const std::string& w) {
    if (!is_word(w)) expected("'" + w + "'");
    next();
  }
  const Token& ident(const std::string& what) {
    if (peek().kind != Tok::Ident) expected(what);
    return next();
  }
  const Token& integer(const std::string& what) {
    if (peek().kind != Tok::Int) expected(what);
    return next();
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

Characteristic parse_char(Cursor& cur) {
  Characteristic chi;
  if (cur.is_word("Z")) {
    cur.next();
    return chi;
  }
  std::map<Prime, bool> seen;
  while (true) {
    const Token& pt = cur.integer("prime or 'Z'");
    if (pt.text.size() > 10 || std::stoull(pt.text) >= kMaxPrime) fail(pt.pos, "prime too large");
    Prime p = std::stoull(pt.text);
    if (!is_prime(p)) fail(pt.pos, pt.text + " is not prime");
    if (seen.count(p)) fail(pt.pos, "prime " + pt.text + " repeated");
    seen[p] = true;
    cur.punct("^");
    if (cur.is_word("inf")) {
      cur.next();
      chi.set(p, ExtNat::inf());
    } else {
      const Token& et = cur.integer("exponent or 'inf'");
      if (et.text.size() > 3 || std::stoull(et.text) > kMaxExponent) fail(et.pos, "exponent exceeds " + std::to_string(kMaxExponent));
      chi.set(p, ExtNat(std::stoull(et.text)));
    }
    if (!cur.is("*")) break;
    cur.next();
  }
  return chi;
}

RelDecl parse_rel(Cursor& cur, const PresentationDocument& doc, SourcePos pos) {
  RelDecl r;
  r.pos = pos;
  cur.punct("(");
  bool first = true;
  while (true) {
    int sign = 1;
    if (cur.is("+") || cur.is("-")) {
      sign = cur.next().text == "-" ? -1 : 1;
    } else if (!first) {
      break;
    }
    Int coeff = 1;
    if (cur.peek().kind == Tok::Int) {
      coeff = Int(cur.next().text);
      if (cur.is("*")) cur.next();
    }
    const Token& id = cur.ident("identifier");
    if (doc.index_of(id.text) == std::string::npos) fail(id.pos, "unknown identifier '" + id.text + "'", ErrorCode::UnknownIdentifier);
    r.terms.emplace_back(sign * coeff, id.text);
    first = false;
  }
  cur.punct(")");
  cur.punct("/");
  const Token& mt = cur.integer("modulus");
  if (mt.text.size() > kMaxModulusDigits) fail(mt.pos, "modulus too large");
  r.modulus = Int(mt.text);
  if (r.modulus < 1) fail(mt.pos, "modulus must be positive");
  cur.punct(";");
  ZVec w(doc.base.size(), Int(0));
  for (const auto& [c, id] : r.terms) w[doc.index_of(id)] += c;
  bool zero = true;
  for (const auto& x : w) zero = zero && x == 0;
  if (zero) fail(pos, "relation has zero numerator");
  return r;
}

// Linear form over identifiers plus a constant, used while parsing element expressions.
struct Form {
  QVec v;
  Rat c = 0;
  bool constant() const { return is_zero(v); }
};

class ElementParser {
 public:
  ElementParser(Cursor& cur, const PresentationDocument& doc) : cur_(cur), doc_(doc), n_(doc.base.size()) {}

  Form expr() {
    Form acc{zero_vec(n_), 0};
    bool first = true;
    while (true) {
      int sign = 1;
      if (cur_.is("+") || cur_.is("-")) {
        sign = cur_.next().text == "-" ? -1 : 1;
      } else if (!first) {
        break;
      }
      Form t = term();
      acc.v = add(acc.v, scale(t.v, Rat(sign)));
      acc.c += Rat(sign) * t.c;
      first = false;
    }
    return acc;
  }

 private:
  Form term() {
    Form acc = atom();
    while (cur_.is("*") || cur_.is("/")) {
      Token op = cur_.next();
      Form rhs = atom();
      if (op.text == "*") {
        if (acc.constant()) {
          acc = Form{scale(rhs.v, acc.c), acc.c * rhs.c};
        } else if (rhs.constant()) {
          acc = Form{scale(acc.v, rhs.c), acc.c * rhs.c};
        } else {
          fail(op.pos, "product of two non-constant terms");
        }
      } else {
        if (!rhs.constant() || rhs.c == 0) fail(op.pos, "division by a non-constant or zero");
        acc = Form{scale(acc.v, Rat(1) / rhs.c), acc.c / rhs.c};
      }
    }
    return acc;
  }

  Form atom() {
    if (cur_.is("(")) {
      cur_.next();
      Form f = expr();
      cur_.punct(")");
      return f;
    }
    if (cur_.peek().kind == Tok::Int) return Form{zero_vec(n_), Rat(Int(cur_.next().text))};
    if (cur_.peek().kind == Tok::Ident) {
      const Token& id = cur_.next();
      std::size_t i = doc_.index_of(id.text);
      if (i == std::string::npos) fail(id.pos, "unknown identifier '" + id.text + "'", ErrorCode::UnknownIdentifier);
      return Form{unit_vec(n_, i), 0};
    }
    cur_.expected("identifier, integer or '('");
  }

  Cursor& cur_;
  const PresentationDocument& doc_;
  std::size_t n_;
};

std::string coeff_term(const Rat& c, const std::string& id, bool first) {
  std::string out;
  Rat a = abs(c);
  if (first)
    out = c < 0 ? "-" : "";
  else
    out = c < 0 ? " - " : " + ";
  if (a != 1) out += rat_str(a) + "*";
  return out + id;
}

}  // namespace

std::size_t PresentationDocument::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < base.size(); ++i)
    if (base[i].id == id) return i;
  return std::string::npos;
}

Group PresentationDocument::to_group() const {
  std::vector<Characteristic> chars;
  for (const auto& b : base) chars.push_back(b.chi);
  std::vector<Relation> rels;
  for (const auto& r : relations) {
    ZVec w(base.size(), Int(0));
    for (const auto& [c, id] : r.terms) {
      std::size_t i = index_of(id);
      if (i == std::string::npos) fail(r.pos, "unknown identifier '" + id + "'", ErrorCode::UnknownIdentifier);
      w[i] += c;
    }
    rels.push_back({std::move(w), r.modulus});
  }
  return Group::standard(std::move(chars), std::move(rels));
}

PresentationDocument PresentationDocument::from_group(const std::string& name, const Group& g) {
  PresentationDocument d;
  d.name = name;
  d.rank = g.rank();
  for (std::size_t i = 0; i < g.rank(); ++i) d.base.push_back({"e" + std::to_string(i + 1), g.base()[i].chi, {}});
  for (const auto& r : g.relations()) {
    RelDecl rd;
    rd.modulus = r.m;
    for (std::size_t i = 0; i < r.w.size(); ++i)
      if (r.w[i] != 0) rd.terms.emplace_back(r.w[i], d.base[i].id);
    d.relations.push_back(std::move(rd));
  }
  return d;
}

bool PresentationDocument::same_as(const PresentationDocument& o) const {
  if (name != o.name || rank != o.rank || base.size() != o.base.size() || relations.size() != o.relations.size()) return false;
  for (std::size_t i = 0; i < base.size(); ++i)
    if (base[i].id != o.base[i].id || !(base[i].chi == o.base[i].chi)) return false;
  for (std::size_t i = 0; i < relations.size(); ++i)
    if (relations[i].terms != o.relations[i].terms || relations[i].modulus != o.relations[i].modulus) return false;
  return true;
}

PresentationDocument parse_presentation(const std::string& text) {
  Cursor cur(lex(text));
  PresentationDocument doc;
  SourcePos start = cur.peek().pos;
  cur.word("group");
  doc.name = cur.ident("group name").text;
  cur.punct("{");
  doc.rank_pos = cur.peek().pos;
  cur.word("rank");
  const Token& rt = cur.integer("rank");
  if (rt.text.size() > 3 || std::stoull(rt.text) > kMaxRank) fail(rt.pos, "rank exceeds " + std::to_string(kMaxRank));
  doc.rank = std::stoull(rt.text);
  cur.punct(";");
  while (cur.is_word("base")) {
    SourcePos pos = cur.next().pos;
    const Token& id = cur.ident("identifier");
    if (doc.index_of(id.text) != std::string::npos) fail(id.pos, "identifier '" + id.text + "' declared twice");
    cur.punct(":");
    Characteristic chi = parse_char(cur);
    cur.punct(";");
    doc.base.push_back({id.text, std::move(chi), pos});
  }
  if (doc.base.empty()) cur.expected("'base'");
  while (cur.is_word("rel")) {
    SourcePos pos = cur.next().pos;
    doc.relations.push_back(parse_rel(cur, doc, pos));
  }
  cur.punct("}");
  if (cur.peek().kind != Tok::End) cur.expected("end of input");
  if (doc.rank != doc.base.size())
    fail(doc.rank_pos, "rank " + std::to_string(doc.rank) + " does not match " + std::to_string(doc.base.size()) + " base lines");
  try {
    doc.to_group();
  } catch (const PositionedError&) {
    throw;
  } catch (const Error& e) {
    fail(start, e.what());
  }
  return doc;
}

std::string print_presentation(const PresentationDocument& doc) {
  std::string out = "group " + doc.name + " {\n  rank " + std::to_string(doc.rank) + ";\n";
  for (const auto& b : doc.base) {
    std::string chi;
    if (b.chi.empty()) {
      chi = "Z";
    } else {
      for (const auto& [p, e] : b.chi.entries()) chi += (chi.empty() ? "" : " * ") + std::to_string(p) + "^" + e.str();
    }
    out += "  base " + b.id + " : " + chi + ";\n";
  }
  for (const auto& r : doc.relations) {
    out += "  rel (";
    for (std::size_t i = 0; i < r.terms.size(); ++i) out += coeff_term(Rat(r.terms[i].first), r.terms[i].second, i == 0);
    out += ")/" + r.modulus.get_str() + ";\n";
  }
  return out + "}\n";
}

Element parse_element(const PresentationDocument& doc, const std::string& text) {
  Cursor cur(lex(text));
  ElementParser p(cur, doc);
  Form f = p.expr();
  if (cur.peek().kind != Tok::End) cur.expected("end of expression");
  if (f.c != 0) fail(SourcePos{}, "expression has a non-zero constant term");
  return f.v;
}

std::string print_element(const PresentationDocument& doc, const Element& x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    out += coeff_term(x[i], doc.base[i].id, out.empty());
  }
  return out.empty() ? "0" : out;
}

}  // namespace tfab
