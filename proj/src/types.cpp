#include "tfab/types.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace tfab {

Characteristic::Characteristic(const std::map<Prime, ExtNat>& entries) {
  for (const auto& [p, e] : entries) set(p, e);
}

ExtNat Characteristic::at(Prime p) const {
  auto it = entries_.find(p);
  return it == entries_.end() ? ExtNat(0) : it->second;
}

void Characteristic::set(Prime p, ExtNat e) {
  if (e == ExtNat(0))
    entries_.erase(p);
  else
    entries_[p] = e;
}

std::string Characteristic::str() const {
  if (entries_.empty()) return "Z";
  std::string out;
  for (const auto& [p, e] : entries_) {
    if (!out.empty()) out += " * ";
    out += std::to_string(p) + "^" + e.str();
  }
  return out;
}

namespace {

std::string strip(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::uint64_t parse_u64(const std::string& s, const std::string& ctx) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw Error(ErrorCode::ParseError, "expected integer in '" + ctx + "'");
  if (s.size() > 18) throw Error(ErrorCode::ParseError, "integer too large in '" + ctx + "'");
  return std::stoull(s);
}

}  // namespace

Characteristic Characteristic::parse(const std::string& text) {
  std::string t = strip(text);
  Characteristic c;
  if (t == "Z") return c;
  std::stringstream ss(t);
  std::string term;
  while (std::getline(ss, term, '*')) {
    term = strip(term);
    auto caret = term.find('^');
    Prime p = parse_u64(strip(term.substr(0, caret)), term);
    if (!is_prime(p)) throw Error(ErrorCode::NonPrimeInUniverse, std::to_string(p) + " is not prime");
    std::string ex = caret == std::string::npos ? "1" : strip(term.substr(caret + 1));
    ExtNat e = ex == "inf" ? ExtNat::inf() : ExtNat(parse_u64(ex, term));
    if (c.entries_.count(p)) throw Error(ErrorCode::ParseError, "prime repeated in '" + t + "'");
    c.set(p, e);
  }
  return c;
}

std::string TypeClass::str() const {
  std::string out = "{";
  bool first = true;
  for (auto p : primes_) {
    if (!first) out += ",";
    out += std::to_string(p);
    first = false;
  }
  return out + "}";
}

TypeClass TypeClass::parse(const std::string& text) {
  std::string t = strip(text);
  if (!t.empty() && t.front() == '{') {
    if (t.back() != '}') throw Error(ErrorCode::ParseError, "unbalanced braces in type '" + t + "'");
    t = t.substr(1, t.size() - 2);
  }
  std::set<Prime> ps;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = strip(item);
    if (item.empty()) continue;
    Prime p = parse_u64(item, text);
    if (!is_prime(p)) throw Error(ErrorCode::NonPrimeInUniverse, std::to_string(p) + " is not prime");
    ps.insert(p);
  }
  return TypeClass(std::move(ps));
}

CharOrder char_compare(const Characteristic& a, const Characteristic& b) {
  bool le = true, ge = true;
  std::set<Prime> support;
  for (const auto& [p, e] : a.entries()) support.insert(p);
  for (const auto& [p, e] : b.entries()) support.insert(p);
  for (auto p : support) {
    ExtNat x = a.at(p), y = b.at(p);
    if (x < y) ge = false;
    if (x > y) le = false;
  }
  if (le && ge) return CharOrder::EQ;
  if (le) return CharOrder::LE;
  if (ge) return CharOrder::GE;
  return CharOrder::INCOMPARABLE;
}

Characteristic char_inf(const Characteristic& a, const Characteristic& b) {
  Characteristic out;
  for (const auto& [p, e] : a.entries()) out.set(p, min(e, b.at(p)));
  return out;
}

TypeClass type_of_char(const Characteristic& a) {
  std::set<Prime> ps;
  for (const auto& [p, e] : a.entries())
    if (e.is_inf()) ps.insert(p);
  return TypeClass(std::move(ps));
}

bool type_le(const TypeClass& t1, const TypeClass& t2) {
  return std::includes(t2.inf_primes().begin(), t2.inf_primes().end(), t1.inf_primes().begin(),
                       t1.inf_primes().end());
}

TypeClass type_meet(const TypeClass& t1, const TypeClass& t2) {
  std::set<Prime> out;
  std::set_intersection(t1.inf_primes().begin(), t1.inf_primes().end(), t2.inf_primes().begin(),
                        t2.inf_primes().end(), std::inserter(out, out.begin()));
  return TypeClass(std::move(out));
}

std::string types_str(const TypeMultiset& types) {
  std::string out = "[";
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (i) out += ", ";
    out += types[i].str();
  }
  return out + "]";
}

}  // namespace tfab
