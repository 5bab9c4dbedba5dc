#pragma once

#include <charconv>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ucalc/calculus.hpp"
#include "ucalc/field.hpp"
#include "ucalc/function.hpp"
#include "ucalc/reps.hpp"

namespace ucalc::io {

namespace detail {

inline std::int64_t parse_int(std::string_view s, int line, int col) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError(line, col, "expected an integer, got '" + std::string(s) + "'");
  return v;
}

inline Digits parse_digit_list(std::string_view s, int line, int col) {
  Digits out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string_view tok = s.substr(pos, comma == std::string_view::npos ? s.size() - pos
                                                                         : comma - pos);
    out.push_back(static_cast<Digit>(parse_int(tok, line, col + static_cast<int>(pos))));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// Scalar grammar, any backend:
///   0                          exact zero
///   <int>                      integer literal (canonical embedding)
///   v:<int> u:<d0,d1,...>      valuation + unit digits (canonical output form)
///   O(pi^<int>)                zero at precision (diagnostics only)
///   <c>[*pi[^k]] + ...         polynomial in pi, e.g. 1+2*pi^3, -pi^2
inline Scalar parse_scalar(const FieldParams& par, std::string_view text, int line = 1,
                           int col = 1) {
  using detail::parse_int;
  std::string_view s = detail::trim(text);
  if (s.empty()) throw ParseError(line, col, "empty scalar");
  if (s == "0") return Scalar::zero(par);
  if (s.starts_with("O(pi^") && s.ends_with(")"))
    return Scalar::below_precision(
        par, static_cast<int>(parse_int(s.substr(5, s.size() - 6), line, col)));
  if (s.starts_with("v:")) {
    std::size_t sp = s.find(' ');
    if (sp == std::string_view::npos || !detail::trim(s.substr(sp + 1)).starts_with("u:"))
      throw ParseError(line, col, "expected 'v:<int> u:<digits>'");
    int v = static_cast<int>(parse_int(s.substr(2, sp - 2), line, col));
    std::string_view us = detail::trim(s.substr(sp + 1));
    Digits ds = detail::parse_digit_list(us.substr(2), line, col + static_cast<int>(sp));
    if (ds.size() > static_cast<std::size_t>(par.precision))
      throw ParseError(line, col, "more digits than the working precision");
    try {
      return Scalar::from_digits(par, v, std::move(ds));
    } catch (const DomainError& e) {
      throw ParseError(line, col, e.what());
    }
  }
  // integer literal or polynomial in pi
  Scalar acc = Scalar::zero(par);
  std::size_t pos = 0;
  bool any = false;
  while (pos < s.size()) {
    std::size_t start = pos;
    if (s[pos] == '+' || s[pos] == '-') ++pos;
    while (pos < s.size() && s[pos] != '+' && s[pos] != '-') ++pos;
    std::string_view term = detail::trim(s.substr(start, pos - start));
    if (term.empty() || term == "+" || term == "-")
      throw ParseError(line, col + static_cast<int>(start), "empty term in scalar");
    bool negative = term.front() == '-';
    if (term.front() == '+' || term.front() == '-') term = detail::trim(term.substr(1));
    std::int64_t coeff = 1;
    int pipow = 0;
    std::size_t star = term.find("pi");
    if (star == std::string_view::npos) {
      coeff = parse_int(term, line, col + static_cast<int>(start));
    } else {
      std::string_view head = detail::trim(term.substr(0, star));
      if (!head.empty()) {
        if (head.back() == '*') head = detail::trim(head.substr(0, head.size() - 1));
        if (!head.empty()) coeff = parse_int(head, line, col + static_cast<int>(start));
      }
      std::string_view tail = term.substr(star + 2);
      if (tail.starts_with("^"))
        pipow = static_cast<int>(parse_int(tail.substr(1), line, col + static_cast<int>(start)));
      else if (!tail.empty())
        throw ParseError(line, col + static_cast<int>(start),
                         "expected 'pi' or 'pi^<k>' in term '" + std::string(term) + "'");
      else
        pipow = 1;
    }
    Scalar t = mul(Scalar::from_int(par, negative ? -coeff : coeff),
                   pow(Scalar::uniformizer(par), pipow));
    acc = add(acc, t);
    any = true;
  }
  if (!any) throw ParseError(line, col, "malformed scalar '" + std::string(s) + "'");
  return acc;
}

inline std::string serialize_scalar(const Scalar& s) {
  switch (s.kind()) {
    case ScalarKind::Zero:
      return "0";
    case ScalarKind::BelowPrecision:
      return "O(pi^" + std::to_string(s.cap()) + ")";
    case ScalarKind::NonZero:
      break;
  }
  std::string out = "v:" + std::to_string(s.valuation_or_throw()) + " u:";
  for (std::size_t i = 0; i < s.unit().size(); ++i) {
    if (i) out += ',';
    out += std::to_string(s.unit()[i]);
  }
  return out;
}

namespace detail {

struct HeaderInfo {
  FieldParams par;
  int level = 0;
  int depth = 0;
  std::size_t body_start_line = 0;
  std::vector<std::string> lines;
};

inline HeaderInfo parse_header(const std::string& text) {
  HeaderInfo h;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) h.lines.push_back(line);
  std::size_t i = 0;
  auto next_significant = [&](const char* what) -> std::string_view {
    while (i < h.lines.size()) {
      std::string_view s = trim(h.lines[i]);
      if (!s.empty() && !s.starts_with("#")) return s;
      ++i;
    }
    throw ParseError(static_cast<int>(h.lines.size()), 1,
                     std::string("missing ") + what + " line");
  };

  std::string_view fl = next_significant("'field'");
  int ln = static_cast<int>(i) + 1;
  {
    std::istringstream ls{std::string(fl)};
    std::string kw, backend, ptok, prectok;
    ls >> kw >> backend >> ptok >> prectok;
    if (kw != "field" || ls.fail())
      throw ParseError(ln, 1, "expected 'field <zp|fpt> p=<int> prec=<int>'");
    if (backend == "zp")
      h.par.backend = Backend::Zp;
    else if (backend == "fpt")
      h.par.backend = Backend::FpT;
    else
      throw ParseError(ln, 7, "unknown backend '" + backend + "'");
    if (!ptok.starts_with("p=") || !prectok.starts_with("prec="))
      throw ParseError(ln, 1, "expected 'field <zp|fpt> p=<int> prec=<int>'");
    h.par.p = parse_int(std::string_view(ptok).substr(2), ln, 1);
    h.par.precision = static_cast<int>(parse_int(std::string_view(prectok).substr(5), ln, 1));
    try {
      validate(h.par);
    } catch (const DomainError& e) {
      throw ParseError(ln, 1, e.what());
    }
  }
  ++i;

  std::string_view ll = next_significant("'level'");
  ln = static_cast<int>(i) + 1;
  {
    std::istringstream ls{std::string(ll)};
    std::string kw, dw;
    long long level = -1, depth = -1;
    ls >> kw >> level >> dw >> depth;
    if (kw != "level" || dw != "depth" || ls.fail())
      throw ParseError(ln, 1, "expected 'level <n> depth <m>'");
    h.level = static_cast<int>(level);
    h.depth = static_cast<int>(depth);
  }
  ++i;
  h.body_start_line = i;
  return h;
}

struct BodyEntry {
  Rep r;
  int j = 0;
  Scalar value;
};

inline std::vector<BodyEntry> parse_body(const HeaderInfo& h, const char* keyword,
                                         const char* valuekey) {
  std::vector<BodyEntry> out;
  for (std::size_t i = h.body_start_line; i < h.lines.size(); ++i) {
    std::string_view s = trim(h.lines[i]);
    if (s.empty() || s.starts_with("#")) continue;
    int ln = static_cast<int>(i) + 1;
    std::string_view rest = s;
    auto eat = [&](std::string_view tok) {
      rest = trim(rest);
      if (!rest.starts_with(tok))
        throw ParseError(ln, static_cast<int>(s.size() - rest.size()) + 1,
                         "expected '" + std::string(tok) + "'");
      rest.remove_prefix(tok.size());
    };
    eat(keyword);
    eat("r=");
    std::size_t sp = rest.find(' ');
    if (sp == std::string_view::npos) throw ParseError(ln, 1, "missing j=");
    std::string_view rdigits = rest.substr(0, sp);
    rest.remove_prefix(sp);
    BodyEntry e;
    e.r = Rep::from_digits(h.par, parse_digit_list(rdigits, ln, 1));
    eat("j=");
    sp = rest.find(' ');
    if (sp == std::string_view::npos)
      throw ParseError(ln, 1, std::string("missing ") + valuekey + "=");
    e.j = static_cast<int>(parse_int(rest.substr(0, sp), ln, 1));
    rest.remove_prefix(sp);
    eat(std::string(valuekey) + "=");
    e.value = parse_scalar(h.par, rest, ln, static_cast<int>(s.size() - rest.size()) + 1);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace detail

/// Function file:
///   field <zp|fpt> p=<int> prec=<int>
///   level <n> depth <m>
///   term r=<d0,d1,...> j=<int> c=<scalar>     (r= empty means r = 0)
/// Input is order-insensitive; duplicate (r, j) keys are rejected.
inline CnCombo parse_function(const std::string& text) {
  detail::HeaderInfo h = detail::parse_header(text);
  CnCombo f(h.par, h.level, h.depth);
  for (auto& e : detail::parse_body(h, "term", "c")) {
    if (f.coefficient(e.r, e.j).is_nonzero())
      throw ParseError(1, 1, "duplicate term key r=" + rep_to_string(e.r) +
                                 " j=" + std::to_string(e.j));
    try {
      f.set_term(e.r, e.j, e.value);
    } catch (const Error& err) {
      throw ParseError(1, 1, err.what());
    }
  }
  return f;
}

inline std::string header_text(const FieldParams& par, int level, int depth) {
  std::string out = "field ";
  out += backend_name(par.backend);
  out += " p=" + std::to_string(par.p) + " prec=" + std::to_string(par.precision) + "\n";
  out += "level " + std::to_string(level) + " depth " + std::to_string(depth) + "\n";
  return out;
}

inline std::string serialize_function(const CnCombo& f) {
  std::string out = header_text(f.params(), f.level(), f.depth());
  for (const auto& [key, c] : f.terms()) {
    out += "term r=" + rep_to_string(key.r) + " j=" + std::to_string(key.j) +
           " c=" + serialize_scalar(c) + "\n";
  }
  return out;
}

inline CoeffTable parse_table(const std::string& text) {
  detail::HeaderInfo h = detail::parse_header(text);
  CoeffTable t(h.par, h.level, h.depth);
  for (auto& e : detail::parse_body(h, "b", "v")) {
    if (t.entry(e.r, e.j).is_nonzero())
      throw ParseError(1, 1, "duplicate table key r=" + rep_to_string(e.r) +
                                 " j=" + std::to_string(e.j));
    t.set_entry(e.r, e.j, e.value);
  }
  return t;
}

inline std::string serialize_table(const CoeffTable& t) {
  std::string out = header_text(t.params(), t.level(), t.depth());
  for (const auto& [key, b] : t.entries()) {
    out += "b r=" + rep_to_string(key.r) + " j=" + std::to_string(key.j) +
           " v=" + serialize_scalar(b) + "\n";
  }
  return out;
}

}  // namespace ucalc::io
