#include "crnwd/csl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstring>
#include <sstream>

#include "crnwd/errors.hpp"

namespace crnwd::csl {

namespace {

FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }

}  // namespace

FormulaPtr Formula::constant(bool v) {
  Formula f;
  f.kind = Kind::constant;
  f.value = v;
  return make(std::move(f));
}

FormulaPtr Formula::linear(std::vector<std::pair<long long, std::string>> terms,
                           Cmp cmp, double rhs) {
  Formula f;
  f.kind = Kind::linear_atom;
  f.terms = std::move(terms);
  f.cmp = cmp;
  f.rhs = rhs;
  return make(std::move(f));
}

FormulaPtr Formula::species_ge(const std::string& species, double rhs) {
  return linear({{1, species}}, Cmp::ge, rhs);
}

FormulaPtr Formula::named(const std::string& name) {
  Formula f;
  f.kind = Kind::named_atom;
  f.name = name;
  return make(std::move(f));
}

FormulaPtr Formula::negate(FormulaPtr a) {
  Formula f;
  f.kind = Kind::negation;
  f.a = std::move(a);
  return make(std::move(f));
}

FormulaPtr Formula::conj(FormulaPtr a, FormulaPtr b) {
  Formula f;
  f.kind = Kind::conjunction;
  f.a = std::move(a);
  f.b = std::move(b);
  return make(std::move(f));
}

FormulaPtr Formula::disj(FormulaPtr a, FormulaPtr b) {
  Formula f;
  f.kind = Kind::disjunction;
  f.a = std::move(a);
  f.b = std::move(b);
  return make(std::move(f));
}

FormulaPtr Formula::implies(FormulaPtr a, FormulaPtr b) {
  Formula f;
  f.kind = Kind::implication;
  f.a = std::move(a);
  f.b = std::move(b);
  return make(std::move(f));
}

namespace {

void check_bounds(double prob, double time) {
  if (!(prob >= 0.0 && prob <= 1.0))
    throw ConfigError("probability bound must lie in [0,1]");
  if (!(time >= 0.0)) throw ConfigError("time bound must be nonnegative");
}

}  // namespace

FormulaPtr Formula::eventually(double prob_bound, double time_bound, FormulaPtr a) {
  check_bounds(prob_bound, time_bound);
  Formula f;
  f.kind = Kind::prob_eventually;
  f.prob_bound = prob_bound;
  f.time_bound = time_bound;
  f.a = std::move(a);
  return make(std::move(f));
}

FormulaPtr Formula::globally(double prob_bound, double time_bound, FormulaPtr a) {
  check_bounds(prob_bound, time_bound);
  Formula f;
  f.kind = Kind::prob_globally;
  f.prob_bound = prob_bound;
  f.time_bound = time_bound;
  f.a = std::move(a);
  return make(std::move(f));
}

FormulaPtr Formula::weak_until(double prob_bound, FormulaPtr a, FormulaPtr b) {
  check_bounds(prob_bound, 0.0);
  Formula f;
  f.kind = Kind::prob_weak_until;
  f.prob_bound = prob_bound;
  f.a = std::move(a);
  f.b = std::move(b);
  return make(std::move(f));
}

FormulaPtr Formula::globally_all_states(FormulaPtr a) {
  Formula f;
  f.kind = Kind::globally_all;
  f.prob_bound = 1.0;
  f.a = std::move(a);
  return make(std::move(f));
}

int prob_nesting_depth(const Formula& f) {
  int sub = 0;
  if (f.a) sub = std::max(sub, prob_nesting_depth(*f.a));
  if (f.b) sub = std::max(sub, prob_nesting_depth(*f.b));
  switch (f.kind) {
    case Formula::Kind::prob_eventually:
    case Formula::Kind::prob_globally:
    case Formula::Kind::prob_weak_until:
    case Formula::Kind::globally_all:
      return sub + 1;
    default:
      return sub;
  }
}

double max_time_bound(const Formula& f) {
  double bound = 0.0;
  switch (f.kind) {
    case Formula::Kind::prob_eventually:
    case Formula::Kind::prob_globally:
      bound = f.time_bound;
      break;
    default:
      break;
  }
  if (f.a) bound = std::max(bound, max_time_bound(*f.a));
  if (f.b) bound = std::max(bound, max_time_bound(*f.b));
  return bound;
}

namespace {

std::string format_number(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back;
    auto res = std::from_chars(buf, buf + std::strlen(buf), back);
    if (res.ec == std::errc() && back == v) break;
  }
  return buf;
}

const char* cmp_text(Cmp c) {
  switch (c) {
    case Cmp::lt: return "<";
    case Cmp::le: return "<=";
    case Cmp::eq: return "=";
    case Cmp::ne: return "!=";
    case Cmp::ge: return ">=";
    case Cmp::gt: return ">";
  }
  return "?";
}

void print(const Formula& f, std::ostream& out) {
  switch (f.kind) {
    case Formula::Kind::constant:
      out << (f.value ? "true" : "false");
      return;
    case Formula::Kind::linear_atom: {
      out << '(';
      bool first = true;
      for (const auto& [coeff, name] : f.terms) {
        long long c = coeff;
        if (first) {
          if (c < 0) {
            out << '-';
            c = -c;
          }
        } else {
          out << (c >= 0 ? " + " : " - ");
          if (c < 0) c = -c;
        }
        if (c != 1) out << c << '*';
        out << name;
        first = false;
      }
      out << ' ' << cmp_text(f.cmp) << ' ' << format_number(f.rhs) << ')';
      return;
    }
    case Formula::Kind::named_atom:
      out << f.name;
      return;
    case Formula::Kind::negation:
      out << '!';
      print(*f.a, out);
      return;
    case Formula::Kind::conjunction:
      out << '(';
      print(*f.a, out);
      out << " & ";
      print(*f.b, out);
      out << ')';
      return;
    case Formula::Kind::disjunction:
      out << '(';
      print(*f.a, out);
      out << " | ";
      print(*f.b, out);
      out << ')';
      return;
    case Formula::Kind::implication:
      out << '(';
      print(*f.a, out);
      out << " -> ";
      print(*f.b, out);
      out << ')';
      return;
    case Formula::Kind::prob_eventually:
      out << "P>=" << format_number(f.prob_bound) << " [ F<="
          << format_number(f.time_bound) << ' ';
      print(*f.a, out);
      out << " ]";
      return;
    case Formula::Kind::prob_globally:
      out << "P>=" << format_number(f.prob_bound) << " [ G<="
          << format_number(f.time_bound) << ' ';
      print(*f.a, out);
      out << " ]";
      return;
    case Formula::Kind::prob_weak_until:
      out << "P>=" << format_number(f.prob_bound) << " [ ";
      print(*f.a, out);
      out << " W ";
      print(*f.b, out);
      out << " ]";
      return;
    case Formula::Kind::globally_all:
      out << "P>=1 [ G ";
      print(*f.a, out);
      out << " ]";
      return;
  }
}

}  // namespace

std::string to_string(const Formula& f) {
  std::ostringstream out;
  print(f, out);
  return out.str();
}

namespace {

struct Parser {
  const std::string& text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  bool try_consume(const char* token) {
    skip_ws();
    std::size_t len = std::strlen(token);
    if (text.compare(pos, len, token) == 0) {
      // Identifier-like tokens must not swallow a longer identifier prefix.
      if (std::isalpha(static_cast<unsigned char>(token[0]))) {
        char next = pos + len < text.size() ? text[pos + len] : '\0';
        if (std::isalnum(static_cast<unsigned char>(next)) || next == '_')
          return false;
      }
      pos += len;
      return true;
    }
    return false;
  }

  void expect(const char* token) {
    if (!try_consume(token)) fail(std::string("expected '") + token + "'");
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg + " in formula", 1, static_cast<int>(pos) + 1);
  }

  double number() {
    skip_ws();
    std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '.' || text[pos] == 'e' || text[pos] == 'E' ||
            ((text[pos] == '+' || text[pos] == '-') && pos > start &&
             (text[pos - 1] == 'e' || text[pos - 1] == 'E'))))
      ++pos;
    if (pos == start) fail("expected number");
    double value;
    auto res = std::from_chars(text.data() + start, text.data() + pos, value);
    if (res.ec != std::errc() || res.ptr != text.data() + pos)
      fail("malformed number");
    return value;
  }

  std::string identifier() {
    skip_ws();
    if (pos >= text.size() ||
        !(std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      fail("expected identifier");
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    return text.substr(start, pos - start);
  }

  FormulaPtr formula() { return implication(); }

  FormulaPtr implication() {
    FormulaPtr lhs = disjunction();
    if (try_consume("->")) return Formula::implies(lhs, implication());
    return lhs;
  }

  FormulaPtr disjunction() {
    FormulaPtr lhs = conjunction();
    while (try_consume("|")) lhs = Formula::disj(lhs, conjunction());
    return lhs;
  }

  FormulaPtr conjunction() {
    FormulaPtr lhs = unary();
    while (try_consume("&")) lhs = Formula::conj(lhs, unary());
    return lhs;
  }

  FormulaPtr unary() {
    if (try_consume("!")) return Formula::negate(unary());
    return primary();
  }

  FormulaPtr primary() {
    skip_ws();
    if (try_consume("(")) {
      FormulaPtr inner = formula();
      expect(")");
      return inner;
    }
    if (try_consume("true")) return Formula::constant(true);
    if (try_consume("false")) return Formula::constant(false);
    if (try_consume("P")) {
      expect(">=");
      double bound = number();
      expect("[");
      FormulaPtr result = path_body(bound);
      expect("]");
      return result;
    }
    return atom();
  }

  FormulaPtr path_body(double bound) {
    skip_ws();
    if (try_consume("F")) {
      expect("<=");
      double t = number();
      return Formula::eventually(bound, t, formula());
    }
    if (try_consume("G")) {
      if (try_consume("<=")) {
        double t = number();
        return Formula::globally(bound, t, formula());
      }
      if (bound != 1.0)
        fail("unbounded G requires probability bound 1");
      return Formula::globally_all_states(formula());
    }
    // weak until: phi W psi
    FormulaPtr phi = formula();
    expect("W");
    FormulaPtr psi = formula();
    return Formula::weak_until(bound, phi, psi);
  }

  FormulaPtr atom() {
    // linear expression or lone named predicate / species comparison
    std::vector<std::pair<long long, std::string>> terms;
    long long sign = 1;
    for (;;) {
      skip_ws();
      long long coeff = sign;
      if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        coeff = sign * static_cast<long long>(number());
        if (!try_consume("*")) fail("expected '*' after coefficient");
      }
      std::string name = identifier();
      terms.emplace_back(coeff, name);
      skip_ws();
      if (try_consume("+")) {
        sign = 1;
        continue;
      }
      // '-' only as term separator, not part of '->'
      skip_ws();
      if (pos < text.size() && text[pos] == '-' &&
          !(pos + 1 < text.size() && text[pos + 1] == '>')) {
        ++pos;
        sign = -1;
        continue;
      }
      break;
    }
    Cmp cmp;
    if (try_consume("<=")) cmp = Cmp::le;
    else if (try_consume(">=")) cmp = Cmp::ge;
    else if (try_consume("!=")) cmp = Cmp::ne;
    else if (try_consume("<")) cmp = Cmp::lt;
    else if (try_consume(">")) cmp = Cmp::gt;
    else if (try_consume("=")) cmp = Cmp::eq;
    else {
      // No comparison: a single named predicate.
      if (terms.size() == 1 && terms[0].first == 1)
        return Formula::named(terms[0].second);
      fail("expected comparison operator");
    }
    double rhs = number();
    return Formula::linear(std::move(terms), cmp, rhs);
  }
};

}  // namespace

FormulaPtr parse_csl(const std::string& text) {
  Parser parser{text};
  FormulaPtr f = parser.formula();
  if (!parser.eof()) parser.fail("trailing characters after formula");
  return f;
}

std::vector<std::pair<std::string, FormulaPtr>> parse_csl_file(
    const std::string& text) {
  std::vector<std::pair<std::string, FormulaPtr>> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int auto_id = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    std::string id;
    std::string body = line;
    auto colon = line.find(':');
    if (colon != std::string::npos) {
      std::string candidate = line.substr(0, colon);
      if (candidate.find_first_of("[]()<>=&|!") == std::string::npos) {
        id = candidate;
        auto b = id.find_first_not_of(" \t");
        auto e = id.find_last_not_of(" \t");
        id = id.substr(b, e - b + 1);
        body = line.substr(colon + 1);
      }
    }
    if (id.empty()) id = "f" + std::to_string(++auto_id);
    try {
      out.emplace_back(id, parse_csl(body));
    } catch (const ParseError& err) {
      throw ParseError(std::string(err.what()), lineno, err.column);
    }
  }
  return out;
}

}  // namespace crnwd::csl
