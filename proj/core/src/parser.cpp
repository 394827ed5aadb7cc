#include "crnwd/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace crnwd {

namespace {

struct Cursor {
  const std::string* text_ptr;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  const std::string& text() const { return *text_ptr; }
  bool eof() const { return pos >= text().size(); }
  char peek() const { return text()[pos]; }

  void advance() {
    if (text()[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  // Skips spaces, tabs, CR and comments but stops at newline.
  void skip_inline_ws() {
    while (!eof()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, col);
  }
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string read_identifier(Cursor& cur) {
  if (cur.eof() || !ident_start(cur.peek())) cur.fail("expected identifier");
  std::string s;
  while (!cur.eof() && ident_char(cur.peek())) {
    s.push_back(cur.peek());
    cur.advance();
  }
  return s;
}

Count read_integer(Cursor& cur) {
  if (cur.eof() || !std::isdigit(static_cast<unsigned char>(cur.peek())))
    cur.fail("expected integer");
  Count v = 0;
  while (!cur.eof() && std::isdigit(static_cast<unsigned char>(cur.peek()))) {
    v = v * 10 + (cur.peek() - '0');
    cur.advance();
  }
  return v;
}

double read_real(Cursor& cur) {
  std::size_t start = cur.pos;
  auto accept = [&](auto pred) {
    while (!cur.eof() && pred(cur.peek())) cur.advance();
  };
  if (!cur.eof() && (cur.peek() == '+' || cur.peek() == '-')) cur.advance();
  accept([](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  if (!cur.eof() && cur.peek() == '.') {
    cur.advance();
    accept([](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  }
  if (!cur.eof() && (cur.peek() == 'e' || cur.peek() == 'E')) {
    cur.advance();
    if (!cur.eof() && (cur.peek() == '+' || cur.peek() == '-')) cur.advance();
    accept([](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  }
  if (cur.pos == start) cur.fail("expected real number");
  double value;
  auto res = std::from_chars(cur.text().data() + start,
                             cur.text().data() + cur.pos, value);
  if (res.ec != std::errc() || res.ptr != cur.text().data() + cur.pos)
    cur.fail("malformed real number");
  return value;
}

// side := "0" | term ("+" term)*,  term := [int] identifier
std::vector<std::pair<std::string, Count>> read_side(Cursor& cur) {
  std::vector<std::pair<std::string, Count>> terms;
  cur.skip_inline_ws();
  if (!cur.eof() && cur.peek() == '0') {
    cur.advance();
    return terms;  // empty side
  }
  for (;;) {
    cur.skip_inline_ws();
    Count stoich = 1;
    if (!cur.eof() && std::isdigit(static_cast<unsigned char>(cur.peek()))) {
      stoich = read_integer(cur);
      if (stoich < 1) cur.fail("stoichiometry must be positive");
      cur.skip_inline_ws();
    }
    std::string name = read_identifier(cur);
    auto it = std::find_if(terms.begin(), terms.end(),
                           [&](const auto& t) { return t.first == name; });
    if (it != terms.end())
      it->second += stoich;
    else
      terms.emplace_back(name, stoich);
    cur.skip_inline_ws();
    if (!cur.eof() && cur.peek() == '+') {
      cur.advance();
      continue;
    }
    break;
  }
  return terms;
}

std::string format_real(double v) {
  // Shortest representation that round-trips a double.
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back;
    auto res = std::from_chars(buf, buf + std::strlen(buf), back);
    if (res.ec == std::errc() && back == v) break;
  }
  return buf;
}

}  // namespace

CrnDocument parse_crn(const std::string& text, bool strict) {
  CrnDocument doc;
  std::set<std::string> declared;
  std::vector<std::string> order;

  auto note_species = [&](const std::string& name, Cursor& cur) {
    if (declared.insert(name).second) {
      if (strict && doc.explicit_declarations)
        cur.fail("undeclared species '" + name + "' in strict mode");
      order.push_back(name);
    }
  };

  Cursor cur{&text};
  while (!cur.eof()) {
    cur.skip_inline_ws();
    if (cur.eof()) break;
    if (cur.peek() == '\n') {
      cur.advance();
      continue;
    }
    if (ident_start(cur.peek())) {
      // Could be a directive or the first species of a reaction.  Directives
      // are decided by the keyword.
      Cursor saved = cur;
      std::string word = read_identifier(cur);
      if (word == "species") {
        doc.explicit_declarations = true;
        cur.skip_inline_ws();
        while (!cur.eof() && cur.peek() != '\n') {
          std::string name = read_identifier(cur);
          if (declared.insert(name).second) order.push_back(name);
          cur.skip_inline_ws();
          if (!cur.eof() && cur.peek() == ',') {
            cur.advance();
            cur.skip_inline_ws();
          }
        }
        continue;
      }
      if (word == "init") {
        cur.skip_inline_ws();
        std::string name = read_identifier(cur);
        cur.skip_inline_ws();
        if (cur.eof() || cur.peek() != '=') cur.fail("expected '=' after init species");
        cur.advance();
        cur.skip_inline_ws();
        Count value = read_integer(cur);
        if (doc.init.count(name)) cur.fail("duplicate init entry for " + name);
        note_species(name, cur);
        doc.init[name] = value;
        continue;
      }
      if (word == "volume") {
        cur.skip_inline_ws();
        if (cur.eof() || cur.peek() != '=') cur.fail("expected '=' after volume");
        cur.advance();
        cur.skip_inline_ws();
        double v = read_real(cur);
        if (!(v > 0)) cur.fail("volume must be positive");
        doc.volume = v;
        continue;
      }
      // Not a directive: rewind and parse a reaction line.
      cur = saved;
    } else if (!std::isdigit(static_cast<unsigned char>(cur.peek()))) {
      cur.fail("unexpected character");
    }

    CrnDocument::DocReaction rxn;
    rxn.reactants = read_side(cur);
    cur.skip_inline_ws();
    if (cur.eof() || cur.peek() != '-') cur.fail("expected '->'");
    cur.advance();
    if (cur.eof() || cur.peek() != '>') cur.fail("expected '->'");
    cur.advance();
    cur.skip_inline_ws();
    if (!cur.eof() && cur.peek() == '{') {
      cur.advance();
      cur.skip_inline_ws();
      rxn.rate = read_real(cur);
      if (!(rxn.rate > 0)) cur.fail("rate must be positive");
      cur.skip_inline_ws();
      if (cur.eof() || cur.peek() != '}') cur.fail("expected '}' after rate");
      cur.advance();
    }
    rxn.products = read_side(cur);
    for (const auto& [name, _] : rxn.reactants) note_species(name, cur);
    for (const auto& [name, _] : rxn.products) note_species(name, cur);
    doc.reactions.push_back(std::move(rxn));

    cur.skip_inline_ws();
    if (!cur.eof() && cur.peek() != '\n') cur.fail("trailing characters after reaction");
  }

  doc.species = std::move(order);
  return doc;
}

std::string serialize_crn(const CrnDocument& doc) {
  std::ostringstream out;
  std::vector<std::string> sorted = doc.species;
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty()) {
    out << "species";
    for (const auto& s : sorted) out << ' ' << s;
    out << '\n';
  }
  auto emit_side = [&](const std::vector<std::pair<std::string, Count>>& side) {
    if (side.empty()) {
      out << '0';
      return;
    }
    bool first = true;
    for (const auto& [name, stoich] : side) {
      if (!first) out << " + ";
      first = false;
      if (stoich != 1) out << stoich << ' ';
      out << name;
    }
  };
  for (const auto& rxn : doc.reactions) {
    emit_side(rxn.reactants);
    out << " ->{" << format_real(rxn.rate) << "} ";
    emit_side(rxn.products);
    out << '\n';
  }
  for (const auto& [name, count] : doc.init)
    out << "init " << name << " = " << count << '\n';
  out << "volume = " << format_real(doc.volume) << '\n';
  return out.str();
}

bool documents_equal(const CrnDocument& a, const CrnDocument& b) {
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted(a.species) != sorted(b.species)) return false;
  if (a.volume != b.volume) return false;
  if (a.init != b.init) return false;
  if (a.reactions.size() != b.reactions.size()) return false;
  auto sorted_terms = [](std::vector<std::pair<std::string, Count>> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  for (std::size_t i = 0; i < a.reactions.size(); ++i) {
    const auto& ra = a.reactions[i];
    const auto& rb = b.reactions[i];
    if (ra.rate != rb.rate) return false;
    if (sorted_terms(ra.reactants) != sorted_terms(rb.reactants)) return false;
    if (sorted_terms(ra.products) != sorted_terms(rb.products)) return false;
  }
  return true;
}

Crn to_crn(const CrnDocument& doc) {
  std::vector<Species> species;
  species.reserve(doc.species.size());
  for (std::size_t i = 0; i < doc.species.size(); ++i)
    species.push_back({doc.species[i], i});
  Crn index_only(species, {}, doc.volume);

  std::vector<Reaction> reactions;
  reactions.reserve(doc.reactions.size());
  for (const auto& drxn : doc.reactions) {
    Reaction rxn;
    rxn.rate_constant = drxn.rate;
    for (const auto& [name, stoich] : drxn.reactants)
      rxn.reactants.push_back({index_only.species_index(name), stoich});
    for (const auto& [name, stoich] : drxn.products)
      rxn.products.push_back({index_only.species_index(name), stoich});
    reactions.push_back(std::move(rxn));
  }
  return Crn(std::move(species), std::move(reactions), doc.volume);
}

State initial_state(const CrnDocument& doc, const Crn& crn) {
  std::vector<std::pair<std::string, Count>> counts(doc.init.begin(), doc.init.end());
  return make_state(crn, counts);
}

CrnDocument to_document(const Crn& crn, const State& init) {
  CrnDocument doc;
  doc.volume = crn.volume();
  doc.explicit_declarations = true;
  for (const auto& sp : crn.species()) doc.species.push_back(sp.name);
  for (const auto& rxn : crn.reactions()) {
    CrnDocument::DocReaction drxn;
    drxn.rate = rxn.rate_constant;
    for (const auto& term : rxn.reactants)
      drxn.reactants.emplace_back(crn.species()[term.species].name, term.stoich);
    for (const auto& term : rxn.products)
      drxn.products.emplace_back(crn.species()[term.species].name, term.stoich);
    doc.reactions.push_back(std::move(drxn));
  }
  if (init.size() != crn.species_count())
    throw StructuralError("initial state does not match species count");
  for (std::size_t i = 0; i < init.size(); ++i)
    if (init[i] != 0) doc.init[crn.species()[i].name] = init[i];
  return doc;
}

CrnDocument load_crn_file(const std::string& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_crn(buf.str(), strict);
}

void write_crn_file(const std::string& path, const CrnDocument& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write model file: " + path);
  out << serialize_crn(doc);
}

}  // namespace crnwd
