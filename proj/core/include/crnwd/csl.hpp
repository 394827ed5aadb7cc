#pragma once

#include <memory>
#include <string>
#include <vector>

#include "crnwd/crn.hpp"

namespace crnwd::csl {

enum class Cmp { lt, le, eq, ne, ge, gt };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Time-bounded CSL fragment: atoms are comparisons over linear count
/// expressions or named predicates; probabilistic operators are bounded
/// eventually/globally, weak until, and the unbounded P>=1 globally.
struct Formula {
  enum class Kind {
    constant,
    linear_atom,  // sum coeff*species  cmp  rhs
    named_atom,   // Reset, ThH, ThL, Alarm, Hpres, Hdet, hbHigh, hbLow, healthy
    negation,
    conjunction,
    disjunction,
    implication,
    prob_eventually,  // P>=p [ F<=t a ]
    prob_globally,    // P>=p [ G<=t a ]
    prob_weak_until,  // P>=p [ a W b ]
    globally_all,     // P>=1 [ G a ]   (all reachable states)
  };

  Kind kind = Kind::constant;
  bool value = true;  // constant
  std::vector<std::pair<long long, std::string>> terms;  // linear_atom
  Cmp cmp = Cmp::ge;
  double rhs = 0.0;
  std::string name;  // named_atom
  FormulaPtr a, b;
  double prob_bound = 1.0;
  double time_bound = 0.0;

  static FormulaPtr constant(bool v);
  static FormulaPtr linear(std::vector<std::pair<long long, std::string>> terms,
                           Cmp cmp, double rhs);
  static FormulaPtr species_ge(const std::string& species, double rhs);
  static FormulaPtr named(const std::string& name);
  static FormulaPtr negate(FormulaPtr a);
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr disj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr implies(FormulaPtr a, FormulaPtr b);
  static FormulaPtr eventually(double prob_bound, double time_bound, FormulaPtr a);
  static FormulaPtr globally(double prob_bound, double time_bound, FormulaPtr a);
  static FormulaPtr weak_until(double prob_bound, FormulaPtr a, FormulaPtr b);
  static FormulaPtr globally_all_states(FormulaPtr a);
};

/// Nesting depth of probabilistic operators (atoms are 0).
int prob_nesting_depth(const Formula& f);

/// Largest time bound appearing anywhere in the formula.
double max_time_bound(const Formula& f);

/// Concrete syntax, e.g.
///   P>=0.9 [ F<=10.0 (D >= 3) ]
///   P>=1 [ G (Hpres -> P>=0.95 [ F<=2 Hdet ]) ]
///   P>=0.99 [ (!Alarm) W (!ThL) ]
std::string to_string(const Formula& f);

FormulaPtr parse_csl(const std::string& text);

/// A .csl file: one `id: formula` per line, '#' comments; a bare formula
/// line gets an automatic id f<N>.
std::vector<std::pair<std::string, FormulaPtr>> parse_csl_file(
    const std::string& text);

}  // namespace crnwd::csl
