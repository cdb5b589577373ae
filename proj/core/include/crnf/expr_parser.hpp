#pragma once

#include <string>

#include "crnf/series.hpp"

namespace crnf {

// Defining-expression grammar:
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := coeff ('*' factor)* | factor ('*' factor)*
//   factor := primary ('^' nat)?
//   primary:= var | 're(' expr ')' | 'im(' expr ')' | 'conj(' expr ')'
//           | 'abs2(' expr ')' | '(' expr ')'
//   coeff  := rat | rat 'i' | '(' rat (('+'|'-') rat 'i')? ')'
//   rat    := int ('/' posint)?
// re/im/conj/abs2 use the bar operation z <-> zb (coefficients conjugated),
// so they are only available on variable lists containing that pair.
MultiSeries parse_expr(const std::string& text, const Vars& vars, int trunc);

// Grammar-conformant rendering of a series (parse(to_expression(f)) == f).
std::string to_expression(const MultiSeries& f);

}  // namespace crnf
