#include "crnf/expr_parser.hpp"

#include <cctype>

#include "crnf/errors.hpp"

namespace crnf {

namespace {

struct Parser {
    const std::string& text;
    const Vars& vars;
    int trunc;
    size_t pos = 0;
    int zi = -1, zbi = -1;  // positions of the conjugate pair, when present

    Parser(const std::string& t, const Vars& v, int d) : text(t), vars(v), trunc(d) {
        zi = var_index(vars, "z");
        zbi = var_index(vars, "zb");
    }

    [[noreturn]] void fail(const std::string& what) const {
        raise(ErrorCode::SyntaxError, what + " at position " + std::to_string(pos));
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool at_digit() {
        char c = peek();
        return std::isdigit(static_cast<unsigned char>(c));
    }

    std::string ident() {
        skip_ws();
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        return text.substr(start, pos - start);
    }

    mpz_class integer() {
        skip_ws();
        bool neg = false;
        if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
            neg = text[pos] == '-';
            ++pos;
            skip_ws();
        }
        size_t digits = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == digits) fail("expected an integer");
        mpz_class v(text.substr(digits, pos - digits));
        return neg ? mpz_class(-v) : v;
    }

    Rat rational() {
        mpz_class num = integer();
        if (eat('/')) {
            mpz_class den = integer();
            if (den <= 0) fail("denominator must be positive");
            return rat_from_parts(num, den);
        }
        return Rat(num);
    }

    // rat ['i'] within a coefficient
    GaussRat rational_maybe_i(bool& had_i) {
        Rat r = rational();
        skip_ws();
        had_i = false;
        if (pos < text.size() && text[pos] == 'i' &&
            (pos + 1 >= text.size() || !std::isalnum(static_cast<unsigned char>(text[pos + 1])))) {
            ++pos;
            had_i = true;
            return GaussRat(Rat(0), r);
        }
        return GaussRat(r);
    }

    // coeff := rat | rat 'i' | '(' rat (('+'|'-') rat 'i')? ')'
    // returns false (restoring the position) when no coefficient starts here
    bool try_coeff(GaussRat& out) {
        size_t save = pos;
        skip_ws();
        if (at_digit() || peek() == '-') {
            bool had_i = false;
            out = rational_maybe_i(had_i);
            return true;
        }
        if (peek() == '(') {
            size_t save2 = pos;
            eat('(');
            skip_ws();
            if (!(at_digit() || peek() == '-' || peek() == '+')) {
                pos = save2;
                return false;
            }
            bool had_i = false;
            GaussRat first = rational_maybe_i(had_i);
            skip_ws();
            if (eat(')')) {
                out = first;
                return true;
            }
            char op = peek();
            if ((op == '+' || op == '-') && !had_i) {
                ++pos;
                bool had_i2 = false;
                GaussRat second = rational_maybe_i(had_i2);
                if (!had_i2) {
                    pos = save;
                    return false;  // "(1 + 2)" is a parenthesized expression, not a coefficient
                }
                if (!eat(')')) fail("expected ')' after a complex coefficient");
                out = op == '+' ? first + second : first - second;
                return true;
            }
            pos = save;
            return false;
        }
        return false;
    }

    MultiSeries bar(const MultiSeries& f) {
        if (zi < 0 || zbi < 0)
            fail("re/im/conj/abs2 need the conjugate pair z, zb in the variable list");
        std::array<int, 4> inv{0, 1, 2, 3};
        inv[static_cast<size_t>(zi)] = zbi;
        inv[static_cast<size_t>(zbi)] = zi;
        return f.conj_swap(inv);
    }

    MultiSeries primary() {
        skip_ws();
        if (peek() == '(') {
            eat('(');
            MultiSeries e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        size_t save = pos;
        std::string name = ident();
        if (name.empty()) fail("expected a variable or function");
        if (name == "re" || name == "im" || name == "conj" || name == "abs2") {
            if (!eat('(')) fail("expected '(' after " + name);
            MultiSeries e = expr();
            if (!eat(')')) fail("expected ')'");
            if (name == "conj") return bar(e);
            if (name == "abs2") return e * bar(e);
            if (name == "re") return (e + bar(e)).scaled(GaussRat(Rat(1, 2)));
            return (e - bar(e)).scaled((GaussRat(2) * GaussRat::i()).inverse());
        }
        int v = var_index(vars, name);
        if (v < 0) {
            pos = save;
            raise(ErrorCode::UnknownVariable,
                  "unknown variable '" + name + "' at position " + std::to_string(pos));
        }
        return MultiSeries::variable(vars, trunc, v);
    }

    MultiSeries factor() {
        MultiSeries p = primary();
        if (eat('^')) {
            skip_ws();
            mpz_class e = integer();
            if (e < 0) fail("exponent must be a natural number");
            return MultiSeries::pow(p, static_cast<unsigned>(e.get_ui()));
        }
        return p;
    }

    MultiSeries term() {
        GaussRat c;
        MultiSeries acc = MultiSeries::constant(vars, trunc, GaussRat(1));
        bool have = false;
        if (try_coeff(c)) {
            acc = MultiSeries::constant(vars, trunc, c);
            have = true;
        } else {
            acc = factor();
            have = true;
        }
        while (have && eat('*')) acc = acc * factor();
        return acc;
    }

    MultiSeries expr() {
        bool neg = false;
        skip_ws();
        // a leading '-' is folded into the first coefficient by the tokenizer
        // only when a number follows; allow it before factors too
        if (peek() == '-' && !(pos + 1 < text.size() &&
                               std::isdigit(static_cast<unsigned char>(text[pos + 1])))) {
            ++pos;
            neg = true;
        }
        MultiSeries acc = term();
        if (neg) acc = -acc;
        for (;;) {
            skip_ws();
            if (eat('+')) {
                acc = acc + term();
            } else if (peek() == '-') {
                // subtraction: leave the sign for a numeric coefficient,
                // otherwise consume it
                size_t save = pos;
                ++pos;
                skip_ws();
                if (std::isdigit(static_cast<unsigned char>(peek()))) {
                    pos = save;
                    MultiSeries t = term();  // the coefficient carries the '-'
                    acc = acc + t;
                } else {
                    acc = acc - term();
                }
            } else {
                break;
            }
        }
        return acc;
    }
};

}  // namespace

MultiSeries parse_expr(const std::string& text, const Vars& vars, int trunc) {
    Parser p(text, vars, trunc);
    MultiSeries r = p.expr();
    p.skip_ws();
    if (p.pos != text.size())
        raise(ErrorCode::SyntaxError,
              "unexpected trailing input at position " + std::to_string(p.pos));
    return r;
}

std::string to_expression(const MultiSeries& f) {
    if (f.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& term : f.terms()) {
        const GaussRat& c = term.second;
        if (!first) out += " + ";
        first = false;
        out += "(" + c.re.get_num().get_str() + "/" + c.re.get_den().get_str() + "+" +
               c.im.get_num().get_str() + "/" + c.im.get_den().get_str() + "i)";
        for (int v = 0; v < f.arity(); ++v)
            if (term.first[v] > 0)
                out += " * " + f.vars()[static_cast<size_t>(v)] + "^" + std::to_string(term.first[v]);
    }
    return out;
}

}  // namespace crnf
