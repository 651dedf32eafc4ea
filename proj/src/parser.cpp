#include "hdes/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "hdes/error.hpp"
#include "hdes/numeric.hpp"

namespace hdes {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

const std::set<std::string> kReserved = {"var", "fun", "param", "eq", "bc", "option", "in",
                                         "D",   "sqrt", "sin", "cos", "exp"};

const std::set<std::string> kNumericOptions = {"max_iter", "qubits", "depth", "samples", "eta", "eps"};
const std::set<std::string> kStrategies = {"penalty", "floating", "tangential"};

enum class Mode { Constant, Equation };

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    DESystem run() {
        while (peek().kind != TokenKind::End) statement();
        if (sys_.equations.empty()) fail(peek().loc, "problem has no equations");
        for (std::size_t f = 0; f < sys_.functions.size(); ++f) {
            const bool used = std::any_of(sys_.slots.begin(), sys_.slots.end(),
                                          [&](const Slot& s) { return s.function == f; });
            if (!used)
                fail(sys_.functions[f].loc, "function '" + sys_.functions[f].name + "' does not appear in any equation");
        }
        return std::move(sys_);
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    DESystem sys_;
    std::set<std::string> declared_;
    std::set<std::string> option_keys_;

    [[noreturn]] static void fail(const SourceLoc& loc, const std::string& msg) {
        throw ParseError(loc.line, loc.column, msg);
    }

    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token& advance() {
        const Token& t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool at_symbol(const char* s, std::size_t ahead = 0) const {
        return peek(ahead).kind == TokenKind::Symbol && peek(ahead).text == s;
    }
    bool accept(const char* s) {
        if (!at_symbol(s)) return false;
        advance();
        return true;
    }
    static std::string describe(const Token& t) {
        if (t.kind == TokenKind::End) return "end of input";
        return "'" + t.text + "'";
    }
    const Token& expect(const char* s) {
        if (!at_symbol(s)) fail(peek().loc, std::string("expected '") + s + "', found " + describe(peek()));
        return advance();
    }
    const Token& expect_identifier(const char* what) {
        if (peek().kind != TokenKind::Identifier)
            fail(peek().loc, std::string("expected ") + what + ", found " + describe(peek()));
        return advance();
    }

    void declare(const Token& name) {
        if (kReserved.count(name.text)) fail(name.loc, "'" + name.text + "' is a reserved name");
        if (!declared_.insert(name.text).second) fail(name.loc, "'" + name.text + "' is already declared");
    }

    std::optional<std::size_t> find_param(const std::string& n) const {
        for (std::size_t i = 0; i < sys_.parameters.size(); ++i)
            if (sys_.parameters[i].name == n) return i;
        return std::nullopt;
    }
    std::optional<std::size_t> find_variable(const std::string& n) const {
        for (std::size_t i = 0; i < sys_.variables.size(); ++i)
            if (sys_.variables[i].name == n) return i;
        return std::nullopt;
    }
    std::optional<std::size_t> find_function(const std::string& n) const {
        for (std::size_t i = 0; i < sys_.functions.size(); ++i)
            if (sys_.functions[i].name == n) return i;
        return std::nullopt;
    }

    void statement() {
        const Token& kw = expect_identifier("a statement");
        if (kw.text == "var") return var_statement();
        if (kw.text == "fun") return fun_statement();
        if (kw.text == "param") return param_statement();
        if (kw.text == "eq") return eq_statement(kw.loc);
        if (kw.text == "bc") return bc_statement(kw.loc);
        if (kw.text == "option") return option_statement();
        fail(kw.loc, "expected a statement (var, fun, param, eq, bc, option), found '" + kw.text + "'");
    }

    void var_statement() {
        const Token& name = expect_identifier("a variable name");
        declare(name);
        const Token& in = expect_identifier("'in'");
        if (in.text != "in") fail(in.loc, "expected 'in', found '" + in.text + "'");
        expect("[");
        const double lo = constant();
        expect(",");
        const SourceLoc hi_loc = peek().loc;
        const double hi = constant();
        expect("]");
        expect(";");
        if (!(lo <= hi)) fail(hi_loc, "domain of '" + name.text + "' is empty");
        sys_.variables.push_back({name.text, {lo, hi}});
    }

    void fun_statement() {
        const Token& name = expect_identifier("a function name");
        declare(name);
        FunctionDecl decl{name.text, {}, name.loc};
        expect("(");
        do {
            const Token& v = expect_identifier("a variable name");
            const auto idx = find_variable(v.text);
            if (!idx) fail(v.loc, "unknown variable '" + v.text + "'");
            if (std::find(decl.variables.begin(), decl.variables.end(), *idx) != decl.variables.end())
                fail(v.loc, "variable '" + v.text + "' repeated in the declaration of '" + name.text + "'");
            decl.variables.push_back(*idx);
        } while (accept(","));
        expect(")");
        expect(";");
        sys_.functions.push_back(std::move(decl));
    }

    void param_statement() {
        const Token& name = expect_identifier("a parameter name");
        declare(name);
        expect("=");
        const double v = constant();
        expect(";");
        sys_.parameters.push_back({name.text, v});
    }

    void option_statement() {
        const Token& key = expect_identifier("an option name");
        if (!kNumericOptions.count(key.text) && key.text != "strategy") fail(key.loc, "unknown option '" + key.text + "'");
        if (!option_keys_.insert(key.text).second) fail(key.loc, "option '" + key.text + "' is set twice");
        expect("=");
        ProblemOption opt{key.text, std::nullopt, {}};
        if (key.text == "strategy") {
            const Token& w = expect_identifier("a boundary strategy");
            if (!kStrategies.count(w.text))
                fail(w.loc, "unknown strategy '" + w.text + "' (expected penalty, floating or tangential)");
            opt.word = w.text;
        } else {
            opt.number = constant();
        }
        expect(";");
        sys_.options.push_back(std::move(opt));
    }

    void eq_statement(const SourceLoc& loc) {
        expect(":");
        ExprPtr e = expression(Mode::Equation);
        expect("=");
        const Token& rhs = peek();
        if (rhs.kind != TokenKind::Number || rhs.number != 0.0 || at_symbol(";", 1) == false)
            fail(rhs.loc, "right-hand side of an equation must be 0");
        advance();
        expect(";");
        sys_.equations.push_back({std::move(e), loc});
    }

    void bc_statement(const SourceLoc& loc) {
        expect(":");
        BoundaryCondition bc;
        bc.loc = loc;
        const Token& head = expect_identifier("a function or D(...)");
        if (head.text == "D" && at_symbol("(")) {
            auto [fn, order] = derivative_spec();
            bc.function = fn;
            bc.order = std::move(order);
        } else {
            const auto fn = find_function(head.text);
            if (!fn) fail(head.loc, "unknown function '" + head.text + "'");
            bc.function = *fn;
            bc.order = MultiIndex::zero(sys_.functions[*fn].variables.size());
        }
        const FunctionDecl& decl = sys_.functions[bc.function];
        const SourceLoc open = expect("(").loc;
        std::vector<SourceLoc> arg_locs;
        do {
            arg_locs.push_back(peek().loc);
            bc.point.push_back(constant());
        } while (accept(","));
        expect(")");
        if (bc.point.size() != decl.variables.size())
            fail(open, "'" + decl.name + "' takes " + std::to_string(decl.variables.size()) + " argument(s), got " +
                           std::to_string(bc.point.size()));
        for (std::size_t j = 0; j < bc.point.size(); ++j) {
            const Variable& v = sys_.variables[decl.variables[j]];
            if (!v.domain.contains(bc.point[j], 0.0))
                fail(arg_locs[j], "boundary point " + format_double(bc.point[j]) + " is outside the domain of '" +
                                      v.name + "' [" + format_double(v.domain.lo) + ", " +
                                      format_double(v.domain.hi) + "]");
        }
        expect("=");
        bc.value = constant();
        expect(";");
        sys_.boundary_conditions.push_back(std::move(bc));
    }

    // After the identifier D: "(f, x [, n] {, y [, n]})".
    std::pair<std::size_t, MultiIndex> derivative_spec() {
        expect("(");
        const Token& fname = expect_identifier("a function name");
        const auto fn = find_function(fname.text);
        if (!fn) fail(fname.loc, "unknown function '" + fname.text + "'");
        const FunctionDecl& decl = sys_.functions[*fn];
        std::vector<int> counts(decl.variables.size(), 0);
        expect(",");
        do {
            const Token& v = expect_identifier("a variable name");
            std::size_t axis = decl.variables.size();
            for (std::size_t j = 0; j < decl.variables.size(); ++j)
                if (sys_.variables[decl.variables[j]].name == v.text) axis = j;
            if (axis == decl.variables.size()) {
                if (!find_variable(v.text)) fail(v.loc, "unknown variable '" + v.text + "'");
                fail(v.loc, "'" + v.text + "' is not a variable of '" + decl.name + "'");
            }
            if (counts[axis] != 0) fail(v.loc, "variable '" + v.text + "' repeated in derivative");
            int order = 1;
            if (at_symbol(",") && peek(1).kind == TokenKind::Number) {
                advance();
                const Token& n = advance();
                if (n.number < 1 || n.number != static_cast<double>(static_cast<int>(n.number)) || n.number > 64)
                    fail(n.loc, "derivative order must be a positive integer");
                order = static_cast<int>(n.number);
            }
            counts[axis] = order;
        } while (accept(","));
        expect(")");
        return {*fn, MultiIndex(std::move(counts))};
    }

    std::size_t slot_for(std::size_t fn, const MultiIndex& order) {
        const Slot s{fn, order};
        const auto it = std::find(sys_.slots.begin(), sys_.slots.end(), s);
        if (it != sys_.slots.end()) return static_cast<std::size_t>(it - sys_.slots.begin());
        sys_.slots.push_back(s);
        return sys_.slots.size() - 1;
    }

    std::vector<std::string> variable_names(std::size_t fn) const {
        std::vector<std::string> out;
        for (std::size_t v : sys_.functions[fn].variables) out.push_back(sys_.variables[v].name);
        return out;
    }

    double constant() {
        ExprPtr e = expression(Mode::Constant);
        try {
            return constant_value(*e);
        } catch (const EvaluationError& err) {
            fail(e->loc, std::string("cannot evaluate constant: ") + err.what());
        }
    }

    ExprPtr expression(Mode mode) {
        ExprPtr lhs = term(mode);
        while (at_symbol("+") || at_symbol("-")) {
            const Token& op = advance();
            ExprPtr rhs = term(mode);
            lhs = make_expr(BinaryNode{op.text == "+" ? BinaryOp::Add : BinaryOp::Sub, lhs, rhs}, op.loc);
        }
        return lhs;
    }

    ExprPtr term(Mode mode) {
        ExprPtr lhs = unary(mode);
        while (at_symbol("*") || at_symbol("/")) {
            const Token& op = advance();
            ExprPtr rhs = unary(mode);
            lhs = make_expr(BinaryNode{op.text == "*" ? BinaryOp::Mul : BinaryOp::Div, lhs, rhs}, op.loc);
        }
        return lhs;
    }

    ExprPtr unary(Mode mode) {
        if (at_symbol("-")) {
            const SourceLoc loc = advance().loc;
            return make_expr(NegateNode{unary(mode)}, loc);
        }
        return power(mode);
    }

    ExprPtr power(Mode mode) {
        ExprPtr base = primary(mode);
        if (at_symbol("^")) {
            const SourceLoc loc = advance().loc;
            ExprPtr exponent = unary(mode);
            if (!is_constant(*exponent)) fail(exponent->loc, "exponent must be a constant expression");
            return make_expr(BinaryNode{BinaryOp::Pow, base, exponent}, loc);
        }
        return base;
    }

    ExprPtr primary(Mode mode) {
        const Token& t = peek();
        if (t.kind == TokenKind::Number) {
            advance();
            return make_expr(NumberNode{t.number}, t.loc);
        }
        if (accept("(")) {
            ExprPtr e = expression(mode);
            expect(")");
            return e;
        }
        if (t.kind != TokenKind::Identifier) fail(t.loc, "expected an expression, found " + describe(t));
        const Token& name = advance();
        static const std::pair<const char*, Builtin> builtins[] = {
            {"sqrt", Builtin::Sqrt}, {"sin", Builtin::Sin}, {"cos", Builtin::Cos}, {"exp", Builtin::Exp}};
        for (const auto& [text, fn] : builtins) {
            if (name.text == text) {
                expect("(");
                ExprPtr arg = expression(mode);
                expect(")");
                return make_expr(CallNode{fn, arg}, name.loc);
            }
        }
        if (name.text == "D" && at_symbol("(")) {
            if (mode == Mode::Constant) fail(name.loc, "derivative in a constant expression");
            auto [fn, order] = derivative_spec();
            const std::size_t slot = slot_for(fn, order);
            return make_expr(FunctionNode{sys_.functions[fn].name, fn, order, slot, variable_names(fn), false},
                             name.loc);
        }
        if (const auto p = find_param(name.text)) return make_expr(ParamNode{name.text, sys_.parameters[*p].value}, name.loc);
        if (const auto v = find_variable(name.text)) {
            if (mode == Mode::Constant) fail(name.loc, "variable '" + name.text + "' in a constant expression");
            return make_expr(VariableNode{name.text, *v}, name.loc);
        }
        if (const auto f = find_function(name.text)) {
            if (mode == Mode::Constant) fail(name.loc, "function '" + name.text + "' in a constant expression");
            const FunctionDecl& decl = sys_.functions[*f];
            bool explicit_args = false;
            if (at_symbol("(")) {
                explicit_args = true;
                const SourceLoc open = advance().loc;
                std::size_t count = 0;
                do {
                    const Token& a = expect_identifier("a variable name");
                    if (count < decl.variables.size() && a.text != sys_.variables[decl.variables[count]].name)
                        fail(a.loc, "arguments of '" + decl.name + "' in an equation must be its declared variables");
                    ++count;
                } while (accept(","));
                expect(")");
                if (count != decl.variables.size())
                    fail(open, "'" + decl.name + "' takes " + std::to_string(decl.variables.size()) +
                                   " argument(s), got " + std::to_string(count));
            }
            const MultiIndex order = MultiIndex::zero(decl.variables.size());
            const std::size_t slot = slot_for(*f, order);
            return make_expr(FunctionNode{decl.name, *f, order, slot, variable_names(*f), explicit_args}, name.loc);
        }
        fail(name.loc, "unknown identifier '" + name.text + "'");
    }
};

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto bump = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') bump(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            bump(1);
            continue;
        }
        Token t;
        t.loc = {line, col};
        if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < text.size() && is_ident_char(text[j])) ++j;
            t.kind = TokenKind::Identifier;
            t.text = std::string(text.substr(i, j - i));
            bump(j - i);
        } else if (is_digit(c) || (c == '.' && i + 1 < text.size() && is_digit(text[i + 1]))) {
            std::size_t j = i;
            while (j < text.size() && is_digit(text[j])) ++j;
            if (j < text.size() && text[j] == '.') {
                ++j;
                while (j < text.size() && is_digit(text[j])) ++j;
            }
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                if (k < text.size() && is_digit(text[k])) {
                    while (k < text.size() && is_digit(text[k])) ++k;
                    j = k;
                }
            }
            t.kind = TokenKind::Number;
            t.text = std::string(text.substr(i, j - i));
            const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
            if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
                throw ParseError(line, col, "malformed number '" + t.text + "'");
            bump(j - i);
        } else if (std::string_view(";,()[]=+-*/^:").find(c) != std::string_view::npos) {
            t.kind = TokenKind::Symbol;
            t.text = std::string(1, c);
            bump(1);
        } else {
            std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c) : "\\x" + [&] {
                static const char* hex = "0123456789abcdef";
                const auto u = static_cast<unsigned char>(c);
                return std::string{hex[u >> 4], hex[u & 15]};
            }();
            throw ParseError(line, col, "unexpected character '" + shown + "'");
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.loc = {line, col};
    out.push_back(end);
    return out;
}

DESystem parse_problem(std::string_view text) { return Parser(tokenize(text)).run(); }

DESystem parse_problem_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open problem file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str());
}

}  // namespace hdes
