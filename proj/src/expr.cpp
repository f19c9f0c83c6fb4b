#include "flatcert/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

namespace flatcert {

VarContext::VarContext(std::vector<std::string> names) : names_(std::move(names)) {
    for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
        auto [it, inserted] = index_.emplace(names_[static_cast<std::size_t>(i)], i);
        if (!inserted)
            throw DimensionError("duplicate variable name '" + names_[static_cast<std::size_t>(i)] + "'");
    }
}

int VarContext::index_of(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

VarContext VarContext::state_param(int n) {
    std::vector<std::string> names;
    for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
    for (int i = 1; i <= n; ++i) names.push_back("p" + std::to_string(i));
    return VarContext(std::move(names));
}

VarContext VarContext::state_input(int n, int m) {
    std::vector<std::string> names;
    for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
    for (int i = 1; i <= m; ++i) names.push_back("u" + std::to_string(i));
    return VarContext(std::move(names));
}

VarContext VarContext::jet(int m, int max_order) {
    std::vector<std::string> names;
    for (int order = 0; order <= max_order; ++order)
        for (int j = 1; j <= m; ++j)
            names.push_back("y" + std::to_string(order) + "_" + std::to_string(j));
    return VarContext(std::move(names));
}

bool ExprAst::operator==(const ExprAst& other) const {
    if (kind != other.kind) return false;
    switch (kind) {
        case NodeKind::Constant:
            return value == other.value;
        case NodeKind::Variable:
            return var_index == other.var_index && var_name == other.var_name;
        case NodeKind::Unary:
            return children == other.children;
        case NodeKind::Binary:
            return bin_op == other.bin_op && children == other.children;
        case NodeKind::Call:
            return func == other.func && children == other.children;
    }
    return false;
}

int function_arity(FuncTag tag) {
    switch (tag) {
        case FuncTag::Atan2:
        case FuncTag::Pow:
            return 2;
        default:
            return 1;
    }
}

const char* function_name(FuncTag tag) {
    switch (tag) {
        case FuncTag::Sin: return "sin";
        case FuncTag::Cos: return "cos";
        case FuncTag::Tan: return "tan";
        case FuncTag::Atan: return "atan";
        case FuncTag::Atan2: return "atan2";
        case FuncTag::Exp: return "exp";
        case FuncTag::Ln: return "ln";
        case FuncTag::Sqrt: return "sqrt";
        case FuncTag::Pow: return "pow";
    }
    return "?";
}

namespace {

bool lookup_function(const std::string& name, FuncTag& out) {
    static const std::map<std::string, FuncTag> table = {
        {"sin", FuncTag::Sin},   {"cos", FuncTag::Cos},   {"tan", FuncTag::Tan},
        {"atan", FuncTag::Atan}, {"atan2", FuncTag::Atan2}, {"exp", FuncTag::Exp},
        {"ln", FuncTag::Ln},     {"sqrt", FuncTag::Sqrt}, {"pow", FuncTag::Pow},
    };
    auto it = table.find(name);
    if (it == table.end()) return false;
    out = it->second;
    return true;
}

enum class TokKind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    TokKind kind;
    std::string text;
    double number = 0.0;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        current_.pos = pos_;
        if (pos_ >= text_.size()) {
            current_.kind = TokKind::End;
            current_.text.clear();
            return;
        }
        char c = text_[pos_];
        switch (c) {
            case '+': current_ = {TokKind::Plus, "+", 0.0, pos_++}; return;
            case '-': current_ = {TokKind::Minus, "-", 0.0, pos_++}; return;
            case '*': current_ = {TokKind::Star, "*", 0.0, pos_++}; return;
            case '/': current_ = {TokKind::Slash, "/", 0.0, pos_++}; return;
            case '^': current_ = {TokKind::Caret, "^", 0.0, pos_++}; return;
            case '(': current_ = {TokKind::LParen, "(", 0.0, pos_++}; return;
            case ')': current_ = {TokKind::RParen, ")", 0.0, pos_++}; return;
            case ',': current_ = {TokKind::Comma, ",", 0.0, pos_++}; return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = text_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(start, &end);
            if (end == start) throw SyntaxError("invalid number", pos_);
            current_ = {TokKind::Number, std::string(start, static_cast<const char*>(end)), v, pos_};
            pos_ += static_cast<std::size_t>(end - start);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            current_ = {TokKind::Ident, text_.substr(start, pos_ - start), 0.0, start};
            return;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    Token current_;
};

class Parser {
public:
    Parser(const std::string& text, const VarContext& ctx) : lex_(text), ctx_(ctx) {}

    ExprAst parse() {
        ExprAst e = expr();
        if (lex_.peek().kind != TokKind::End)
            throw SyntaxError("expected end of expression, got '" + lex_.peek().text + "'",
                              lex_.peek().pos);
        return e;
    }

private:
    ExprAst expr() {
        ExprAst lhs = term();
        while (lex_.peek().kind == TokKind::Plus || lex_.peek().kind == TokKind::Minus) {
            Token op = lex_.take();
            ExprAst rhs = term();
            ExprAst node;
            node.kind = NodeKind::Binary;
            node.bin_op = op.kind == TokKind::Plus ? BinaryOp::Add : BinaryOp::Sub;
            node.children = {std::move(lhs), std::move(rhs)};
            lhs = std::move(node);
        }
        return lhs;
    }

    ExprAst term() {
        ExprAst lhs = unary();
        while (lex_.peek().kind == TokKind::Star || lex_.peek().kind == TokKind::Slash) {
            Token op = lex_.take();
            ExprAst rhs = unary();
            ExprAst node;
            node.kind = NodeKind::Binary;
            node.bin_op = op.kind == TokKind::Star ? BinaryOp::Mul : BinaryOp::Div;
            node.children = {std::move(lhs), std::move(rhs)};
            lhs = std::move(node);
        }
        return lhs;
    }

    ExprAst unary() {
        if (lex_.peek().kind == TokKind::Minus) {
            lex_.take();
            ExprAst node;
            node.kind = NodeKind::Unary;
            node.children = {unary()};
            return node;
        }
        return power();
    }

    ExprAst power() {
        ExprAst base = primary();
        if (lex_.peek().kind == TokKind::Caret) {
            lex_.take();
            ExprAst exponent = unary();
            ExprAst node;
            node.kind = NodeKind::Binary;
            node.bin_op = BinaryOp::Pow;
            node.children = {std::move(base), std::move(exponent)};
            return node;
        }
        return base;
    }

    ExprAst primary() {
        Token t = lex_.take();
        switch (t.kind) {
            case TokKind::Number: {
                ExprAst node;
                node.kind = NodeKind::Constant;
                node.value = t.number;
                return node;
            }
            case TokKind::LParen: {
                ExprAst e = expr();
                expect(TokKind::RParen, ")");
                return e;
            }
            case TokKind::Ident: {
                if (lex_.peek().kind == TokKind::LParen) {
                    FuncTag tag;
                    if (!lookup_function(t.text, tag))
                        throw SyntaxError("unknown function '" + t.text + "'", t.pos);
                    lex_.take();
                    std::vector<ExprAst> args;
                    args.push_back(expr());
                    while (lex_.peek().kind == TokKind::Comma) {
                        lex_.take();
                        args.push_back(expr());
                    }
                    expect(TokKind::RParen, ")");
                    int want = function_arity(tag);
                    if (static_cast<int>(args.size()) != want)
                        throw ArityError(t.text, static_cast<int>(args.size()), want);
                    ExprAst node;
                    node.kind = NodeKind::Call;
                    node.func = tag;
                    node.children = std::move(args);
                    return node;
                }
                int idx = ctx_.index_of(t.text);
                if (idx < 0) throw UnknownVariableError(t.text);
                ExprAst node;
                node.kind = NodeKind::Variable;
                node.var_index = idx;
                node.var_name = t.text;
                return node;
            }
            default:
                throw SyntaxError("expected number, variable, function or '(', got '" +
                                      (t.kind == TokKind::End ? std::string("end") : t.text) + "'",
                                  t.pos);
        }
    }

    void expect(TokKind kind, const char* what) {
        Token t = lex_.take();
        if (t.kind != kind)
            throw SyntaxError(std::string("expected '") + what + "'", t.pos);
    }

    Lexer lex_;
    const VarContext& ctx_;
};

void render(const ExprAst& ast, std::ostringstream& out) {
    switch (ast.kind) {
        case NodeKind::Constant: {
            std::ostringstream num;
            num.precision(17);
            num << ast.value;
            std::string s = num.str();
            if (ast.value < 0) {
                out << "(" << s << ")";
            } else {
                out << s;
            }
            return;
        }
        case NodeKind::Variable:
            out << ast.var_name;
            return;
        case NodeKind::Unary:
            out << "(-";
            render(ast.children[0], out);
            out << ")";
            return;
        case NodeKind::Binary: {
            const char* op = "+";
            switch (ast.bin_op) {
                case BinaryOp::Add: op = " + "; break;
                case BinaryOp::Sub: op = " - "; break;
                case BinaryOp::Mul: op = "*"; break;
                case BinaryOp::Div: op = "/"; break;
                case BinaryOp::Pow: op = "^"; break;
            }
            out << "(";
            render(ast.children[0], out);
            out << op;
            render(ast.children[1], out);
            out << ")";
            return;
        }
        case NodeKind::Call:
            out << function_name(ast.func) << "(";
            for (std::size_t i = 0; i < ast.children.size(); ++i) {
                if (i > 0) out << ", ";
                render(ast.children[i], out);
            }
            out << ")";
            return;
    }
}

}  // namespace

ExprAst parse_expression(const std::string& text, const VarContext& ctx) {
    if (text.empty()) throw SyntaxError("empty expression", 0);
    return Parser(text, ctx).parse();
}

std::string render_expression(const ExprAst& ast) {
    std::ostringstream out;
    render(ast, out);
    return out.str();
}

}  // namespace flatcert
