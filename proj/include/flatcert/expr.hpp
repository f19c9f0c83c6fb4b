#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "flatcert/dual.hpp"
#include "flatcert/errors.hpp"

namespace flatcert {

// Ordered list of variable names; the order defines the input layout of
// every map parsed against this context.
class VarContext {
public:
    VarContext() = default;
    explicit VarContext(std::vector<std::string> names);

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(int i) const { return names_[static_cast<std::size_t>(i)]; }
    const std::vector<std::string>& names() const { return names_; }

    // -1 if absent.
    int index_of(const std::string& name) const;

    // x1..xn followed by p1..pn (the arguments of F).
    static VarContext state_param(int n);
    // x1..xn followed by u1..um (the arguments of f).
    static VarContext state_input(int n, int m);
    // y0_1..y0_m, y1_1.., up to order max_order inclusive.
    static VarContext jet(int m, int max_order);

private:
    std::vector<std::string> names_;
    std::map<std::string, int> index_;
};

enum class NodeKind { Constant, Variable, Unary, Binary, Call };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class FuncTag { Sin, Cos, Tan, Atan, Atan2, Exp, Ln, Sqrt, Pow };

struct ExprAst {
    NodeKind kind = NodeKind::Constant;
    double value = 0.0;           // Constant
    int var_index = -1;           // Variable
    std::string var_name;         // Variable
    BinaryOp bin_op = BinaryOp::Add;
    FuncTag func = FuncTag::Sin;  // Call
    std::vector<ExprAst> children;

    bool operator==(const ExprAst& other) const;
};

// Recursive-descent parser for the documented grammar:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | power
//   power  := primary ('^' unary)?
//   primary:= number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
// '+' '-' '*' '/' are left-associative, '^' is right-associative and binds
// tighter than unary minus, so -x^2 parses as -(x^2).
ExprAst parse_expression(const std::string& text, const VarContext& ctx);

// Fully parenthesized infix rendering; parse(render(a)) == a structurally.
std::string render_expression(const ExprAst& ast);

int function_arity(FuncTag tag);
const char* function_name(FuncTag tag);

namespace detail {

template <class T>
T eval_node(const ExprAst& node, std::span<const T> point) {
    switch (node.kind) {
        case NodeKind::Constant:
            return lift<T>(node.value);
        case NodeKind::Variable:
            return point[static_cast<std::size_t>(node.var_index)];
        case NodeKind::Unary:
            return -eval_node(node.children[0], point);
        case NodeKind::Binary: {
            if (node.bin_op == BinaryOp::Pow &&
                node.children[1].kind == NodeKind::Constant) {
                return pow_const(eval_node(node.children[0], point),
                                 node.children[1].value);
            }
            T lhs = eval_node(node.children[0], point);
            T rhs = eval_node(node.children[1], point);
            switch (node.bin_op) {
                case BinaryOp::Add: return lhs + rhs;
                case BinaryOp::Sub: return lhs - rhs;
                case BinaryOp::Mul: return lhs * rhs;
                case BinaryOp::Div:
                    if (scalar_value(rhs) == 0.0)
                        throw DomainError("division by zero");
                    return lhs / rhs;
                case BinaryOp::Pow:
                    if (scalar_value(lhs) <= 0.0)
                        throw DomainError("pow with non-positive base and non-constant exponent");
                    return pow(lhs, rhs);
            }
            break;
        }
        case NodeKind::Call: {
            T a0 = eval_node(node.children[0], point);
            switch (node.func) {
                case FuncTag::Sin: return sin(a0);
                case FuncTag::Cos: return cos(a0);
                case FuncTag::Tan: return tan(a0);
                case FuncTag::Atan: return atan(a0);
                case FuncTag::Exp: return exp(a0);
                case FuncTag::Ln:
                    if (scalar_value(a0) <= 0.0)
                        throw DomainError("ln of non-positive argument");
                    return log(a0);
                case FuncTag::Sqrt:
                    if (scalar_value(a0) < 0.0)
                        throw DomainError("sqrt of negative argument");
                    return sqrt(a0);
                case FuncTag::Atan2: {
                    T a1 = eval_node(node.children[1], point);
                    if (scalar_value(a0) == 0.0 && scalar_value(a1) == 0.0)
                        throw DomainError("atan2(0, 0)");
                    return atan2(a0, a1);
                }
                case FuncTag::Pow: {
                    if (node.children[1].kind == NodeKind::Constant)
                        return pow_const(a0, node.children[1].value);
                    T a1 = eval_node(node.children[1], point);
                    if (scalar_value(a0) <= 0.0)
                        throw DomainError("pow with non-positive base and non-constant exponent");
                    return pow(a0, a1);
                }
            }
            break;
        }
    }
    throw std::logic_error("unreachable expression node");
}

}  // namespace detail

template <class T>
T eval_ast(const ExprAst& ast, std::span<const T> point) {
    return detail::eval_node(ast, point);
}

}  // namespace flatcert
