#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "flatcert/expr.hpp"

namespace flatcert {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// An evaluable, differentiable map R^k -> R^l backed by parsed expression
// trees. Immutable after construction; evaluation is re-entrant.
struct SmoothMap {
    VarContext ctx;
    std::vector<ExprAst> components;

    SmoothMap() = default;
    SmoothMap(VarContext c, std::vector<ExprAst> comps)
        : ctx(std::move(c)), components(std::move(comps)) {}

    // Parses one expression per component against ctx.
    static SmoothMap parse(const VarContext& ctx, const std::vector<std::string>& exprs);

    int input_dim() const { return ctx.size(); }
    int output_dim() const { return static_cast<int>(components.size()); }

    template <class T>
    std::vector<T> eval_generic(std::span<const T> point) const {
        std::vector<T> out;
        out.reserve(components.size());
        for (std::size_t i = 0; i < components.size(); ++i) {
            try {
                out.push_back(eval_ast<T>(components[i], point));
            } catch (const DomainError& e) {
                throw DomainError(e.what(), static_cast<int>(i));
            }
        }
        return out;
    }

    // Jacobian with entries of scalar type T, computed with one Dual<T>
    // sweep per input. Row-major nested vectors, out[l][k].
    template <class T>
    std::vector<std::vector<T>> jacobian_generic(std::span<const T> point) const {
        const int k = input_dim();
        const int l = output_dim();
        std::vector<std::vector<T>> jac(static_cast<std::size_t>(l),
                                        std::vector<T>(static_cast<std::size_t>(k)));
        std::vector<Dual<T>> seeded(static_cast<std::size_t>(k));
        for (int q = 0; q < k; ++q) seeded[static_cast<std::size_t>(q)] = Dual<T>(point[static_cast<std::size_t>(q)]);
        for (int q = 0; q < k; ++q) {
            seeded[static_cast<std::size_t>(q)].dot = lift<T>(1.0);
            auto col = eval_generic<Dual<T>>(seeded);
            for (int i = 0; i < l; ++i)
                jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)] = col[static_cast<std::size_t>(i)].dot;
            seeded[static_cast<std::size_t>(q)].dot = lift<T>(0.0);
        }
        return jac;
    }
};

VectorXd eval_map(const SmoothMap& map, const VectorXd& point);

// Exact first derivatives via forward-mode AD; column order follows the
// VarContext order.
MatrixXd eval_jacobian(const SmoothMap& map, const VectorXd& point);

// Central-difference Jacobian; testing oracle for eval_jacobian.
MatrixXd fd_jacobian(const SmoothMap& map, const VectorXd& point, double h = 1e-6);

// d/de [J(point + e*dir)] at e=0, via nested forward AD.
MatrixXd directional_second(const SmoothMap& map, const VectorXd& point, const VectorXd& dir);

}  // namespace flatcert
