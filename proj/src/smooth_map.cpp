#include "flatcert/smooth_map.hpp"

namespace flatcert {

SmoothMap SmoothMap::parse(const VarContext& ctx, const std::vector<std::string>& exprs) {
    std::vector<ExprAst> comps;
    comps.reserve(exprs.size());
    for (const auto& e : exprs) comps.push_back(parse_expression(e, ctx));
    return SmoothMap(ctx, std::move(comps));
}

namespace {

std::vector<double> to_vec(const VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

void check_point_dim(const SmoothMap& map, const VectorXd& point) {
    if (point.size() != map.input_dim())
        throw DimensionError("point has dimension " + std::to_string(point.size()) +
                             ", map expects " + std::to_string(map.input_dim()));
}

}  // namespace

VectorXd eval_map(const SmoothMap& map, const VectorXd& point) {
    check_point_dim(map, point);
    std::vector<double> x = to_vec(point);
    auto vals = map.eval_generic<double>(x);
    VectorXd out(map.output_dim());
    for (int i = 0; i < map.output_dim(); ++i) out(i) = vals[static_cast<std::size_t>(i)];
    return out;
}

MatrixXd eval_jacobian(const SmoothMap& map, const VectorXd& point) {
    check_point_dim(map, point);
    const int k = map.input_dim();
    const int l = map.output_dim();
    std::vector<Dual<double>> x(static_cast<std::size_t>(k));
    for (int q = 0; q < k; ++q) x[static_cast<std::size_t>(q)] = Dual<double>(point(q));
    MatrixXd jac(l, k);
    for (int q = 0; q < k; ++q) {
        x[static_cast<std::size_t>(q)].dot = 1.0;
        auto col = map.eval_generic<Dual<double>>(x);
        for (int i = 0; i < l; ++i) jac(i, q) = col[static_cast<std::size_t>(i)].dot;
        x[static_cast<std::size_t>(q)].dot = 0.0;
    }
    return jac;
}

MatrixXd fd_jacobian(const SmoothMap& map, const VectorXd& point, double h) {
    check_point_dim(map, point);
    if (!(h > 0)) throw DimensionError("fd_jacobian requires h > 0");
    const int k = map.input_dim();
    const int l = map.output_dim();
    MatrixXd jac(l, k);
    VectorXd x = point;
    for (int q = 0; q < k; ++q) {
        x(q) = point(q) + h;
        VectorXd fp = eval_map(map, x);
        x(q) = point(q) - h;
        VectorXd fm = eval_map(map, x);
        x(q) = point(q);
        jac.col(q) = (fp - fm) / (2.0 * h);
    }
    return jac;
}

MatrixXd directional_second(const SmoothMap& map, const VectorXd& point, const VectorXd& dir) {
    check_point_dim(map, point);
    if (dir.size() != map.input_dim())
        throw DimensionError("direction has wrong dimension");
    const int k = map.input_dim();
    const int l = map.output_dim();
    using D2 = Dual<Dual<double>>;
    std::vector<D2> x(static_cast<std::size_t>(k));
    // Outer dual carries the direction, inner dual sweeps the inputs; the
    // mixed coefficient is dir^T H e_q per component.
    for (int q = 0; q < k; ++q)
        x[static_cast<std::size_t>(q)] = D2(Dual<double>(point(q), 0.0), Dual<double>(dir(q), 0.0));
    MatrixXd out(l, k);
    for (int q = 0; q < k; ++q) {
        x[static_cast<std::size_t>(q)].val.dot = 1.0;
        auto col = map.eval_generic<D2>(x);
        for (int i = 0; i < l; ++i) out(i, q) = col[static_cast<std::size_t>(i)].dot.dot;
        x[static_cast<std::size_t>(q)].val.dot = 0.0;
    }
    return out;
}

}  // namespace flatcert
