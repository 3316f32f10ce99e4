#include "fracthj/expressions.hpp"

#include "fracthj/errors.hpp"

#include <cmath>
#include <set>

namespace fracthj {

namespace {

constexpr double kTau = 2.0 * M_PI;

double spatial_part(const ExprTerm& t, const double* x, int dim) {
    switch (t.kind) {
        case ExprTerm::Kind::constant:
            return 1.0;
        case ExprTerm::Kind::cosine:
        case ExprTerm::Kind::sine: {
            double phase = 0.0;
            const int md = std::min<int>(dim, static_cast<int>(t.mode.size()));
            for (int d = 0; d < md; ++d) phase += t.mode[d] * x[d];
            return t.kind == ExprTerm::Kind::cosine ? std::cos(kTau * phase)
                                                    : std::sin(kTau * phase);
        }
        case ExprTerm::Kind::bump: {
            double v = 1.0;
            const double w2 = t.width * t.width;
            const int cd = std::min<int>(dim, static_cast<int>(t.center.size()));
            for (int d = 0; d < cd; ++d)
                v *= std::exp((std::cos(kTau * (x[d] - t.center[d])) - 1.0) / w2);
            return v;
        }
    }
    return 0.0;
}

}  // namespace

double Expression::eval(const double* x, int dim, double t) const {
    double sum = 0.0;
    for (const auto& term : terms) {
        double v = term.coef * spatial_part(term, x, dim);
        if (term.t_power != 0.0) v *= std::pow(t, term.t_power);
        sum += v;
    }
    return sum;
}

bool Expression::time_dependent() const {
    for (const auto& term : terms)
        if (term.t_power != 0.0) return true;
    return false;
}

Expression parse_expression(const nlohmann::json& j) {
    if (!j.is_array()) throw config_error("expression: expected an array of terms");
    static const std::set<std::string> allowed = {"coef",   "t_power", "trig",
                                                 "mode",   "center",  "width"};
    Expression e;
    for (const auto& jt : j) {
        if (!jt.is_object()) throw config_error("expression: term must be an object");
        for (const auto& [key, _] : jt.items())
            if (!allowed.count(key))
                throw config_error("expression: unknown term key '" + key + "'");
        ExprTerm t;
        t.coef = jt.value("coef", 1.0);
        t.t_power = jt.value("t_power", 0.0);
        const std::string trig = jt.value("trig", "const");
        if (trig == "const") {
            t.kind = ExprTerm::Kind::constant;
        } else if (trig == "cos" || trig == "sin") {
            t.kind = trig == "cos" ? ExprTerm::Kind::cosine : ExprTerm::Kind::sine;
            if (!jt.contains("mode"))
                throw config_error("expression: cos/sin terms need 'mode'");
            if (jt["mode"].is_number_integer())
                t.mode = {jt["mode"].get<int>()};
            else
                t.mode = jt["mode"].get<std::vector<int>>();
        } else if (trig == "bump") {
            t.kind = ExprTerm::Kind::bump;
            if (jt.contains("center")) {
                if (jt["center"].is_number())
                    t.center = {jt["center"].get<double>()};
                else
                    t.center = jt["center"].get<std::vector<double>>();
            } else {
                t.center = {0.5, 0.5};
            }
            t.width = jt.value("width", 0.1);
            if (!(t.width > 0.0)) throw config_error("expression: bump width > 0");
        } else {
            throw config_error("expression: unknown trig kind '" + trig + "'");
        }
        e.terms.push_back(std::move(t));
    }
    return e;
}

Field evaluate_field(const Expression& e, const TorusGrid& g, double t) {
    Field out = Field::zeros(g);
    for (int i = 0; i < g.size(); ++i) {
        double x[2];
        g.coords(i, x);
        out.values[i] = e.eval(x, g.dim, t);
    }
    return out;
}

SpaceTimeField evaluate_spacetime(const Expression& e, const TorusGrid& g,
                                  const TimeGrid& tg) {
    SpaceTimeField out;
    out.tgrid = tg;
    out.snapshots.reserve(tg.nodes.size());
    for (double t : tg.nodes) out.snapshots.push_back(evaluate_field(e, g, t));
    return out;
}

}  // namespace fracthj
