#include "dtcm/model.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

#include "dtcm/elliptic.hpp"
#include "dtcm/errors.hpp"
#include "json.hpp"

namespace dtcm {

ModelBox ModelBox::standard(int dim, double half_width) {
    ModelBox box;
    box.x.assign(static_cast<std::size_t>(dim), {-half_width, half_width});
    return box;
}

std::vector<double> CoefficientModel::a_matrix(double t, const std::vector<double>& x) const {
    std::vector<double> m(static_cast<std::size_t>(dim_ * dim_));
    DerivIndex beta(static_cast<std::size_t>(dim_), 0);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
            m[static_cast<std::size_t>(i * dim_ + j)] = a(i, j, 0, beta, t, x);
    return m;
}

// ---------------------------------------------------------------------------
// Expression trees: the common engine behind builtins and JSON models.
// ---------------------------------------------------------------------------

namespace {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Op { Num, VarT, VarX, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };
    Op op = Op::Num;
    double value = 0.0;  // Num
    int index = 0;       // VarX axis, or Pow integer exponent
    ExprPtr lhs, rhs;

    static ExprPtr num(double v) {
        auto e = std::make_shared<Expr>();
        e->op = Op::Num;
        e->value = v;
        return e;
    }
    static ExprPtr make(Op op, ExprPtr l, ExprPtr r = nullptr, int idx = 0) {
        auto e = std::make_shared<Expr>();
        e->op = op;
        e->lhs = std::move(l);
        e->rhs = std::move(r);
        e->index = idx;
        return e;
    }
};

double expr_eval(const Expr& e, double t, const std::vector<double>& x) {
    switch (e.op) {
        case Expr::Op::Num: return e.value;
        case Expr::Op::VarT: return t;
        case Expr::Op::VarX: return x[static_cast<std::size_t>(e.index)];
        case Expr::Op::Add: return expr_eval(*e.lhs, t, x) + expr_eval(*e.rhs, t, x);
        case Expr::Op::Sub: return expr_eval(*e.lhs, t, x) - expr_eval(*e.rhs, t, x);
        case Expr::Op::Mul: return expr_eval(*e.lhs, t, x) * expr_eval(*e.rhs, t, x);
        case Expr::Op::Div: return expr_eval(*e.lhs, t, x) / expr_eval(*e.rhs, t, x);
        case Expr::Op::Pow: {
            double base = expr_eval(*e.lhs, t, x);
            double r = 1.0;
            for (int i = 0; i < e.index; ++i) r *= base;
            return r;
        }
        case Expr::Op::Neg: return -expr_eval(*e.lhs, t, x);
        case Expr::Op::Sin: return std::sin(expr_eval(*e.lhs, t, x));
        case Expr::Op::Cos: return std::cos(expr_eval(*e.lhs, t, x));
        case Expr::Op::Exp: return std::exp(expr_eval(*e.lhs, t, x));
    }
    return 0.0;
}

bool expr_is_zero(const ExprPtr& e) { return e->op == Expr::Op::Num && e->value == 0.0; }

ExprPtr expr_add(ExprPtr a, ExprPtr b) {
    if (expr_is_zero(a)) return b;
    if (expr_is_zero(b)) return a;
    return Expr::make(Expr::Op::Add, std::move(a), std::move(b));
}

ExprPtr expr_mul(ExprPtr a, ExprPtr b) {
    if (expr_is_zero(a) || expr_is_zero(b)) return Expr::num(0.0);
    if (a->op == Expr::Op::Num && a->value == 1.0) return b;
    if (b->op == Expr::Op::Num && b->value == 1.0) return a;
    return Expr::make(Expr::Op::Mul, std::move(a), std::move(b));
}

// d/dvar, var = -1 for t and axis index otherwise
ExprPtr expr_diff(const ExprPtr& e, int var) {
    switch (e->op) {
        case Expr::Op::Num: return Expr::num(0.0);
        case Expr::Op::VarT: return Expr::num(var == -1 ? 1.0 : 0.0);
        case Expr::Op::VarX: return Expr::num(var == e->index ? 1.0 : 0.0);
        case Expr::Op::Add: return expr_add(expr_diff(e->lhs, var), expr_diff(e->rhs, var));
        case Expr::Op::Sub:
            return Expr::make(Expr::Op::Sub, expr_diff(e->lhs, var), expr_diff(e->rhs, var));
        case Expr::Op::Mul:
            return expr_add(expr_mul(expr_diff(e->lhs, var), e->rhs),
                            expr_mul(e->lhs, expr_diff(e->rhs, var)));
        case Expr::Op::Div: {
            // (f/g)' = f'/g - f g'/g^2
            ExprPtr fp = expr_diff(e->lhs, var), gp = expr_diff(e->rhs, var);
            ExprPtr left = Expr::make(Expr::Op::Div, fp, e->rhs);
            ExprPtr g2 = expr_mul(e->rhs, e->rhs);
            ExprPtr right = Expr::make(Expr::Op::Div, expr_mul(e->lhs, gp), g2);
            return Expr::make(Expr::Op::Sub, left, right);
        }
        case Expr::Op::Pow: {
            if (e->index == 0) return Expr::num(0.0);
            ExprPtr lower = Expr::make(Expr::Op::Pow, e->lhs, nullptr, e->index - 1);
            return expr_mul(Expr::num(e->index), expr_mul(lower, expr_diff(e->lhs, var)));
        }
        case Expr::Op::Neg: return Expr::make(Expr::Op::Neg, expr_diff(e->lhs, var));
        case Expr::Op::Sin:
            return expr_mul(Expr::make(Expr::Op::Cos, e->lhs), expr_diff(e->lhs, var));
        case Expr::Op::Cos:
            return expr_mul(Expr::make(Expr::Op::Neg, Expr::make(Expr::Op::Sin, e->lhs)),
                            expr_diff(e->lhs, var));
        case Expr::Op::Exp: return expr_mul(ExprPtr(e), expr_diff(e->lhs, var));
    }
    return Expr::num(0.0);
}

bool expr_mentions_t(const ExprPtr& e) {
    if (!e) return false;
    if (e->op == Expr::Op::VarT) return true;
    return expr_mentions_t(e->lhs) || expr_mentions_t(e->rhs);
}

std::string expr_print(const ExprPtr& e) {
    char buf[40];
    switch (e->op) {
        case Expr::Op::Num:
            std::snprintf(buf, sizeof buf, "%.17g", e->value);
            return buf;
        case Expr::Op::VarT: return "t";
        case Expr::Op::VarX: return "x" + std::to_string(e->index + 1);
        case Expr::Op::Add: return "(" + expr_print(e->lhs) + "+" + expr_print(e->rhs) + ")";
        case Expr::Op::Sub: return "(" + expr_print(e->lhs) + "-" + expr_print(e->rhs) + ")";
        case Expr::Op::Mul: return "(" + expr_print(e->lhs) + "*" + expr_print(e->rhs) + ")";
        case Expr::Op::Div: return "(" + expr_print(e->lhs) + "/" + expr_print(e->rhs) + ")";
        case Expr::Op::Pow:
            return "(" + expr_print(e->lhs) + "^" + std::to_string(e->index) + ")";
        case Expr::Op::Neg: return "(-" + expr_print(e->lhs) + ")";
        case Expr::Op::Sin: return "sin(" + expr_print(e->lhs) + ")";
        case Expr::Op::Cos: return "cos(" + expr_print(e->lhs) + ")";
        case Expr::Op::Exp: return "exp(" + expr_print(e->lhs) + ")";
    }
    return "?";
}

// Recursive-descent parser: expr := term (('+'|'-') term)*,
// term := factor (('*'|'/') factor)*, factor := unary ('^' int)?,
// unary := '-' unary | atom, atom := number | t | x<i> | fn '(' expr ')' | '(' expr ')'.
class ExprParser {
public:
    ExprParser(std::string text, int dim) : text_(std::move(text)), dim_(dim) {}

    ExprPtr parse() {
        ExprPtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw StructuralError("expression: trailing input at '" + text_.substr(pos_) + "'");
        return e;
    }

private:
    std::string text_;
    std::size_t pos_ = 0;
    int dim_;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    ExprPtr parse_expr() {
        ExprPtr e = parse_term();
        while (true) {
            if (eat('+')) e = Expr::make(Expr::Op::Add, e, parse_term());
            else if (eat('-')) e = Expr::make(Expr::Op::Sub, e, parse_term());
            else return e;
        }
    }
    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        while (true) {
            if (eat('*')) e = Expr::make(Expr::Op::Mul, e, parse_factor());
            else if (eat('/')) e = Expr::make(Expr::Op::Div, e, parse_factor());
            else return e;
        }
    }
    ExprPtr parse_factor() {
        ExprPtr e = parse_unary();
        if (eat('^')) {
            skip_ws();
            bool neg = eat('-');
            if (neg) throw StructuralError("expression: only non-negative integer powers");
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            if (start == pos_) throw StructuralError("expression: expected integer exponent");
            int exp = std::stoi(text_.substr(start, pos_ - start));
            e = Expr::make(Expr::Op::Pow, e, nullptr, exp);
        }
        return e;
    }
    ExprPtr parse_unary() {
        if (eat('-')) return Expr::make(Expr::Op::Neg, parse_unary());
        return parse_atom();
    }
    ExprPtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw StructuralError("expression: unexpected end");
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t consumed = 0;
            double v = std::stod(text_.substr(pos_), &consumed);
            pos_ += consumed;
            return Expr::num(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string word = text_.substr(start, pos_ - start);
            if (word == "t") return Expr::make(Expr::Op::VarT, nullptr);
            if (word == "x" && dim_ == 1) return Expr::make(Expr::Op::VarX, nullptr, nullptr, 0);
            if (word.size() >= 2 && word[0] == 'x') {
                int axis = std::stoi(word.substr(1)) - 1;
                if (axis < 0 || axis >= dim_)
                    throw StructuralError("expression: unknown variable " + word);
                return Expr::make(Expr::Op::VarX, nullptr, nullptr, axis);
            }
            if (word == "sin" || word == "cos" || word == "exp") {
                if (!eat('(')) throw StructuralError("expression: expected ( after " + word);
                ExprPtr arg = parse_expr();
                if (!eat(')')) throw StructuralError("expression: missing )");
                Expr::Op op = word == "sin" ? Expr::Op::Sin
                             : word == "cos" ? Expr::Op::Cos : Expr::Op::Exp;
                return Expr::make(op, arg);
            }
            throw StructuralError("expression: unknown symbol " + word);
        }
        if (eat('(')) {
            ExprPtr e = parse_expr();
            if (!eat(')')) throw StructuralError("expression: missing )");
            return e;
        }
        throw StructuralError(std::string("expression: unexpected character '") + c + "'");
    }
};

// Coefficient expressions plus a lazily grown table of their derivatives.
class ExpressionModel : public CoefficientModel {
public:
    ExpressionModel(int dim, std::vector<ExprPtr> a, std::vector<ExprPtr> b, ExprPtr c,
                    double gamma, std::string id, ModelBox box)
        : CoefficientModel(dim, gamma, std::move(id), false, std::move(box)),
          a_expr_(std::move(a)), b_expr_(std::move(b)), c_expr_(std::move(c)) {
        for (const auto& e : a_expr_) time_dependent_ = time_dependent_ || expr_mentions_t(e);
        for (const auto& e : b_expr_) time_dependent_ = time_dependent_ || expr_mentions_t(e);
        time_dependent_ = time_dependent_ || expr_mentions_t(c_expr_);
    }

    double a(int i, int j, int k, const DerivIndex& beta, double t,
             const std::vector<double>& x) const override {
        return eval_deriv(a_expr_[static_cast<std::size_t>(i * dim_ + j)], k, beta, t, x);
    }
    double b(int i, int k, const DerivIndex& beta, double t,
             const std::vector<double>& x) const override {
        return eval_deriv(b_expr_[static_cast<std::size_t>(i)], k, beta, t, x);
    }
    double c(int k, const DerivIndex& beta, double t,
             const std::vector<double>& x) const override {
        return eval_deriv(c_expr_, k, beta, t, x);
    }

private:
    std::vector<ExprPtr> a_expr_;  // row-major dim x dim
    std::vector<ExprPtr> b_expr_;
    ExprPtr c_expr_;

    struct DerivKey {
        const Expr* root;
        int k;
        DerivIndex beta;
        bool operator<(const DerivKey& o) const {
            if (root != o.root) return root < o.root;
            if (k != o.k) return k < o.k;
            return beta < o.beta;
        }
    };
    mutable std::map<DerivKey, ExprPtr> deriv_cache_;
    mutable std::mutex cache_mutex_;

    double eval_deriv(const ExprPtr& e, int k, const DerivIndex& beta, double t,
                      const std::vector<double>& x) const {
        ExprPtr d;
        {
            std::lock_guard<std::mutex> lock(cache_mutex_);
            DerivKey key{e.get(), k, beta};
            auto it = deriv_cache_.find(key);
            if (it == deriv_cache_.end()) {
                ExprPtr cur = e;
                for (int i = 0; i < k; ++i) cur = expr_diff(cur, -1);
                for (std::size_t axis = 0; axis < beta.size(); ++axis)
                    for (int i = 0; i < beta[axis]; ++i)
                        cur = expr_diff(cur, static_cast<int>(axis));
                it = deriv_cache_.emplace(std::move(key), std::move(cur)).first;
            }
            d = it->second;
        }
        double v = expr_eval(*d, t, x);
        if (!std::isfinite(v)) throw NumericError("model: coefficient derivative not finite");
        return v;
    }
};

ExprPtr parse_expr_text(const std::string& text, int dim) {
    return ExprParser(text, dim).parse();
}

std::string fmt_param(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double get_param(const std::map<std::string, double>& params, const std::string& key,
                 double fallback, bool required = false) {
    auto it = params.find(key);
    if (it != params.end()) return it->second;
    if (required) throw StructuralError("builtin model: missing parameter '" + key + "'");
    return fallback;
}

ModelPtr make_expression_model(int dim, const std::vector<std::string>& a,
                               const std::vector<std::string>& b, const std::string& c,
                               double gamma, const std::string& id, ModelBox box) {
    std::vector<ExprPtr> ae, be;
    for (const auto& s : a) ae.push_back(parse_expr_text(s, dim));
    for (const auto& s : b) be.push_back(parse_expr_text(s, dim));
    ExprPtr ce = parse_expr_text(c.empty() ? "0" : c, dim);
    if (box.x.empty()) box = ModelBox::standard(dim);
    return std::make_shared<ExpressionModel>(dim, std::move(ae), std::move(be),
                                             std::move(ce), gamma, id, std::move(box));
}

}  // namespace

// ---------------------------------------------------------------------------
// Builtins
// ---------------------------------------------------------------------------

ModelPtr builtin(const std::string& id, const std::map<std::string, double>& params) {
    auto canon = [&](const char* name) {
        std::string s = "builtin:" + std::string(name);
        for (const auto& [k, v] : params) s += ":" + k + "=" + fmt_param(v);
        return s;
    };

    if (id == "const") {
        int dim = static_cast<int>(get_param(params, "N", 1));
        std::vector<std::string> a(static_cast<std::size_t>(dim * dim), "0"),
            b(static_cast<std::size_t>(dim), "0");
        double scalar = get_param(params, "a", 1.0);
        double lmin;
        if (params.count("a11")) {
            std::vector<double> m(static_cast<std::size_t>(dim * dim));
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    std::string key = "a" + std::to_string(i + 1) + std::to_string(j + 1);
                    std::string alt = "a" + std::to_string(j + 1) + std::to_string(i + 1);
                    double v = params.count(key) ? params.at(key)
                              : params.count(alt) ? params.at(alt) : 0.0;
                    m[static_cast<std::size_t>(i * dim + j)] = v;
                    a[static_cast<std::size_t>(i * dim + j)] = fmt_param(v);
                }
            double lmax;
            sym_eigen_range(dim, m, lmin, lmax);
        } else {
            for (int i = 0; i < dim; ++i) a[static_cast<std::size_t>(i * dim + i)] = fmt_param(scalar);
            lmin = scalar;
        }
        for (int i = 0; i < dim; ++i) {
            std::string key = "b" + std::to_string(i + 1);
            if (params.count(key)) b[static_cast<std::size_t>(i)] = fmt_param(params.at(key));
        }
        std::string c = params.count("c") ? fmt_param(params.at("c")) : "0";
        if (!(lmin > 0)) throw DomainError("const model: diffusion not positive definite");
        return make_expression_model(dim, a, b, c, lmin, canon("const"), {});
    }
    if (id == "drift") {
        double a = get_param(params, "a", 1.0);
        double b = get_param(params, "b", 1.0);
        if (!(a > 0)) throw DomainError("drift model: a must be positive");
        return make_expression_model(1, {fmt_param(a)}, {fmt_param(b)}, "0", a,
                                     canon("drift"), {});
    }
    if (id == "ou") {
        double d = get_param(params, "D", 1.0);
        double kappa = get_param(params, "kappa", 1.0);
        if (!(d > 0)) throw DomainError("ou model: D must be positive");
        return make_expression_model(1, {fmt_param(d)},
                                     {"-" + fmt_param(kappa) + "*x1"}, "0", d,
                                     canon("ou"), {});
    }
    if (id == "sin_diffusion") {
        double eps = get_param(params, "eps", 0.3);
        double omega = get_param(params, "omega", 1.0);
        if (std::abs(eps) >= 1.0)
            throw DomainError("sin_diffusion: |eps| >= 1 violates ellipticity");
        std::string a = "1 + " + fmt_param(eps) + "*sin(" + fmt_param(omega) + "*x1)";
        return make_expression_model(1, {a}, {"0"}, "0", 1.0 - std::abs(eps),
                                     canon("sin_diffusion"), {});
    }
    if (id == "time_ramp") {
        double a0 = get_param(params, "a0", 1.0);
        double delta = get_param(params, "delta", 0.5);
        if (!(a0 > 0) || delta < 0)
            throw DomainError("time_ramp: need a0 > 0 and delta >= 0");
        std::string a = fmt_param(a0) + "*(1 + " + fmt_param(delta) + "*t)";
        return make_expression_model(1, {a}, {"0"}, "0", a0, canon("time_ramp"), {});
    }
    if (id == "bs_log") {
        double sigma = get_param(params, "sigma", 0.3);
        double r = get_param(params, "r", 0.05);
        if (!(sigma > 0)) throw DomainError("bs_log: sigma must be positive");
        double a = 0.5 * sigma * sigma;
        return make_expression_model(1, {fmt_param(a)}, {fmt_param(r - a)},
                                     fmt_param(-r), a, canon("bs_log"), {});
    }
    throw StructuralError("unknown builtin model '" + id + "'");
}

// ---------------------------------------------------------------------------
// JSON models
// ---------------------------------------------------------------------------

ModelPtr from_spec(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw StructuralError(std::string("model spec: JSON parse error: ") + e.what());
    }
    if (!doc.contains("N") || !doc.contains("a"))
        throw StructuralError("model spec: required keys N and a");
    int dim = doc["N"].get<int>();
    if (dim < 1) throw StructuralError("model spec: N must be >= 1");

    auto& aj = doc["a"];
    if (!aj.is_array() || aj.size() != static_cast<std::size_t>(dim))
        throw StructuralError("model spec: a must be an NxN array of expressions");
    std::vector<std::string> a;
    for (const auto& row : aj) {
        if (!row.is_array() || row.size() != static_cast<std::size_t>(dim))
            throw StructuralError("model spec: a must be an NxN array of expressions");
        for (const auto& cell : row) a.push_back(cell.get<std::string>());
    }
    std::vector<std::string> b(static_cast<std::size_t>(dim), "0");
    if (doc.contains("b")) {
        auto& bj = doc["b"];
        if (!bj.is_array() || bj.size() != static_cast<std::size_t>(dim))
            throw StructuralError("model spec: b must have N entries");
        for (int i = 0; i < dim; ++i) b[static_cast<std::size_t>(i)] = bj[static_cast<std::size_t>(i)].get<std::string>();
    }
    std::string c = doc.contains("c") ? doc["c"].get<std::string>() : "0";

    ModelBox box = ModelBox::standard(dim);
    if (doc.contains("box")) {
        auto& bx = doc["box"];
        if (bx.contains("t")) box.t = {bx["t"][0].get<double>(), bx["t"][1].get<double>()};
        if (bx.contains("x")) {
            box.x.clear();
            for (const auto& ax : bx["x"])
                box.x.push_back({ax[0].get<double>(), ax[1].get<double>()});
            if (box.x.size() != static_cast<std::size_t>(dim))
                throw StructuralError("model spec: box.x must have N axes");
        }
    }

    // stable id from the canonicalized content
    std::string id = "spec:" + std::to_string(std::hash<std::string>{}(doc.dump()));
    ModelPtr model;
    {
        double gamma = doc.contains("gamma") ? doc["gamma"].get<double>() : 0.0;
        model = make_expression_model(dim, a, b, c, gamma, id, box);
    }

    // symmetry check by sampling
    std::mt19937_64 rng(977);
    DerivIndex beta0(static_cast<std::size_t>(dim), 0);
    for (int s = 0; s < 64; ++s) {
        double t = box.t[0] + (box.t[1] - box.t[0]) *
                   std::uniform_real_distribution<>(0, 1)(rng);
        std::vector<double> x(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i)
            x[static_cast<std::size_t>(i)] = box.x[static_cast<std::size_t>(i)][0] +
                (box.x[static_cast<std::size_t>(i)][1] - box.x[static_cast<std::size_t>(i)][0]) *
                std::uniform_real_distribution<>(0, 1)(rng);
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j) {
                double aij = model->a(i, j, 0, beta0, t, x);
                double aji = model->a(j, i, 0, beta0, t, x);
                if (std::abs(aij - aji) > 1e-12 * (1.0 + std::abs(aij)))
                    throw StructuralError("model spec: a_ij != a_ji at sampled point");
            }
    }

    if (!doc.contains("gamma")) {
        // estimate gamma by sampling, then rebuild with it
        double gmin = 1e300;
        for (int s = 0; s < 2000; ++s) {
            double t = box.t[0] + (box.t[1] - box.t[0]) *
                       std::uniform_real_distribution<>(0, 1)(rng);
            std::vector<double> x(static_cast<std::size_t>(dim));
            for (int i = 0; i < dim; ++i)
                x[static_cast<std::size_t>(i)] = box.x[static_cast<std::size_t>(i)][0] +
                    (box.x[static_cast<std::size_t>(i)][1] - box.x[static_cast<std::size_t>(i)][0]) *
                    std::uniform_real_distribution<>(0, 1)(rng);
            double lmin, lmax;
            sym_eigen_range(dim, model->a_matrix(t, x), lmin, lmax);
            gmin = std::min(gmin, lmin);
        }
        if (!(gmin > 0)) throw DomainError("model spec: sampled ellipticity non-positive");
        model = make_expression_model(dim, a, b, c, gmin * (1.0 - 1e-9), id, box);
    }
    check_ellipticity(*model);
    return model;
}

ModelPtr from_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StructuralError("model spec: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_spec(ss.str());
}

void check_ellipticity(const CoefficientModel& model, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<> unit(0, 1);
    const ModelBox& box = model.box();
    for (int s = 0; s < samples; ++s) {
        double t = box.t[0] + (box.t[1] - box.t[0]) * unit(rng);
        std::vector<double> x(static_cast<std::size_t>(model.dim()));
        for (int i = 0; i < model.dim(); ++i)
            x[static_cast<std::size_t>(i)] = box.x[static_cast<std::size_t>(i)][0] +
                (box.x[static_cast<std::size_t>(i)][1] - box.x[static_cast<std::size_t>(i)][0]) * unit(rng);
        double lmin, lmax;
        sym_eigen_range(model.dim(), model.a_matrix(t, x), lmin, lmax);
        if (lmin < model.gamma() * (1.0 - 1e-9)) {
            std::ostringstream msg;
            msg << "ellipticity violated: lambda_min = " << lmin << " < gamma = "
                << model.gamma() << " at t = " << t << ", x = (";
            for (std::size_t i = 0; i < x.size(); ++i) msg << (i ? "," : "") << x[i];
            msg << ")";
            throw DomainError(msg.str());
        }
    }
}

// ---------------------------------------------------------------------------
// Finite-difference adapter
// ---------------------------------------------------------------------------

namespace {

class FdModel : public CoefficientModel {
public:
    FdModel(int dim, CoefficientValues f, double h, double gamma, ModelBox box)
        : CoefficientModel(dim, gamma, "fd_adapter", true, std::move(box)),
          f_(std::move(f)), h_(h) {}

    double a(int i, int j, int k, const DerivIndex& beta, double t,
             const std::vector<double>& x) const override {
        return fd(k, beta, t, x, [&](double tt, const std::vector<double>& xx) {
            return f_.a(i, j, tt, xx);
        });
    }
    double b(int i, int k, const DerivIndex& beta, double t,
             const std::vector<double>& x) const override {
        if (!f_.b) return 0.0;
        return fd(k, beta, t, x, [&](double tt, const std::vector<double>& xx) {
            return f_.b(i, tt, xx);
        });
    }
    double c(int k, const DerivIndex& beta, double t,
             const std::vector<double>& x) const override {
        if (!f_.c) return 0.0;
        return fd(k, beta, t, x,
                  [&](double tt, const std::vector<double>& xx) { return f_.c(tt, xx); });
    }

private:
    CoefficientValues f_;
    double h_;

    // Nested second-order central differences; accuracy degrades with the
    // total derivative weight, which the header documents.
    double fd(int k, DerivIndex beta, double t, std::vector<double> x,
              const std::function<double(double, const std::vector<double>&)>& g) const {
        if (k > 0) {
            auto lower = [&](double tt) {
                return fd(k - 1, beta, tt, x, g);
            };
            return (lower(t + h_) - lower(t - h_)) / (2.0 * h_);
        }
        for (std::size_t axis = 0; axis < beta.size(); ++axis) {
            if (beta[axis] == 0) continue;
            DerivIndex lower = beta;
            --lower[axis];
            double save = x[axis];
            x[axis] = save + h_;
            double plus = fd(0, lower, t, x, g);
            x[axis] = save - h_;
            double minus = fd(0, lower, t, x, g);
            x[axis] = save;
            return (plus - minus) / (2.0 * h_);
        }
        double v = g(t, x);
        if (!std::isfinite(v)) throw NumericError("fd_adapter: coefficient returned NaN");
        return v;
    }
};

}  // namespace

ModelPtr fd_adapter(int dim, CoefficientValues f, double h, double gamma, ModelBox box) {
    if (!(h > 0)) throw StructuralError("fd_adapter: h must be positive");
    if (!f.a) throw StructuralError("fd_adapter: a evaluator is required");
    if (box.x.empty()) box = ModelBox::standard(dim);
    return std::make_shared<FdModel>(dim, std::move(f), h, gamma, std::move(box));
}

}  // namespace dtcm
