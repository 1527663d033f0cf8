#include "uag/fo.hpp"

#include <algorithm>
#include <cctype>

#include "uag/error.hpp"

namespace uag::fo {

namespace {

using NodePtr = std::shared_ptr<const Formula::Node>;

NodePtr share(const Formula& f) {
    if (f.empty()) throw DomainError("empty formula operand");
    return f.shared();
}

Formula make(Kind k, std::string v1, std::string v2, NodePtr l, NodePtr r) {
    return Formula(std::make_shared<const Formula::Node>(
        Formula::Node{k, std::move(v1), std::move(v2), std::move(l), std::move(r)}));
}

bool node_equal(const Formula::Node* a, const Formula::Node* b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return a->kind == b->kind && a->var == b->var && a->var2 == b->var2 &&
           node_equal(a->lhs.get(), b->lhs.get()) && node_equal(a->rhs.get(), b->rhs.get());
}

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_name_char(char c) { return is_lower(c) || (c >= '0' && c <= '9') || c == '_'; }

std::string checked(std::string v) {
    if (v.empty() || !is_lower(v[0]) || !std::all_of(v.begin(), v.end(), is_name_char))
        throw DomainError("invalid variable name '" + v + "'");
    return v;
}

} // namespace

bool operator==(const Formula& a, const Formula& b) { return node_equal(a.node(), b.node()); }

Formula exists(std::string var, Formula body) {
    return make(Kind::Exists, checked(std::move(var)), {}, share(body), nullptr);
}
Formula forall(std::string var, Formula body) {
    return make(Kind::Forall, checked(std::move(var)), {}, share(body), nullptr);
}
Formula conj(Formula a, Formula b) { return make(Kind::And, {}, {}, share(a), share(b)); }
Formula disj(Formula a, Formula b) { return make(Kind::Or, {}, {}, share(a), share(b)); }
Formula neg(Formula a) { return make(Kind::Not, {}, {}, share(a), nullptr); }
Formula implies(Formula a, Formula b) { return make(Kind::Implies, {}, {}, share(a), share(b)); }
Formula iff(Formula a, Formula b) { return make(Kind::Iff, {}, {}, share(a), share(b)); }
Formula adj(std::string u, std::string v) {
    return make(Kind::Adj, checked(std::move(u)), checked(std::move(v)), nullptr, nullptr);
}
Formula eq(std::string u, std::string v) {
    return make(Kind::Eq, checked(std::move(u)), checked(std::move(v)), nullptr, nullptr);
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    Formula run() {
        Formula f = parse_iff();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return f;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError("syntax error: " + msg, pos_); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(std::string_view tok) {
        skip();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    void expect(std::string_view tok) {
        if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
    }

    std::string var() {
        skip();
        if (pos_ >= s_.size() || !is_lower(s_[pos_])) fail("expected variable");
        std::size_t start = pos_;
        while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    Formula parse_iff() {
        Formula l = parse_implies();
        if (accept("<->")) {
            Formula r = parse_implies();
            skip();
            if (s_.substr(pos_, 3) == "<->") fail("'<->' is non-associative; add parentheses");
            return iff(l, r);
        }
        return l;
    }

    Formula parse_implies() {
        Formula l = parse_or();
        if (accept("->")) return implies(l, parse_implies());
        return l;
    }

    Formula parse_or() {
        Formula l = parse_and();
        while (accept("|")) l = disj(l, parse_and());
        return l;
    }

    Formula parse_and() {
        Formula l = parse_unary();
        while (accept("&")) l = conj(l, parse_unary());
        return l;
    }

    Formula parse_unary() {
        skip();
        if (accept("!")) return neg(parse_unary());
        if (pos_ < s_.size() && (s_[pos_] == 'E' || s_[pos_] == 'A')) {
            bool ex = s_[pos_] == 'E';
            ++pos_;
            std::string v = var();
            expect(".");
            Formula body = parse_iff();  // body extends as far right as possible
            return ex ? exists(v, body) : forall(v, body);
        }
        if (accept("(")) {
            Formula f = parse_iff();
            expect(")");
            return f;
        }
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (!is_lower(s_[pos_])) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        std::string u = var();
        if (accept("~")) return adj(u, var());
        if (accept("=")) return eq(u, var());
        fail("expected '~' or '=' after variable");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

void collect_free(const Formula::Node* n, std::multiset<std::string>& bound, std::set<std::string>& out) {
    switch (n->kind) {
    case Kind::Adj:
    case Kind::Eq:
        if (!bound.count(n->var)) out.insert(n->var);
        if (!bound.count(n->var2)) out.insert(n->var2);
        return;
    case Kind::Exists:
    case Kind::Forall: {
        auto it = bound.insert(n->var);
        collect_free(n->lhs.get(), bound, out);
        bound.erase(it);
        return;
    }
    default:
        collect_free(n->lhs.get(), bound, out);
        if (n->rhs) collect_free(n->rhs.get(), bound, out);
    }
}

void collect_vars(const Formula::Node* n, std::set<std::string>& out) {
    if (!n) return;
    if (!n->var.empty()) out.insert(n->var);
    if (!n->var2.empty()) out.insert(n->var2);
    collect_vars(n->lhs.get(), out);
    collect_vars(n->rhs.get(), out);
}

std::size_t depth_of(const Formula::Node* n) {
    if (!n) return 0;
    std::size_t d = std::max(depth_of(n->lhs.get()), depth_of(n->rhs.get()));
    return (n->kind == Kind::Exists || n->kind == Kind::Forall) ? d + 1 : d;
}

} // namespace

std::set<std::string> free_variables(const Formula& f) {
    std::set<std::string> out;
    std::multiset<std::string> bound;
    collect_free(f.node(), bound, out);
    return out;
}

Formula parse(std::string_view text, bool require_sentence) {
    Formula f = Parser(text).run();
    if (require_sentence) {
        auto fv = free_variables(f);
        if (!fv.empty()) {
            std::string names;
            for (auto& v : fv) names += (names.empty() ? "" : ", ") + v;
            throw DomainError("not a sentence: free variables " + names);
        }
    }
    return f;
}

std::size_t distinct_variables(const Formula& f) {
    std::set<std::string> vs;
    collect_vars(f.node(), vs);
    return vs.size();
}

std::size_t quantifier_depth(const Formula& f) { return depth_of(f.node()); }

bool is_sentence(const Formula& f) { return free_variables(f).empty(); }

// ---------------------------------------------------------------- printing

namespace {

void print(const Formula& f, std::string& out);

void print_operand(const Formula& f, std::string& out) {
    if (f.kind() == Kind::Not || f.is_quantifier()) {
        out += '(';
        print(f, out);
        out += ')';
    } else {
        print(f, out);
    }
}

void print(const Formula& f, std::string& out) {
    switch (f.kind()) {
    case Kind::Adj:
    case Kind::Eq:
        out += '(' + f.var() + (f.kind() == Kind::Adj ? " ~ " : " = ") + f.var2() + ')';
        return;
    case Kind::Not:
        out += '!';
        print(f.lhs(), out);
        return;
    case Kind::Exists:
    case Kind::Forall:
        out += (f.kind() == Kind::Exists ? "E" : "A") + f.var() + ".(";
        print(f.body(), out);
        out += ')';
        return;
    default: {
        const char* op = f.kind() == Kind::And       ? " & "
                         : f.kind() == Kind::Or      ? " | "
                         : f.kind() == Kind::Implies ? " -> "
                                                     : " <-> ";
        out += '(';
        print_operand(f.lhs(), out);
        out += op;
        print_operand(f.rhs(), out);
        out += ')';
    }
    }
}

} // namespace

std::string canonical_print(const Formula& f) {
    std::string out;
    print(f, out);
    return out;
}

// ---------------------------------------------------------------- evaluation

namespace {

void conjuncts(const Formula& f, std::vector<Formula>& out) {
    if (f.kind() == Kind::And) {
        conjuncts(f.lhs(), out);
        conjuncts(f.rhs(), out);
    } else {
        out.push_back(f);
    }
}

} // namespace

int Evaluator::slot_of(const std::string& name) {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it != names_.end()) return static_cast<int>(it - names_.begin());
    names_.push_back(name);
    return static_cast<int>(names_.size() - 1);
}

Evaluator::Evaluator(const Formula& f) : free_(free_variables(f)) {
    if (f.empty()) throw DomainError("cannot evaluate an empty formula");
    root_ = compile(f);
}

int Evaluator::compile(const Formula& f) {
    Op op{f.kind()};
    switch (f.kind()) {
    case Kind::Adj:
    case Kind::Eq:
        op.a = slot_of(f.var());
        op.b = slot_of(f.var2());
        break;
    case Kind::Not:
        op.lhs = compile(f.lhs());
        break;
    case Kind::Exists:
    case Kind::Forall: {
        op.a = slot_of(f.var());
        op.lhs = compile(f.body());
        // look for a guard atom var ~ z or var = z among the relevant conjuncts
        std::vector<Formula> cs;
        if (f.kind() == Kind::Exists)
            conjuncts(f.body(), cs);
        else if (f.body().kind() == Kind::Implies)
            conjuncts(f.body().lhs(), cs);
        for (auto& c : cs) {
            if (!c.is_atom()) continue;
            std::string other;
            if (c.var() == f.var() && c.var2() != f.var()) other = c.var2();
            else if (c.var2() == f.var() && c.var() != f.var()) other = c.var();
            else continue;
            bool is_eq = c.kind() == Kind::Eq;
            if (op.guard >= 0 && !is_eq) continue;  // an equality guard beats adjacency
            op.guard = slot_of(other);
            op.guard_is_eq = is_eq;
            if (is_eq) break;
        }
        break;
    }
    default:
        op.lhs = compile(f.lhs());
        op.rhs = compile(f.rhs());
    }
    ops_.push_back(op);
    return static_cast<int>(ops_.size() - 1);
}

bool Evaluator::eval(int idx, const Graph& g, std::vector<Vertex>& slot) const {
    const Op& op = ops_[idx];
    switch (op.kind) {
    case Kind::Adj:
        return slot[op.a] != slot[op.b] && g.adjacent(slot[op.a], slot[op.b]);
    case Kind::Eq:
        return slot[op.a] == slot[op.b];
    case Kind::Not:
        return !eval(op.lhs, g, slot);
    case Kind::And:
        return eval(op.lhs, g, slot) && eval(op.rhs, g, slot);
    case Kind::Or:
        return eval(op.lhs, g, slot) || eval(op.rhs, g, slot);
    case Kind::Implies:
        return !eval(op.lhs, g, slot) || eval(op.rhs, g, slot);
    case Kind::Iff:
        return eval(op.lhs, g, slot) == eval(op.rhs, g, slot);
    case Kind::Exists:
    case Kind::Forall: {
        bool want = op.kind == Kind::Exists;  // value that decides early
        Vertex saved = slot[op.a];
        bool result = !want;
        auto try_vertex = [&](Vertex v) {
            slot[op.a] = v;
            if (eval(op.lhs, g, slot) == want) {
                result = want;
                return true;
            }
            return false;
        };
        if (op.guard >= 0) {
            Vertex z = slot[op.guard];
            if (op.guard_is_eq) {
                try_vertex(z);
            } else {
                for (Vertex v : g.neighbors(z))
                    if (try_vertex(v)) break;
            }
        } else {
            for (Vertex v = 1; v <= g.order(); ++v)
                if (try_vertex(v)) break;
        }
        slot[op.a] = saved;
        return result;
    }
    }
    return false;
}

bool Evaluator::operator()(const Graph& g, const Assignment& env) const {
    std::vector<Vertex> slot(names_.size(), 0);
    for (auto& v : free_) {
        auto it = env.find(v);
        if (it == env.end()) throw DomainError("unbound free variable " + v);
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
        auto it = env.find(names_[i]);
        if (it != env.end()) {
            g.check_vertex(it->second);
            slot[i] = it->second;
        }
    }
    return eval(root_, g, slot);
}

bool evaluate(const Formula& f, const Graph& g, const Assignment& env) { return Evaluator(f)(g, env); }

} // namespace uag::fo
