#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "uag/graph.hpp"

namespace uag::fo {

enum class Kind { Exists, Forall, And, Or, Not, Implies, Iff, Adj, Eq };

// Immutable first-order formula over {~, =}. Nodes are shared.
class Formula {
public:
    struct Node {
        Kind kind;
        std::string var;   // quantified variable, or first atom argument
        std::string var2;  // second atom argument
        std::shared_ptr<const Node> lhs;  // body / operand / left
        std::shared_ptr<const Node> rhs;
    };

    Formula() = default;
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    bool empty() const { return !node_; }
    Kind kind() const { return node_->kind; }
    const std::string& var() const { return node_->var; }
    const std::string& var2() const { return node_->var2; }
    Formula lhs() const { return Formula(node_->lhs); }
    Formula rhs() const { return Formula(node_->rhs); }
    Formula body() const { return lhs(); }
    const Node* node() const { return node_.get(); }
    const std::shared_ptr<const Node>& shared() const { return node_; }

    bool is_quantifier() const { return kind() == Kind::Exists || kind() == Kind::Forall; }
    bool is_atom() const { return kind() == Kind::Adj || kind() == Kind::Eq; }
    bool is_binary() const {
        return kind() == Kind::And || kind() == Kind::Or || kind() == Kind::Implies || kind() == Kind::Iff;
    }

    friend bool operator==(const Formula& a, const Formula& b);

private:
    std::shared_ptr<const Node> node_;
};

Formula exists(std::string var, Formula body);
Formula forall(std::string var, Formula body);
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
Formula neg(Formula a);
Formula implies(Formula a, Formula b);
Formula iff(Formula a, Formula b);
Formula adj(std::string u, std::string v);
Formula eq(std::string u, std::string v);

// Throws ParseError (syntax, with byte offset) or DomainError (free variables
// when a sentence is required).
Formula parse(std::string_view text, bool require_sentence = true);

std::set<std::string> free_variables(const Formula& f);
std::size_t distinct_variables(const Formula& f);
std::size_t quantifier_depth(const Formula& f);
bool is_sentence(const Formula& f);

std::string canonical_print(const Formula& f);

using Assignment = std::map<std::string, Vertex>;

bool evaluate(const Formula& f, const Graph& g, const Assignment& env = {});

// Evaluator compiled once for repeated use: one slot per variable name,
// short-circuiting connectives, and quantifiers guarded by an adjacency or
// equality conjunct iterate only the guard's candidates.
class Evaluator {
public:
    explicit Evaluator(const Formula& f);
    bool operator()(const Graph& g, const Assignment& env = {}) const;
    const std::vector<std::string>& slots() const { return names_; }

private:
    struct Op {
        Kind kind;
        int a = -1, b = -1;         // slots for atoms / quantifier
        int lhs = -1, rhs = -1;     // child op indices
        int guard = -1;             // slot whose value restricts a quantifier
        bool guard_is_eq = false;
        int guarded_body = -1;      // for guarded Forall: the consequent to check
    };
    int compile(const Formula& f);
    bool eval(int op, const Graph& g, std::vector<Vertex>& slot) const;
    int slot_of(const std::string& name);

    std::vector<Op> ops_;
    std::vector<std::string> names_;
    std::set<std::string> free_;
    int root_ = -1;
};

} // namespace uag::fo
