// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "omq/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace omq {

namespace {

enum class Tok { Name, Int, Sym, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourceSpan at;
};

const std::set<std::string> kKeywords = {"tbox", "abox", "closed", "top",    "bot", "not",
                                         "and",  "or",   "exists", "forall", "inv"};

class Lexer {
public:
    Lexer(const std::string& text, const std::string& file) : s_(text), file_(file) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t;
            t.at = {file_, line_, col_};
            if (i_ >= s_.size()) {
                out.push_back(t);
                return out;
            }
            char c = s_[i_];
            if (std::isalpha(static_cast<unsigned char>(c))) {
                t.kind = Tok::Name;
                while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
                    t.text += advance();
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                t.kind = Tok::Int;
                while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) t.text += advance();
            } else if (c == '_') {
                throw Error(t.at, "identifiers starting with '_' are reserved");
            } else if (c == '<' && peek(1) == '=') {
                t.kind = Tok::Sym;
                t.text = "<=";
                advance();
                advance();
            } else if (c == ':' && peek(1) == '-') {
                t.kind = Tok::Sym;
                t.text = ":-";
                advance();
                advance();
            } else if (std::string("{}();,.^").find(c) != std::string::npos) {
                t.kind = Tok::Sym;
                t.text = std::string(1, advance());
            } else {
                throw Error(t.at, std::string("unexpected character '") + c + "'");
            }
            out.push_back(t);
        }
    }

private:
    char peek(std::size_t k) const { return i_ + k < s_.size() ? s_[i_ + k] : '\0'; }
    char advance() {
        char c = s_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_space() {
        while (i_ < s_.size()) {
            if (s_[i_] == '#') {
                while (i_ < s_.size() && s_[i_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
                advance();
            } else {
                break;
            }
        }
    }

    const std::string& s_;
    std::string file_;
    std::size_t i_ = 0, line_ = 1, col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

    const Token& cur() const { return t_[p_]; }
    const Token& look(std::size_t k) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
    bool is_sym(const std::string& s) const { return cur().kind == Tok::Sym && cur().text == s; }
    bool is_kw(const std::string& s) const { return cur().kind == Tok::Name && cur().text == s; }
    bool at_end() const { return cur().kind == Tok::End; }

    [[noreturn]] void fail(const std::string& msg) const {
        std::string found = at_end() ? "end of input" : "'" + cur().text + "'";
        throw Error(cur().at, msg + " (found " + found + ")");
    }

    void expect_sym(const std::string& s) {
        if (!is_sym(s)) fail("expected '" + s + "'");
        ++p_;
    }
    void expect_kw(const std::string& s) {
        if (!is_kw(s)) fail("expected '" + s + "'");
        ++p_;
    }
    std::string name(const char* what) {
        if (cur().kind != Tok::Name || kKeywords.count(cur().text)) fail(std::string("expected ") + what);
        return t_[p_++].text;
    }

    RoleExpr role() {
        if (is_kw("inv")) {
            ++p_;
            expect_sym("(");
            std::string n = name("role name");
            expect_sym(")");
            return {n, true};
        }
        return {name("role name"), false};
    }

    ConceptExpr concept_expr() {
        ConceptExpr c = conjunction();
        while (is_kw("or")) {
            ++p_;
            c = ConceptExpr::disj(c, conjunction());
        }
        return c;
    }

    ConceptExpr conjunction() {
        ConceptExpr c = unary();
        while (is_kw("and")) {
            ++p_;
            c = ConceptExpr::conj(c, unary());
        }
        return c;
    }

    ConceptExpr unary() {
        if (is_kw("not")) {
            ++p_;
            return ConceptExpr::negation(unary());
        }
        if (is_kw("exists") || is_kw("forall")) {
            bool ex = is_kw("exists");
            ++p_;
            RoleExpr r = role();
            expect_sym(".");
            if (at_end() || is_sym(";") || is_sym(")") || is_sym("}")) fail("expected concept");
            ConceptExpr c = unary();
            return ex ? ConceptExpr::exists(r, c) : ConceptExpr::forall(r, c);
        }
        if (is_kw("top")) {
            ++p_;
            return ConceptExpr::top();
        }
        if (is_kw("bot")) {
            ++p_;
            return ConceptExpr::bot();
        }
        if (is_sym("{")) {
            ++p_;
            std::string a = name("individual name");
            expect_sym("}");
            return ConceptExpr::nominal(a);
        }
        if (is_sym("(")) {
            ++p_;
            ConceptExpr c = concept_expr();
            expect_sym(")");
            return c;
        }
        return ConceptExpr::name(name("concept"));
    }

    std::size_t p_ = 0;
    std::vector<Token> t_;
};

struct PendingAxiom {
    enum Kind { Concept, Role, Ambiguous } kind;
    ConceptIncl ci;
    RoleIncl ri;
    SourceSpan at;
};

} // namespace

std::set<std::string> ConjunctiveQuery::variables() const {
    std::set<std::string> vs;
    for (const auto& a : atoms) vs.insert(a.vars.begin(), a.vars.end());
    return vs;
}

KnowledgeBase parse_kb(const std::string& text, const std::string& file) {
    Parser ps(Lexer(text, file).run());
    KnowledgeBase kb;
    std::vector<PendingAxiom> pending;
    std::set<std::string> role_names, concept_names;

    ps.expect_kw("tbox");
    ps.expect_sym("{");
    while (!ps.is_sym("}")) {
        PendingAxiom ax;
        ax.at = ps.cur().at;
        if (ps.is_kw("inv")) {
            ax.kind = PendingAxiom::Role;
            ax.ri.lhs = ps.role();
            ps.expect_sym("<=");
            ax.ri.rhs = ps.role();
        } else {
            ConceptExpr lhs = ps.concept_expr();
            ps.expect_sym("<=");
            if (lhs.kind() == ConceptExpr::Kind::Name && ps.is_kw("inv")) {
                ax.kind = PendingAxiom::Role;
                ax.ri.lhs = {lhs.label(), false};
                ax.ri.rhs = ps.role();
            } else {
                ConceptExpr rhs = ps.concept_expr();
                ax.kind = lhs.kind() == ConceptExpr::Kind::Name && rhs.kind() == ConceptExpr::Kind::Name
                              ? PendingAxiom::Ambiguous
                              : PendingAxiom::Concept;
                ax.ci = {lhs, rhs};
                if (ax.kind == PendingAxiom::Concept) {
                    TBoxSymbols syms;
                    collect_symbols(lhs, syms);
                    collect_symbols(rhs, syms);
                    concept_names.insert(syms.concepts.begin(), syms.concepts.end());
                    role_names.insert(syms.roles.begin(), syms.roles.end());
                }
            }
        }
        if (ax.kind == PendingAxiom::Role) {
            role_names.insert(ax.ri.lhs.name);
            role_names.insert(ax.ri.rhs.name);
        }
        ps.expect_sym(";");
        pending.push_back(std::move(ax));
    }
    ps.expect_sym("}");

    ps.expect_kw("abox");
    ps.expect_sym("{");
    while (!ps.is_sym("}")) {
        if (ps.at_end()) ps.fail("expected '}'");
        if (ps.is_sym("(") || ps.is_sym("{") || (ps.cur().kind == Tok::Name && kKeywords.count(ps.cur().text)))
            throw Error(ps.cur().at, "assertion uses complex concept");
        Assertion a;
        a.predicate = ps.name("predicate name");
        if (!ps.is_sym("(")) {
            if (ps.is_kw("and") || ps.is_kw("or"))
                throw Error(ps.cur().at, "assertion uses complex concept");
            ps.fail("expected '('");
        }
        ps.expect_sym("(");
        a.args.push_back(ps.name("individual name"));
        if (ps.is_sym(",")) {
            ps.expect_sym(",");
            a.args.push_back(ps.name("individual name"));
        }
        ps.expect_sym(")");
        ps.expect_sym(";");
        (a.is_role() ? role_names : concept_names).insert(a.predicate);
        kb.abox.push_back(std::move(a));
    }
    ps.expect_sym("}");

    if (ps.is_kw("closed")) {
        ps.expect_kw("closed");
        ps.expect_sym("{");
        while (!ps.is_sym("}")) {
            SourceSpan at = ps.cur().at;
            std::string n = ps.name("predicate name");
            if (!kb.sigma.insert(n).second) throw Error(at, "duplicate closed-predicate declaration '" + n + "'");
            ps.expect_sym(";");
        }
        ps.expect_sym("}");
    }
    if (!ps.at_end()) ps.fail("expected end of input");

    for (auto& ax : pending) {
        if (ax.kind == PendingAxiom::Ambiguous) {
            const auto& l = ax.ci.lhs.label();
            const auto& r = ax.ci.rhs.label();
            bool lr = role_names.count(l), rr = role_names.count(r);
            if (lr || rr) {
                if (concept_names.count(l) || concept_names.count(r))
                    throw Error(ax.at, "inclusion mixes a role and a concept");
                ax.kind = PendingAxiom::Role;
                ax.ri = {{l, false}, {r, false}};
            } else {
                ax.kind = PendingAxiom::Concept;
            }
        }
        if (ax.kind == PendingAxiom::Role)
            kb.tbox.push_back(ax.ri);
        else
            kb.tbox.push_back(ax.ci);
    }
    return kb;
}

ConjunctiveQuery parse_query(const std::string& text, const std::string& file,
                             const std::set<std::string>& individuals) {
    Parser ps(Lexer(text, file).run());
    ConjunctiveQuery q;
    q.name = ps.name("query name");
    ps.expect_sym("(");
    if (!ps.is_sym(")")) {
        q.answer_vars.push_back(ps.name("variable"));
        while (ps.is_sym(",")) {
            ps.expect_sym(",");
            q.answer_vars.push_back(ps.name("variable"));
        }
    }
    ps.expect_sym(")");
    ps.expect_sym(":-");
    std::set<QueryAtom> atoms;
    for (;;) {
        QueryAtom a;
        a.predicate = ps.name("predicate name");
        ps.expect_sym("(");
        auto arg = [&] {
            SourceSpan at = ps.cur().at;
            if (ps.cur().kind == Tok::Int) throw Error(at, "constant in atom position");
            std::string v = ps.name("variable");
            if (individuals.count(v)) throw Error(at, "individual '" + v + "' in query");
            a.vars.push_back(v);
        };
        arg();
        if (ps.is_sym(",")) {
            ps.expect_sym(",");
            arg();
        }
        ps.expect_sym(")");
        atoms.insert(a);
        if (ps.is_sym(".")) break;
        ps.expect_sym(",");
    }
    ps.expect_sym(".");
    if (!ps.at_end()) ps.fail("expected end of input");
    q.atoms.assign(atoms.begin(), atoms.end());
    auto vars = q.variables();
    for (const auto& v : q.answer_vars)
        if (!vars.count(v)) throw Error("answer variable '" + v + "' does not occur in the query body");
    return q;
}

std::string to_string(const KnowledgeBase& kb) {
    std::ostringstream os;
    os << "tbox {\n";
    for (const auto& ax : kb.tbox) os << "  " << to_string(ax) << ";\n";
    os << "}\nabox {\n";
    for (const auto& a : kb.abox) os << "  " << a.str() << ";\n";
    os << "}\n";
    if (!kb.sigma.empty()) {
        os << "closed {";
        for (const auto& s : kb.sigma) os << " " << s << ";";
        os << " }\n";
    }
    return os.str();
}

std::string to_string(const ConjunctiveQuery& q) {
    std::ostringstream os;
    os << q.name << "(";
    for (std::size_t i = 0; i < q.answer_vars.size(); ++i) os << (i ? "," : "") << q.answer_vars[i];
    os << ") :- ";
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
        const auto& a = q.atoms[i];
        os << (i ? ", " : "") << a.predicate << "(" << a.vars[0];
        if (a.is_role()) os << "," << a.vars[1];
        os << ")";
    }
    os << ".";
    return os.str();
}

CoreText parse_core_text(const std::string& text, const std::string& file) {
    Parser ps(Lexer(text, file).run());
    CoreText out;
    auto element = [&] {
        std::string e = ps.name("element");
        if (ps.is_sym("^")) {
            ps.expect_sym("^");
            if (ps.cur().kind != Tok::Int) ps.fail("expected existential index");
            e += "^" + ps.cur().text;
            ++ps.p_;
        }
        return e;
    };
    ps.expect_kw("abox");
    ps.expect_sym("{");
    while (!ps.is_sym("}")) {
        if (ps.at_end()) ps.fail("expected '}'");
        if (ps.look(1).kind == Tok::Sym && ps.look(1).text == "(") {
            Assertion a;
            a.predicate = ps.name("predicate name");
            ps.expect_sym("(");
            a.args.push_back(element());
            if (ps.is_sym(",")) {
                ps.expect_sym(",");
                a.args.push_back(element());
            }
            ps.expect_sym(")");
            out.assertions.push_back(std::move(a));
        } else {
            out.declared.push_back(element());
        }
        ps.expect_sym(";");
    }
    ps.expect_sym("}");
    if (!ps.at_end()) ps.fail("expected end of input");
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace omq
