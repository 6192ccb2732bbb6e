// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "omq/cli.hpp"

#include "omq/engine.hpp"
#include "omq/error.hpp"
#include "omq/log.hpp"
#include "omq/oracle.hpp"
#include "omq/parser.hpp"
#include "omq/query.hpp"
#include "omq/rewriter.hpp"
#include "omq/types.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

namespace omq::cli {

namespace {

struct Config {
    std::string kb_path, query_path, core_path, output_path, external_models, goal;
    bool positive = false;
    bool db_constants = false;
    bool emit_ground = false;
    bool oracle = false;
    bool dump_countermodel = false;
    bool allow_abox_symbols = false;
    std::size_t bound = 0;
    unsigned jobs = 1;
    std::uint64_t branch_limit = 1'000'000;
    std::uint64_t conflict_limit = 0;
};

struct Loaded {
    KnowledgeBase kb;
    ConjunctiveQuery query;
    OMQ omq;
};

KnowledgeBase load_kb(const Config& c, std::ostream& err) {
    KnowledgeBase kb = parse_kb(read_file(c.kb_path), c.kb_path);
    ValidationOptions vo;
    vo.extend_with_abox_symbols = c.allow_abox_symbols;
    for (const auto& w : validate_kb(kb, vo)) err << "warning: " << w << "\n";
    return kb;
}

Loaded load(const Config& c, std::ostream& err) {
    Loaded l;
    l.kb = load_kb(c, err);
    auto syms = symbols_of(l.kb.tbox);
    auto inds = individuals_of(l.kb.abox, syms.nominals);
    l.query = parse_query(read_file(c.query_path), c.query_path, {inds.begin(), inds.end()});
    l.omq = make_omq(l.kb, l.query);
    return l;
}

RewriteOutput do_rewrite(const Config& c, const Loaded& l) {
    RewriteOptions ro;
    if (c.db_constants) {
        auto inds = individuals_of(l.kb.abox, l.omq.tbox.nominals);
        if (inds.size() < 2) throw Error("--db-constants needs two distinct individuals in the KB");
        ro.bit_constants = std::make_pair(inds[0], inds[1]);
    }
    if (c.positive) {
        if (!l.kb.sigma.empty()) throw Error("--positive requires a KB without closed predicates");
        return rewrite_positive(l.omq, ro);
    }
    return rewrite(l.omq, ro);
}

std::string join(const std::vector<std::string>& t) {
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) s += (i ? " " : "") + t[i];
    return s;
}

void print_answers(std::ostream& out, const std::set<std::vector<std::string>>& answers, bool inconsistent,
                   std::size_t arity) {
    if (inconsistent) out << "INCONSISTENT\n";
    if (arity == 0) {
        out << (answers.empty() ? "false" : "true") << "\n";
        return;
    }
    for (const auto& t : answers) out << join(t) << "\n";
}

std::vector<std::vector<std::string>> all_tuples(const std::vector<std::string>& inds, std::size_t arity) {
    std::vector<std::vector<std::string>> out{{}};
    for (std::size_t k = 0; k < arity; ++k) {
        std::vector<std::vector<std::string>> next;
        for (const auto& t : out)
            for (const auto& d : inds) {
                auto u = t;
                u.push_back(d);
                next.push_back(std::move(u));
            }
        out = std::move(next);
    }
    return out;
}

int cmd_rewrite(const Config& c, std::ostream& out, std::ostream& err) {
    Loaded l = load(c, err);
    RewriteOutput rw = do_rewrite(c, l);
    if (c.emit_ground) {
        out << datalog::emit_text(ground_p1(rw, l.kb.abox));
        return Ok;
    }
    out << datalog::emit_text(rw.program);
    return Ok;
}

int cmd_answer(const Config& c, std::ostream& out, std::ostream& err) {
    Loaded l = load(c, err);
    const std::size_t arity = l.query.answer_vars.size();
    if (c.oracle) {
        OracleAnswers a = core_enumeration_answers(l.omq, l.kb.abox);
        print_answers(out, a.answers, a.inconsistent, arity);
        return Ok;
    }
    RewriteOutput rw = do_rewrite(c, l);
    if (c.emit_ground) {
        out << datalog::emit_text(ground_p1(rw, l.kb.abox));
        return Ok;
    }
    if (!c.external_models.empty()) {
        auto models = datalog::parse_models(read_file(c.external_models));
        bool all = true;
        for (std::size_t i = 0; i < models.size(); ++i) {
            bool ok = verify_model(rw, l.kb.abox, models[i]);
            all = all && ok;
            out << "model " << i + 1 << ": " << (ok ? "stable" : "not stable") << "\n";
        }
        return all ? Ok : Diagnostic;
    }
    EngineOptions eo;
    eo.jobs = c.jobs;
    eo.branch_limit = c.branch_limit;
    eo.conflict_limit = c.conflict_limit;
    AnswerReport r = certain_answers(rw, l.kb.abox, eo);
    log::info("explored {} p1 models", r.models_explored);
    print_answers(out, r.answers, r.inconsistent, arity);
    return Ok;
}

int cmd_mark(const Config& c, std::ostream& out, std::ostream& err) {
    KnowledgeBase kb = load_kb(c, err);
    NormalTBox nt = normalize(kb.tbox);
    TypeContext ctx(nt, kb.sigma, individuals_of(kb.abox, nt.nominals));
    Core core = core_from_text(parse_core_text(read_file(c.core_path), c.core_path), ctx);
    CoreReport rep = validate_core(core, ctx, kb.abox);
    for (const auto& v : rep.violations) err << "core: " << v << "\n";
    MarkResult m = mark(ctx, core);
    out << dump_types(m, ctx);
    out << "non-losing: " << (has_nonlosing_strategy(core, ctx, m) ? "yes" : "no") << "\n";
    return rep.ok() ? Ok : Diagnostic;
}

int cmd_oracle(const Config& c, std::ostream& out, std::ostream& err) {
    Loaded l = load(c, err);
    RewriteOutput rw = do_rewrite(c, l);
    EngineOptions eo;
    eo.jobs = c.jobs;
    eo.branch_limit = c.branch_limit;
    AnswerReport engine = certain_answers(rw, l.kb.abox, eo);

    std::optional<OracleAnswers> cores;
    try {
        cores = core_enumeration_answers(l.omq, l.kb.abox);
    } catch (const ResourceError& e) {
        err << "core enumeration refused: " << e.what() << "\n";
    }

    BoundedOptions bo;
    bo.max_size = c.bound;
    bo.jobs = c.jobs;
    bo.conflict_limit = c.conflict_limit;
    auto inds = kb_individuals(rw, l.kb.abox);
    bool agree = true;
    for (const auto& t : all_tuples(inds, l.query.answer_vars.size())) {
        bool e = engine.answers.count(t) > 0;
        std::string cv = cores ? (cores->answers.count(t) ? "certain" : "not-certain") : "refused";
        BoundedResult b = bounded_model_search(l.kb, Goal{l.query, t}, bo);
        std::string bv = b.model ? "countermodel" : b.aborted ? "aborted" : "none<=" + std::to_string(b.bound);
        if (cores && (cores->answers.count(t) > 0) != e) agree = false;
        if (b.model && e) agree = false;
        out << (t.empty() ? "()" : join(t)) << ": engine=" << (e ? "certain" : "not-certain") << " core=" << cv
            << " bounded=" << bv << "\n";
        if (b.model && c.dump_countermodel) out << b.model->str(inds);
    }
    out << "agreement: " << (agree ? "yes" : "no") << "\n";
    if (!agree) return Diagnostic;
    return cores ? Ok : Refused;
}

int cmd_check(const Config& c, std::ostream& out, std::ostream& err) {
    Loaded l = load(c, err);
    out << "kb: " << l.kb.tbox.size() << " axioms, " << l.kb.abox.size() << " assertions, " << l.kb.sigma.size()
        << " closed predicates\n";
    out << "normal form: " << l.omq.tbox.axioms.size() << " axioms, " << l.omq.tbox.existentials.size()
        << " existentials, k = " << l.omq.tbox.concept_names.size() + l.omq.tbox.nominals.size() << "\n";
    QueryClass qc = classify(l.omq);
    out << "query: " << to_string(qc) << "\n";
    return std::holds_alternative<Unsupported>(qc) ? Diagnostic : Ok;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    log::init();
    Config c;
    CLI::App app{"Rewrites ontology-mediated queries with closed predicates into Datalog and answers them"};
    app.require_subcommand(1);

    auto kb_query = [&](CLI::App* s) {
        s->add_option("kb", c.kb_path, "Knowledge base file")->required()->check(CLI::ExistingFile);
        s->add_option("query", c.query_path, "Conjunctive query file")->required()->check(CLI::ExistingFile);
        s->add_flag("--allow-abox-symbols", c.allow_abox_symbols, "Accept ABox names missing from the TBox");
        s->add_option("-o,--output", c.output_path, "Write output to a file");
    };
    auto rewrite_flags = [&](CLI::App* s) {
        s->add_flag("--positive", c.positive, "Positive disjunctive program (no closed predicates)");
        s->add_flag("--db-constants", c.db_constants, "Use two KB individuals instead of the bit constants 0 and 1");
    };

    auto* rw = app.add_subcommand("rewrite", "Emit the rewritten program");
    kb_query(rw);
    rewrite_flags(rw);
    rw->add_flag("--emit-ground", c.emit_ground, "Emit the guess-layer grounding over the KB's ABox");

    auto* ans = app.add_subcommand("answer", "Print certain answers");
    kb_query(ans);
    rewrite_flags(ans);
    ans->add_flag("--emit-ground", c.emit_ground, "Emit the guess-layer grounding instead of answering");
    ans->add_option("--external-models", c.external_models, "Verify answer sets produced by another solver")
        ->check(CLI::ExistingFile);
    ans->add_flag("--oracle", c.oracle, "Answer by core enumeration instead of the rewriting");
    ans->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::Range(1u, 256u));
    ans->add_option("--branch-limit", c.branch_limit, "Maximum number of guess-layer models");
    ans->add_option("--conflict-limit", c.conflict_limit, "Conflicts per solver call, 0 for none");

    auto* mk = app.add_subcommand("mark", "Run type elimination on a core");
    mk->add_option("kb", c.kb_path, "Knowledge base file")->required()->check(CLI::ExistingFile);
    mk->add_option("core", c.core_path, "Core in ABox syntax")->required()->check(CLI::ExistingFile);
    mk->add_flag("--allow-abox-symbols", c.allow_abox_symbols, "Accept ABox names missing from the TBox");
    mk->add_option("-o,--output", c.output_path, "Write output to a file");

    auto* orc = app.add_subcommand("oracle", "Cross-check the engine against both oracles");
    kb_query(orc);
    orc->add_option("--bound", c.bound, "Largest domain for the bounded model search");
    orc->add_flag("--dump-countermodel", c.dump_countermodel, "Print countermodels found by the bounded search");
    orc->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::Range(1u, 256u));
    orc->add_option("--branch-limit", c.branch_limit, "Maximum number of guess-layer models");
    orc->add_option("--conflict-limit", c.conflict_limit, "Conflicts per solver call, 0 for none");

    auto* chk = app.add_subcommand("check", "Validate the KB and classify the query");
    kb_query(chk);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? Ok : Diagnostic;
    }

    std::ostringstream buf;
    int code = Ok;
    try {
        if (rw->parsed())
            code = cmd_rewrite(c, buf, err);
        else if (ans->parsed())
            code = cmd_answer(c, buf, err);
        else if (mk->parsed())
            code = cmd_mark(c, buf, err);
        else if (orc->parsed())
            code = cmd_oracle(c, buf, err);
        else
            code = cmd_check(c, buf, err);
    } catch (const ResourceError& e) {
        err << "undecided: " << e.what() << "\n";
        return Refused;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return Diagnostic;
    }
    if (c.output_path.empty()) {
        out << buf.str();
    } else {
        std::ofstream f(c.output_path, std::ios::binary);
        if (!f) {
            err << "error: cannot write " << c.output_path << "\n";
            return Diagnostic;
        }
        f << buf.str();
    }
    return code;
}

} // namespace omq::cli
