// Copyright 2026 the jacette authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied. See the License for the specific language governing
// permissions and limitations under the License.

// Random generator of valid programs for round-trip properties. Every
// generated program resolves: names only reference declarations the same
// program carries.

#ifndef JACETTE_TESTS_AST_GEN_HPP
#define JACETTE_TESTS_AST_GEN_HPP

#include <jacette/ast.hpp>

#include <random>
#include <string>
#include <vector>

namespace jacette_test {

using namespace jacette;

class AstGen {
  public:
    explicit AstGen(std::uint64_t seed) : rng_(seed) {}

    Program program() {
        Program p;
        NodeDecl alpha;
        alpha.name = "alpha";
        alpha.has_fields = {"f0", "f1"};
        NodeDecl beta;
        beta.name = "beta";
        beta.has_fields = {"f0"};
        NodeDecl gamma;
        gamma.name = "gamma";
        gamma.has_fields = {"f0"};
        gamma.can_actions = {"act0"};
        std::size_t n_walkers = 1 + rng_() % 2;
        if (rng_() % 2) {
            std::vector<std::string> acc{"w0"};
            if (n_walkers == 2 && rng_() % 2)
                acc.push_back("w1");
            alpha.access_walkers = acc;
        }
        p.node_decls = {alpha, beta, gamma};
        EdgeDecl e0;
        e0.name = "e0";
        EdgeDecl e1;
        e1.name = "e1";
        e1.has_fields = {"w"};
        p.edge_decls = {e0, e1};
        for (std::size_t i = 0; i < n_walkers; ++i) {
            WalkerDecl w;
            w.name = "w" + std::to_string(i);
            w.has_fields = {"v0", "v1"};
            w.can_actions = {"act1"};
            w.body = stmts(2, 1 + rng_() % 5);
            p.walker_decls.push_back(std::move(w));
        }
        return p;
    }

  private:
    std::mt19937_64 rng_;
    std::vector<std::string> loop_vars_;
    int next_loop_ = 0;

    ExprPtr expr(int depth) {
        if (depth <= 0)
            return leaf();
        switch (rng_() % 10) {
        case 0:
        case 1:
            return leaf();
        case 2:
            return make_expr(Unary{rng_() % 2 ? UnaryOp::Neg : UnaryOp::Not, expr(depth - 1)});
        case 3:
        case 4:
        case 5: {
            static constexpr BinKind kKinds[] = {BinKind::Or,  BinKind::And, BinKind::Eq,
                                                 BinKind::Ne,  BinKind::Lt,  BinKind::Gt,
                                                 BinKind::Add, BinKind::Sub, BinKind::Mul,
                                                 BinKind::Div};
            return make_expr(
                BinOp{kKinds[rng_() % 10], expr(depth - 1), expr(depth - 1)});
        }
        case 6: {
            ListLit l;
            for (std::size_t i = 0, n = rng_() % 3; i < n; ++i)
                l.items.push_back(expr(depth - 1));
            return make_expr(std::move(l));
        }
        case 7:
            return make_expr(Index{leaf(), expr(depth - 1)});
        case 8: {
            ActionCall c;
            c.name = rng_() % 2 ? "act0" : "act1";
            for (std::size_t i = 0, n = rng_() % 3; i < n; ++i)
                c.args.push_back(expr(depth - 1));
            return make_expr(std::move(c));
        }
        default:
            return leaf();
        }
    }

    ExprPtr leaf() {
        switch (rng_() % 8) {
        case 0:
            return make_expr(Literal{ContextValue(static_cast<std::int64_t>(rng_() % 100))});
        case 1: {
            double v = static_cast<double>(rng_() % 100) + 0.25;
            return make_expr(Literal{ContextValue(v)});
        }
        case 2:
            return make_expr(Literal{ContextValue(rng_() % 2 == 0)});
        case 3:
            return make_expr(Literal{ContextValue(nullptr)});
        case 4: {
            static const std::string kPool[] = {"plain", "with space", "q\"uote", "back\\slash",
                                                "line\nbreak"};
            return make_expr(Literal{ContextValue(kPool[rng_() % 5])});
        }
        case 5:
            return make_expr(HereField{rng_() % 2 ? "f0" : "f1"});
        default: {
            if (!loop_vars_.empty() && rng_() % 2)
                return make_expr(NameRef{loop_vars_[rng_() % loop_vars_.size()]});
            return make_expr(NameRef{rng_() % 2 ? "v0" : "v1"});
        }
        }
    }

    std::vector<Stmt> stmts(int depth, std::size_t count) {
        std::vector<Stmt> out;
        for (std::size_t i = 0; i < count; ++i)
            out.push_back(stmt(depth));
        return out;
    }

    Stmt stmt(int depth) {
        static constexpr Direction kDirs[] = {Direction::Out, Direction::In, Direction::Both};
        switch (rng_() % (depth > 0 ? 8 : 6)) {
        case 0: {
            Assign a;
            a.to_here = rng_() % 3 == 0;
            a.name = a.to_here ? (rng_() % 2 ? "f0" : "f1") : (rng_() % 2 ? "v0" : "v1");
            a.value = expr(2);
            return Stmt{std::move(a)};
        }
        case 1: {
            Take t;
            t.dir = kDirs[rng_() % 3];
            if (rng_() % 2)
                t.edge_type = rng_() % 2 ? "e0" : "e1";
            if (rng_() % 2)
                t.node_type = rng_() % 2 ? "alpha" : "beta";
            return Stmt{std::move(t)};
        }
        case 2: {
            SpawnStmt s;
            s.dir = rng_() % 2 ? Direction::Out : Direction::In;
            s.edge_type = rng_() % 2 ? "e0" : "e1";
            switch (rng_() % 3) {
            case 0:
                s.node_type = "alpha";
                if (rng_() % 2)
                    s.inits.push_back({"f0", expr(1)});
                if (rng_() % 2)
                    s.inits.push_back({"f1", expr(1)});
                break;
            case 1:
                s.node_type = "beta";
                if (rng_() % 2)
                    s.inits.push_back({"f0", expr(1)});
                break;
            default:
                s.node_type = "gamma";
                break;
            }
            return Stmt{std::move(s)};
        }
        case 3:
            return Stmt{Report{expr(2)}};
        case 4:
            return Stmt{Disengage{}};
        case 5:
            return Stmt{ExprStmt{expr(2)}};
        case 6: {
            If f;
            f.cond = expr(2);
            f.then_body = stmts(depth - 1, 1 + rng_() % 2);
            if (rng_() % 2)
                f.else_body = stmts(depth - 1, 1 + rng_() % 2);
            return Stmt{std::move(f)};
        }
        default: {
            ForIn f;
            f.var = "t" + std::to_string(next_loop_++);
            f.iterable = expr(1);
            loop_vars_.push_back(f.var);
            f.body = stmts(depth - 1, 1 + rng_() % 2);
            loop_vars_.pop_back();
            return Stmt{std::move(f)};
        }
        }
    }
};

}  // namespace jacette_test

#endif
