// Copyright 2026 the Jacette developers
// Licensed under the Apache License, Version 2.0 (see LICENSE file)

#ifndef JACETTE_LEXER_HPP
#define JACETTE_LEXER_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "jacette/error.hpp"

namespace jacette {

enum class Tok {
    Eof,
    Ident,
    Int,
    Float,
    Str,
    KwNode,
    KwEdge,
    KwWalker,
    KwAccess,
    KwHas,
    KwCan,
    KwTake,
    KwSpawn,
    KwHere,
    KwIf,
    KwElse,
    KwFor,
    KwIn,
    KwReport,
    KwDisengage,
    KwAnd,
    KwOr,
    KwNot,
    KwNull,
    KwTrue,
    KwFalse,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    Assign,
    Eq,
    Ne,
    Lt,
    Gt,
    Plus,
    Minus,
    Star,
    Slash,
    ArrowOut,   // -->
    ArrowIn,    // <--
    ArrowBoth,  // <-->
    SpawnOut,   // ++>
    SpawnIn,    // <++
};

// Human-readable token name for diagnostics and expected-token sets.
inline const char* tok_name(Tok t) {
    switch (t) {
    case Tok::Eof: return "end of input";
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Float: return "float";
    case Tok::Str: return "string";
    case Tok::KwNode: return "'node'";
    case Tok::KwEdge: return "'edge'";
    case Tok::KwWalker: return "'walker'";
    case Tok::KwAccess: return "'access'";
    case Tok::KwHas: return "'has'";
    case Tok::KwCan: return "'can'";
    case Tok::KwTake: return "'take'";
    case Tok::KwSpawn: return "'spawn'";
    case Tok::KwHere: return "'here'";
    case Tok::KwIf: return "'if'";
    case Tok::KwElse: return "'else'";
    case Tok::KwFor: return "'for'";
    case Tok::KwIn: return "'in'";
    case Tok::KwReport: return "'report'";
    case Tok::KwDisengage: return "'disengage'";
    case Tok::KwAnd: return "'and'";
    case Tok::KwOr: return "'or'";
    case Tok::KwNot: return "'not'";
    case Tok::KwNull: return "'null'";
    case Tok::KwTrue: return "'true'";
    case Tok::KwFalse: return "'false'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::Dot: return "'.'";
    case Tok::Assign: return "'='";
    case Tok::Eq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Gt: return "'>'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::ArrowOut: return "'-->'";
    case Tok::ArrowIn: return "'<--'";
    case Tok::ArrowBoth: return "'<-->'";
    case Tok::SpawnOut: return "'++>'";
    case Tok::SpawnIn: return "'<++'";
    }
    return "?";
}

struct Token {
    Tok kind = Tok::Eof;
    std::string text; // identifier spelling, number digits, decoded string body
    int line = 1;
    int col = 1;
};

// Tokenizes a whole source buffer up front. Comments run from // to end of
// line. Strings accept \n \" \\ escapes only; raw control bytes inside
// strings are rejected so that canonical printing stays within the dialect.
class Lexer {
  public:
    static std::vector<Token> tokenize(const std::string& src) {
        Lexer lx(src);
        std::vector<Token> out;
        for (;;) {
            Token t = lx.next();
            bool done = t.kind == Tok::Eof;
            out.push_back(std::move(t));
            if (done)
                return out;
        }
    }

  private:
    explicit Lexer(const std::string& src) : src_(src) {}

    static const std::unordered_map<std::string, Tok>& keywords() {
        static const std::unordered_map<std::string, Tok> kw = {
            {"node", Tok::KwNode},           {"edge", Tok::KwEdge},
            {"walker", Tok::KwWalker},       {"access", Tok::KwAccess},
            {"has", Tok::KwHas},             {"can", Tok::KwCan},
            {"take", Tok::KwTake},           {"spawn", Tok::KwSpawn},
            {"here", Tok::KwHere},           {"if", Tok::KwIf},
            {"else", Tok::KwElse},           {"for", Tok::KwFor},
            {"in", Tok::KwIn},               {"report", Tok::KwReport},
            {"disengage", Tok::KwDisengage}, {"and", Tok::KwAnd},
            {"or", Tok::KwOr},               {"not", Tok::KwNot},
            {"null", Tok::KwNull},           {"true", Tok::KwTrue},
            {"false", Tok::KwFalse},
        };
        return kw;
    }

    char cur() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
    char ahead(std::size_t n) const { return pos_ + n < src_.size() ? src_[pos_ + n] : '\0'; }

    void bump() {
        if (pos_ >= src_.size())
            return;
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_trivia() {
        for (;;) {
            char c = cur();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                bump();
            } else if (c == '/' && ahead(1) == '/') {
                while (cur() != '\0' && cur() != '\n')
                    bump();
            } else {
                return;
            }
        }
    }

    [[noreturn]] void fail(int line, int col, const std::string& what) const {
        throw Error(ErrKind::SyntaxError, what).at(line, col);
    }

    Token next() {
        skip_trivia();
        Token t;
        t.line = line_;
        t.col = col_;
        char c = cur();
        if (c == '\0') {
            t.kind = Tok::Eof;
            return t;
        }
        if (is_ident_start(c))
            return lex_word(t);
        if (c >= '0' && c <= '9')
            return lex_number(t);
        if (c == '"')
            return lex_string(t);
        return lex_symbol(t);
    }

    static bool is_ident_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool is_ident_part(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

    Token lex_word(Token t) {
        std::string w;
        while (is_ident_part(cur())) {
            w.push_back(cur());
            bump();
        }
        auto it = keywords().find(w);
        t.kind = it == keywords().end() ? Tok::Ident : it->second;
        t.text = std::move(w);
        return t;
    }

    Token lex_number(Token t) {
        std::string n;
        bool is_float = false;
        while (cur() >= '0' && cur() <= '9') {
            n.push_back(cur());
            bump();
        }
        if (cur() == '.' && ahead(1) >= '0' && ahead(1) <= '9') {
            is_float = true;
            n.push_back('.');
            bump();
            while (cur() >= '0' && cur() <= '9') {
                n.push_back(cur());
                bump();
            }
        }
        if (cur() == 'e' || cur() == 'E') {
            char sign = ahead(1);
            std::size_t digit_at = (sign == '+' || sign == '-') ? 2 : 1;
            if (ahead(digit_at) >= '0' && ahead(digit_at) <= '9') {
                is_float = true;
                n.push_back(cur());
                bump();
                if (sign == '+' || sign == '-') {
                    n.push_back(cur());
                    bump();
                }
                while (cur() >= '0' && cur() <= '9') {
                    n.push_back(cur());
                    bump();
                }
            }
        }
        t.kind = is_float ? Tok::Float : Tok::Int;
        t.text = std::move(n);
        return t;
    }

    Token lex_string(Token t) {
        bump(); // opening quote
        std::string s;
        for (;;) {
            char c = cur();
            if (c == '\0' || c == '\n')
                fail(t.line, t.col, "unterminated string literal");
            if (c == '"') {
                bump();
                break;
            }
            if (c == '\\') {
                char e = ahead(1);
                if (e == 'n')
                    s.push_back('\n');
                else if (e == '"')
                    s.push_back('"');
                else if (e == '\\')
                    s.push_back('\\');
                else
                    fail(line_, col_, std::string("unknown escape '\\") + e + "' in string");
                bump();
                bump();
                continue;
            }
            if (static_cast<unsigned char>(c) < 0x20)
                fail(line_, col_, "raw control byte in string literal");
            s.push_back(c);
            bump();
        }
        t.kind = Tok::Str;
        t.text = std::move(s);
        return t;
    }

    Token lex_symbol(Token t) {
        struct Sym {
            const char* spelling;
            Tok kind;
        };
        // Longest match first; order within a leading char matters.
        static const Sym syms[] = {
            {"<-->", Tok::ArrowBoth}, {"-->", Tok::ArrowOut}, {"<--", Tok::ArrowIn},
            {"++>", Tok::SpawnOut},   {"<++", Tok::SpawnIn},  {"==", Tok::Eq},
            {"!=", Tok::Ne},          {"{", Tok::LBrace},     {"}", Tok::RBrace},
            {"(", Tok::LParen},       {")", Tok::RParen},     {"[", Tok::LBracket},
            {"]", Tok::RBracket},     {",", Tok::Comma},      {";", Tok::Semi},
            {":", Tok::Colon},        {".", Tok::Dot},        {"=", Tok::Assign},
            {"<", Tok::Lt},           {">", Tok::Gt},         {"+", Tok::Plus},
            {"-", Tok::Minus},        {"*", Tok::Star},       {"/", Tok::Slash},
        };
        for (const Sym& s : syms) {
            std::size_t len = std::char_traits<char>::length(s.spelling);
            if (src_.compare(pos_, len, s.spelling) == 0) {
                for (std::size_t i = 0; i < len; ++i)
                    bump();
                t.kind = s.kind;
                t.text = s.spelling;
                return t;
            }
        }
        fail(t.line, t.col, std::string("unexpected character '") + cur() + "'");
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

} // namespace jacette

#endif
